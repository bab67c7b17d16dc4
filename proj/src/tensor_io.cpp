#include "itc/tensor_io.hpp"

#include <cstdio>
#include <ostream>

namespace itc::io {

using nlohmann::json;

namespace {

// 17 significant digits: reads back bit-exact.
std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json to_json(const ModelParams& p) {
  return {{"t1", p.t1},
          {"t2", p.t2},
          {"gamma", p.gamma},
          {"n_cells", p.n_cells},
          {"boundary", std::string(to_string(p.boundary))},
          {"statistics", std::string(to_string(p.statistics))},
          {"beta", p.beta},
          {"mu_offset", p.mu_offset}};
}

ModelParams params_from_json(const json& j) {
  if (!j.is_object()) throw InvalidParameters("model parameters must be a JSON object");
  ModelParams p;
  try {
    p.t1 = j.value("t1", p.t1);
    p.t2 = j.value("t2", p.t2);
    p.gamma = j.value("gamma", p.gamma);
    p.n_cells = j.value("n_cells", p.n_cells);
    p.beta = j.value("beta", p.beta);
    p.mu_offset = j.value("mu_offset", p.mu_offset);
    if (j.contains("boundary")) p.boundary = parse_boundary(j.at("boundary").get<std::string>());
    if (j.contains("statistics")) p.statistics = parse_statistics(j.at("statistics").get<std::string>());
  } catch (const json::exception& e) {
    throw InvalidParameters(std::string("bad model parameters: ") + e.what());
  }
  return p;
}

json tensor_metadata(const greens::GreensTensor& g) {
  const auto& m = g.meta();
  return {{"domain", std::string(greens::to_string(g.domain()))},
          {"shape", {2, 2, g.nx(), g.ns()}},
          {"columns", {"i", "j", "x", "s", "re", "im"}},
          {"params", to_json(m.params)},
          {"mu", m.mu},
          {"method", m.method},
          {"x_label", m.x_label},
          {"x_axis", m.x_axis},
          {"s_label", m.s_label},
          {"s_axis", m.s_axis},
          {"skipped_k", m.skipped_k},
          {"warnings", m.warnings}};
}

void write_tensor_csv(std::ostream& os, const greens::GreensTensor& g) {
  os << "i,j,x,s,re,im\n";
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int x = 0; x < g.nx(); ++x)
        for (int s = 0; s < g.ns(); ++s) {
          const cplx v = g(i, j, x, s);
          os << i + 1 << ',' << j + 1 << ',' << x << ',' << s << ',' << exact(v.real()) << ','
             << exact(v.imag()) << '\n';
        }
}

json tensor_document(const greens::GreensTensor& g) {
  json doc = {{"metadata", tensor_metadata(g)}};
  json rows = json::array();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int x = 0; x < g.nx(); ++x)
        for (int s = 0; s < g.ns(); ++s) {
          const cplx v = g(i, j, x, s);
          rows.push_back({i + 1, j + 1, x, s, v.real(), v.imag()});
        }
  doc["columns"] = {"i", "j", "x", "s", "re", "im"};
  doc["rows"] = std::move(rows);
  return doc;
}

json thermo_metadata(const thermo::ThermoSeries& series) {
  return {{"params", to_json(series.params)},
          {"normalization", series.normalization},
          {"points", series.size()},
          {"columns", {"beta", "U", "F", "S", "mu", "im_residual"}}};
}

void write_thermo_csv(std::ostream& os, const thermo::ThermoSeries& t) {
  os << "beta,U,F,S,mu,im_residual\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    os << exact(t.beta[i]) << ',' << exact(t.U[i]) << ',' << exact(t.F[i]) << ',' << exact(t.S[i]) << ','
       << exact(t.mu[i]) << ',' << exact(t.im_residual[i]) << '\n';
}

json thermo_document(const thermo::ThermoSeries& t) {
  json rows = json::array();
  for (std::size_t i = 0; i < t.size(); ++i)
    rows.push_back({t.beta[i], t.U[i], t.F[i], t.S[i], t.mu[i], t.im_residual[i]});
  return {{"metadata", thermo_metadata(t)}, {"columns", {"beta", "U", "F", "S", "mu", "im_residual"}}, {"rows", rows}};
}

}  // namespace itc::io
