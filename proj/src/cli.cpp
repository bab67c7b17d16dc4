#include "itc/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "itc/analysis.hpp"
#include "itc/greens.hpp"
#include "itc/model.hpp"
#include "itc/spectral.hpp"
#include "itc/tensor_io.hpp"
#include "itc/thermo.hpp"

namespace itc::cli {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::pair<Subcommand, std::string_view> kSubcommands[] = {
    {Subcommand::Spectrum, "spectrum"},
    {Subcommand::Phase, "phase"},
    {Subcommand::GreensMatsubara, "greens-matsubara"},
    {Subcommand::GreensTau, "greens-tau"},
    {Subcommand::GreensObc, "greens-obc"},
    {Subcommand::GreensRealtime, "greens-realtime"},
    {Subcommand::Resonances, "resonances"},
    {Subcommand::Thermo, "thermo"},
};

std::string_view describe(Subcommand c) {
  switch (c) {
    case Subcommand::Spectrum: return "band energies over a gamma sweep";
    case Subcommand::Phase: return "PT phase label over a gamma sweep";
    case Subcommand::GreensMatsubara: return "G(k, n) on a range of Matsubara indices";
    case Subcommand::GreensTau: return "G(r, tau) for the periodic chain";
    case Subcommand::GreensObc: return "site-resolved G(x, y, tau) for the open chain";
    case Subcommand::GreensRealtime: return "G(r, t) in real time with growth-rate fits";
    case Subcommand::Resonances: return "Matsubara modes satisfying the resonance condition";
    case Subcommand::Thermo: return "U, F, S per site over a beta grid";
    default: return "";
  }
}

json range_json(const Range& r) { return {r.lo, r.hi, r.step}; }

Range range_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidParameters("range must be [lo, hi, step]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Range parse_range(const std::string& text) {
  Range r;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.step) || c1 != ':' || c2 != ':' || !in.eof())
    throw InvalidParameters("expected lo:hi:step, got '" + text + "'");
  return r;
}

std::vector<double> stepped(const Range& r, const char* what) {
  if (!(r.step > 0.0) || r.hi < r.lo) throw InvalidParameters(std::string(what) + ": need step > 0 and hi >= lo");
  const auto count = static_cast<long>(std::floor((r.hi - r.lo) / r.step + 1e-9)) + 1;
  if (count > 1000000) throw InvalidParameters(std::string(what) + ": more than 1e6 points");
  std::vector<double> out;
  for (long i = 0; i < count; ++i) out.push_back(r.lo + r.step * static_cast<double>(i));
  return out;
}

void validate(const RunConfig& c) {
  c.params.validate();
  if (c.n_max < 1) throw InvalidParameters("n_max must be >= 1");
  if (c.tau_points < 2) throw InvalidParameters("tau_points must be >= 2");
  if (c.n_min_index > c.n_max_index) throw InvalidParameters("matsubara index range is empty");
  if (c.beta_grid.step < 2 || !(c.beta_grid.lo > 0.0) || !(c.beta_grid.hi > c.beta_grid.lo))
    throw InvalidParameters("beta grid needs 0 < lo < hi and >= 2 points");
  if (c.subcommand == Subcommand::GreensRealtime && (c.fit_r < 0 || c.fit_r >= c.params.n_cells))
    throw InvalidParameters("fit_r outside the chain");
}

// What a subcommand produced: metadata plus a table in both encodings.
struct Result {
  json meta;
  std::vector<std::string> columns;
  std::function<void(std::ostream&)> csv;
  std::function<json()> rows;
};

Result tensor_result(const greens::GreensTensor& g) {
  Result r;
  r.meta = io::tensor_metadata(g);
  r.columns = {"i", "j", "x", "s", "re", "im"};
  r.csv = [&g](std::ostream& os) { io::write_tensor_csv(os, g); };
  r.rows = [&g] { return io::tensor_document(g)["rows"]; };
  return r;
}

Result table_result(std::vector<std::string> columns, std::vector<std::vector<json>> table) {
  auto shared = std::make_shared<std::vector<std::vector<json>>>(std::move(table));
  Result r;
  r.columns = columns;
  r.csv = [shared, columns](std::ostream& os) {
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& row : *shared) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        os << (i ? "," : "");
        if (row[i].is_string()) os << row[i].get<std::string>();
        else if (row[i].is_number_float()) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.17g", row[i].get<double>());
          os << buf;
        } else os << row[i].dump();
      }
      os << '\n';
    }
  };
  r.rows = [shared] { return json(*shared); };
  return r;
}

std::vector<double> gammas(const RunConfig& c) {
  if (!c.gamma_sweep) return {c.params.gamma};
  return stepped(*c.gamma_sweep, "gamma sweep");
}

void write(const RunConfig& c, Result& r) {
  r.meta["config"] = to_json(c);
  r.meta["version"] = ITC_VERSION;
  r.meta["subcommand"] = std::string(to_string(c.subcommand));
  const bool to_stdout = c.output.empty() || c.output == "-";

  if (c.format == Format::Json) {
    const json doc = {{"metadata", r.meta}, {"columns", r.columns}, {"rows", r.rows()}};
    if (to_stdout) {
      std::cout << doc.dump(1) << '\n';
      return;
    }
    std::ofstream os(c.output);
    if (!os) throw InvalidParameters("cannot write '" + c.output + "'");
    os << doc.dump(1) << '\n';
    return;
  }
  if (to_stdout) {
    r.csv(std::cout);
    return;
  }
  std::ofstream os(c.output);
  if (!os) throw InvalidParameters("cannot write '" + c.output + "'");
  r.csv(os);
  auto sidecar = std::filesystem::path(c.output).replace_extension(".meta.json");
  std::ofstream ms(sidecar);
  if (!ms) throw InvalidParameters("cannot write '" + sidecar.string() + "'");
  ms << r.meta.dump(1) << '\n';
}

json peaks_json(const analysis::PeakReport& p) {
  return {{"modes", p.peaks}, {"dominant", p.dominant()}, {"median", p.median}, {"window", p.window}};
}

void imag_time(const RunConfig& c, ModelParams params, std::ostream& log) {
  greens::ImagTimeOptions opts;
  opts.n_max = c.n_max;
  opts.tau_points = c.tau_points;
  opts.tail_correction = c.tail_correction;
  const auto g = greens::greens_imag_time(params, opts);
  for (const auto& w : g.matsubara_sum.meta().warnings) log << w << '\n';
  const auto& tensor = c.spectral_path ? g.spectral : g.matsubara_sum;

  Result r = tensor_result(tensor);
  r.meta["max_deviation"] = g.max_deviation;
  r.meta["expected_error"] = g.expected_error;
  r.meta["converged"] = g.converged;
  r.meta["peaks"] = peaks_json(analysis::dominant_modes(tensor));
  if (params.boundary == Boundary::Open) {
    const auto sys = spectral::decompose(model::open_hamiltonian(params).matrix);
    const auto edges = spectral::detect_edge_states(sys);
    json list = json::array();
    for (std::size_t i = 0; i < edges.indices.size(); ++i)
      list.push_back({{"re", edges.energies[i].real()},
                      {"im", edges.energies[i].imag()},
                      {"ipr", edges.localization[i]}});
    r.meta["edge_states"] = list;
    const int last = params.n_cells - 1;
    r.meta["edge_peaks"] = {{"first_A", peaks_json(analysis::dominant_modes(tensor, 0, 0, 0))},
                            {"last_B", peaks_json(analysis::dominant_modes(tensor, 1, 1, last))}};
  }
  write(c, r);
}

void execute(const RunConfig& c, std::ostream& log) {
  const ModelParams& p = c.params;
  switch (c.subcommand) {
    case Subcommand::Spectrum: {
      std::vector<std::vector<json>> rows;
      const bool pbc = p.boundary == Boundary::Periodic;
      for (double g : gammas(c)) {
        ModelParams q = p;
        q.gamma = g;
        const auto eps = model::spectrum(q);
        if (pbc) {
          const auto ks = model::k_grid(q.n_cells);
          for (std::size_t m = 0; m < eps.size(); ++m)
            rows.push_back({g, ks[m / 2], m % 2 ? "+" : "-", eps[m].real(), eps[m].imag()});
        } else {
          for (std::size_t m = 0; m < eps.size(); ++m)
            rows.push_back({g, static_cast<int>(m), eps[m].real(), eps[m].imag()});
        }
      }
      Result r = table_result(pbc ? std::vector<std::string>{"gamma", "k", "band", "re", "im"}
                                  : std::vector<std::string>{"gamma", "mode", "re", "im"},
                              std::move(rows));
      write(c, r);
      return;
    }
    case Subcommand::Phase: {
      std::vector<std::vector<json>> rows;
      for (double g : gammas(c)) {
        ModelParams q = p;
        q.gamma = g;
        rows.push_back({g, std::string(model::to_string(model::classify_phase(q)))});
      }
      Result r = table_result({"gamma", "phase"}, std::move(rows));
      r.meta["boundaries"] = {std::abs(p.t2 - p.t1), p.t1 + p.t2};
      write(c, r);
      return;
    }
    case Subcommand::GreensMatsubara: {
      const greens::MatsubaraGrid grid{p.beta, p.statistics, c.n_min_index, c.n_max_index};
      const auto g = greens::greens_matsubara(p, grid);
      Result r = tensor_result(g);
      write(c, r);
      return;
    }
    case Subcommand::GreensTau:
      imag_time(c, p, log);
      return;
    case Subcommand::GreensObc: {
      ModelParams q = p;
      q.boundary = Boundary::Open;
      imag_time(c, q, log);
      return;
    }
    case Subcommand::GreensRealtime: {
      const auto t = stepped(c.t_grid, "time grid");
      const auto g = greens::greens_real_time(p, t);
      Result r = tensor_result(g);
      const auto series = g.series(0, 0, c.fit_r);
      r.meta["growth_rates"] = {
          {"r", c.fit_r},
          {"entry", {1, 1}},
          {"early", analysis::log_growth_rate(t, series, c.early_window.lo, c.early_window.hi)},
          {"early_window", {c.early_window.lo, c.early_window.hi}},
          {"late", analysis::log_growth_rate(t, series, c.late_window.lo, c.late_window.hi)},
          {"late_window", {c.late_window.lo, c.late_window.hi}}};
      write(c, r);
      return;
    }
    case Subcommand::Resonances: {
      const auto rep = greens::find_resonances(p);
      std::vector<std::vector<json>> rows;
      for (const auto& e : rep.entries) rows.push_back({e.n_m, e.k, e.energy.real(), e.energy.imag()});
      Result r = table_result({"n_M", "k", "re", "im"}, std::move(rows));
      r.meta["mu_used"] = rep.mu_used;
      r.meta["tol_re"] = rep.tol_re;
      r.meta["tol_im"] = rep.tol_im;
      r.meta["modes"] = rep.modes();
      write(c, r);
      return;
    }
    case Subcommand::Thermo: {
      const auto grid = thermo::default_beta_grid(static_cast<int>(c.beta_grid.step), c.beta_grid.lo, c.beta_grid.hi);
      const auto series = thermo::thermo_sweep(p, grid);
      Result r;
      r.meta = io::thermo_metadata(series);
      r.columns = {"beta", "U", "F", "S", "mu", "im_residual"};
      r.csv = [&series](std::ostream& os) { io::write_thermo_csv(os, series); };
      r.rows = [&series] { return io::thermo_document(series)["rows"]; };
      write(c, r);
      return;
    }
  }
}

RunConfig preset_config(Subcommand s, ModelParams p) {
  RunConfig c;
  c.subcommand = s;
  c.params = p;
  return c;
}

std::vector<Preset> build_presets() {
  std::vector<Preset> out;
  auto add = [&](std::string name, std::string description, RunConfig c) {
    c.preset = name;
    out.push_back({std::move(name), std::move(description), std::move(c)});
  };
  ModelParams base;
  base.t1 = 1.0;
  base.t2 = 2.0;

  RunConfig fig1b = preset_config(Subcommand::Spectrum, base);
  fig1b.gamma_sweep = Range{0.0, 4.0, 0.05};
  add("fig1b", "PBC spectrum over gamma in [0, 4], t2 = 2", fig1b);

  ModelParams fig2 = base;
  fig2.gamma = 3.0;
  fig2.beta = 2.0 * kPi;
  add("fig2", "G(r, tau), gamma = 3, t2 = 2, beta = 2 pi", preset_config(Subcommand::GreensTau, fig2));

  for (int row = 1; row <= 4; ++row) {
    ModelParams q = base;
    q.gamma = row;
    q.beta = 4.0 * kPi;
    add("fig3-row" + std::to_string(row), "G(r, tau), gamma = " + std::to_string(row) + ", t2 = 2, beta = 4 pi",
        preset_config(Subcommand::GreensTau, q));
  }

  ModelParams obc = base;
  obc.gamma = 1.0;
  obc.beta = 3.0 * kPi;
  obc.boundary = Boundary::Open;
  obc.n_cells = 40;
  obc.statistics = Statistics::Fermion;
  ModelParams trivial = obc;
  trivial.t2 = 0.5;
  add("fig4-trivial", "open chain, t2 = 0.5, gamma = 1, beta = 3 pi, N = 40", preset_config(Subcommand::GreensObc, trivial));
  add("fig4-topo", "open chain, t2 = 2, gamma = 1, beta = 3 pi, N = 40", preset_config(Subcommand::GreensObc, obc));

  ModelParams fig5 = base;
  fig5.gamma = 3.028;
  fig5.beta = 4.0;
  fig5.statistics = Statistics::Boson;
  add("fig5", "real-time G(r = 20, t), gamma = 3.028, t2 = 2, beta = 4, bosons",
      preset_config(Subcommand::GreensRealtime, fig5));

  const double col_gamma[] = {0.0, 1.5, 3.5};
  for (int col = 1; col <= 3; ++col) {
    ModelParams q = base;
    q.gamma = col_gamma[col - 1];
    q.mu_offset = 1e-3;
    std::ostringstream d;
    d << "U, F, S over beta, gamma = " << q.gamma << ", t2 = 2, mu offset 1e-3";
    add("fig6-col" + std::to_string(col), d.str(), preset_config(Subcommand::Thermo, q));
  }
  return out;
}

std::string point_description(const ModelParams& p) { return io::to_json(p).dump(); }

}  // namespace

std::string_view to_string(Subcommand c) {
  for (const auto& [value, name] : kSubcommands)
    if (value == c) return name;
  return "unknown";
}

Subcommand parse_subcommand(std::string_view text) {
  for (const auto& [value, name] : kSubcommands)
    if (name == text) return value;
  throw InvalidParameters("unknown subcommand '" + std::string(text) + "'");
}

std::string_view to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  throw InvalidParameters("unknown format '" + std::string(text) + "' (expected csv|json)");
}

json to_json(const RunConfig& c) {
  json j = {{"subcommand", std::string(to_string(c.subcommand))},
            {"preset", c.preset},
            {"params", io::to_json(c.params)},
            {"n_max", c.n_max},
            {"tau_points", c.tau_points},
            {"tail_correction", c.tail_correction},
            {"spectral_path", c.spectral_path},
            {"matsubara_range", {c.n_min_index, c.n_max_index}},
            {"beta_grid", range_json(c.beta_grid)},
            {"t_grid", range_json(c.t_grid)},
            {"fit_r", c.fit_r},
            {"early_window", range_json(c.early_window)},
            {"late_window", range_json(c.late_window)},
            {"output", c.output},
            {"format", std::string(to_string(c.format))}};
  j["gamma_sweep"] = c.gamma_sweep ? range_json(*c.gamma_sweep) : json(nullptr);
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidParameters("config must be a JSON object");
  RunConfig c;
  try {
    if (j.contains("subcommand")) c.subcommand = parse_subcommand(j.at("subcommand").get<std::string>());
    c.preset = j.value("preset", c.preset);
    if (j.contains("params")) c.params = io::params_from_json(j.at("params"));
    c.n_max = j.value("n_max", c.n_max);
    c.tau_points = j.value("tau_points", c.tau_points);
    c.tail_correction = j.value("tail_correction", c.tail_correction);
    c.spectral_path = j.value("spectral_path", c.spectral_path);
    if (j.contains("matsubara_range")) {
      c.n_min_index = j.at("matsubara_range").at(0).get<int>();
      c.n_max_index = j.at("matsubara_range").at(1).get<int>();
    }
    if (j.contains("beta_grid")) c.beta_grid = range_from_json(j.at("beta_grid"));
    if (j.contains("t_grid")) c.t_grid = range_from_json(j.at("t_grid"));
    c.fit_r = j.value("fit_r", c.fit_r);
    if (j.contains("early_window")) c.early_window = range_from_json(j.at("early_window"));
    if (j.contains("late_window")) c.late_window = range_from_json(j.at("late_window"));
    c.output = j.value("output", c.output);
    if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
    if (j.contains("gamma_sweep") && !j.at("gamma_sweep").is_null())
      c.gamma_sweep = range_from_json(j.at("gamma_sweep"));
  } catch (const json::exception& e) {
    throw InvalidParameters(std::string("bad config: ") + e.what());
  }
  return c;
}

const std::vector<Preset>& list_presets() {
  static const std::vector<Preset> presets = build_presets();
  return presets;
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : list_presets())
    if (p.name == name) return p;
  throw InvalidParameters("unknown preset '" + std::string(name) + "'");
}

int run(const RunConfig& config, std::ostream& log) {
  try {
    validate(config);
    execute(config, log);
    return kExitOk;
  } catch (const InvalidParameters& e) {
    log << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NumericalError& e) {
    log << "numerical error at " << point_description(config.params) << ": " << e.what() << '\n';
    return kExitNumerical;
  }
}

namespace {

// Flags shared by every computing subcommand; applied on top of the preset
// or config file only when given on the command line.
struct Flags {
  std::string preset, config_file, gamma_sweep, beta_grid, t_grid, early, late, boundary, statistics, format, output;
  double t1 = 0, t2 = 0, gamma = 0, beta = 0, mu_offset = 0;
  int n_cells = 0, n_max = 0, tau_points = 0, fit_r = 0;
  std::string n_range;
  bool no_tail = false, spectral = false, dump = false;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;

  template <class T, class F>
  void add(CLI::App* app, const std::string& name, T& target, const std::string& help, F apply) {
    CLI::Option* opt = app->add_option(name, target, help);
    setters.emplace_back(opt, [&target, apply](RunConfig& c) { apply(c, target); });
  }
};

void register_flags(CLI::App* app, Flags& f) {
  app->add_option("--preset", f.preset, "start from a named preset (see `itc presets`)");
  app->add_option("--config", f.config_file, "start from a JSON config file");
  app->add_flag("--dump-config", f.dump, "print the resolved config as JSON and exit");
  f.add(app, "--t1", f.t1, "intra-cell hopping", [](RunConfig& c, double v) { c.params.t1 = v; });
  f.add(app, "--t2", f.t2, "inter-cell hopping", [](RunConfig& c, double v) { c.params.t2 = v; });
  f.add(app, "--gamma", f.gamma, "gain/loss strength", [](RunConfig& c, double v) { c.params.gamma = v; });
  f.add(app, "--beta", f.beta, "inverse temperature", [](RunConfig& c, double v) { c.params.beta = v; });
  f.add(app, "--mu-offset", f.mu_offset, "chemical potential offset (> 0)",
        [](RunConfig& c, double v) { c.params.mu_offset = v; });
  f.add(app, "-N,--n-cells", f.n_cells, "unit cells", [](RunConfig& c, int v) { c.params.n_cells = v; });
  f.add(app, "--boundary", f.boundary, "pbc|obc",
        [](RunConfig& c, const std::string& v) { c.params.boundary = parse_boundary(v); });
  f.add(app, "--stat", f.statistics, "boson|fermion",
        [](RunConfig& c, const std::string& v) { c.params.statistics = parse_statistics(v); });
  f.add(app, "--gamma-sweep", f.gamma_sweep, "lo:hi:step (spectrum, phase)",
        [](RunConfig& c, const std::string& v) { c.gamma_sweep = parse_range(v); });
  f.add(app, "--n-max", f.n_max, "Matsubara cutoff", [](RunConfig& c, int v) { c.n_max = v; });
  f.add(app, "--tau-points", f.tau_points, "imaginary-time samples", [](RunConfig& c, int v) { c.tau_points = v; });
  f.add(app, "--n-range", f.n_range, "Matsubara index range n_min:n_max (greens-matsubara)",
        [](RunConfig& c, const std::string& v) {
          char colon = 0;
          std::istringstream in(v);
          if (!(in >> c.n_min_index >> colon >> c.n_max_index) || colon != ':' || !in.eof())
            throw InvalidParameters("expected n_min:n_max, got '" + v + "'");
        });
  f.add(app, "--beta-grid", f.beta_grid, "lo:hi:points, log-spaced (thermo)",
        [](RunConfig& c, const std::string& v) { c.beta_grid = parse_range(v); });
  f.add(app, "--t-grid", f.t_grid, "lo:hi:step (greens-realtime)",
        [](RunConfig& c, const std::string& v) { c.t_grid = parse_range(v); });
  f.add(app, "--fit-r", f.fit_r, "cell for growth-rate fits", [](RunConfig& c, int v) { c.fit_r = v; });
  f.add(app, "--early", f.early, "early fit window lo:hi:0",
        [](RunConfig& c, const std::string& v) { c.early_window = parse_range(v); });
  f.add(app, "--late", f.late, "late fit window lo:hi:0",
        [](RunConfig& c, const std::string& v) { c.late_window = parse_range(v); });
  f.add(app, "--format", f.format, "csv|json",
        [](RunConfig& c, const std::string& v) { c.format = parse_format(v); });
  f.add(app, "-o,--output", f.output, "output file (default stdout)",
        [](RunConfig& c, const std::string& v) { c.output = v; });
  CLI::Option* no_tail = app->add_flag("--no-tail", f.no_tail, "plain truncated Matsubara sum");
  f.setters.emplace_back(no_tail, [](RunConfig& c) { c.tail_correction = false; });
  CLI::Option* spectral = app->add_flag("--spectral", f.spectral, "export the spectral route");
  f.setters.emplace_back(spectral, [](RunConfig& c) { c.spectral_path = true; });
}

RunConfig resolve(Subcommand sub, const Flags& f) {
  RunConfig c;
  if (!f.preset.empty()) c = find_preset(f.preset).config;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw InvalidParameters("cannot read config '" + f.config_file + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InvalidParameters(std::string("config is not valid JSON: ") + e.what());
    }
    c = config_from_json(j);
  }
  if (f.preset.empty() && f.config_file.empty() && sub == Subcommand::Thermo) c.params.mu_offset = 1e-3;
  c.subcommand = sub;
  for (const auto& [opt, apply] : f.setters)
    if (opt->count() > 0) apply(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imaginary-time crystal toolkit for the gain/loss SSH chain"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ITC_VERSION);

  CLI::App* presets = app.add_subcommand("presets", "list named parameter presets");
  std::vector<std::pair<Subcommand, CLI::App*>> commands;
  Flags flags;
  for (const auto& [value, name] : kSubcommands) {
    CLI::App* sub = app.add_subcommand(std::string(name), std::string(describe(value)));
    register_flags(sub, flags);
    commands.emplace_back(value, sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  if (presets->parsed()) {
    for (const auto& p : list_presets())
      std::cout << p.name << '\t' << to_string(p.config.subcommand) << '\t' << p.description << '\t'
                << io::to_json(p.config.params).dump() << '\n';
    return kExitOk;
  }
  for (const auto& [value, sub] : commands) {
    if (!sub->parsed()) continue;
    RunConfig config;
    try {
      config = resolve(value, flags);
    } catch (const InvalidParameters& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitInvalid;
    }
    if (flags.dump) {
      std::cout << to_json(config).dump(1) << '\n';
      return kExitOk;
    }
    return run(config, std::cerr);
  }
  return kExitInvalid;
}

}  // namespace itc::cli
