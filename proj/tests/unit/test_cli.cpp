#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "itc/cli.hpp"
#include "itc/model.hpp"
#include "itc/tensor_io.hpp"

using namespace itc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "itc_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("config json round trip") {
  for (const auto& preset : cli::list_presets()) {
    const auto back = cli::config_from_json(cli::to_json(preset.config));
    CHECK(back == preset.config);
  }
  cli::RunConfig c;
  c.params.gamma = 0.123456789012345678;
  c.gamma_sweep = cli::Range{0.0, 1.0, 0.25};
  c.format = cli::Format::Json;
  c.n_min_index = -3;
  CHECK(cli::config_from_json(nlohmann::json::parse(cli::to_json(c).dump())) == c);
  CHECK(cli::config_from_json(nlohmann::json::object()) == cli::RunConfig{});

  CHECK_THROWS_AS(cli::config_from_json(nlohmann::json::array()), InvalidParameters);
  CHECK_THROWS_AS(cli::config_from_json({{"params", {{"t1", "one"}}}}), InvalidParameters);
  CHECK_THROWS_AS(cli::config_from_json({{"subcommand", "plot"}}), InvalidParameters);
  CHECK_THROWS_AS(io::params_from_json({{"boundary", "ring"}}), InvalidParameters);
}

TEST_CASE("presets") {
  const auto& all = cli::list_presets();
  CHECK(all.size() == 12);
  CHECK(cli::find_preset("fig2").config.params.gamma == 3.0);
  CHECK(cli::find_preset("fig4-topo").config.params.n_cells == 40);
  CHECK(cli::find_preset("fig5").config.params.statistics == Statistics::Boson);
  CHECK(cli::find_preset("fig6-col3").config.params.mu_offset == 1e-3);
  CHECK_THROWS_AS(cli::find_preset("fig7"), InvalidParameters);
  CHECK(cli::parse_subcommand("greens-obc") == cli::Subcommand::GreensObc);
  CHECK(cli::to_string(cli::Subcommand::Thermo) == "thermo");
}

TEST_CASE("exit code 2 on invalid parameters") {
  std::ostringstream log;
  cli::RunConfig c;
  c.subcommand = cli::Subcommand::Spectrum;
  c.params.gamma = -1.0;
  CHECK(cli::run(c, log) == cli::kExitInvalid);
  CHECK(log.str().find("gamma") != std::string::npos);

  c = cli::find_preset("fig6-col1").config;
  c.beta_grid = cli::Range{2.0, 1.0, 10};
  CHECK(cli::run(c, log) == cli::kExitInvalid);

  c = cli::find_preset("fig2").config;
  c.params.mu_offset = -1.0;
  CHECK(cli::run(c, log) == cli::kExitInvalid);
}

TEST_CASE("exit code 3 at an exceptional point") {
  cli::RunConfig c = cli::find_preset("fig4-topo").config;
  c.params.n_cells = 2;
  c.n_max = 100;
  c.tau_points = 16;
  c.output = scratch("ep.csv").string();
  ModelParams hermitian = c.params;
  hermitian.gamma = 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(model::open_hamiltonian(hermitian).matrix);
  c.params.gamma = es.eigenvalues().cwiseAbs().minCoeff();
  std::ostringstream log;
  CHECK(cli::run(c, log) == cli::kExitNumerical);
  // the message names the parameter point
  CHECK(log.str().find("\"gamma\"") != std::string::npos);
}

TEST_CASE("csv output with a metadata sidecar") {
  cli::RunConfig c = cli::find_preset("fig2").config;
  c.subcommand = cli::Subcommand::Resonances;
  c.params.statistics = Statistics::Boson;
  c.output = scratch("res.csv").string();
  std::ostringstream log;
  REQUIRE(cli::run(c, log) == cli::kExitOk);
  CHECK(first_line(c.output) == "n_M,k,re,im");
  const auto meta = nlohmann::json::parse(slurp(scratch("res.meta.json")));
  CHECK(meta["modes"] == nlohmann::json({-4, -2, 0, 2, 4}));
  CHECK(meta["subcommand"] == "resonances");
  CHECK(cli::config_from_json(meta["config"]) == c);

  c = cli::find_preset("fig2").config;
  c.params.n_cells = 8;
  c.n_max = 200;
  c.tau_points = 16;
  c.output = scratch("tau.csv").string();
  REQUIRE(cli::run(c, log) == cli::kExitOk);
  CHECK(first_line(c.output) == "i,j,x,s,re,im");
  const auto tmeta = nlohmann::json::parse(slurp(scratch("tau.meta.json")));
  CHECK(tmeta["domain"] == "space-tau");
  CHECK(tmeta["shape"] == nlohmann::json({2, 2, 8, 16}));
  CHECK(tmeta["x_label"] == "r");
  CHECK(tmeta.contains("converged"));
  CHECK(tmeta.contains("peaks"));
}

TEST_CASE("json documents") {
  std::ostringstream log;
  cli::RunConfig c = cli::find_preset("fig6-col2").config;
  c.beta_grid = cli::Range{0.1, 4.0, 20};
  c.format = cli::Format::Json;
  c.output = scratch("thermo.json").string();
  REQUIRE(cli::run(c, log) == cli::kExitOk);
  const auto doc = nlohmann::json::parse(slurp(c.output));
  CHECK(doc["columns"] == nlohmann::json({"beta", "U", "F", "S", "mu", "im_residual"}));
  CHECK(doc["rows"].size() == 20);
  CHECK(doc["metadata"]["normalization"] == "per-site");
  for (const auto& row : doc["rows"]) {
    const double beta = row[0], u = row[1], f = row[2], s = row[3];
    CHECK(std::abs(s - beta * (u - f)) < 1e-10);
  }

  c = cli::RunConfig{};
  c.subcommand = cli::Subcommand::Phase;
  c.gamma_sweep = cli::Range{0.0, 4.0, 0.5};
  c.format = cli::Format::Json;
  c.output = scratch("phase.json").string();
  REQUIRE(cli::run(c, log) == cli::kExitOk);
  const auto phases = nlohmann::json::parse(slurp(c.output));
  CHECK(phases["rows"].size() == 9);
  CHECK(phases["rows"][2][1] == "gapless");
}
