#pragma once

#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "itc/params.hpp"

namespace itc::cli {

enum class Subcommand {
  Spectrum,
  Phase,
  GreensMatsubara,
  GreensTau,
  GreensObc,
  GreensRealtime,
  Resonances,
  Thermo,
};

enum class Format { Csv, Json };

std::string_view to_string(Subcommand c);
Subcommand parse_subcommand(std::string_view text);
std::string_view to_string(Format f);
Format parse_format(std::string_view text);

/// Inclusive range lo:hi with a step (sweeps) or a point count (beta grid).
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  bool operator==(const Range&) const = default;
};

struct RunConfig {
  Subcommand subcommand = Subcommand::GreensTau;
  std::string preset;
  ModelParams params = {.t1 = 1.0, .t2 = 2.0, .gamma = 3.0};

  std::optional<Range> gamma_sweep;   ///< spectrum / phase: gamma lo:hi:step
  int n_max = 10000;                  ///< Matsubara cutoff for greens-tau / greens-obc
  int tau_points = 512;
  bool tail_correction = true;
  bool spectral_path = false;         ///< export the spectral route instead of the Matsubara sum
  int n_min_index = -16;              ///< greens-matsubara index range n_min..n_max_index
  int n_max_index = 15;
  Range beta_grid{0.05, 8.0, 400};    ///< thermo: lo, hi, points (log-spaced)
  Range t_grid{0.0, 80.0, 0.05};      ///< greens-realtime: 0..hi in steps
  int fit_r = 20;                     ///< greens-realtime: cell used for the growth-rate fits
  Range early_window{1.0, 3.0, 0.0};
  Range late_window{60.0, 80.0, 0.0};

  std::string output;                 ///< empty or "-": stdout
  Format format = Format::Csv;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

struct Preset {
  std::string name;
  std::string description;
  RunConfig config;
};

/// Named parameter sets: fig1b, fig2, fig3-row1..4, fig4-trivial, fig4-topo,
/// fig5, fig6-col1..3.
const std::vector<Preset>& list_presets();
const Preset& find_preset(std::string_view name);

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

/// Executes `config`, writing data to config.output (CSV plus a .meta.json
/// sidecar, or one JSON document). Diagnostics go to `log`.
int run(const RunConfig& config, std::ostream& log);

/// Command-line entry point.
int main(int argc, char** argv);

}  // namespace itc::cli
