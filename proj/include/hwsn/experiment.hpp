// Experiment configuration, sweep execution and comparison tables.
//
// Config files are JSON objects. Every key is optional; an empty file means
// the reference defaults. Unknown keys are rejected with their key path.
//
//   {
//     "rng": "mt19937_64",
//     "network": {"N": 100, "R": 50, "r": 25, "theta_deg": 180,
//                 "rfd_battery_j": 10, "ffd_battery_j": 100,
//                 "rfd_threshold_j": 0.05, "ffd_threshold_j": 0.5,
//                 "report_bits": 2000, "token_bits": 64, "ctl_bits": 64,
//                 "idle_j_per_round": 0, "sensing_radius_m": 10, "tx_range_m": 30,
//                 "rfd_positions": [[rho_m, phi_deg], ...]},
//     (network.n_s / n_t may be given; they must match theta_deg and R/r)
//     "radio": {"e_elec_nj": 50, "eps_fs_pj": 10, "eps_mp_pj": 0.0013},
//     "baselines": {
//       "pegasis": {"side_m": 100, "chain_start": "farthest"},
//       "epegasis": {"R": 50, "levels": 2, "r": 25, "election": "max-residual"},
//       "chiron": {"R": 100, "theta_area_deg": 90, "levels": 2, "sectors": 2,
//                  "r": 50, "theta_sector_deg": 45}},
//     "experiment": {"schemes": ["chain1"], "approaches": ["one-hop"],
//                    "sweep": {"n_s": [2], "n_t": [2], "seeds": [1]},
//                    "output_dir": "out", "max_rounds": 10000000, "stop_at": "fnd",
//                    "jobs": 1,
//                    "flags": {"fusion": false, "setup_energy": true,
//                              "literal_fig4": false, "strict_range": false,
//                              "rfd_sleep": false}}
//   }
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hwsn/sim_engine.hpp"

namespace hwsn {

struct ExperimentSpec {
  std::vector<Scheme> schemes{Scheme::Chain1};
  std::vector<Approach> approaches{Approach::OneHop};
  bool approaches_explicit = false;
  std::vector<int> sectors;  // n_s axis
  std::vector<int> tracks;   // n_t axis
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "out";
  ProtocolFlags flags;
  std::int64_t max_rounds = 10'000'000;
  StopAt stop_at = StopAt::Fnd;
  int jobs = 1;
};

struct LoadedConfig {
  NetworkConfig network;
  BaselineConfig baseline;
  ExperimentSpec experiment;
  nlohmann::ordered_json resolved;  // every value, defaults filled in
};

/// Parses and validates a config document; throws ConfigError with the key path.
LoadedConfig parse_config(const nlohmann::json& doc);
LoadedConfig parse_config_text(const std::string& text);
LoadedConfig load_config(const std::filesystem::path& path);

/// Resolved JSON echo of a config (used in every output file).
nlohmann::ordered_json resolve_config(const NetworkConfig& network, const BaselineConfig& baseline,
                                      const ExperimentSpec& experiment);

struct Cell {
  Scheme scheme = Scheme::Chain1;
  std::optional<Approach> approach;  // none for baselines
  int n_s = 0;                       // 0 for baselines
  int n_t = 0;
  std::uint64_t seed = 1;

  std::string id() const;
};

/// Deterministic enumeration: scheme, approach, n_t, n_s, seed. Baselines
/// appear once per seed.
std::vector<Cell> enumerate_cells(const LoadedConfig& config);

/// Network config for a cell (partition from n_s/n_t, seed applied).
NetworkConfig cell_network(const LoadedConfig& config, const Cell& cell);
SimOptions cell_options(const LoadedConfig& config, const Cell& cell);

struct CellOutcome {
  Cell cell;
  SimResult result;
  int measured_max_path = 0;  // first round
  double analytic_max_path = 0.0;
};

CellOutcome run_cell(const LoadedConfig& config, const Cell& cell);

/// Per-round CSV with '#' header lines carrying seed, scheme and resolved config.
std::string format_round_csv(const LoadedConfig& config, const CellOutcome& outcome);
nlohmann::ordered_json summary_json(const LoadedConfig& config, const CellOutcome& outcome);

struct ExperimentRun {
  std::filesystem::path manifest;
  std::vector<CellOutcome> outcomes;
};

/// Runs every cell and writes cells/<id>.csv, cells/<id>.json and
/// manifest.json under `output_dir`. Files are written to a temporary name
/// and renamed; on failure everything written by this call is removed.
ExperimentRun run_experiment(const LoadedConfig& config, const std::filesystem::path& output_dir,
                             int jobs = 1);

struct ComparisonRow {
  std::string scheme;
  std::string approach;  // "-" for baselines
  int n_s = 0;
  int n_t = 0;
  int cells = 0;
  std::optional<double> median_fnd;
  double analytic_max_path = 0.0;
  double median_measured_max_path = 0.0;
};

struct Verdict {
  std::string claim;
  bool pass = false;
  std::string detail;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::vector<Verdict> verdicts;
  std::vector<std::string> missing;
};

/// Groups cell summaries by (scheme, approach, n_s, n_t) and checks the
/// lifetime and delay orderings when all five schemes are present.
ComparisonTable summarize(const std::vector<nlohmann::json>& cell_summaries);
ComparisonTable summarize_manifest(const std::filesystem::path& manifest);
std::string format_table(const ComparisonTable& table);
nlohmann::ordered_json table_json(const ComparisonTable& table);

/// %.12g formatting used for every float in CSV output.
std::string format_double(double value);

}  // namespace hwsn
