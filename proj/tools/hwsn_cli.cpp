// hwsn: run, sweep, summarize and validate experiment configs.
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hwsn/experiment.hpp"

namespace {

struct Overrides {
  std::optional<std::string> scheme;
  std::optional<std::string> approach;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_s;
  std::optional<int> n_t;
  std::optional<std::int64_t> max_rounds;
  std::optional<std::string> stop_at;
  std::optional<std::string> out;
  bool fusion = false;
  bool no_setup_energy = false;
  bool literal_fig4 = false;
  bool strict_range = false;
  bool rfd_sleep = false;
};

void add_common(CLI::App* cmd, std::string& config, Overrides& o) {
  cmd->add_option("-c,--config", config, "JSON config file (empty or missing keys take defaults)");
  cmd->add_option("--max-rounds", o.max_rounds, "Round cap");
  cmd->add_option("--stop-at", o.stop_at, "fnd, hnd or lnd");
  cmd->add_option("-o,--out", o.out, "Output directory");
  cmd->add_flag("--fusion", o.fusion, "One report per outgoing packet");
  cmd->add_flag("--no-setup-energy", o.no_setup_energy, "Do not charge setup/self-organization traffic");
  cmd->add_flag("--literal-fig4", o.literal_fig4, "First-closer neighbor rule in chain building");
  cmd->add_flag("--strict-range", o.strict_range, "Reject sensor hops beyond tx_range_m");
  cmd->add_flag("--rfd-sleep", o.rfd_sleep, "RFDs sleep between rounds instead of listening");
}

hwsn::LoadedConfig load(const std::string& path) {
  if (path.empty()) return hwsn::parse_config(nlohmann::json::object());
  return hwsn::load_config(path);
}

// Applies command-line overrides, then re-validates through the JSON path so
// errors carry the same key names as config files.
hwsn::LoadedConfig apply(const hwsn::LoadedConfig& base, const Overrides& o) {
  nlohmann::json doc = nlohmann::json::parse(base.resolved.dump());
  doc["network"].erase("n_s");
  doc["network"].erase("n_t");
  auto& x = doc["experiment"];
  if (o.scheme) x["schemes"] = {*o.scheme};
  if (o.approach) x["approaches"] = {*o.approach};
  else if (o.scheme || !base.experiment.approaches_explicit) x.erase("approaches");
  if (o.seed) x["sweep"]["seeds"] = {*o.seed};
  if (o.n_s) x["sweep"]["n_s"] = {*o.n_s};
  if (o.n_t) x["sweep"]["n_t"] = {*o.n_t};
  if (o.max_rounds) x["max_rounds"] = *o.max_rounds;
  if (o.stop_at) x["stop_at"] = *o.stop_at;
  if (o.out) x["output_dir"] = *o.out;
  if (o.fusion) x["flags"]["fusion"] = true;
  if (o.no_setup_energy) x["flags"]["setup_energy"] = false;
  if (o.literal_fig4) x["flags"]["literal_fig4"] = true;
  if (o.strict_range) x["flags"]["strict_range"] = true;
  if (o.rfd_sleep) x["flags"]["rfd_sleep"] = true;
  return hwsn::parse_config(doc);
}

int execute(const hwsn::LoadedConfig& cfg, int jobs, bool quiet) {
  const auto run = hwsn::run_experiment(cfg, cfg.experiment.output_dir, jobs);
  if (!quiet) {
    for (const auto& o : run.outcomes) {
      const auto& r = o.result;
      std::printf("%s fnd=%s rounds=%zu max_path=%d analytic=%s\n", o.cell.id().c_str(),
                  r.fnd_round ? std::to_string(*r.fnd_round).c_str() : "censored", r.rounds.size(),
                  o.measured_max_path, hwsn::format_double(o.analytic_max_path).c_str());
    }
    std::printf("manifest: %s\n", run.manifest.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sector/track FFD-headed chain simulator and baselines"};
  app.require_subcommand(1);

  std::string config;
  Overrides ov;
  int jobs = 0;
  bool quiet = false;
  std::optional<std::string> topology_out;

  auto* run = app.add_subcommand("run", "Run one cell");
  add_common(run, config, ov);
  run->add_option("-s,--scheme", ov.scheme, "chain1, chain2, pegasis, epegasis or chiron");
  run->add_option("-a,--approach", ov.approach, "one-hop or multi-hop (chain schemes only)");
  run->add_option("--seed", ov.seed, "Deployment seed");
  run->add_option("--n-s", ov.n_s, "Sector count");
  run->add_option("--n-t", ov.n_t, "Track count");
  run->add_option("--dump-topology", topology_out, "Write the built topology to this file");
  run->add_flag("-q,--quiet", quiet);

  auto* sweep = app.add_subcommand("sweep", "Run every cell of the config's sweep");
  add_common(sweep, config, ov);
  sweep->add_option("-j,--jobs", jobs, "Worker threads (default: config experiment.jobs)");
  sweep->add_flag("-q,--quiet", quiet);

  std::string manifest;
  std::optional<std::string> table_out;
  auto* summarize = app.add_subcommand("summarize", "Comparison table from a manifest");
  summarize->add_option("manifest", manifest, "manifest.json of a run or sweep")->required();
  summarize->add_option("--json", table_out, "Also write the table as JSON");

  auto* validate = app.add_subcommand("validate", "Check a config file and print the resolved form");
  validate->add_option("-c,--config", config, "JSON config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (ov.approach && !ov.scheme) throw hwsn::ConfigError("--approach requires --scheme");
      if (ov.scheme && ov.approach) {
        const auto s = hwsn::parse_scheme(*ov.scheme);
        if (s && hwsn::is_baseline(*s)) throw hwsn::ConfigError("--approach: baseline schemes take no approach");
      }
      const auto cfg = apply(load(config), ov);
      const auto cells = hwsn::enumerate_cells(cfg);
      if (cells.size() != 1)
        throw hwsn::ConfigError("run: config describes " + std::to_string(cells.size()) +
                                " cells; use sweep or pin --scheme/--approach/--seed/--n-s/--n-t");
      if (topology_out) {
        hwsn::Simulation sim(hwsn::cell_network(cfg, cells[0]), hwsn::cell_options(cfg, cells[0]));
        std::ofstream out(*topology_out);
        out << hwsn::dump_topology(sim.world().nodes);
        if (!out) throw std::runtime_error("cannot write " + *topology_out);
      }
      return execute(cfg, 1, quiet);
    }
    if (*sweep) {
      const auto cfg = apply(load(config), ov);
      return execute(cfg, jobs > 0 ? jobs : cfg.experiment.jobs, quiet);
    }
    if (*summarize) {
      const auto table = hwsn::summarize_manifest(manifest);
      std::fputs(hwsn::format_table(table).c_str(), stdout);
      if (table_out) {
        std::ofstream out(*table_out);
        out << hwsn::table_json(table).dump(2) << "\n";
      }
      const bool lost = std::any_of(table.missing.begin(), table.missing.end(),
                                    [](const std::string& m) { return m.rfind("cell ", 0) == 0; });
      return lost ? 3 : 0;
    }
    if (*validate) {
      const auto cfg = load(config);
      for (const auto& w : cfg.network.warnings()) std::fprintf(stderr, "warning: %s\n", w.c_str());
      std::printf("%s\n", cfg.resolved.dump(2).c_str());
      return 0;
    }
  } catch (const hwsn::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
