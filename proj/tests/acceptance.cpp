// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: hwsn_acceptance [--only N]... [--expect-fail N]...
// Exit status is 0 when every criterion's outcome matches expectation
// (pass, unless listed with --expect-fail). FAIL lines are printed either way.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"

#include "hwsn/delay_metrics.hpp"
#include "hwsn/experiment.hpp"

using namespace hwsn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

SimOptions opts(Scheme s, Approach a = Approach::OneHop) {
  SimOptions o;
  o.scheme = s;
  o.approach = a;
  return o;
}

NetworkConfig seeded(std::uint64_t seed, int n_s = 2, int n_t = 2) {
  NetworkConfig cfg;
  cfg.seed = seed;
  cfg.partition = PartitionSpec::from_counts(50.0, n_t, n_s);
  return cfg;
}

double fnd(const SimResult& r) { return static_cast<double>(r.fnd_round.value_or(r.rounds.size())); }

Outcome geometry_conservation() {
  NetworkConfig cfg;
  const auto& spec = cfg.partition;
  const double tau1 = expected_rfds(spec, 100, 1), tau2 = expected_rfds(spec, 100, 2);
  const double total = spec.sectors() * (tau1 + tau2);
  double area = 0.0;
  for (int t = 1; t <= spec.tracks(); ++t) area += spec.sectors() * region_area(spec, t);
  const double disc = std::numbers::pi * 50.0 * 50.0;
  const bool ok = std::abs(total - 100.0) <= 1e-9 && rel_close(area, disc, 1e-9);
  return {ok, "tau=" + fmt("%g", tau1) + "," + fmt("%g", tau2) + " n_s*sum=" + fmt("%.12g", total) +
                  " area/disc=" + fmt("%.15g", area / disc)};
}

Outcome energy_values() {
  const RadioParams radio;
  const double d0 = crossover_distance(radio);
  bool ok = rel_close(tx_energy(radio, 2000, 12.5), 1.03125e-4, 1e-12) &&
            rel_close(tx_energy(radio, 2000, 100.0), 3.6e-4, 1e-12) &&
            rel_close(rx_energy(radio, 2000), 1.0e-4, 1e-12) &&
            rel_close(d0, std::sqrt(10.0 / 0.0013), 1e-12) && std::abs(d0 - 87.7058) < 1e-4;
  // both branch formulas agree at d0, and the switch there is seamless
  const double fs = 2000 * radio.e_elec + 2000 * radio.eps_fs * d0 * d0;
  const double mp = 2000 * radio.e_elec + 2000 * radio.eps_mp * std::pow(d0, 4);
  ok = ok && rel_close(fs, mp, 1e-12) &&
       rel_close(tx_energy(radio, 2000, std::nextafter(d0, 0.0)), tx_energy(radio, 2000, d0), 1e-12);
  return {ok, "d0=" + fmt("%.10g", d0) + " tx(12.5)=" + fmt("%.12g", tx_energy(radio, 2000, 12.5)) +
                  " tx(100)=" + fmt("%.12g", tx_energy(radio, 2000, 100.0))};
}

Outcome algorithm_oracles() {
  int lengths_bad = 0;
  for (int count = 0; count <= 100; ++count)
    for (int b : {1, 2})
      if (chain_lengths(count, b) != oracle::split_trace(count, b)) ++lengths_bad;

  const auto spec = PartitionSpec::make(50.0, 25.0, std::numbers::pi);
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int chains_bad = 0, regions = 0;
  NetworkConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    const int count = static_cast<int>(gen() % 13);
    std::vector<NodeRecord> nodes(1);
    nodes[0].id = 0;
    nodes[0].kind = NodeKind::Ffd;
    nodes[0].region = {1, 2};
    nodes[0].position = ffd_position(spec, nodes[0].region);
    nodes[0].battery = Battery::full(100, 0.5);
    std::vector<NodeId> ids;
    std::vector<std::pair<int, oracle::Xy>> cand;
    for (int i = 1; i <= count; ++i) {
      NodeRecord n;
      n.id = i;
      n.region = {1, 2};
      n.position = {std::sqrt(625.0 + u(gen) * 1875.0), u(gen) * std::numbers::pi};
      n.battery = Battery::full(10, 0.05);
      nodes.push_back(n);
      ids.push_back(i);
      cand.emplace_back(i, oracle::to_xy(n.position));
    }
    for (ChainVariant v : {ChainVariant::Chain1, ChainVariant::Chain2}) {
      auto copy = nodes;
      const auto built = build_region_topology(copy, 0, ids, v, cfg, {});
      const auto expected =
          oracle::greedy_chains(oracle::to_xy(nodes[0].position), cand, oracle::split_trace(count, beta(v)));
      std::vector<std::vector<int>> got;
      for (const auto& c : built.chains.chains) got.emplace_back(c.begin(), c.end());
      if (got != expected) ++chains_bad;
      ++regions;
    }
  }
  return {lengths_bad == 0 && chains_bad == 0,
          std::to_string(regions) + " region builds, " + std::to_string(chains_bad) + " chain mismatches, " +
              std::to_string(lengths_bad) + " split mismatches"};
}

Outcome analytic_table() {
  NetworkConfig cfg;
  BaselineConfig b;
  const double c1o = analytic_max_path(ChainVariant::Chain1, Approach::OneHop, cfg.partition, 100);
  const double c1m = analytic_max_path(ChainVariant::Chain1, Approach::MultiHop, cfg.partition, 100);
  const double c2o = analytic_max_path(ChainVariant::Chain2, Approach::OneHop, cfg.partition, 100);
  const double c2m = analytic_max_path(ChainVariant::Chain2, Approach::MultiHop, cfg.partition, 100);
  const double peg = analytic_baseline_max_path(BaselineModel::Pegasis, b, 100);
  const double epe = analytic_baseline_max_path(BaselineModel::Epegasis, b, 100);
  const double chi = analytic_baseline_max_path(BaselineModel::Chiron, b, 100);
  const bool values = c1o == 38.5 && c1m == 39.5 && c2o == 20.0 && c2m == 21.0 && peg == 100.0 && epe == 76.0 &&
                      chi == 40.5;
  const bool order = c2o < c1o && c2m < c1m && c1m < chi && chi < epe && epe < peg;
  std::ostringstream os;
  os << "chain1 " << c1o << "/" << c1m << " chain2 " << c2o << "/" << c2m << " chiron " << chi << " epegasis " << epe
     << " pegasis " << peg;
  return {values && order, os.str()};
}

// Full chain runs shared by criteria 5, 7 and 8.
struct ChainRun {
  Scheme scheme;
  Approach approach;
  std::uint64_t seed;
  int measured = 0;
  std::optional<int> bfs;
  SimResult result;
};

std::vector<ChainRun>& chain_runs() {
  static std::vector<ChainRun> runs = [] {
    std::vector<ChainRun> out;
    for (std::uint64_t seed = 1; seed <= 50; ++seed)
      for (Scheme s : {Scheme::Chain1, Scheme::Chain2})
        for (Approach a : {Approach::OneHop, Approach::MultiHop}) {
          Simulation sim(seeded(seed), opts(s, a));
          ChainRun r{s, a, seed};
          const auto& routing = sim.peek_routing();
          r.measured = measured_max_path(routing).hops;
          r.bfs = oracle::bfs_max_path(routing);
          while (!sim.finished()) sim.step();
          r.result = sim.take_result();
          out.push_back(std::move(r));
        }
    return out;
  }();
  return runs;
}

Outcome measured_delay() {
  int oracle_bad = 0;
  bool ok = true;
  std::ostringstream os;
  NetworkConfig cfg;
  for (Scheme s : {Scheme::Chain1, Scheme::Chain2})
    for (Approach a : {Approach::OneHop, Approach::MultiHop}) {
      double sum = 0.0;
      int n = 0;
      for (const auto& r : chain_runs()) {
        if (r.scheme != s || r.approach != a) continue;
        if (!r.bfs || *r.bfs != r.measured) ++oracle_bad;
        sum += r.measured;
        ++n;
      }
      const double mean = sum / n;
      const double expect = analytic_max_path(variant_of(s), a, cfg.partition, 100);
      const bool near = std::abs(mean - expect) <= 2.0;
      ok = ok && near;
      os << to_string(s) << "/" << to_string(a) << " mean " << mean << " vs " << expect << (near ? "" : " (off)")
         << "; ";
    }
  // baselines for reference only
  BaselineConfig b;
  for (Scheme s : {Scheme::Pegasis, Scheme::Epegasis, Scheme::Chiron}) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      Simulation sim(seeded(seed), opts(s));
      const auto& routing = sim.peek_routing();
      const int m = measured_max_path(routing).hops;
      if (oracle::bfs_max_path(routing) != m) ++oracle_bad;
      sum += m;
    }
    os << "[info] " << to_string(s) << " mean " << sum / 50 << " vs " << analytic_baseline_max_path(model_of(s), b, 100)
       << "; ";
  }
  os << oracle_bad << " BFS mismatches";
  return {ok && oracle_bad == 0, os.str()};
}

Outcome lifetime_ordering() {
  std::map<Scheme, std::vector<double>> f;
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    for (Scheme s : {Scheme::Chain1, Scheme::Chain2, Scheme::Pegasis, Scheme::Epegasis, Scheme::Chiron})
      f[s].push_back(fnd(simulate(seeded(seed), opts(s))));
  const double c1 = median(f[Scheme::Chain1]), c2 = median(f[Scheme::Chain2]), ch = median(f[Scheme::Chiron]);
  const double pe = median(f[Scheme::Pegasis]), ep = median(f[Scheme::Epegasis]);
  std::ostringstream os;
  os << "median FND chain2 " << c2 << " chiron " << ch << " chain1 " << c1 << " epegasis " << ep << " pegasis " << pe;
  return {c2 > ch && ch > c1 && c1 > std::max(pe, ep), os.str()};
}

Outcome approach_invariance() {
  std::map<std::pair<Scheme, std::uint64_t>, std::set<double>> seen;
  for (const auto& r : chain_runs()) seen[{r.scheme, r.seed}].insert(fnd(r.result));
  int bad = 0;
  for (const auto& [k, v] : seen) bad += v.size() != 1;
  return {bad == 0, std::to_string(seen.size()) + " (scheme, seed) pairs, " + std::to_string(bad) + " differ"};
}

Outcome first_dead_identity() {
  int hits = 0, total = 0;
  for (const auto& r : chain_runs()) {
    if (r.approach != Approach::OneHop) continue;
    ++total;
    const auto& d = r.result.first_dead_node;
    if (d && d->kind == NodeKind::Rfd && d->region.track == r.result.config.partition.tracks() && d->chain &&
        d->chain->position == 1)
      ++hits;
  }
  const double share = static_cast<double>(hits) / total;
  return {share >= 0.9, std::to_string(hits) + "/" + std::to_string(total) + " runs (" + fmt("%.0f", 100 * share) + "%)"};
}

Outcome sweep_monotone() {
  auto med = [](Scheme s, Approach a, int n_s, int n_t) {
    std::vector<double> v;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) v.push_back(fnd(simulate(seeded(seed, n_s, n_t), opts(s, a))));
    return median(v);
  };
  bool ok = true;
  std::ostringstream os;
  for (Scheme s : {Scheme::Chain1, Scheme::Chain2})
    for (Approach a : {Approach::OneHop, Approach::MultiHop}) {
      const double s2 = med(s, a, 2, 2), s4 = med(s, a, 4, 2), s8 = med(s, a, 8, 2), t4 = med(s, a, 2, 4);
      ok = ok && s2 <= s4 && s4 <= s8 && s2 <= t4;
      os << to_string(s) << "/" << to_string(a) << " n_s " << s2 << "<=" << s4 << "<=" << s8 << " n_t4 " << t4 << "; ";
    }
  return {ok, os.str()};
}

Outcome single_node() {
  NetworkConfig cfg;
  cfg.n_rfds = 1;
  cfg.partition = PartitionSpec::make(50.0, 50.0, kTwoPi);
  cfg.fixed_rfd_positions = {{15.0, std::numbers::pi}};
  const auto r = simulate(cfg, {});
  const RadioParams radio;
  const double per_round = rx_energy(radio, 64) + tx_energy(radio, 2000, 10.0);
  const double setup = 2 * rx_energy(radio, 64);
  const auto closed = static_cast<std::int64_t>(std::floor((10.0 - 0.05 - setup) / per_round));
  const bool ok = r.fnd_round && *r.fnd_round == 94581 && closed == 94581 && rel_close(per_round, 1.052e-4, 1e-12);
  return {ok, "FND " + (r.fnd_round ? std::to_string(*r.fnd_round) : std::string("none")) + ", closed form " +
                  std::to_string(closed) + ", per round " + fmt("%.6g", per_round) + " J"};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = ss.str();
  }
  return files;
}

Outcome determinism() {
  const auto cfg = parse_config_text(R"({"experiment": {
      "schemes": ["chain1", "chain2", "pegasis", "epegasis", "chiron"],
      "approaches": ["one-hop", "multi-hop"],
      "sweep": {"seeds": [1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20]}}})");
  const fs::path base = fs::temp_directory_path() / "hwsn_acceptance_determinism";
  fs::remove_all(base);
  run_experiment(cfg, base / "a", 1);
  run_experiment(cfg, base / "b", 2);
  const auto a = tree(base / "a"), b = tree(base / "b");
  fs::remove_all(base);
  return {a == b && a.count("manifest.json") == 1,
          std::to_string(a.size()) + " files vs " + std::to_string(b.size()) + ", " + (a == b ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only, expect_fail;
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--expect-fail", expect_fail, "Criteria known to fail");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"geometry conservation", geometry_conservation},
      {"energy model values", energy_values},
      {"algorithm oracles", algorithm_oracles},
      {"analytic delay table", analytic_table},
      {"measured vs analytic delay", measured_delay},
      {"lifetime ordering", lifetime_ordering},
      {"approach invariance", approach_invariance},
      {"first dead node identity", first_dead_identity},
      {"sweep monotonicity", sweep_monotone},
      {"single node lifetime", single_node},
      {"determinism", determinism},
  };

  int unexpected = 0, passed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int no = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), no) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = criteria[i].second();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool expected_fail = std::find(expect_fail.begin(), expect_fail.end(), no) != expect_fail.end();
    std::printf("%s %2d %-28s %7.2fs  %s%s\n", o.pass ? "PASS" : "FAIL", no, criteria[i].first, secs,
                o.detail.c_str(), !o.pass && expected_fail ? "  [known failure]" : "");
    std::fflush(stdout);
    ++ran;
    passed += o.pass;
    if (o.pass == expected_fail) ++unexpected;
  }
  std::printf("%d/%d criteria passed\n", passed, ran);
  return unexpected == 0 ? 0 : 1;
}
