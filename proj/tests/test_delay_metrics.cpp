#include "doctest.h"
#include "oracles.hpp"

#include "hwsn/delay_metrics.hpp"
#include "hwsn/sim_engine.hpp"

using namespace hwsn;

TEST_CASE("analytic H") {
  CHECK(analytic_H(ChainVariant::Chain1, 37.5) == 37.5);
  CHECK(analytic_H(ChainVariant::Chain2, 37.5) == 19.0);
  CHECK(analytic_H(ChainVariant::Chain2, 0.0) == 0.0);
}

TEST_CASE("analytic max path table") {
  const auto spec = PartitionSpec::make(50.0, 25.0, std::numbers::pi);
  CHECK(analytic_max_path(ChainVariant::Chain1, Approach::OneHop, spec, 100) == 38.5);
  CHECK(analytic_max_path(ChainVariant::Chain1, Approach::MultiHop, spec, 100) == 39.5);
  CHECK(analytic_max_path(ChainVariant::Chain2, Approach::OneHop, spec, 100) == 20.0);
  CHECK(analytic_max_path(ChainVariant::Chain2, Approach::MultiHop, spec, 100) == 21.0);
  BaselineConfig b;
  CHECK(analytic_baseline_max_path(BaselineModel::Pegasis, b, 100) == 100.0);
  CHECK(analytic_baseline_max_path(BaselineModel::Epegasis, b, 100) == 76.0);
  CHECK(analytic_baseline_max_path(BaselineModel::Chiron, b, 100) == 40.5);

  const auto single = PartitionSpec::from_counts(50.0, 1, 2);
  for (auto v : {ChainVariant::Chain1, ChainVariant::Chain2})
    CHECK(analytic_max_path(v, Approach::OneHop, single, 100) == analytic_max_path(v, Approach::MultiHop, single, 100));
}

TEST_CASE("analytic max path shrinks as regions multiply") {
  for (auto v : {ChainVariant::Chain1, ChainVariant::Chain2}) {
    double prev = 1e9;
    for (int n_s : {2, 4, 8}) {
      const double x = analytic_max_path(v, Approach::OneHop, PartitionSpec::from_counts(50.0, 2, n_s), 100);
      CHECK(x < prev);
      prev = x;
    }
    prev = 1e9;
    for (int n_t : {1, 2, 4}) {
      const double x = analytic_max_path(v, Approach::OneHop, PartitionSpec::from_counts(50.0, n_t, 2), 100);
      CHECK(x < prev);
      prev = x;
    }
  }
}

TEST_CASE("measured max path equals the BFS oracle") {
  for (Scheme s : {Scheme::Chain1, Scheme::Chain2, Scheme::Pegasis, Scheme::Epegasis, Scheme::Chiron}) {
    for (Approach a : {Approach::OneHop, Approach::MultiHop}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        NetworkConfig cfg;
        cfg.seed = seed;
        SimOptions opts;
        opts.scheme = s;
        opts.approach = a;
        Simulation sim(cfg, opts);
        const auto m = measured_max_path(sim.peek_routing());
        CHECK(m.disconnected.empty());
        CHECK(oracle::bfs_max_path(sim.peek_routing()) == m.hops);
      }
    }
  }
}

TEST_CASE("single RFD world path") {
  NetworkConfig cfg;
  cfg.n_rfds = 1;
  cfg.partition = PartitionSpec::make(50.0, 50.0, kTwoPi);
  cfg.fixed_rfd_positions = {{15.0, std::numbers::pi}};
  Simulation sim(cfg, {});
  CHECK(measured_max_path(sim.peek_routing()).hops == 2);
}

TEST_CASE("disconnected originators are flagged") {
  RoundRouting r(3);
  r.next_hop = {1, kBaseStation, kNoNode};
  r.originates = {true, true, false};
  CHECK(measured_max_path(r).hops == 2);
  r.next_hop[1] = kNoNode;
  const auto m = measured_max_path(r);
  CHECK(m.hops == 0);
  CHECK(m.disconnected == std::vector<NodeId>{0, 1});
}

TEST_CASE("cost summary") {
  const auto c = cost_summary(4, 100);
  CHECK(c.ffds == 4);
  CHECK(c.rfds == 100);
  CHECK(c.weighted == 104.0);
  CHECK(cost_summary(4, 100, 10.0, 1.0).weighted == 140.0);
  CHECK(cost_summary(4, 100, 10.0).weighted - cost_summary(0, 100, 10.0).weighted == 40.0);
}
