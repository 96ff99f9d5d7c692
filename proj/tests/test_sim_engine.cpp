#include <algorithm>
#include <numeric>

#include "doctest.h"

#include "hwsn/sim_engine.hpp"

using namespace hwsn;

namespace {

const RadioParams kRadio;

NetworkConfig single_node_world() {
  NetworkConfig cfg;
  cfg.n_rfds = 1;
  cfg.partition = PartitionSpec::make(50.0, 50.0, kTwoPi);
  cfg.fixed_rfd_positions = {{15.0, std::numbers::pi}};
  return cfg;
}

// Nodes energy owed by a message list.
std::vector<double> costs(const std::vector<Message>& msgs, std::size_t n) {
  EnergyLedger ledger(n);
  for (const auto& m : msgs) ledger.charge(m, kRadio);
  return {ledger.owed().begin(), ledger.owed().end()};
}

SimOptions options(Scheme s, Approach a = Approach::OneHop) {
  SimOptions o;
  o.scheme = s;
  o.approach = a;
  return o;
}

}  // namespace

TEST_CASE("setup with defaults") {
  NetworkConfig cfg;
  const World w = run_setup(cfg, {});
  CHECK(w.nodes.size() == 104);
  CHECK(w.ffds.size() == 4);
  for (const auto& n : w.nodes) CHECK(n.alive());
  // scan + H_Region: two control receptions per RFD
  for (const auto& n : w.nodes)
    if (n.kind == NodeKind::Rfd) CHECK(n.battery.residual == doctest::Approx(10.0 - 2 * rx_energy(kRadio, 64)).epsilon(1e-15));
  int hregion = 0;
  for (const auto& m : w.setup_messages) {
    CHECK(dispatch_is_legal(m));
    hregion += m.kind == MessageKind::HRegion;
  }
  CHECK(hregion == 4);

  SimOptions off;
  off.flags.setup_energy = false;
  const World quiet = run_setup(cfg, off);
  for (const auto& n : quiet.nodes) CHECK(n.battery.residual == n.battery.capacity);
}

TEST_CASE("empty network ends before the first round") {
  NetworkConfig cfg;
  cfg.n_rfds = 0;
  const auto r = simulate(cfg, {});
  CHECK(r.rounds.empty());
  CHECK(r.n_ffds == 4);
  CHECK_FALSE(r.fnd_round);
  CHECK_FALSE(r.fnd_censored);
}

TEST_CASE("collection costs") {
  const auto cfg = single_node_world();
  World w = run_setup(cfg, {});
  run_self_organization(w);
  auto trace = run_collection(w.nodes, w.plan.regions[0], cfg, {});
  const auto c = costs(trace.messages, w.nodes.size());
  CHECK(c[0] == doctest::Approx(1.052e-4).epsilon(1e-12));
  CHECK(trace.reports_at_ffd == 1);

  // three RFDs on a line away from the FFD at (25, pi)
  NetworkConfig three = cfg;
  three.n_rfds = 3;
  three.fixed_rfd_positions = {{20.0, std::numbers::pi}, {15.0, std::numbers::pi}, {10.0, std::numbers::pi}};
  World w3 = run_setup(three, {});
  run_self_organization(w3);
  REQUIRE(w3.plan.regions[0].chains[0] == std::vector<NodeId>{0, 1, 2});
  trace = run_collection(w3.nodes, w3.plan.regions[0], three, {});
  Bits rx = 0, tx = 0;
  for (const auto& m : trace.messages) {
    if (m.dst == 0) rx += m.payload_bits;
    if (m.src == 0) tx += m.payload_bits;
  }
  CHECK(rx == 64 + 2 * 2000);
  CHECK(tx == 64 + 3 * 2000);
  ProtocolFlags fused;
  fused.fusion = true;
  trace = run_collection(w3.nodes, w3.plan.regions[0], three, fused);
  for (const auto& m : trace.messages)
    if (m.kind == MessageKind::Report) CHECK(m.payload_bits == 2000);

  RegionChains empty{{1, 1}, w3.plan.regions[0].ffd, {{}}};
  CHECK(run_collection(w3.nodes, empty, three, {}).messages.empty());
}

TEST_CASE("transmission costs") {
  NetworkConfig cfg;
  World w = run_setup(cfg, {});
  w.options.approach = Approach::OneHop;
  run_self_organization(w);
  std::vector<Bits> reports(4, 0);
  reports[1] = 75;  // sector 1, track 2
  const auto one = run_transmission(w.nodes, w.plan, reports, cfg, {});
  REQUIRE(one.size() == 1);
  CHECK(one[0].dst == kBaseStation);
  CHECK(one[0].distance_m == 37.5);
  CHECK(tx_energy(kRadio, one[0].payload_bits, one[0].distance_m) ==
        doctest::Approx(7.5e-3 + 150000 * 10e-12 * 37.5 * 37.5).epsilon(1e-12));

  World m = run_setup(cfg, options(Scheme::Chain1, Approach::MultiHop));
  run_self_organization(m);
  reports = {10, 30, 0, 0};
  const auto multi = run_transmission(m.nodes, m.plan, reports, cfg, {});
  REQUIRE(multi.size() == 2);
  CHECK(multi[0].src == m.plan.regions[1].ffd);
  CHECK(multi[0].dst == m.plan.regions[0].ffd);
  CHECK(multi[0].distance_m == doctest::Approx(25.0));
  CHECK(multi[1].payload_bits == 40 * 2000);
  CHECK(multi[1].distance_m == doctest::Approx(12.5));
  const auto c = costs(multi, m.nodes.size());
  CHECK(c[static_cast<std::size_t>(m.plan.regions[0].ffd)] ==
        doctest::Approx(rx_energy(kRadio, 60000) + tx_energy(kRadio, 80000, 12.5)));

  // dead relay drops everything behind it
  m.nodes[static_cast<std::size_t>(m.plan.regions[0].ffd)].battery.residual = 0.0;
  std::int64_t dropped = 0;
  const auto broken = run_transmission(m.nodes, m.plan, reports, cfg, {}, &dropped);
  CHECK(broken.empty());
  CHECK(dropped == 40);

  // one track: multi-hop equals one-hop
  NetworkConfig flat;
  flat.partition = PartitionSpec::from_counts(50.0, 1, 2);
  World a = run_setup(flat, options(Scheme::Chain1, Approach::OneHop));
  run_self_organization(a);
  World b = run_setup(flat, options(Scheme::Chain1, Approach::MultiHop));
  run_self_organization(b);
  std::vector<Bits> two{50, 50};
  const auto ta = run_transmission(a.nodes, a.plan, two, flat, {});
  const auto tb = run_transmission(b.nodes, b.plan, two, flat, {});
  REQUIRE(ta.size() == tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) {
    CHECK(ta[i].src == tb[i].src);
    CHECK(ta[i].dst == tb[i].dst);
    CHECK(ta[i].payload_bits == tb[i].payload_bits);
    CHECK(ta[i].distance_m == tb[i].distance_m);
  }
}

TEST_CASE("closed-form single node lifetime") {
  const auto r = simulate(single_node_world(), {});
  REQUIRE(r.fnd_round);
  CHECK(*r.fnd_round == 94581);
  CHECK(r.first_dead_node->id == 0);
  CHECK(r.first_dead_node->died_in_round == 94582);
  SimOptions off;
  off.flags.setup_energy = false;
  CHECK(*simulate(single_node_world(), off).fnd_round == 94581);
}

TEST_CASE("round invariants") {
  for (Scheme s : {Scheme::Chain1, Scheme::Chain2, Scheme::Pegasis, Scheme::Epegasis, Scheme::Chiron}) {
    for (Approach a : {Approach::OneHop, Approach::MultiHop}) {
      NetworkConfig cfg;
      cfg.n_rfds = 30;
      cfg.seed = 4;
      cfg.rfd_battery_j = 0.5;
      SimOptions o = options(s, a);
      o.stop_at = StopAt::Lnd;
      std::vector<bool> dead;
      int bad_traffic = 0, rfd_to_bs = 0, bad_ffd = 0;
      const auto r = simulate(cfg, o, [&](const RoundTrace& t) {
        if (dead.empty()) dead.assign(t.nodes.size(), false);
        for (const auto& m : t.messages) {
          if ((m.src >= 0 && dead[static_cast<std::size_t>(m.src)]) ||
              (m.dst >= 0 && dead[static_cast<std::size_t>(m.dst)]))
            ++bad_traffic;
          if (is_baseline(s)) continue;
          const auto& src = t.nodes[static_cast<std::size_t>(m.src)];
          if (src.kind == NodeKind::Rfd && m.dst == kBaseStation) ++rfd_to_bs;
          if (src.kind == NodeKind::Ffd && m.dst >= 0) {
            const auto& dst = t.nodes[static_cast<std::size_t>(m.dst)];
            const bool ok = dst.kind == NodeKind::Rfd ? dst.region == src.region
                                                      : dst.region.sector == src.region.sector;
            if (!ok) ++bad_ffd;
          }
        }
        for (std::size_t i = 0; i < t.nodes.size(); ++i)
          if (!t.nodes[i].alive()) dead[i] = true;
      });
      CHECK(bad_traffic == 0);
      CHECK(rfd_to_bs == 0);
      CHECK(bad_ffd == 0);
      CHECK(r.mode_violations == 0);
      for (std::size_t i = 1; i < r.rounds.size(); ++i) {
        CHECK(r.rounds[i].alive_rfds <= r.rounds[i - 1].alive_rfds);
        CHECK(r.rounds[i].alive_ffds <= r.rounds[i - 1].alive_ffds);
        CHECK(r.rounds[i].min_rfd_residual_j <= r.rounds[i - 1].min_rfd_residual_j);
      }
      REQUIRE(r.fnd_round);
      REQUIRE(r.hnd_round);
      REQUIRE(r.lnd_round);
      CHECK(*r.fnd_round <= *r.hnd_round);
      CHECK(*r.hnd_round <= *r.lnd_round);
    }
  }
}

TEST_CASE("energy spent equals the sum of drains") {
  NetworkConfig cfg;
  int mismatches = 0, rounds = 0;
  SimOptions o = options(Scheme::Chain2, Approach::MultiHop);
  Simulation sim(cfg, o);
  for (int i = 0; i < 50; ++i) {
    double sum = 0.0;
    const auto& st = sim.step([&](const RoundTrace& t) {
      for (double d : t.drained) sum += d;
    });
    ++rounds;
    if (sum != st.energy_spent_j) ++mismatches;
  }
  CHECK(rounds == 50);
  CHECK(mismatches == 0);
}

TEST_CASE("determinism and approach invariance") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    NetworkConfig cfg;
    cfg.seed = seed;
    const auto a = simulate(cfg, options(Scheme::Chain1));
    const auto b = simulate(cfg, options(Scheme::Chain1));
    REQUIRE(a.rounds.size() == b.rounds.size());
    for (std::size_t i = 0; i < a.rounds.size(); ++i) {
      CHECK(a.rounds[i].energy_spent_j == b.rounds[i].energy_spent_j);
      CHECK(a.rounds[i].min_rfd_residual_j == b.rounds[i].min_rfd_residual_j);
    }
    CHECK(a.fnd_round == b.fnd_round);
    const auto c1m = simulate(cfg, options(Scheme::Chain1, Approach::MultiHop));
    CHECK(a.fnd_round == c1m.fnd_round);
    const auto c2 = simulate(cfg, options(Scheme::Chain2));
    const auto c2m = simulate(cfg, options(Scheme::Chain2, Approach::MultiHop));
    CHECK(c2.fnd_round == c2m.fnd_round);
    CHECK(*c2.fnd_round >= *a.fnd_round);
  }
}

TEST_CASE("censored run and sleep mode") {
  NetworkConfig cfg;
  SimOptions o;
  o.max_rounds = 10;
  const auto r = simulate(cfg, o);
  CHECK(r.rounds.size() == 10);
  CHECK(r.fnd_censored);
  CHECK_FALSE(r.fnd_round);

  o.max_rounds = 20;
  o.flags.rfd_sleep = true;
  const auto s = simulate(cfg, o);
  CHECK(s.mode_violations == 0);
}

TEST_CASE("repair after a death sends D_Node to the FFD") {
  NetworkConfig cfg;
  cfg.n_rfds = 20;
  cfg.rfd_battery_j = 0.3;
  SimOptions o;
  o.stop_at = StopAt::Hnd;
  const auto r = simulate(cfg, o);
  REQUIRE_FALSE(r.dnode_messages.empty());
  for (const auto& m : r.dnode_messages) {
    CHECK(m.kind == MessageKind::DNode);
    CHECK(m.dst >= cfg.n_rfds);
  }
}

TEST_CASE("scheme names") {
  for (Scheme s : {Scheme::Chain1, Scheme::Chain2, Scheme::Pegasis, Scheme::Epegasis, Scheme::Chiron})
    CHECK(parse_scheme(to_string(s)) == s);
  CHECK_FALSE(parse_scheme("leach"));
  CHECK(parse_approach("multi-hop") == Approach::MultiHop);
  CHECK(parse_stop_at("lnd") == StopAt::Lnd);
  CHECK_THROWS(variant_of(Scheme::Pegasis));
  CHECK_THROWS(model_of(Scheme::Chain1));
}
