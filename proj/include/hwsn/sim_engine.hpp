// Round-based lifetime simulation shared by the sector/track scheme and the
// chain baselines.
//
// Lifecycle: setup (deploy, BS scan, FFD placement, H_Region) and
// self-organization once, then rounds of collection and transmission until
// the requested stop metric (FND by default) or max_rounds. Energy is charged
// per message with the first-order radio model; deaths are evaluated after all
// of a round's traffic.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hwsn/baseline_protocols.hpp"
#include "hwsn/chain_topology.hpp"
#include "hwsn/network_model.hpp"
#include "hwsn/routing.hpp"

namespace hwsn {

enum class Scheme { Chain1, Chain2, Pegasis, Epegasis, Chiron };

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);
std::optional<Approach> parse_approach(std::string_view name);
bool is_baseline(Scheme scheme);
ChainVariant variant_of(Scheme scheme);  // Chain1/Chain2 only
BaselineModel model_of(Scheme scheme);   // baselines only

enum class StopAt { Fnd, Hnd, Lnd };

std::string_view to_string(StopAt stop);
std::optional<StopAt> parse_stop_at(std::string_view name);

struct SimOptions {
  Scheme scheme = Scheme::Chain1;
  Approach approach = Approach::OneHop;  // ignored by baselines
  ProtocolFlags flags;
  BaselineConfig baseline;  // model is overwritten from `scheme`
  std::int64_t max_rounds = 10'000'000;
  StopAt stop_at = StopAt::Fnd;
};

struct RoundStats {
  std::int64_t round = 0;
  int alive_rfds = 0;  // report-originating sensors (all nodes for baselines)
  int alive_ffds = 0;
  double energy_spent_j = 0.0;
  double min_rfd_residual_j = 0.0;
  std::optional<double> min_ffd_residual_j;  // none when the scheme has no FFDs
  int max_path_hops = 0;
  std::vector<NodeId> deaths;
};

struct DeadNodeInfo {
  NodeId id = kNoNode;
  NodeKind kind = NodeKind::Rfd;
  RegionId region;
  std::optional<ChainSlot> chain;
  std::int64_t died_in_round = 0;
};

/// Lifetime metrics count completed rounds before the event: fnd_round is the
/// number of rounds finished with every node alive, hnd_round the rounds
/// finished before half of the report-originating nodes were dead, lnd_round
/// the rounds finished before the last of them died.
struct SimResult {
  NetworkConfig config;
  SimOptions options;
  std::vector<RoundStats> rounds;
  std::optional<std::int64_t> fnd_round;
  std::optional<std::int64_t> hnd_round;
  std::optional<std::int64_t> lnd_round;
  bool fnd_censored = false;  // max_rounds ran out before the first death
  std::optional<DeadNodeInfo> first_dead_node;
  int n_originators = 0;
  int n_ffds = 0;
  double setup_energy_j = 0.0;
  std::int64_t dropped_reports = 0;
  int mode_violations = 0;
  std::vector<Message> dnode_messages;
  std::vector<std::string> notes;
};

struct World {
  NetworkConfig config;
  SimOptions options;
  std::vector<NodeRecord> nodes;  // index == id
  std::vector<NodeId> ffds;
  TopologyPlan plan;               // sector/track scheme
  std::vector<GroupChain> groups;  // baselines
  std::vector<Message> setup_messages;
  double setup_energy_j = 0.0;
};

/// Setup phase: deployment, BS position scan, FFD placement and H_Region
/// broadcasts (charged when setup energy is on).
World run_setup(const NetworkConfig& cfg, const SimOptions& options);

/// Self-organization phase: region chains and FFD relays, or the baseline chains.
void run_self_organization(World& world);

struct CollectionTrace {
  std::vector<Message> messages;  // Req tokens down each chain, then Reports up
  Bits reports_at_ffd = 0;        // report count delivered to the FFD
  bool silent = false;            // dead FFD
};

/// Token-driven collection in one region: the FFD's Req travels hop by hop to
/// each chain tail, then reports flow back store-and-forward so the j-th RFD
/// from the tail sends j reports (one with fusion).
CollectionTrace run_collection(std::span<const NodeRecord> nodes, const RegionChains& region,
                               const NetworkConfig& cfg, const ProtocolFlags& flags);

/// FFD-to-BS delivery. `region_reports` parallels plan.regions. One-hop: each
/// FFD sends straight to the BS. Multi-hop: outermost FFD first, each forwards
/// its own plus predecessor reports to its successor. Reports held by or
/// behind a dead FFD are counted in `dropped`.
std::vector<Message> run_transmission(std::span<const NodeRecord> nodes, const TopologyPlan& plan,
                                      std::span<const Bits> region_reports, const NetworkConfig& cfg,
                                      const ProtocolFlags& flags, std::int64_t* dropped = nullptr);

/// Forwarding forest of the sector/track scheme: RFDs toward their FFD (pre),
/// FFDs along their relay table (suc). Broken paths are pruned.
RoundRouting chain_routing(std::span<const NodeRecord> nodes, const TopologyPlan& plan);

struct RoundTrace {
  std::int64_t round = 0;
  std::span<const Message> messages;
  std::span<const double> drained;  // per node, this round
  std::span<const NodeRecord> nodes;  // state after the round's drains
  const RoundRouting* routing = nullptr;
};

using RoundObserver = std::function<void(const RoundTrace&)>;

/// Step-wise driver; simulate() runs it to completion.
class Simulation {
 public:
  Simulation(const NetworkConfig& cfg, const SimOptions& options);

  const World& world() const { return world_; }
  bool finished() const { return finished_; }
  /// Routing the next round will use (elects baseline heads for that round).
  const RoundRouting& peek_routing();
  const RoundStats& step(const RoundObserver& observer = {});
  SimResult take_result();

 private:
  void prepare_round();
  void record_deaths(RoundStats& stats);
  void repair(NodeId dead);

  World world_;
  SimResult result_;
  Rng election_rng_;
  std::int64_t round_ = 0;
  bool finished_ = false;
  bool prepared_ = false;
  RoundRouting routing_;
  std::vector<Message> messages_;
  std::vector<double> drained_;
};

SimResult simulate(const NetworkConfig& cfg, const SimOptions& options, const RoundObserver& observer = {});

}  // namespace hwsn
