// Homogeneous chain baselines run under the same energy engine:
// PEGASIS (one chain, random head), EPEGASIS (concentric levels, head-to-head
// relay inward) and CHIRON (level x sector fan cells, leader relay inward).
#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "hwsn/network_model.hpp"
#include "hwsn/random.hpp"
#include "hwsn/routing.hpp"

namespace hwsn {

enum class BaselineModel { Pegasis, Epegasis, Chiron };

enum class HeadElection {
  Random,         // uniform over alive members
  MaxResidual,    // largest residual energy, lowest id on ties
  RoundRobin,     // alive members in chain order, one per round
  FarthestFirst,  // farthest from the BS in round 1, then max residual
};

enum class ChainStart { FarthestFromBs, ClosestToBs };

std::string_view to_string(BaselineModel model);
std::string_view to_string(HeadElection election);

/// Arena and election settings. Defaults follow the comparison setup:
/// PEGASIS on a 100 x 100 m square; EPEGASIS on a 50 m disc with 2 levels of
/// 25 m; CHIRON on a 90 degree fan of radius 100 m with 2 levels of 50 m and
/// 2 sectors of 45 degrees. The BS sits at the center (fan apex) throughout.
struct BaselineConfig {
  BaselineModel model = BaselineModel::Pegasis;
  double square_side_m = 100.0;
  double disc_radius_m = 50.0;
  int epegasis_levels = 2;
  double epegasis_level_width_m = 25.0;
  double fan_radius_m = 100.0;
  double fan_angle = std::numbers::pi / 2.0;
  int chiron_levels = 2;
  int chiron_sectors = 2;
  double chiron_level_width_m = 50.0;
  double chiron_sector_angle = std::numbers::pi / 4.0;
  ChainStart pegasis_start = ChainStart::FarthestFromBs;
  HeadElection epegasis_election = HeadElection::MaxResidual;

  void validate() const;
};

/// Group (level x sector) of a point. Pegasis has a single group (1, 1);
/// Epegasis groups are levels (sector 1); Chiron uses both.
RegionId baseline_group(const BaselineConfig& cfg, const PolarPoint& p);

/// Deploys cfg.n_rfds homogeneous sensors with the RFD battery settings of `net`.
std::vector<NodeRecord> deploy_baseline(const BaselineConfig& cfg, const NetworkConfig& net);

/// Greedy nearest-neighbor chain over `members` (ties: lowest id) starting at
/// the member picked by `start`. Sets pre/suc and chain slots (chain `chain_no`).
std::vector<NodeId> greedy_chain(std::span<NodeRecord> nodes, std::span<const NodeId> members, ChainStart start,
                                 int chain_no);

std::vector<NodeId> pegasis_build(std::span<NodeRecord> nodes, ChainStart start = ChainStart::FarthestFromBs);

/// Uniform pick among `alive`; throws std::logic_error when empty.
NodeId pegasis_elect_head(int round, std::span<const NodeId> alive, Rng& rng);

struct GroupChain {
  RegionId group;
  std::vector<NodeId> chain;
};

/// One chain per level, innermost level first.
std::vector<GroupChain> epegasis_build(std::span<NodeRecord> nodes, const BaselineConfig& cfg);

/// One chain per (level, sector) cell, sector-major then level.
std::vector<GroupChain> chiron_build(std::span<NodeRecord> nodes, const BaselineConfig& cfg);

/// Round 1: farthest member from the BS; later rounds: largest residual
/// energy. Ties go to the lowest id.
NodeId chiron_elect_leader(std::span<const NodeRecord> nodes, std::span<const NodeId> group, int round);

/// Head of an EPEGASIS level under the configured election rule.
NodeId epegasis_elect_head(std::span<const NodeRecord> nodes, std::span<const NodeId> level, int round,
                           HeadElection election);

/// Points every chain member toward `head` along the chain.
void route_chain_to_head(RoundRouting& routing, std::span<const NodeId> chain, NodeId head, NodeId head_next);

/// Chains with heads, relayed outer-to-inner within each sector; the
/// innermost head sends to the BS. `chains` must be ordered so that, within a
/// sector, inner levels come first; empty chains are skipped.
RoundRouting relay_routing(std::span<const NodeRecord> nodes, std::span<const GroupChain> chains,
                           std::span<const NodeId> heads);

/// One EPEGASIS or CHIRON round: gather on every level/cell chain toward its
/// head, then head-by-head relay from the outermost level into the BS.
std::vector<Message> epegasis_round(std::span<const NodeRecord> nodes, std::span<const GroupChain> levels,
                                    std::span<const NodeId> heads, Bits report_bits, bool fusion);
std::vector<Message> chiron_round(std::span<const NodeRecord> nodes, std::span<const GroupChain> cells,
                                  std::span<const NodeId> leaders, Bits report_bits, bool fusion);

}  // namespace hwsn
