// Self-organization of the sector/track scheme: per-region RFD chains headed
// by the region FFD, and the FFD relay tables of each sector.
#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwsn/network_model.hpp"

namespace hwsn {

enum class ChainVariant { Chain1, Chain2 };
enum class Approach { OneHop, MultiHop };

/// Number of chains hanging off the FFD: 1 for Chain1, 2 for Chain2.
constexpr int beta(ChainVariant variant) { return variant == ChainVariant::Chain1 ? 1 : 2; }

std::string_view to_string(ChainVariant variant);
std::string_view to_string(Approach approach);

/// A sensor hop exceeded the configured range in strict-range mode.
class RangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Splits `count` RFDs over `beta` chains. The first count % beta chains get
/// one extra member. Throws std::invalid_argument for beta < 1.
std::vector<int> chain_lengths(int count, int beta);

enum class NeighborRule {
  Nearest,      // scan all unvisited candidates, take the closest (ties: lowest id)
  FirstCloser,  // stop at the first candidate closer than the running minimum
};

struct ChainBuildOptions {
  NeighborRule rule = NeighborRule::Nearest;
  // Initial running minimum for FirstCloser; the circle radius in practice.
  double first_closer_start = 0.0;
  bool strict_range = false;
  double range_m = 0.0;
};

/// Builds one chain of `length` RFDs rooted at `ffd`.
///
/// `region_rfds` must be sorted by id; `visited` runs parallel to it and is
/// updated so later chains skip taken nodes. The first member is the unvisited
/// RFD closest to the FFD (its pre is the FFD); each next member is picked from
/// the current one by `options.rule`. Sets pre/suc and the chain slot of every
/// member and returns the members nearest-to-FFD first.
std::vector<NodeId> build_chain(std::span<NodeRecord> nodes, NodeId ffd, std::span<const NodeId> region_rfds,
                                std::vector<bool>& visited, int chain_no, int length,
                                const ChainBuildOptions& options = {});

struct RegionChains {
  RegionId region;
  NodeId ffd = kNoNode;
  std::vector<std::vector<NodeId>> chains;  // each nearest-to-FFD first
};

struct RegionBuild {
  RegionChains chains;
  std::vector<Message> messages;  // Build_Chain..., Chain_D per chain, Topology_D
};

RegionBuild build_region_topology(std::span<NodeRecord> nodes, NodeId ffd, std::span<const NodeId> region_rfds,
                                  ChainVariant variant, const NetworkConfig& cfg, const ProtocolFlags& flags);

/// Sets FFD pre/suc. Multi-hop: pre = next FFD outward (none on the last
/// track), suc = next FFD inward (BS on track 1). One-hop: pre none, suc BS.
/// Returns, per sector, the FFD ids ordered from track 1 outward.
std::vector<std::vector<NodeId>> build_ffd_relays(std::span<NodeRecord> nodes, std::span<const NodeId> ffds,
                                                  const PartitionSpec& spec, Approach approach);

struct TopologyPlan {
  ChainVariant variant = ChainVariant::Chain1;
  Approach approach = Approach::OneHop;
  std::vector<RegionChains> regions;                // sector-major, track-minor
  std::vector<std::vector<NodeId>> sector_relays;  // per sector, track 1 first
};

struct TopologyBuild {
  TopologyPlan plan;
  std::vector<Message> messages;
};

/// Self-organization over a deployed world: chains for every region, then relays.
TopologyBuild build_topology(std::span<NodeRecord> nodes, std::span<const NodeId> ffds, ChainVariant variant,
                             Approach approach, const NetworkConfig& cfg, const ProtocolFlags& flags);

/// Removes `dead` from `chain`, linking its neighbors to each other, and
/// renumbers positions. `root` is what the first member's pre points at.
void splice_out(std::span<NodeRecord> nodes, std::vector<NodeId>& chain, NodeId dead, NodeId root);

/// One line per node: id kind sector track pre suc chain position.
std::string dump_topology(std::span<const NodeRecord> nodes);

}  // namespace hwsn
