// Per-round forwarding forest shared by every protocol: each active node
// names the next hop of its reports (another node or the BS).
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hwsn/network_model.hpp"

namespace hwsn {

struct RoundRouting {
  std::vector<NodeId> next_hop;  // kNoNode: not taking part this round
  std::vector<bool> originates;  // produces one report this round

  explicit RoundRouting(std::size_t n_nodes = 0) : next_hop(n_nodes, kNoNode), originates(n_nodes, false) {}
  std::size_t size() const { return next_hop.size(); }
};

/// Hops from `id` to the BS following next_hop, or nullopt when the walk hits
/// an inactive node or a cycle.
std::optional<int> hops_to_bs(const RoundRouting& routing, NodeId id);

/// Deactivates every node whose path to the BS is broken (inactive or dead
/// hop). Returns the originators that were cut off.
std::vector<NodeId> prune_disconnected(RoundRouting& routing, std::span<const NodeRecord> nodes);

/// Store-and-forward report traffic, leaves first. Without fusion each node
/// forwards every report it holds in one packet; with fusion every packet
/// carries a single report's worth of bits.
std::vector<Message> gather_reports(std::span<const NodeRecord> nodes, const RoundRouting& routing,
                                    Bits report_bits, bool fusion);

}  // namespace hwsn
