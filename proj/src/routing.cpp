#include "hwsn/routing.hpp"

#include <algorithm>
#include <tuple>

namespace hwsn {

std::optional<int> hops_to_bs(const RoundRouting& routing, NodeId id) {
  const auto n = static_cast<int>(routing.size());
  int hops = 0;
  NodeId at = id;
  while (at != kBaseStation) {
    if (at < 0 || at >= n || hops > n) return std::nullopt;
    at = routing.next_hop[static_cast<std::size_t>(at)];
    if (at == kNoNode) return std::nullopt;
    ++hops;
  }
  return hops;
}

std::vector<NodeId> prune_disconnected(RoundRouting& routing, std::span<const NodeRecord> nodes) {
  const auto n = routing.size();
  // 1 = reaches the BS through live nodes, -1 = broken, 0 = unknown
  std::vector<int> state(n, 0);
  std::vector<NodeId> path;
  for (std::size_t start = 0; start < n; ++start) {
    if (routing.next_hop[start] == kNoNode || state[start] != 0) continue;
    path.clear();
    NodeId at = static_cast<NodeId>(start);
    int verdict = 0;
    while (verdict == 0) {
      if (at == kBaseStation) {
        verdict = 1;
      } else if (at < 0 || static_cast<std::size_t>(at) >= n) {
        verdict = -1;
      } else if (state[static_cast<std::size_t>(at)] != 0) {
        verdict = state[static_cast<std::size_t>(at)];
      } else if (!nodes[static_cast<std::size_t>(at)].alive() ||
                 routing.next_hop[static_cast<std::size_t>(at)] == kNoNode ||
                 std::find(path.begin(), path.end(), at) != path.end()) {
        verdict = -1;
      } else {
        path.push_back(at);
        at = routing.next_hop[static_cast<std::size_t>(at)];
      }
    }
    for (NodeId id : path) state[static_cast<std::size_t>(id)] = verdict;
  }
  std::vector<NodeId> dropped;
  for (std::size_t i = 0; i < n; ++i) {
    if (routing.next_hop[i] != kNoNode && state[i] != 1) {
      if (routing.originates[i]) dropped.push_back(static_cast<NodeId>(i));
      routing.next_hop[i] = kNoNode;
      routing.originates[i] = false;
    }
  }
  return dropped;
}

std::vector<Message> gather_reports(std::span<const NodeRecord> nodes, const RoundRouting& routing,
                                    Bits report_bits, bool fusion) {
  std::vector<std::tuple<int, NodeId>> order;  // (-depth, id)
  for (std::size_t i = 0; i < routing.size(); ++i) {
    if (routing.next_hop[i] == kNoNode) continue;
    if (const auto depth = hops_to_bs(routing, static_cast<NodeId>(i))) {
      order.emplace_back(-*depth, static_cast<NodeId>(i));
    }
  }
  std::sort(order.begin(), order.end());

  std::vector<Bits> held(routing.size(), 0);
  for (std::size_t i = 0; i < routing.size(); ++i) held[i] = routing.originates[i] ? 1 : 0;

  std::vector<Message> out;
  for (const auto& [neg_depth, id] : order) {
    const auto idx = static_cast<std::size_t>(id);
    if (held[idx] == 0) continue;
    const NodeId to = routing.next_hop[idx];
    const PolarPoint& from = nodes[idx].position;
    const double d =
        to == kBaseStation ? distance_to_bs(from) : distance(from, nodes[static_cast<std::size_t>(to)].position);
    out.push_back({MessageKind::Report, id, to, fusion ? report_bits : held[idx] * report_bits, d, {}});
    if (to != kBaseStation) held[static_cast<std::size_t>(to)] += held[idx];
  }
  return out;
}

}  // namespace hwsn
