#include "hwsn/chain_topology.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

namespace hwsn {

namespace {

NodeRecord& at(std::span<NodeRecord> nodes, NodeId id) { return nodes[static_cast<std::size_t>(id)]; }

void check_range(const ChainBuildOptions& options, double hop, NodeId from, NodeId to) {
  if (options.strict_range && hop > options.range_m) {
    std::ostringstream msg;
    msg << "chain hop " << from << "->" << to << " spans " << hop << " m, above the " << options.range_m
        << " m range";
    throw RangeError(msg.str());
  }
}

std::string link_name(NodeId id) {
  if (id == kBaseStation) return "BS";
  if (id == kNoNode) return "-";
  return std::to_string(id);
}

}  // namespace

std::string_view to_string(ChainVariant variant) {
  return variant == ChainVariant::Chain1 ? "chain1" : "chain2";
}

std::string_view to_string(Approach approach) {
  return approach == Approach::OneHop ? "one-hop" : "multi-hop";
}

std::vector<int> chain_lengths(int count, int beta) {
  if (beta < 1) throw std::invalid_argument("chain count beta must be >= 1");
  if (count < 0) throw std::invalid_argument("RFD count must be >= 0");
  const int base = count / beta;
  const int longer = count % beta;
  std::vector<int> lengths(static_cast<std::size_t>(beta), base);
  for (int h = 0; h < longer; ++h) lengths[static_cast<std::size_t>(h)] += 1;
  return lengths;
}

std::vector<NodeId> build_chain(std::span<NodeRecord> nodes, NodeId ffd, std::span<const NodeId> region_rfds,
                                std::vector<bool>& visited, int chain_no, int length,
                                const ChainBuildOptions& options) {
  if (visited.size() != region_rfds.size()) {
    throw std::invalid_argument("visited flags must parallel the region RFD list");
  }
  const auto unvisited = static_cast<int>(std::count(visited.begin(), visited.end(), false));
  if (length < 0 || length > unvisited) {
    throw std::invalid_argument("chain length exceeds the unvisited RFDs of the region");
  }
  std::vector<NodeId> chain;
  if (length == 0) return chain;
  chain.reserve(static_cast<std::size_t>(length));

  // The FFD hands Build_Chain to its closest unvisited RFD.
  const PolarPoint ffd_pos = at(nodes, ffd).position;
  std::size_t current = region_rfds.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < region_rfds.size(); ++j) {
    if (visited[j]) continue;
    const double d = distance(ffd_pos, at(nodes, region_rfds[j]).position);
    if (d < best) {
      best = d;
      current = j;
    }
  }
  check_range(options, best, ffd, region_rfds[current]);
  visited[current] = true;
  chain.push_back(region_rfds[current]);
  at(nodes, region_rfds[current]).pre = ffd;

  double running_min = options.first_closer_start;
  while (static_cast<int>(chain.size()) < length) {
    const PolarPoint here = at(nodes, region_rfds[current]).position;
    std::size_t next = region_rfds.size();
    double next_d = std::numeric_limits<double>::infinity();
    if (options.rule == NeighborRule::Nearest) {
      for (std::size_t j = 0; j < region_rfds.size(); ++j) {
        if (visited[j]) continue;
        const double d = distance(here, at(nodes, region_rfds[j]).position);
        if (d < next_d) {
          next_d = d;
          next = j;
        }
      }
    } else {
      for (std::size_t j = 0; j < region_rfds.size(); ++j) {
        if (visited[j]) continue;
        const double d = distance(here, at(nodes, region_rfds[j]).position);
        if (d < running_min) {
          running_min = d;
          next = j;
          next_d = d;
          break;
        }
      }
      if (next == region_rfds.size()) {
        // Nothing beats the running minimum; the printed loop would reuse a
        // stale pick here, so take the first unvisited candidate instead.
        for (std::size_t j = 0; j < region_rfds.size(); ++j) {
          if (!visited[j]) {
            next = j;
            next_d = distance(here, at(nodes, region_rfds[j]).position);
            running_min = next_d;
            break;
          }
        }
      }
    }
    check_range(options, next_d, region_rfds[current], region_rfds[next]);
    at(nodes, region_rfds[current]).suc = region_rfds[next];
    at(nodes, region_rfds[next]).pre = region_rfds[current];
    visited[next] = true;
    chain.push_back(region_rfds[next]);
    current = next;
  }
  at(nodes, chain.back()).suc = kNoNode;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    at(nodes, chain[k]).chain = ChainSlot{chain_no, static_cast<int>(k) + 1};
  }
  return chain;
}

RegionBuild build_region_topology(std::span<NodeRecord> nodes, NodeId ffd, std::span<const NodeId> region_rfds,
                                  ChainVariant variant, const NetworkConfig& cfg, const ProtocolFlags& flags) {
  RegionBuild out;
  const NodeRecord& head = at(nodes, ffd);
  out.chains.region = head.region;
  out.chains.ffd = ffd;

  ChainBuildOptions options;
  options.rule = flags.literal_fig4 ? NeighborRule::FirstCloser : NeighborRule::Nearest;
  options.first_closer_start = cfg.partition.radius();
  options.strict_range = flags.strict_range;
  options.range_m = cfg.tx_range_m;

  std::vector<bool> visited(region_rfds.size(), false);
  const auto lengths = chain_lengths(static_cast<int>(region_rfds.size()), beta(variant));
  for (std::size_t h = 0; h < lengths.size(); ++h) {
    auto chain = build_chain(nodes, ffd, region_rfds, visited, static_cast<int>(h) + 1, lengths[h], options);
    if (!chain.empty()) {
      NodeId from = ffd;
      for (NodeId member : chain) {
        out.messages.push_back({MessageKind::BuildChain, from, member, cfg.ctl_bits,
                                distance(at(nodes, from).position, at(nodes, member).position), {}});
        from = member;
      }
      out.messages.push_back({MessageKind::ChainD, chain.front(), ffd, cfg.ctl_bits,
                              distance(at(nodes, chain.front()).position, head.position), {}});
    }
    out.chains.chains.push_back(std::move(chain));
  }
  out.messages.push_back(
      {MessageKind::TopologyD, ffd, kBaseStation, cfg.ctl_bits, distance_to_bs(head.position), {}});
  return out;
}

std::vector<std::vector<NodeId>> build_ffd_relays(std::span<NodeRecord> nodes, std::span<const NodeId> ffds,
                                                  const PartitionSpec& spec, Approach approach) {
  std::vector<std::vector<NodeId>> relays(static_cast<std::size_t>(spec.sectors()));
  for (NodeId id : ffds) {
    relays.at(static_cast<std::size_t>(at(nodes, id).region.sector - 1)).push_back(id);
  }
  for (auto& sector : relays) {
    std::sort(sector.begin(), sector.end(),
              [&](NodeId a, NodeId b) { return at(nodes, a).region.track < at(nodes, b).region.track; });
    for (std::size_t k = 0; k < sector.size(); ++k) {
      NodeRecord& ffd = at(nodes, sector[k]);
      if (approach == Approach::OneHop) {
        ffd.pre = kNoNode;
        ffd.suc = kBaseStation;
      } else {
        ffd.pre = k + 1 < sector.size() ? sector[k + 1] : kNoNode;
        ffd.suc = k == 0 ? kBaseStation : sector[k - 1];
      }
    }
  }
  return relays;
}

TopologyBuild build_topology(std::span<NodeRecord> nodes, std::span<const NodeId> ffds, ChainVariant variant,
                             Approach approach, const NetworkConfig& cfg, const ProtocolFlags& flags) {
  std::map<RegionId, std::vector<NodeId>> members;
  for (const auto& node : nodes) {
    if (node.kind == NodeKind::Rfd && node.alive()) members[node.region].push_back(node.id);
  }
  TopologyBuild out;
  out.plan.variant = variant;
  out.plan.approach = approach;
  for (NodeId ffd : ffds) {
    auto& rfds = members[at(nodes, ffd).region];
    std::sort(rfds.begin(), rfds.end());
    auto region = build_region_topology(nodes, ffd, rfds, variant, cfg, flags);
    out.plan.regions.push_back(std::move(region.chains));
    out.messages.insert(out.messages.end(), region.messages.begin(), region.messages.end());
  }
  out.plan.sector_relays = build_ffd_relays(nodes, ffds, cfg.partition, approach);
  return out;
}

void splice_out(std::span<NodeRecord> nodes, std::vector<NodeId>& chain, NodeId dead, NodeId root) {
  const auto it = std::find(chain.begin(), chain.end(), dead);
  if (it == chain.end()) return;
  const auto idx = static_cast<std::size_t>(it - chain.begin());
  const NodeId prev = idx > 0 ? chain[idx - 1] : root;
  const NodeId next = idx + 1 < chain.size() ? chain[idx + 1] : kNoNode;
  if (idx > 0) at(nodes, prev).suc = next;
  if (next != kNoNode) at(nodes, next).pre = prev;
  chain.erase(it);
  NodeRecord& gone = at(nodes, dead);
  gone.pre = kNoNode;
  gone.suc = kNoNode;
  gone.chain.reset();
  for (std::size_t k = idx; k < chain.size(); ++k) {
    auto& slot = at(nodes, chain[k]).chain;
    if (slot) slot->position = static_cast<int>(k) + 1;
  }
}

std::string dump_topology(std::span<const NodeRecord> nodes) {
  std::ostringstream out;
  out << "# id kind sector track pre suc chain position\n";
  for (const auto& node : nodes) {
    out << node.id << ' ' << to_string(node.kind) << ' ' << node.region.sector << ' ' << node.region.track << ' '
        << link_name(node.pre) << ' ' << link_name(node.suc) << ' ';
    if (node.chain) {
      out << node.chain->chain << ' ' << node.chain->position;
    } else {
      out << "- -";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace hwsn
