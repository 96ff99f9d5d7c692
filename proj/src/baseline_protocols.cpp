#include "hwsn/baseline_protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hwsn {

namespace {

NodeRecord& at(std::span<NodeRecord> nodes, NodeId id) { return nodes[static_cast<std::size_t>(id)]; }
const NodeRecord& at(std::span<const NodeRecord> nodes, NodeId id) { return nodes[static_cast<std::size_t>(id)]; }

int bin(double value, double width, int count) {
  return std::clamp(static_cast<int>(std::ceil(value / width)), 1, count);
}

bool tiles(double whole, double part, int count) {
  return std::abs(whole - part * count) <= kIntegralTolerance * whole;
}

std::vector<GroupChain> chains_by_group(std::span<NodeRecord> nodes, const std::vector<RegionId>& groups) {
  std::vector<GroupChain> out;
  int chain_no = 1;
  for (const RegionId& group : groups) {
    std::vector<NodeId> members;
    for (const auto& node : nodes) {
      if (node.alive() && node.region == group) members.push_back(node.id);
    }
    out.push_back({group, greedy_chain(nodes, members, ChainStart::FarthestFromBs, chain_no++)});
  }
  return out;
}

NodeId max_residual(std::span<const NodeRecord> nodes, std::span<const NodeId> group) {
  NodeId best = kNoNode;
  double best_residual = -std::numeric_limits<double>::infinity();
  for (NodeId id : group) {
    const double residual = at(nodes, id).battery.residual;
    if (residual > best_residual || (residual == best_residual && id < best)) {
      best = id;
      best_residual = residual;
    }
  }
  return best;
}

NodeId farthest(std::span<const NodeRecord> nodes, std::span<const NodeId> group) {
  NodeId best = kNoNode;
  double best_rho = -1.0;
  for (NodeId id : group) {
    const double rho = at(nodes, id).position.rho;
    if (rho > best_rho || (rho == best_rho && id < best)) {
      best = id;
      best_rho = rho;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(BaselineModel model) {
  switch (model) {
    case BaselineModel::Pegasis: return "pegasis";
    case BaselineModel::Epegasis: return "epegasis";
    case BaselineModel::Chiron: return "chiron";
  }
  return "?";
}

std::string_view to_string(HeadElection election) {
  switch (election) {
    case HeadElection::Random: return "random";
    case HeadElection::MaxResidual: return "max-residual";
    case HeadElection::RoundRobin: return "round-robin";
    case HeadElection::FarthestFirst: return "farthest-first";
  }
  return "?";
}

void BaselineConfig::validate() const {
  if (!(square_side_m > 0.0)) throw ConfigError("pegasis square side must be positive");
  if (!(disc_radius_m > 0.0) || epegasis_levels < 1 || !(epegasis_level_width_m > 0.0) ||
      !tiles(disc_radius_m, epegasis_level_width_m, epegasis_levels)) {
    throw ConfigError("epegasis levels x level width must equal the disc radius");
  }
  if (!(fan_radius_m > 0.0) || chiron_levels < 1 || !(chiron_level_width_m > 0.0) ||
      !tiles(fan_radius_m, chiron_level_width_m, chiron_levels)) {
    throw ConfigError("chiron levels x level width must equal the fan radius");
  }
  if (!(fan_angle > 0.0) || fan_angle > kTwoPi + kIntegralTolerance || chiron_sectors < 1 ||
      !(chiron_sector_angle > 0.0) || !tiles(fan_angle, chiron_sector_angle, chiron_sectors)) {
    throw ConfigError("chiron sectors x sector angle must equal the fan angle");
  }
}

RegionId baseline_group(const BaselineConfig& cfg, const PolarPoint& p) {
  switch (cfg.model) {
    case BaselineModel::Pegasis:
      return {1, 1};
    case BaselineModel::Epegasis:
      return {1, bin(p.rho, cfg.epegasis_level_width_m, cfg.epegasis_levels)};
    case BaselineModel::Chiron: {
      const int sector = std::clamp(static_cast<int>(std::floor(p.phi / cfg.chiron_sector_angle)) + 1, 1,
                                    cfg.chiron_sectors);
      return {sector, bin(p.rho, cfg.chiron_level_width_m, cfg.chiron_levels)};
    }
  }
  return {1, 1};
}

std::vector<NodeRecord> deploy_baseline(const BaselineConfig& cfg, const NetworkConfig& net) {
  cfg.validate();
  std::vector<NodeRecord> nodes;
  nodes.reserve(static_cast<std::size_t>(net.n_rfds));
  Rng rng(net.seed, RngStream::Deployment);
  for (int i = 0; i < net.n_rfds; ++i) {
    NodeRecord node;
    node.id = i;
    node.kind = NodeKind::Rfd;
    if (!net.fixed_rfd_positions.empty()) {
      node.position = net.fixed_rfd_positions[static_cast<std::size_t>(i)];
    } else {
      switch (cfg.model) {
        case BaselineModel::Pegasis: node.position = sample_square(rng, cfg.square_side_m); break;
        case BaselineModel::Epegasis: node.position = sample_disc(rng, cfg.disc_radius_m); break;
        case BaselineModel::Chiron: node.position = sample_fan(rng, cfg.fan_radius_m, cfg.fan_angle); break;
      }
    }
    node.region = baseline_group(cfg, node.position);
    node.battery = Battery::full(net.rfd_battery_j, net.rfd_threshold_j);
    node.mode = DutyMode::ListeningDuty;
    nodes.push_back(node);
  }
  return nodes;
}

std::vector<NodeId> greedy_chain(std::span<NodeRecord> nodes, std::span<const NodeId> members, ChainStart start,
                                 int chain_no) {
  std::vector<NodeId> pool(members.begin(), members.end());
  std::sort(pool.begin(), pool.end());
  std::vector<NodeId> chain;
  if (pool.empty()) return chain;
  chain.reserve(pool.size());

  auto start_it = pool.begin();
  for (auto it = pool.begin(); it != pool.end(); ++it) {
    const double rho = at(nodes, *it).position.rho;
    const double best = at(nodes, *start_it).position.rho;
    if (start == ChainStart::FarthestFromBs ? rho > best : rho < best) start_it = it;
  }
  chain.push_back(*start_it);
  pool.erase(start_it);

  while (!pool.empty()) {
    const PolarPoint here = at(nodes, chain.back()).position;
    auto next = pool.begin();
    double next_d = std::numeric_limits<double>::infinity();
    for (auto it = pool.begin(); it != pool.end(); ++it) {
      const double d = distance(here, at(nodes, *it).position);
      if (d < next_d) {
        next_d = d;
        next = it;
      }
    }
    chain.push_back(*next);
    pool.erase(next);
  }

  for (std::size_t k = 0; k < chain.size(); ++k) {
    NodeRecord& node = at(nodes, chain[k]);
    node.pre = k > 0 ? chain[k - 1] : kNoNode;
    node.suc = k + 1 < chain.size() ? chain[k + 1] : kNoNode;
    node.chain = ChainSlot{chain_no, static_cast<int>(k) + 1};
  }
  return chain;
}

std::vector<NodeId> pegasis_build(std::span<NodeRecord> nodes, ChainStart start) {
  std::vector<NodeId> members;
  for (const auto& node : nodes) {
    if (node.alive()) members.push_back(node.id);
  }
  return greedy_chain(nodes, members, start, 1);
}

NodeId pegasis_elect_head(int /*round*/, std::span<const NodeId> alive, Rng& rng) {
  if (alive.empty()) throw std::logic_error("no alive node left to elect");
  return alive[static_cast<std::size_t>(rng.below(alive.size()))];
}

std::vector<GroupChain> epegasis_build(std::span<NodeRecord> nodes, const BaselineConfig& cfg) {
  std::vector<RegionId> groups;
  for (int level = 1; level <= cfg.epegasis_levels; ++level) groups.push_back({1, level});
  return chains_by_group(nodes, groups);
}

std::vector<GroupChain> chiron_build(std::span<NodeRecord> nodes, const BaselineConfig& cfg) {
  std::vector<RegionId> groups;
  for (int sector = 1; sector <= cfg.chiron_sectors; ++sector) {
    for (int level = 1; level <= cfg.chiron_levels; ++level) groups.push_back({sector, level});
  }
  return chains_by_group(nodes, groups);
}

NodeId chiron_elect_leader(std::span<const NodeRecord> nodes, std::span<const NodeId> group, int round) {
  return round <= 1 ? farthest(nodes, group) : max_residual(nodes, group);
}

NodeId epegasis_elect_head(std::span<const NodeRecord> nodes, std::span<const NodeId> level, int round,
                           HeadElection election) {
  if (level.empty()) return kNoNode;
  switch (election) {
    case HeadElection::MaxResidual:
      return max_residual(nodes, level);
    case HeadElection::RoundRobin:
      return level[static_cast<std::size_t>((round - 1) % static_cast<int>(level.size()))];
    case HeadElection::FarthestFirst:
      return chiron_elect_leader(nodes, level, round);
    case HeadElection::Random:
      break;
  }
  throw std::invalid_argument("random election needs an Rng; use pegasis_elect_head");
}

void route_chain_to_head(RoundRouting& routing, std::span<const NodeId> chain, NodeId head, NodeId head_next) {
  const auto head_it = std::find(chain.begin(), chain.end(), head);
  if (head_it == chain.end()) throw std::invalid_argument("head is not a chain member");
  const auto h = static_cast<std::size_t>(head_it - chain.begin());
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const auto idx = static_cast<std::size_t>(chain[k]);
    routing.originates[idx] = true;
    if (k < h) {
      routing.next_hop[idx] = chain[k + 1];
    } else if (k > h) {
      routing.next_hop[idx] = chain[k - 1];
    } else {
      routing.next_hop[idx] = head_next;
    }
  }
}

RoundRouting relay_routing(std::span<const NodeRecord> nodes, std::span<const GroupChain> chains,
                           std::span<const NodeId> heads) {
  if (heads.size() != chains.size()) throw std::invalid_argument("one head per chain expected");
  RoundRouting routing(nodes.size());
  for (std::size_t k = 0; k < chains.size(); ++k) {
    if (chains[k].chain.empty()) continue;
    NodeId inner = kBaseStation;
    for (std::size_t j = k; j-- > 0;) {
      if (chains[j].group.sector == chains[k].group.sector && chains[j].group.track < chains[k].group.track &&
          !chains[j].chain.empty()) {
        inner = heads[j];
        break;
      }
    }
    route_chain_to_head(routing, chains[k].chain, heads[k], inner);
  }
  return routing;
}

std::vector<Message> epegasis_round(std::span<const NodeRecord> nodes, std::span<const GroupChain> levels,
                                    std::span<const NodeId> heads, Bits report_bits, bool fusion) {
  return gather_reports(nodes, relay_routing(nodes, levels, heads), report_bits, fusion);
}

std::vector<Message> chiron_round(std::span<const NodeRecord> nodes, std::span<const GroupChain> cells,
                                  std::span<const NodeId> leaders, Bits report_bits, bool fusion) {
  return gather_reports(nodes, relay_routing(nodes, cells, leaders), report_bits, fusion);
}

}  // namespace hwsn
