#include "hwsn/network_model.hpp"

#include <cmath>
#include <sstream>

namespace hwsn {

std::string_view to_string(NodeKind kind) { return kind == NodeKind::Ffd ? "FFD" : "RFD"; }

std::string_view to_string(DutyMode mode) {
  switch (mode) {
    case DutyMode::TrOnDuty: return "TR-On-Duty";
    case DutyMode::ListeningDuty: return "Listening-Duty";
    case DutyMode::OffDuty: return "Off-Duty";
    case DutyMode::Sleep: return "Sleep";
  }
  return "?";
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Report: return "Report";
    case MessageKind::Req: return "Req";
    case MessageKind::DNode: return "D_Node";
    case MessageKind::BuildChain: return "Build_Chain";
    case MessageKind::HRegion: return "H_Region";
    case MessageKind::ChainD: return "Chain_D";
    case MessageKind::TopologyD: return "Topology_D";
    case MessageKind::PositionCtl: return "Position_Ctl";
  }
  return "?";
}

bool dispatch_is_legal(const Message& message) {
  const bool broadcast = message.dst == kRegionBroadcast;
  return broadcast == (message.kind == MessageKind::HRegion);
}

void NetworkConfig::validate() const {
  if (n_rfds < 0) throw ConfigError("network.N must be >= 0");
  if (!(rfd_battery_j > 0.0) || !(ffd_battery_j > 0.0)) {
    throw ConfigError("battery capacities must be positive");
  }
  if (!(rfd_threshold_j >= 0.0) || rfd_threshold_j >= rfd_battery_j) {
    throw ConfigError("rfd threshold must lie in [0, rfd battery)");
  }
  if (!(ffd_threshold_j >= 0.0) || ffd_threshold_j >= ffd_battery_j) {
    throw ConfigError("ffd threshold must lie in [0, ffd battery)");
  }
  if (report_bits == 0) throw ConfigError("report size must be positive");
  if (!(idle_j_per_round >= 0.0)) throw ConfigError("idle energy must be >= 0");
  if (!(tx_range_m > 0.0)) throw ConfigError("transmission range must be positive");
  if (!radio.valid()) throw ConfigError("radio parameters must be positive");
  if (!fixed_rfd_positions.empty()) {
    if (static_cast<int>(fixed_rfd_positions.size()) != n_rfds) {
      throw ConfigError("fixed RFD positions must list exactly N points");
    }
    for (const auto& p : fixed_rfd_positions) {
      if (!(p.rho > 0.0) || p.rho > partition.radius()) {
        throw ConfigError("fixed RFD positions must satisfy 0 < rho <= R");
      }
    }
  }
}

std::vector<std::string> NetworkConfig::warnings() const {
  std::vector<std::string> out;
  if (n_rfds < region_count(partition)) {
    std::ostringstream msg;
    msg << "N=" << n_rfds << " is below the region count " << region_count(partition)
        << "; some regions will be empty";
    out.push_back(msg.str());
  }
  return out;
}

std::optional<DutyMode> advance_mode(NodeKind kind, DutyMode current, ModeEvent event, bool rfd_sleep) {
  using enum DutyMode;
  if (kind == NodeKind::Ffd) {
    switch (event) {
      case ModeEvent::RoundStart:
        if (current == OffDuty || current == TrOnDuty) return TrOnDuty;
        return std::nullopt;
      case ModeEvent::PacketArrival:
        if (current == TrOnDuty) return TrOnDuty;
        return std::nullopt;
      case ModeEvent::ReportSentToBs:
        if (current == TrOnDuty) return OffDuty;
        return std::nullopt;
      case ModeEvent::ActionDone:
        return std::nullopt;
    }
    return std::nullopt;
  }
  switch (event) {
    case ModeEvent::RoundStart:
      if (current == TrOnDuty || current == ListeningDuty || current == Sleep) return ListeningDuty;
      return std::nullopt;
    case ModeEvent::PacketArrival:
      if (current == ListeningDuty || current == TrOnDuty) return TrOnDuty;
      return std::nullopt;
    case ModeEvent::ActionDone:
      if (current == TrOnDuty) return rfd_sleep ? Sleep : ListeningDuty;
      return std::nullopt;
    case ModeEvent::ReportSentToBs:
      return std::nullopt;
  }
  return std::nullopt;
}

PolarPoint sample_disc(Rng& rng, double radius) {
  return sample_fan(rng, radius, kTwoPi);
}

PolarPoint sample_fan(Rng& rng, double radius, double opening) {
  double u = 0.0;
  do {
    u = rng.uniform01();
  } while (u == 0.0);
  const double phi = opening * rng.uniform01();
  return {radius * std::sqrt(u), phi >= kTwoPi ? 0.0 : phi};
}

PolarPoint sample_square(Rng& rng, double side) {
  for (;;) {
    const double x = side * (rng.uniform01() - 0.5);
    const double y = side * (rng.uniform01() - 0.5);
    if (x != 0.0 || y != 0.0) return from_cartesian(x, y);
  }
}

std::vector<NodeRecord> deploy_rfds(const NetworkConfig& cfg) {
  std::vector<NodeRecord> nodes;
  nodes.reserve(static_cast<std::size_t>(cfg.n_rfds));
  Rng rng(cfg.seed, RngStream::Deployment);
  for (int i = 0; i < cfg.n_rfds; ++i) {
    NodeRecord node;
    node.id = i;
    node.kind = NodeKind::Rfd;
    node.position = cfg.fixed_rfd_positions.empty() ? sample_disc(rng, cfg.partition.radius())
                                                    : cfg.fixed_rfd_positions[static_cast<std::size_t>(i)];
    node.region = locate_region(cfg.partition, node.position);
    node.battery = Battery::full(cfg.rfd_battery_j, cfg.rfd_threshold_j);
    node.mode = DutyMode::TrOnDuty;
    nodes.push_back(node);
  }
  return nodes;
}

std::vector<NodeRecord> place_ffds(const NetworkConfig& cfg, NodeId first_id) {
  std::vector<NodeRecord> ffds;
  const auto& spec = cfg.partition;
  ffds.reserve(static_cast<std::size_t>(region_count(spec)));
  NodeId id = first_id;
  for (int sector = 1; sector <= spec.sectors(); ++sector) {
    for (int track = 1; track <= spec.tracks(); ++track) {
      NodeRecord node;
      node.id = id++;
      node.kind = NodeKind::Ffd;
      node.region = {sector, track};
      node.position = ffd_position(spec, node.region);
      node.battery = Battery::full(cfg.ffd_battery_j, cfg.ffd_threshold_j);
      node.mode = DutyMode::TrOnDuty;
      ffds.push_back(node);
    }
  }
  return ffds;
}

ScanResult run_bs_scan(std::span<NodeRecord> nodes, const NetworkConfig& cfg, bool charge_energy) {
  ScanResult out;
  for (auto& node : nodes) {
    if (node.kind != NodeKind::Rfd) continue;
    node.region = locate_region(cfg.partition, node.position);
    out.assignments.emplace_back(node.id, node.region);
    out.messages.push_back(
        {MessageKind::PositionCtl, kBaseStation, node.id, cfg.ctl_bits, node.position.rho, {}});
    if (charge_energy && cfg.ctl_bits > 0) {
      node.battery = drain(node.battery, rx_energy(cfg.radio, cfg.ctl_bits)).battery;
    }
  }
  return out;
}

void EnergyLedger::charge(const Message& message, const RadioParams& radio) {
  if (message.src >= 0) add(message.src, tx_energy(radio, message.payload_bits, message.distance_m));
  if (message.dst >= 0) add(message.dst, rx_energy(radio, message.payload_bits));
  if (message.dst == kRegionBroadcast) {
    for (NodeId id : message.receivers) add(id, rx_energy(radio, message.payload_bits));
  }
}

double EnergyLedger::apply(std::span<NodeRecord> nodes) {
  double total = 0.0;
  for (std::size_t i = 0; i < pending_.size() && i < nodes.size(); ++i) {
    if (pending_[i] == 0.0) continue;
    const auto result = drain(nodes[i].battery, pending_[i]);
    nodes[i].battery = result.battery;
    total += result.drained;
    pending_[i] = 0.0;
  }
  return total;
}

}  // namespace hwsn
