// Node records, duty-cycle modes, message set and deployment.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hwsn/geometry.hpp"
#include "hwsn/radio_energy.hpp"
#include "hwsn/random.hpp"

namespace hwsn {

using NodeId = std::int32_t;

inline constexpr NodeId kNoNode = -1;
inline constexpr NodeId kBaseStation = -2;
inline constexpr NodeId kRegionBroadcast = -3;

enum class NodeKind { Ffd, Rfd };

enum class DutyMode { TrOnDuty, ListeningDuty, OffDuty, Sleep };

enum class ModeEvent { RoundStart, PacketArrival, ActionDone, ReportSentToBs };

enum class MessageKind { Report, Req, DNode, BuildChain, HRegion, ChainD, TopologyD, PositionCtl };

std::string_view to_string(NodeKind kind);
std::string_view to_string(DutyMode mode);
std::string_view to_string(MessageKind kind);

/// Which chain an RFD belongs to (1-based) and its position counted from the FFD.
struct ChainSlot {
  int chain = 1;
  int position = 1;
  friend bool operator==(const ChainSlot&, const ChainSlot&) = default;
};

struct NodeRecord {
  NodeId id = kNoNode;
  NodeKind kind = NodeKind::Rfd;
  PolarPoint position;
  RegionId region;
  Battery battery;
  DutyMode mode = DutyMode::TrOnDuty;
  // RFDs: pre points toward the FFD, suc away from it.
  // FFDs: pre is the next FFD outward in the sector, suc the next inward (or the BS).
  NodeId pre = kNoNode;
  NodeId suc = kNoNode;
  std::optional<ChainSlot> chain;

  bool alive() const { return battery.alive(); }
};

struct Message {
  MessageKind kind = MessageKind::Report;
  NodeId src = kNoNode;
  NodeId dst = kNoNode;  // node id, kBaseStation or kRegionBroadcast
  Bits payload_bits = 0;
  double distance_m = 0.0;
  std::vector<NodeId> receivers;  // region broadcasts only
};

/// Only H_Region may be a region broadcast; everything else is unicast.
bool dispatch_is_legal(const Message& message);

/// Energy settings and network size.
///
/// Defaults reproduce the reference setup: 100 RFDs on a 50 m disc split into
/// 2 sectors x 2 tracks, 10 J RFDs (0.05 J threshold), 100 J FFDs (0.5 J).
struct NetworkConfig {
  int n_rfds = 100;
  PartitionSpec partition = PartitionSpec::make(50.0, 25.0, std::numbers::pi);
  double rfd_battery_j = 10.0;
  double ffd_battery_j = 100.0;
  double rfd_threshold_j = 0.05;
  double ffd_threshold_j = 0.5;
  Bits report_bits = 2000;
  Bits token_bits = 64;
  Bits ctl_bits = 64;
  double idle_j_per_round = 0.0;
  double sensing_radius_m = 10.0;
  double tx_range_m = 30.0;
  RadioParams radio;
  std::uint64_t seed = 1;
  // When non-empty, replaces the random RFD deployment (n_rfds must match).
  std::vector<PolarPoint> fixed_rfd_positions;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
  /// Non-fatal notes, e.g. fewer RFDs than regions.
  std::vector<std::string> warnings() const;
};

/// Switches that change protocol behavior; all default to the reference model.
struct ProtocolFlags {
  bool fusion = false;        // every outgoing report packet carries one report
  bool setup_energy = true;   // charge control traffic of setup/self-organization
  bool literal_fig4 = false;  // first-closer break in the chain builder
  bool strict_range = false;  // reject sensor hops longer than tx_range_m
  bool rfd_sleep = false;     // RFDs sleep on a timer instead of listening

  friend bool operator==(const ProtocolFlags&, const ProtocolFlags&) = default;
};

/// Result of a duty-cycle transition; nullopt marks an illegal event.
std::optional<DutyMode> advance_mode(NodeKind kind, DutyMode current, ModeEvent event,
                                     bool rfd_sleep = false);

inline std::optional<DutyMode> advance_mode(const NodeRecord& node, ModeEvent event,
                                            bool rfd_sleep = false) {
  return advance_mode(node.kind, node.mode, event, rfd_sleep);
}

/// Area-uniform point on a disc (resamples the origin).
PolarPoint sample_disc(Rng& rng, double radius);
/// Area-uniform point on a fan of the given radius and opening angle.
PolarPoint sample_fan(Rng& rng, double radius, double opening);
/// Uniform point on a square of the given side centered on the BS.
PolarPoint sample_square(Rng& rng, double side);

/// RFDs get ids 0..N-1, start in TR-On-Duty and carry their region.
std::vector<NodeRecord> deploy_rfds(const NetworkConfig& cfg);

/// One FFD per region at ffd_position; ids continue after `first_id`.
std::vector<NodeRecord> place_ffds(const NetworkConfig& cfg, NodeId first_id);

struct ScanResult {
  std::vector<std::pair<NodeId, RegionId>> assignments;
  std::vector<Message> messages;
};

/// Base-station position scan: every RFD receives one control message with its
/// sector and track. The BS pays nothing; each RFD pays rx_energy(ctl_bits)
/// when `charge_energy` is set.
ScanResult run_bs_scan(std::span<NodeRecord> nodes, const NetworkConfig& cfg, bool charge_energy);

/// Per-node energy owed for one phase or round; applied in one pass.
class EnergyLedger {
 public:
  explicit EnergyLedger(std::size_t n_nodes) : pending_(n_nodes, 0.0) {}

  void charge(const Message& message, const RadioParams& radio);
  void add(NodeId id, double joules) { pending_.at(static_cast<std::size_t>(id)) += joules; }
  double owed(NodeId id) const { return pending_.at(static_cast<std::size_t>(id)); }
  std::span<const double> owed() const { return pending_; }

  /// Drains every node by its owed amount and returns the total actually drained.
  double apply(std::span<NodeRecord> nodes);

 private:
  std::vector<double> pending_;
};

}  // namespace hwsn
