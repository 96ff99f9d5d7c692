// Delay as hop count of the longest report path, analytic and measured, plus
// the node-count cost report.
#pragma once

#include <optional>
#include <vector>

#include "hwsn/baseline_protocols.hpp"
#include "hwsn/chain_topology.hpp"
#include "hwsn/routing.hpp"

namespace hwsn {

/// Hops from the farthest RFD of a last-track chain to its FFD:
/// tau for Chain1, ceil(tau / 2) for Chain2.
double analytic_H(ChainVariant variant, double tau_last);

/// H + 1 (one-hop) or H + n_t (multi-hop), with tau of the last track.
double analytic_max_path(ChainVariant variant, Approach approach, const PartitionSpec& spec, double n_rfds);

/// Expected population of the last EPEGASIS level: N r^2 (2 T_n - 1) / R^2.
double epegasis_last_level_population(const BaselineConfig& cfg, double n_nodes);
/// Expected population of a last-level CHIRON cell:
/// 2 N theta_sector r^2 / (theta_area R^2) (L_n - 1/2).
double chiron_last_cell_population(const BaselineConfig& cfg, double n_nodes);

/// PEGASIS: N. EPEGASIS: (gamma - 1) + levels. CHIRON: (omega - 1) + cells.
double analytic_baseline_max_path(BaselineModel model, const BaselineConfig& cfg, double n_nodes);

struct MaxPathMeasurement {
  int hops = 0;                     // over connected originators
  std::vector<NodeId> disconnected;  // originators with no path to the BS
};

/// Longest hop count from any report-originating node to the BS, counting the
/// final hop into the BS.
MaxPathMeasurement measured_max_path(const RoundRouting& routing);

struct CostReport {
  int ffds = 0;
  int rfds = 0;
  double weighted = 0.0;
};

CostReport cost_summary(int ffds, int rfds, double ffd_weight = 1.0, double rfd_weight = 1.0);

}  // namespace hwsn
