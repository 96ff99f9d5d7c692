#include "hwsn/delay_metrics.hpp"

#include <algorithm>
#include <cmath>

namespace hwsn {

double analytic_H(ChainVariant variant, double tau_last) {
  return variant == ChainVariant::Chain1 ? tau_last : std::ceil(tau_last / 2.0);
}

double analytic_max_path(ChainVariant variant, Approach approach, const PartitionSpec& spec, double n_rfds) {
  const double tau = expected_rfds(spec, n_rfds, spec.tracks());
  const double ffd_hops = approach == Approach::OneHop ? 1.0 : static_cast<double>(spec.tracks());
  return analytic_H(variant, tau) + ffd_hops;
}

double epegasis_last_level_population(const BaselineConfig& cfg, double n_nodes) {
  const double ratio = cfg.epegasis_level_width_m / cfg.disc_radius_m;
  return n_nodes * ratio * ratio * (2.0 * cfg.epegasis_levels - 1.0);
}

double chiron_last_cell_population(const BaselineConfig& cfg, double n_nodes) {
  const double ratio = cfg.chiron_level_width_m / cfg.fan_radius_m;
  return 2.0 * n_nodes * (cfg.chiron_sector_angle / cfg.fan_angle) * ratio * ratio * (cfg.chiron_levels - 0.5);
}

double analytic_baseline_max_path(BaselineModel model, const BaselineConfig& cfg, double n_nodes) {
  switch (model) {
    case BaselineModel::Pegasis:
      return n_nodes;
    case BaselineModel::Epegasis:
      return (epegasis_last_level_population(cfg, n_nodes) - 1.0) + cfg.epegasis_levels;
    case BaselineModel::Chiron:
      return (chiron_last_cell_population(cfg, n_nodes) - 1.0) + cfg.chiron_levels * cfg.chiron_sectors;
  }
  return 0.0;
}

MaxPathMeasurement measured_max_path(const RoundRouting& routing) {
  MaxPathMeasurement out;
  for (std::size_t i = 0; i < routing.size(); ++i) {
    if (!routing.originates[i]) continue;
    if (const auto hops = hops_to_bs(routing, static_cast<NodeId>(i))) {
      out.hops = std::max(out.hops, *hops);
    } else {
      out.disconnected.push_back(static_cast<NodeId>(i));
    }
  }
  return out;
}

CostReport cost_summary(int ffds, int rfds, double ffd_weight, double rfd_weight) {
  return {ffds, rfds, ffds * ffd_weight + rfds * rfd_weight};
}

}  // namespace hwsn
