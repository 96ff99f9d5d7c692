#include "hwsn/radio_energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hwsn {

bool RadioParams::valid() const {
  return e_elec > 0.0 && eps_fs > 0.0 && eps_mp > 0.0 && std::isfinite(crossover_distance(*this));
}

double crossover_distance(const RadioParams& params) {
  return std::sqrt(params.eps_fs / params.eps_mp);
}

double tx_energy(const RadioParams& params, Bits k, double d) {
  const double bits = static_cast<double>(k);
  const double d2 = d * d;
  if (d < crossover_distance(params)) {
    return bits * params.e_elec + bits * params.eps_fs * d2;
  }
  return bits * params.e_elec + bits * params.eps_mp * d2 * d2;
}

double rx_energy(const RadioParams& params, Bits k) {
  return static_cast<double>(k) * params.e_elec;
}

DrainResult drain(const Battery& battery, double amount) {
  if (!(amount >= 0.0)) {
    throw std::invalid_argument("drain amount must be non-negative");
  }
  DrainResult out{battery, std::min(amount, battery.residual), true};
  out.battery.residual = std::max(0.0, battery.residual - amount);
  out.alive = out.battery.alive();
  return out;
}

}  // namespace hwsn
