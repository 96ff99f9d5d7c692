// First-order radio model and battery bookkeeping.
#pragma once

#include <cstdint>

namespace hwsn {

using Bits = std::uint64_t;

struct RadioParams {
  double e_elec = 50e-9;      // J/bit, transmitter/receiver electronics
  double eps_fs = 10e-12;     // J/bit/m^2, free-space amplifier
  double eps_mp = 0.0013e-12; // J/bit/m^4, multipath amplifier

  bool valid() const;
  friend bool operator==(const RadioParams&, const RadioParams&) = default;
};

/// sqrt(eps_fs / eps_mp): below it the d^2 amplifier applies, at or above it d^4.
double crossover_distance(const RadioParams& params);

double tx_energy(const RadioParams& params, Bits k, double d);
double rx_energy(const RadioParams& params, Bits k);

struct Battery {
  double capacity = 0.0;
  double residual = 0.0;
  double death_threshold = 0.0;

  static Battery full(double capacity, double death_threshold) {
    return {capacity, capacity, death_threshold};
  }
  bool alive() const { return residual >= death_threshold; }
  friend bool operator==(const Battery&, const Battery&) = default;
};

struct DrainResult {
  Battery battery;
  double drained = 0.0;  // amount actually removed (residual is floored at 0)
  bool alive = true;
};

/// Removes `amount` joules. Throws std::invalid_argument for a negative amount.
[[nodiscard]] DrainResult drain(const Battery& battery, double amount);

}  // namespace hwsn
