#include "hwsn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hwsn {

namespace {

int integral_ratio(double num, double den, const char* what) {
  const double ratio = num / den;
  const double nearest = std::round(ratio);
  if (nearest < 1.0 || std::abs(ratio - nearest) > kIntegralTolerance) {
    std::ostringstream msg;
    msg << what << " ratio " << ratio << " is not a positive integer";
    throw ConfigError(msg.str());
  }
  return static_cast<int>(nearest);
}

}  // namespace

std::string to_string(const RegionId& region) {
  return "s" + std::to_string(region.sector) + "t" + std::to_string(region.track);
}

PartitionSpec PartitionSpec::make(double radius, double track_width, double theta) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("circle radius R must be positive and finite");
  }
  if (!(track_width > 0.0) || track_width > radius * (1.0 + kIntegralTolerance)) {
    throw ConfigError("track width r must satisfy 0 < r <= R");
  }
  const bool full_disc = std::abs(theta - kTwoPi) <= kIntegralTolerance;
  if (!full_disc && (!(theta > 0.0) || theta > std::numbers::pi * (1.0 + kIntegralTolerance))) {
    throw ConfigError("sector angle theta must satisfy 0 < theta <= pi");
  }
  const int tracks = integral_ratio(radius, track_width, "R/r");
  const int sectors = integral_ratio(kTwoPi, theta, "2pi/theta");
  return PartitionSpec(radius, radius / tracks, kTwoPi / sectors, tracks, sectors);
}

PartitionSpec PartitionSpec::from_counts(double radius, int tracks, int sectors) {
  if (tracks < 1 || sectors < 1) {
    throw ConfigError("track and sector counts must be at least 1");
  }
  return make(radius, radius / tracks, kTwoPi / sectors);
}

int track_count(const PartitionSpec& spec) { return spec.tracks(); }

int sector_count(const PartitionSpec& spec) { return spec.sectors(); }

int region_count(const PartitionSpec& spec) { return spec.tracks() * spec.sectors(); }

double rfd_density(double n_rfds, double radius) {
  return n_rfds / (std::numbers::pi * radius * radius);
}

double region_area(const PartitionSpec& spec, int track) {
  if (track < 1 || track > spec.tracks()) {
    throw std::out_of_range("track index out of range");
  }
  const double r = spec.track_width();
  return (track - 0.5) * spec.theta() * r * r;
}

double expected_rfds(const PartitionSpec& spec, double n_rfds, int track) {
  if (track < 1 || track > spec.tracks()) {
    throw std::out_of_range("track index out of range");
  }
  // Written as ratios so that the default partition evaluates exactly.
  const double width_ratio = spec.track_width() / spec.radius();
  return n_rfds * (spec.theta() / std::numbers::pi) * (width_ratio * width_ratio) * (track - 0.5);
}

PolarPoint ffd_position(const PartitionSpec& spec, const RegionId& region) {
  return {(region.track - 0.5) * spec.track_width(), (region.sector - 0.5) * spec.theta()};
}

RegionId locate_region(const PartitionSpec& spec, const PolarPoint& p) {
  if (p.rho > spec.radius()) {
    std::ostringstream msg;
    msg << "point at rho=" << p.rho << " lies outside the disc of radius " << spec.radius();
    throw OutsideAreaError(msg.str());
  }
  const int track = std::clamp(static_cast<int>(std::ceil(p.rho / spec.track_width())), 1, spec.tracks());
  const int sector =
      std::clamp(static_cast<int>(std::floor(wrap_angle(p.phi) / spec.theta())) + 1, 1, spec.sectors());
  return {sector, track};
}

bool valid_region(const PartitionSpec& spec, const RegionId& region) {
  return region.sector >= 1 && region.sector <= spec.sectors() && region.track >= 1 &&
         region.track <= spec.tracks();
}

double distance(const PolarPoint& p, const PolarPoint& q) {
  // (a-b)^2 + 4ab sin^2(dphi/2) avoids the cancellation of the plain law of cosines.
  const double radial = p.rho - q.rho;
  const double half_sin = std::sin(0.5 * (p.phi - q.phi));
  return std::sqrt(radial * radial + 4.0 * p.rho * q.rho * half_sin * half_sin);
}

double wrap_angle(double phi) {
  double wrapped = std::fmod(phi, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return wrapped;
}

PolarPoint from_cartesian(double x, double y) {
  return {std::hypot(x, y), wrap_angle(std::atan2(y, x))};
}

}  // namespace hwsn
