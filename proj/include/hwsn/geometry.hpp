// Partition of a circular deployment area into sectors and tracks.
//
// The base station sits at the origin. Tracks are annuli of width r counted
// from the center outward (1..n_t); sectors are wedges of angle theta counted
// in increasing angle (1..n_s). A region is one (sector, track) cell and hosts
// exactly one FFD.
#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace hwsn {

/// Raised for invalid partition or experiment parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a point lies outside the deployment disc.
class OutsideAreaError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kIntegralTolerance = 1e-9;

inline constexpr double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }
inline constexpr double rad_to_deg(double rad) { return rad * (180.0 / std::numbers::pi); }

struct PolarPoint {
  double rho = 0.0;  // meters from the base station
  double phi = 0.0;  // radians in [0, 2pi)

  friend bool operator==(const PolarPoint&, const PolarPoint&) = default;
};

struct RegionId {
  int sector = 1;  // 1..n_s
  int track = 1;   // 1..n_t

  friend auto operator<=>(const RegionId&, const RegionId&) = default;
};

std::string to_string(const RegionId& region);

/// Circle radius R, track width r and sector angle theta (radians).
///
/// Construct through make(); it checks 0 < r <= R, that R/r and 2pi/theta are
/// integral within 1e-9, and snaps r and theta onto the exact tiling values.
/// theta must lie in (0, pi]; theta = 2pi is additionally accepted as the
/// degenerate single-sector disc.
class PartitionSpec {
 public:
  static PartitionSpec make(double radius, double track_width, double theta);
  static PartitionSpec from_counts(double radius, int tracks, int sectors);

  double radius() const { return radius_; }
  double track_width() const { return track_width_; }
  double theta() const { return theta_; }
  int tracks() const { return tracks_; }
  int sectors() const { return sectors_; }

  friend bool operator==(const PartitionSpec&, const PartitionSpec&) = default;

 private:
  PartitionSpec(double radius, double track_width, double theta, int tracks, int sectors)
      : radius_(radius), track_width_(track_width), theta_(theta), tracks_(tracks), sectors_(sectors) {}

  double radius_;
  double track_width_;
  double theta_;
  int tracks_;
  int sectors_;
};

int track_count(const PartitionSpec& spec);
int sector_count(const PartitionSpec& spec);
int region_count(const PartitionSpec& spec);

/// Expected RFDs per square meter for N nodes spread uniformly on a disc of radius R.
double rfd_density(double n_rfds, double radius);

/// Area of a region in the given track: (i - 1/2) theta r^2.
double region_area(const PartitionSpec& spec, int track);

/// Expected number of RFDs in one region of the given track.
double expected_rfds(const PartitionSpec& spec, double n_rfds, int track);

/// FFD location: radius (track - 1/2) r on the sector bisector.
PolarPoint ffd_position(const PartitionSpec& spec, const RegionId& region);

/// Half-open bins: track i covers rho in ((i-1)r, ir], sector s covers
/// phi in [(s-1)theta, s theta). Throws OutsideAreaError when rho > R.
RegionId locate_region(const PartitionSpec& spec, const PolarPoint& p);

bool valid_region(const PartitionSpec& spec, const RegionId& region);

/// Euclidean distance between two polar points.
double distance(const PolarPoint& p, const PolarPoint& q);

/// Distance from a point to the base station at the origin.
inline double distance_to_bs(const PolarPoint& p) { return p.rho; }

/// Wraps an angle into [0, 2pi).
double wrap_angle(double phi);

PolarPoint from_cartesian(double x, double y);

}  // namespace hwsn
