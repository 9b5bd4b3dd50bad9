#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace auv {

struct PathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ordered 3D waypoints (m, NED).
struct WaypointSet {
  std::vector<Eigen::Vector3d> points;

  std::size_t size() const { return points.size(); }

  /// One "x y z" triple per line; '#' comments allowed.
  static WaypointSet load(const std::string& path);
  void save(const std::string& path) const;
};

/// A point on the path with its tangent direction expressed as azimuth and
/// elevation angles (rad) and its arc-length coordinate (m).
struct PathPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double azimuth = 0.0;    // chi_p
  double elevation = 0.0;  // upsilon_p, positive = tangent points upward
  double arc_length = 0.0; // s
};

/// Serret-Frenet tracking errors relative to the closest path point.
struct TrackingError {
  double along_track = 0.0;    // s_bar, ~0 by construction
  double cross_track = 0.0;    // e, positive to starboard of the path tangent
  double vertical_track = 0.0; // h_err, positive below the path (z down)
};

/// Smooth curvature-continuous path through waypoints: one quadratic per
/// interior waypoint triple per axis, merged with a smoothstep membership
/// weight on the overlapping intervals, parametrized by arc length through a
/// cumulative chord-length lookup table.
class QpmiPath {
 public:
  /// Requires n_w >= 3 and pairwise-distinct consecutive waypoints.
  static QpmiPath build(const WaypointSet& waypoints, double arc_resolution = 0.1);

  Eigen::Vector3d position(double s) const;
  Eigen::Vector3d tangent(double s) const;  // unit vector
  PathPoint point_at(double s) const;

  double total_length() const { return arc_table_.back(); }
  std::size_t waypoint_count() const { return waypoints_.size(); }
  const Eigen::Vector3d& waypoint(std::size_t i) const { return waypoints_[i]; }
  /// Arc-length coordinate of waypoint i.
  double waypoint_arc_length(std::size_t i) const;

  /// Global closest point by coarse scan plus golden-section refinement.
  /// Ties break toward smaller arc length.
  PathPoint closest_point(const Eigen::Vector3d& p) const;

  /// Closest point restricted to [s_hint - back, s_hint + ahead]; used for
  /// warm-started queries along a trajectory.
  PathPoint closest_point_near(const Eigen::Vector3d& p, double s_hint, double back = 5.0,
                               double ahead = 10.0) const;

 private:
  QpmiPath() = default;

  Eigen::Vector3d eval_param(double t) const;
  Eigen::Vector3d deriv_param(double t) const;
  double param_from_arc(double s) const;
  PathPoint refine(const Eigen::Vector3d& p, double s_lo, double s_hi) const;

  std::vector<Eigen::Vector3d> waypoints_;
  std::vector<double> knots_;  // chord-length parameter of each waypoint
  // Quadratic through waypoints (k-1, k, k+1), coefficient vectors of t^2, t, 1.
  struct Segment {
    Eigen::Vector3d a, b, c;
  };
  std::vector<Segment> segments_;  // index k-1 for interior waypoint k
  std::vector<double> param_table_;
  std::vector<double> arc_table_;
};

/// Tracking errors of position p relative to a (closest) path point.
TrackingError tracking_errors(const PathPoint& path_point, const Eigen::Vector3d& p);

/// Desired azimuth and elevation from lookahead-based guidance,
/// wrapped to (-pi, pi].
std::pair<double, double> guidance_angles(const TrackingError& err, const PathPoint& path_point,
                                          double lookahead);

}  // namespace auv
