#pragma once

#include <Eigen/Dense>
#include <vector>

#include "auv/config.hpp"
#include "auv/dynamics.hpp"

namespace auv {

/// Forward-looking sonar geometry: a rows x cols ray grid over the apex,
/// body-fixed, with a hard range cut-off.
struct SonarConfig {
  int rows = 15;
  int cols = 15;
  double apex = 140.0 * M_PI / 180.0;
  double max_range = 25.0;       // d_max, m
  double update_period = 1.0;    // s

  static SonarConfig from_config(const Config& cfg);

  /// Vessel-relative elevation of grid row j (rad); rows span [-apex/2, apex/2].
  double ray_elevation(int row) const;
  /// Vessel-relative azimuth of grid column i (rad).
  double ray_azimuth(int col) const;
  /// Unit ray direction in the body frame. Elevation positive = upward.
  Eigen::Vector3d ray_direction_body(int row, int col) const;
};

/// Spherical obstacle in NED coordinates.
struct Obstacle {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 1.0;
};

/// Range image: distances in [0, d_max]; cells with no hit hold exactly d_max.
struct SonarImage {
  int rows = 0;
  int cols = 0;
  double max_range = 0.0;
  Eigen::MatrixXd distances;  // rows x cols

  double at(int row, int col) const { return distances(row, col); }
};

/// Distance along a unit ray to the nearest sphere surface, capped at
/// max_range. Returns 0 when the origin lies inside the sphere.
double ray_sphere_distance(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                           const Obstacle& obstacle, double max_range);

/// Cast the full ray grid from the vehicle pose against all obstacles.
SonarImage scan(const VehicleState& state, const std::vector<Obstacle>& obstacles,
                const SonarConfig& cfg);

/// Obstacle closeness c(d) = clip(1 - d/d_max, 0, 1).
double closeness(double d, double d_max);

/// Reduce a 15x15 image to an 8x8 closeness grid by minimum pooling over
/// distances. Blocks along each axis cover index pairs {0,1}, {2,3}, ...,
/// {12,13} and finally {13,14}; the last block shares row/column 13 with its
/// neighbor so that 15 cells fold into 8 blocks.
Eigen::MatrixXd min_pool(const SonarImage& image);

/// Obstacle scenes as text: "cx cy cz radius" per line.
std::vector<Obstacle> load_obstacles(const std::string& path);
void save_obstacles(const std::vector<Obstacle>& obstacles, const std::string& path);

/// Sonar image as CSV (one row per grid row).
void save_sonar_csv(const SonarImage& image, const std::string& path);

}  // namespace auv
