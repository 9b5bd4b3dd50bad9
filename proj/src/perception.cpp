#include "auv/perception.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace auv {

SonarConfig SonarConfig::from_config(const Config& cfg) {
  SonarConfig s;
  s.rows = cfg.get_int("sonar.rows");
  s.cols = cfg.get_int("sonar.cols");
  s.apex = cfg.get_double("sonar.apex_deg") * M_PI / 180.0;
  s.max_range = cfg.get_double("sonar.range");
  s.update_period = cfg.get_double("sonar.update_period");
  return s;
}

double SonarConfig::ray_elevation(int row) const {
  // Rays at -apex/2, ..., +apex/2 with uniform spacing (10 deg for 15/140).
  return -apex / 2.0 + apex * row / (rows - 1);
}

double SonarConfig::ray_azimuth(int col) const {
  return -apex / 2.0 + apex * col / (cols - 1);
}

Eigen::Vector3d SonarConfig::ray_direction_body(int row, int col) const {
  const double el = ray_elevation(row);
  const double az = ray_azimuth(col);
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), -std::sin(el)};
}

double ray_sphere_distance(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                           const Obstacle& obstacle, double max_range) {
  const Eigen::Vector3d oc = origin - obstacle.center;
  const double c = oc.squaredNorm() - obstacle.radius * obstacle.radius;
  if (c <= 0.0) return 0.0;  // origin inside the sphere
  const double b = oc.dot(dir);  // unit direction: a = 1
  const double disc = b * b - c;
  if (disc < 0.0) return max_range;
  const double t = -b - std::sqrt(disc);
  if (t < 0.0 || t > max_range) return max_range;
  return t;
}

SonarImage scan(const VehicleState& state, const std::vector<Obstacle>& obstacles,
                const SonarConfig& cfg) {
  SonarImage img;
  img.rows = cfg.rows;
  img.cols = cfg.cols;
  img.max_range = cfg.max_range;
  img.distances = Eigen::MatrixXd::Constant(cfg.rows, cfg.cols, cfg.max_range);
  if (obstacles.empty()) return img;
  const Eigen::Matrix3d rot = rotation_body_to_ned(state.attitude);
  for (int row = 0; row < cfg.rows; ++row) {
    for (int col = 0; col < cfg.cols; ++col) {
      const Eigen::Vector3d dir = rot * cfg.ray_direction_body(row, col);
      double d = cfg.max_range;
      for (const Obstacle& obs : obstacles) {
        d = std::min(d, ray_sphere_distance(state.position, dir, obs, cfg.max_range));
      }
      img.distances(row, col) = d;
    }
  }
  return img;
}

double closeness(double d, double d_max) {
  return std::clamp(1.0 - d / d_max, 0.0, 1.0);
}

Eigen::MatrixXd min_pool(const SonarImage& image) {
  constexpr int kOut = 8;
  const auto block_start = [&](int b, int extent) {
    return (2 * b + 1 < extent) ? 2 * b : extent - 2;
  };
  Eigen::MatrixXd pooled(kOut, kOut);
  for (int br = 0; br < kOut; ++br) {
    for (int bc = 0; bc < kOut; ++bc) {
      const int r0 = block_start(br, image.rows);
      const int c0 = block_start(bc, image.cols);
      const double d = image.distances.block(r0, c0, 2, 2).minCoeff();
      pooled(br, bc) = closeness(d, image.max_range);
    }
  }
  return pooled;
}

std::vector<Obstacle> load_obstacles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open obstacle file: " + path);
  std::vector<Obstacle> obstacles;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ls(line);
    double x, y, z, r;
    if (ls >> x >> y >> z >> r) obstacles.push_back({{x, y, z}, r});
  }
  return obstacles;
}

void save_obstacles(const std::vector<Obstacle>& obstacles, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write obstacle file: " + path);
  out.precision(17);
  for (const Obstacle& o : obstacles) {
    out << o.center.x() << " " << o.center.y() << " " << o.center.z() << " " << o.radius << "\n";
  }
}

void save_sonar_csv(const SonarImage& image, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sonar file: " + path);
  out.precision(17);
  for (int r = 0; r < image.rows; ++r) {
    for (int c = 0; c < image.cols; ++c) {
      out << image.distances(r, c) << (c + 1 == image.cols ? "\n" : ",");
    }
  }
}

}  // namespace auv
