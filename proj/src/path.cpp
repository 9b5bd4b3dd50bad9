#include "auv/path.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "auv/dynamics.hpp"  // wrap_angle

namespace auv {

WaypointSet WaypointSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PathError("cannot open waypoint file: " + path);
  WaypointSet ws;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ls(line);
    double x, y, z;
    if (ls >> x >> y >> z) {
      ws.points.emplace_back(x, y, z);
    } else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
      throw PathError(path + ":" + std::to_string(lineno) + ": expected 'x y z'");
    }
  }
  return ws;
}

void WaypointSet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw PathError("cannot write waypoint file: " + path);
  out.precision(17);
  for (const auto& p : points) out << p.x() << " " << p.y() << " " << p.z() << "\n";
}

namespace {

double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }
double smoothstep_deriv(double s) { return 6.0 * s * (1.0 - s); }

}  // namespace

QpmiPath QpmiPath::build(const WaypointSet& waypoints, double arc_resolution) {
  const std::size_t n = waypoints.size();
  if (n < 3) throw PathError("QPMI path needs at least 3 waypoints");
  QpmiPath path;
  path.waypoints_ = waypoints.points;
  path.knots_.resize(n);
  path.knots_[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double chord = (waypoints.points[i] - waypoints.points[i - 1]).norm();
    if (chord < 1e-9) throw PathError("degenerate waypoint pair at index " + std::to_string(i));
    path.knots_[i] = path.knots_[i - 1] + chord;
  }

  // One quadratic per interior waypoint, through the surrounding triple.
  for (std::size_t k = 1; k + 1 < n; ++k) {
    Eigen::Matrix3d vander;
    Eigen::Matrix3d values;
    for (int j = 0; j < 3; ++j) {
      const double t = path.knots_[k - 1 + j];
      vander.row(j) << t * t, t, 1.0;
      values.row(j) = waypoints.points[k - 1 + j].transpose();
    }
    const Eigen::Matrix3d coeff = vander.colPivHouseholderQr().solve(values);
    if (!coeff.allFinite()) {
      throw PathError("degenerate waypoint triple at index " + std::to_string(k));
    }
    path.segments_.push_back({coeff.row(0), coeff.row(1), coeff.row(2)});
  }

  // Arc-length lookup table by cumulative chord length.
  const double t_end = path.knots_.back();
  const double dt = std::max(arc_resolution * 0.5, 1e-4);
  const std::size_t samples = static_cast<std::size_t>(std::ceil(t_end / dt)) + 1;
  path.param_table_.resize(samples);
  path.arc_table_.resize(samples);
  Eigen::Vector3d prev = path.eval_param(0.0);
  path.param_table_[0] = 0.0;
  path.arc_table_[0] = 0.0;
  for (std::size_t i = 1; i < samples; ++i) {
    const double t = std::min(t_end, static_cast<double>(i) * dt);
    const Eigen::Vector3d cur = path.eval_param(t);
    path.param_table_[i] = t;
    path.arc_table_[i] = path.arc_table_[i - 1] + (cur - prev).norm();
    prev = cur;
  }
  return path;
}

Eigen::Vector3d QpmiPath::eval_param(double t) const {
  t = std::clamp(t, knots_.front(), knots_.back());
  const std::size_t n = knots_.size();
  std::size_t i =
      std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin();
  i = std::clamp<std::size_t>(i, 1, n - 1) - 1;  // interval [knots_[i], knots_[i+1]]
  const std::size_t left = std::clamp<std::size_t>(i, 1, n - 2);
  const std::size_t right = std::clamp<std::size_t>(i + 1, 1, n - 2);
  const auto eval = [t](const Segment& seg) -> Eigen::Vector3d {
    return seg.a * t * t + seg.b * t + seg.c;
  };
  if (left == right) return eval(segments_[left - 1]);
  const double mu = smoothstep((t - knots_[i]) / (knots_[i + 1] - knots_[i]));
  return (1.0 - mu) * eval(segments_[left - 1]) + mu * eval(segments_[right - 1]);
}

Eigen::Vector3d QpmiPath::deriv_param(double t) const {
  t = std::clamp(t, knots_.front(), knots_.back());
  const std::size_t n = knots_.size();
  std::size_t i =
      std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin();
  i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
  const std::size_t left = std::clamp<std::size_t>(i, 1, n - 2);
  const std::size_t right = std::clamp<std::size_t>(i + 1, 1, n - 2);
  const auto eval = [t](const Segment& seg) -> Eigen::Vector3d {
    return seg.a * t * t + seg.b * t + seg.c;
  };
  const auto deriv = [t](const Segment& seg) -> Eigen::Vector3d {
    return 2.0 * seg.a * t + seg.b;
  };
  if (left == right) return deriv(segments_[left - 1]);
  const double span = knots_[i + 1] - knots_[i];
  const double s = (t - knots_[i]) / span;
  const double mu = smoothstep(s);
  const double dmu = smoothstep_deriv(s) / span;
  const Segment& ql = segments_[left - 1];
  const Segment& qr = segments_[right - 1];
  return (1.0 - mu) * deriv(ql) + mu * deriv(qr) + dmu * (eval(qr) - eval(ql));
}

double QpmiPath::param_from_arc(double s) const {
  s = std::clamp(s, 0.0, arc_table_.back());
  const auto it = std::upper_bound(arc_table_.begin(), arc_table_.end(), s);
  std::size_t i = it - arc_table_.begin();
  i = std::clamp<std::size_t>(i, 1, arc_table_.size() - 1);
  const double span = arc_table_[i] - arc_table_[i - 1];
  const double f = span > 0 ? (s - arc_table_[i - 1]) / span : 0.0;
  return param_table_[i - 1] + f * (param_table_[i] - param_table_[i - 1]);
}

double QpmiPath::waypoint_arc_length(std::size_t i) const {
  const double t = knots_.at(i);
  const auto it = std::upper_bound(param_table_.begin(), param_table_.end(), t);
  std::size_t j = std::clamp<std::size_t>(it - param_table_.begin(), 1, param_table_.size() - 1);
  const double span = param_table_[j] - param_table_[j - 1];
  const double f = span > 0 ? (t - param_table_[j - 1]) / span : 0.0;
  return arc_table_[j - 1] + f * (arc_table_[j] - arc_table_[j - 1]);
}

Eigen::Vector3d QpmiPath::position(double s) const { return eval_param(param_from_arc(s)); }

Eigen::Vector3d QpmiPath::tangent(double s) const {
  const Eigen::Vector3d d = deriv_param(param_from_arc(s));
  const double norm = d.norm();
  if (norm < 1e-12) throw PathError("degenerate path tangent");
  return d / norm;
}

PathPoint QpmiPath::point_at(double s) const {
  s = std::clamp(s, 0.0, total_length());
  PathPoint pp;
  pp.position = position(s);
  const Eigen::Vector3d t = tangent(s);
  pp.azimuth = std::atan2(t.y(), t.x());
  pp.elevation = std::atan2(-t.z(), std::hypot(t.x(), t.y()));
  pp.arc_length = s;
  return pp;
}

PathPoint QpmiPath::refine(const Eigen::Vector3d& p, double s_lo, double s_hi) const {
  // Golden-section minimization of |position(s) - p|.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = std::max(0.0, s_lo), b = std::min(total_length(), s_hi);
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = (position(x1) - p).squaredNorm();
  double f2 = (position(x2) - p).squaredNorm();
  while (b - a > 1e-7) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = (position(x1) - p).squaredNorm();
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = (position(x2) - p).squaredNorm();
    }
  }
  return point_at(0.5 * (a + b));
}

PathPoint QpmiPath::closest_point(const Eigen::Vector3d& p) const {
  const double length = total_length();
  const double step = std::min(0.25, length / 16.0);
  double best_s = 0.0;
  double best_d = (position(0.0) - p).squaredNorm();
  for (double s = step; s <= length + 0.5 * step; s += step) {
    const double sc = std::min(s, length);
    const double d = (position(sc) - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_s = sc;
    }
  }
  return refine(p, best_s - step, best_s + step);
}

PathPoint QpmiPath::closest_point_near(const Eigen::Vector3d& p, double s_hint, double back,
                                       double ahead) const {
  const double lo = std::max(0.0, s_hint - back);
  const double hi = std::min(total_length(), s_hint + ahead);
  const double step = 0.25;
  double best_s = lo;
  double best_d = (position(lo) - p).squaredNorm();
  for (double s = lo + step; s <= hi + 0.5 * step; s += step) {
    const double sc = std::min(s, hi);
    const double d = (position(sc) - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_s = sc;
    }
  }
  return refine(p, best_s - step, best_s + step);
}

TrackingError tracking_errors(const PathPoint& path_point, const Eigen::Vector3d& p) {
  const double cc = std::cos(path_point.azimuth), sc = std::sin(path_point.azimuth);
  const double cu = std::cos(path_point.elevation), su = std::sin(path_point.elevation);
  const Eigen::Vector3d x_sf(cc * cu, sc * cu, -su);
  const Eigen::Vector3d y_sf(-sc, cc, 0.0);
  const Eigen::Vector3d z_sf = x_sf.cross(y_sf);
  const Eigen::Vector3d d = p - path_point.position;
  return {x_sf.dot(d), y_sf.dot(d), z_sf.dot(d)};
}

std::pair<double, double> guidance_angles(const TrackingError& err, const PathPoint& path_point,
                                          double lookahead) {
  const double chi_r = std::atan(-err.cross_track / lookahead);
  const double upsilon_r = std::atan(
      err.vertical_track / std::sqrt(err.cross_track * err.cross_track + lookahead * lookahead));
  return {wrap_angle(path_point.azimuth + chi_r), wrap_angle(path_point.elevation + upsilon_r)};
}

}  // namespace auv
