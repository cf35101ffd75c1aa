#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "billiards/vec.hpp"

namespace billiards {

enum class SpaceKind { euclidean, flat_torus, hyperbolic_ball, sphere };

/// A unit tangent element (q, v) of SM. `q` is in chart coordinates, `v` is a
/// chart tangent vector of metric length one.
struct PhasePoint {
  Vec q;
  Vec v;
};

/// Constant-curvature model space of dimension 2 or 3.
///
/// Every space carries an ambient linear model in which geodesics are
/// closed-form and boundary pieces are level sets of simple functions:
///   - Euclidean and flat torus: the chart itself (curvature 0);
///   - sphere: the embedding in R^{n+1}, chart == ambient (curvature +1);
///   - hyperbolic: the hyperboloid in Minkowski space R^{n,1}, with the time
///     coordinate in slot 3, reached from the Poincare ball chart
///     (metric 4|dq|^2 / (1 - |q|^2)^2) by stereographic lifting.
class ModelSpace {
 public:
  static constexpr std::size_t kTimeSlot = 3;

  static ModelSpace euclidean(int n) { return ModelSpace(SpaceKind::euclidean, n, {}); }

  static ModelSpace flat_torus(const std::vector<double>& periods) {
    Vec p;
    for (std::size_t i = 0; i < periods.size() && i < 3; ++i) {
      if (!(periods[i] > 0.0)) throw std::invalid_argument("torus periods must be strictly positive");
      p[i] = periods[i];
    }
    return ModelSpace(SpaceKind::flat_torus, static_cast<int>(periods.size()), p);
  }

  static ModelSpace hyperbolic_ball(int n) { return ModelSpace(SpaceKind::hyperbolic_ball, n, {}); }
  static ModelSpace sphere(int n) { return ModelSpace(SpaceKind::sphere, n, {}); }

  SpaceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Number of chart coordinates (n + 1 for the embedded sphere).
  int chart_dim() const { return kind_ == SpaceKind::sphere ? dim_ + 1 : dim_; }
  int curvature() const {
    switch (kind_) {
      case SpaceKind::sphere: return 1;
      case SpaceKind::hyperbolic_ball: return -1;
      default: return 0;
    }
  }
  bool is_torus() const { return kind_ == SpaceKind::flat_torus; }
  const Vec& periods() const { return periods_; }

  std::string name() const {
    switch (kind_) {
      case SpaceKind::euclidean: return "euclidean";
      case SpaceKind::flat_torus: return "flat_torus";
      case SpaceKind::hyperbolic_ball: return "hyperbolic_ball";
      case SpaceKind::sphere: return "sphere";
    }
    return "unknown";
  }

  // --- ambient model -------------------------------------------------------

  double ambient_dot(const Vec& a, const Vec& b) const {
    double s = dot(a, b);
    if (kind_ == SpaceKind::hyperbolic_ball) s -= 2.0 * a[kTimeSlot] * b[kTimeSlot];
    return s;
  }

  Vec lift(const Vec& q) const {
    if (kind_ != SpaceKind::hyperbolic_ball) return q;
    const double r2 = dot(q, q);
    const double d = 1.0 - r2;
    Vec x = q * (2.0 / d);
    x[kTimeSlot] = (1.0 + r2) / d;
    return x;
  }

  Vec lift_tangent(const Vec& q, const Vec& v) const {
    if (kind_ != SpaceKind::hyperbolic_ball) return v;
    const double d = 1.0 - dot(q, q);
    const double qv = dot(q, v);
    Vec w = v * (2.0 / d) + q * (4.0 * qv / (d * d));
    w[kTimeSlot] = 4.0 * qv / (d * d);
    return w;
  }

  Vec lower(const Vec& x) const {
    if (kind_ != SpaceKind::hyperbolic_ball) return x;
    Vec q = spatial(x) / (1.0 + x[kTimeSlot]);
    return q;
  }

  Vec lower_tangent(const Vec& x, const Vec& w) const {
    if (kind_ != SpaceKind::hyperbolic_ball) return w;
    const double den = 1.0 + x[kTimeSlot];
    return spatial(w) / den - spatial(x) * (w[kTimeSlot] / (den * den));
  }

  /// Orthogonal projection of an ambient vector onto the tangent space at x.
  Vec project_tangent(const Vec& x, const Vec& w) const {
    const int k = curvature();
    if (k == 0) return w;
    return w - x * (static_cast<double>(k) * ambient_dot(w, x));
  }

  /// Closed-form geodesic in the ambient model: position and velocity after
  /// arc length s from (x, w), with w a unit tangent at x.
  void ambient_geodesic(const Vec& x, const Vec& w, double s, Vec& x_out, Vec& w_out) const {
    switch (curvature()) {
      case 1: {
        const double c = std::cos(s), sn = std::sin(s);
        x_out = x * c + w * sn;
        w_out = w * c - x * sn;
        return;
      }
      case -1: {
        const double c = std::cosh(s), sn = std::sinh(s);
        x_out = x * c + w * sn;
        w_out = w * c + x * sn;
        return;
      }
      default:
        x_out = x + w * s;
        w_out = w;
        return;
    }
  }

  // --- chart metric --------------------------------------------------------

  /// Conformal factor lambda with g = lambda^2 |.|^2 in the chart.
  double conformal_factor(const Vec& q) const {
    if (kind_ != SpaceKind::hyperbolic_ball) return 1.0;
    return 2.0 / (1.0 - dot(q, q));
  }

  double metric_dot(const Vec& q, const Vec& u, const Vec& w) const {
    const double l = conformal_factor(q);
    return l * l * dot(u, w);
  }

  double metric_norm(const Vec& q, const Vec& u) const { return std::sqrt(metric_dot(q, u, u)); }

  Vec normalize_tangent(const Vec& q, const Vec& v) const { return v / metric_norm(q, v); }

  /// Canonical chart representative (torus: fundamental domain [0, P)).
  Vec canonical(const Vec& q) const {
    if (kind_ == SpaceKind::flat_torus) {
      Vec r = q;
      for (int i = 0; i < dim_; ++i) {
        const double p = periods_[i];
        r[i] = q[i] - p * std::floor(q[i] / p);
        if (r[i] >= p) r[i] -= p;
      }
      return r;
    }
    if (kind_ == SpaceKind::sphere) return normalized(q);
    return q;
  }

  /// Chart displacement from a to b (minimum image on the torus).
  Vec displacement(const Vec& a, const Vec& b) const {
    Vec d = b - a;
    if (kind_ == SpaceKind::flat_torus) {
      for (int i = 0; i < dim_; ++i) d[i] -= periods_[i] * std::round(d[i] / periods_[i]);
    }
    return d;
  }

  double chart_distance(const Vec& a, const Vec& b) const { return norm(displacement(a, b)); }

  /// Geodesic distance between two chart points.
  double distance(const Vec& a, const Vec& b) const {
    switch (kind_) {
      case SpaceKind::hyperbolic_ball: {
        const double den = std::sqrt((1.0 - dot(a, a)) * (1.0 - dot(b, b)));
        return 2.0 * std::asinh(norm(a - b) / den);
      }
      case SpaceKind::sphere: return 2.0 * std::asin(std::fmin(1.0, norm(a - b) / 2.0));
      default: return chart_distance(a, b);
    }
  }

  /// Chart-validity of a point: inside the Poincare ball, on the unit sphere.
  bool valid_point(const Vec& q, double tol = 1e-9) const {
    for (int i = chart_dim(); i < static_cast<int>(Vec::kCapacity); ++i)
      if (q[i] != 0.0) return false;
    if (kind_ == SpaceKind::hyperbolic_ball) return dot(q, q) < 1.0;
    if (kind_ == SpaceKind::sphere) return std::fabs(norm(q) - 1.0) <= tol;
    return true;
  }

  /// Orthonormal basis (w.r.t. the ambient product) of the tangent space at
  /// the ambient point x, built by Gram-Schmidt from the coordinate axes.
  std::vector<Vec> ambient_tangent_basis(const Vec& x) const {
    std::vector<Vec> out;
    const int axes = kind_ == SpaceKind::hyperbolic_ball ? dim_ : chart_dim();
    for (int i = 0; i < axes && static_cast<int>(out.size()) < dim_; ++i) {
      Vec w = project_tangent(x, basis(static_cast<std::size_t>(i)));
      for (const Vec& b : out) w -= b * ambient_dot(w, b);
      const double nn = ambient_dot(w, w);
      if (nn > 1e-6) out.push_back(w / std::sqrt(nn));
    }
    return out;
  }

  friend bool operator==(const ModelSpace&, const ModelSpace&) = default;

 private:
  ModelSpace(SpaceKind kind, int n, Vec periods) : kind_(kind), dim_(n), periods_(periods) {
    if (n < 2 || n > 3) throw std::invalid_argument("model space dimension must be 2 or 3");
  }

  static Vec spatial(const Vec& x) {
    Vec s = x;
    s[kTimeSlot] = 0.0;
    return s;
  }

  SpaceKind kind_;
  int dim_;
  Vec periods_;
};

/// Volume of the Euclidean unit k-ball.
inline double unit_ball_volume(int k) {
  switch (k) {
    case 0: return 1.0;
    case 1: return 2.0;
    case 2: return M_PI;
    case 3: return 4.0 * M_PI / 3.0;
    default: return std::pow(M_PI, k / 2.0) / std::tgamma(k / 2.0 + 1.0);
  }
}

/// Volume of the Euclidean unit k-sphere S^k in R^{k+1}.
inline double unit_sphere_volume(int k) { return (k + 1) * unit_ball_volume(k + 1); }

}  // namespace billiards
