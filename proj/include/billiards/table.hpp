#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "billiards/expected.hpp"
#include "billiards/space.hpp"
#include "billiards/vec.hpp"

namespace billiards {

/// Numerical quarantine parameters of a table.
struct Tolerances {
  double hit_tol = 1e-10;       // minimal arc length for a boundary hit
  double grazing_tol = 1e-7;    // |cos| below this is a tangency
  double boundary_tol = 1e-8;   // |gauge| below this counts as on the boundary
  double l_max = 0.0;           // length cap; 0 selects 1e4 x diameter
};

enum class Side { obstacle, outer_wall };

/// Geodesic ball; `center` in chart coordinates, `radius` is geodesic.
struct BallShape {
  Vec center;
  double radius = 1.0;
};

/// Ambient half-space {<normal, X> < offset}. In flat spaces this is an
/// ordinary half-space, on the sphere a cap, on the hyperboloid a region
/// bounded by a hyperplane (offset 0) or an equidistant hypersurface.
struct HalfSpaceShape {
  Vec normal;
  double offset = 0.0;
};

/// Star-shaped planar region {|q - c| < r(theta)} with
/// r(theta) = a0 + sum_k a_k cos(k theta) + b_k sin(k theta).
struct FourierShape {
  Vec center;
  std::vector<double> cos_coeffs{1.0};  // a_0, a_1, ...
  std::vector<double> sin_coeffs{0.0};  // b_0 (ignored), b_1, ...

  std::size_t harmonics() const { return std::max(cos_coeffs.size(), sin_coeffs.size()); }

  /// r(theta) and r'(theta).
  std::pair<double, double> radius(double theta) const {
    double r = cos_coeffs.empty() ? 0.0 : cos_coeffs[0];
    double dr = 0.0;
    const double c1 = std::cos(theta), s1 = std::sin(theta);
    double ck = 1.0, sk = 0.0;
    for (std::size_t k = 1; k < harmonics(); ++k) {
      const double cn = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = cn;
      const double a = k < cos_coeffs.size() ? cos_coeffs[k] : 0.0;
      const double b = k < sin_coeffs.size() ? sin_coeffs[k] : 0.0;
      r += a * ck + b * sk;
      dr += static_cast<double>(k) * (b * ck - a * sk);
    }
    return {r, dr};
  }

  /// Rigorous upper bound of r.
  double radius_bound() const {
    double r = cos_coeffs.empty() ? 0.0 : std::fabs(cos_coeffs[0]);
    for (std::size_t k = 1; k < harmonics(); ++k) {
      r += k < cos_coeffs.size() ? std::fabs(cos_coeffs[k]) : 0.0;
      r += k < sin_coeffs.size() ? std::fabs(sin_coeffs[k]) : 0.0;
    }
    return r;
  }
};

using Shape = std::variant<BallShape, HalfSpaceShape, FourierShape>;

struct BoundaryPiece {
  Shape shape;
  Side side = Side::outer_wall;
};

/// One crossing of a geodesic with the boundary, before classification.
struct Crossing {
  double s = 0.0;
  int piece = -1;
  std::array<int, 3> image{};  // lattice image of the piece (torus only)
};

namespace detail {

/// Real roots of a*cos(s) + b*sin(s) = h in [0, 2 pi).
inline std::array<double, 2> trig_roots(double a, double b, double h, int& count) {
  const double amp = std::hypot(a, b);
  count = 0;
  std::array<double, 2> out{};
  if (amp == 0.0 || std::fabs(h) > amp) return out;
  const double phase = std::atan2(b, a);
  const double alpha = std::acos(std::clamp(h / amp, -1.0, 1.0));
  for (double r : {phase - alpha, phase + alpha}) {
    r = std::fmod(r, 2.0 * M_PI);
    if (r < 0.0) r += 2.0 * M_PI;
    out[count++] = r;
  }
  return out;
}

/// Real roots of a*cosh(s) + b*sinh(s) = h.
inline std::array<double, 2> hyperbolic_roots(double a, double b, double h, int& count) {
  // u = e^s: (a + b) u^2 - 2 h u + (a - b) = 0, u > 0.
  count = 0;
  std::array<double, 2> out{};
  const double qa = a + b, qb = -2.0 * h, qc = a - b;
  auto push = [&](double u) {
    if (u > 0.0 && std::isfinite(u)) out[count++] = std::log(u);
  };
  if (std::fabs(qa) < 1e-300) {
    if (qb != 0.0) push(-qc / qb);
    return out;
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return out;
  const double sq = std::sqrt(disc);
  const double t = -0.5 * (qb + std::copysign(sq, qb));
  if (t != 0.0) {
    push(t / qa);
    push(qc / t);
  } else {
    push(0.0);
  }
  if (count == 2 && out[0] > out[1]) std::swap(out[0], out[1]);
  return out;
}

/// Real roots of s^2 + 2 b s + c = 0 in ascending order.
inline std::array<double, 2> quadratic_roots(double b, double c, int& count) {
  count = 0;
  std::array<double, 2> out{};
  const double disc = b * b - c;
  if (disc < 0.0) return out;
  const double sq = std::sqrt(disc);
  const double t = -(b + std::copysign(sq, b));
  if (t == 0.0) {
    out[count++] = 0.0;
    out[count++] = 0.0;
    return out;
  }
  double r1 = t, r2 = c / t;
  if (r1 > r2) std::swap(r1, r2);
  out[count++] = r1;
  out[count++] = r2;
  return out;
}

}  // namespace detail

/// A billiard table: model space, boundary pieces and tolerances.
///
/// The domain is M = {q : max_i psi_i(q) <= 0} where psi_i is the domain
/// gauge of piece i: the shape gauge (signed length, negative inside the
/// shape) for outer walls and its negative for obstacles. Tables are
/// immutable after construction.
class Table {
 public:
  Table(ModelSpace space, std::vector<BoundaryPiece> pieces, Tolerances tol = {}, std::string name = {})
      : space_(space), pieces_(std::move(pieces)), tol_(tol), name_(std::move(name)) {
    prepare();
    validate();
    diameter_ = estimate_diameter();
    if (!(tol_.l_max > 0.0)) tol_.l_max = 1e4 * diameter_;
  }

  const ModelSpace& space() const { return space_; }
  const std::vector<BoundaryPiece>& pieces() const { return pieces_; }
  const Tolerances& tolerances() const { return tol_; }
  const std::string& name() const { return name_; }
  int dim() const { return space_.dim(); }
  double diameter() const { return diameter_; }
  double l_max() const { return tol_.l_max; }

  Table with_l_max(double l_max) const {
    Table t = *this;
    t.tol_.l_max = l_max;
    return t;
  }

  Table renamed(std::string name) const {
    Table t = *this;
    t.name_ = std::move(name);
    return t;
  }

  // --- gauges --------------------------------------------------------------

  /// Signed length-like distance to the shape of piece i, negative inside.
  double shape_gauge(int i, const Vec& q) const {
    const BoundaryPiece& p = pieces_[static_cast<std::size_t>(i)];
    const Vec x = space_.lift(q);
    return std::visit(
        [&](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, BallShape>) {
            return ball_distance(i, q, x) - s.radius;
          } else if constexpr (std::is_same_v<S, HalfSpaceShape>) {
            const Vec grad = space_.project_tangent(x, s.normal);
            const double gn = std::sqrt(std::fmax(space_.ambient_dot(grad, grad), 1e-300));
            return (space_.ambient_dot(s.normal, x) - s.offset) / gn;
          } else {
            const Vec d = q - s.center;
            return norm(d) - s.radius(std::atan2(d[1], d[0])).first;
          }
        },
        p.shape);
  }

  /// Domain gauge of piece i (negative on the domain side).
  double piece_gauge(int i, const Vec& q) const {
    const double g = shape_gauge(i, q);
    return pieces_[static_cast<std::size_t>(i)].side == Side::outer_wall ? g : -g;
  }

  /// Domain gauge of the table: <= 0 exactly on the closed domain.
  double gauge(const Vec& q) const {
    double g = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(pieces_.size()); ++i) g = std::max(g, piece_gauge(i, q));
    return g;
  }

  bool contains(const Vec& q, double slack = 0.0) const { return gauge(q) <= slack; }

  /// Piece whose boundary is closest to q (by |gauge|).
  int nearest_piece(const Vec& q) const {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(pieces_.size()); ++i) {
      const double d = std::fabs(piece_gauge(i, q));
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return best;
  }

  bool on_boundary(const Vec& q) const {
    const int i = nearest_piece(q);
    return i >= 0 && std::fabs(piece_gauge(i, q)) <= tol_.boundary_tol && gauge(q) <= tol_.boundary_tol;
  }

  /// Unit (in g) chart normal of piece i at q pointing into the domain.
  Vec inward_normal_of(int i, const Vec& q) const {
    const BoundaryPiece& p = pieces_[static_cast<std::size_t>(i)];
    const Vec x = space_.lift(q);
    Vec out_amb;  // outward normal of the shape, ambient
    if (const auto* f = std::get_if<FourierShape>(&p.shape)) {
      const Vec d = q - f->center;
      const double r = norm(d);
      const double th = std::atan2(d[1], d[0]);
      const auto [rad, drad] = f->radius(th);
      (void)rad;
      const Vec radial = d / r;
      const Vec angular{-radial[1], radial[0]};
      out_amb = normalized(radial - angular * (drad / r));
    } else if (const auto* h = std::get_if<HalfSpaceShape>(&p.shape)) {
      out_amb = space_.project_tangent(x, h->normal);
    } else {
      const Vec c = ball_center_near(i, q);
      out_amb = -space_.project_tangent(x, space_.lift(c) - x);
    }
    if (std::holds_alternative<HalfSpaceShape>(p.shape) || std::holds_alternative<BallShape>(p.shape)) {
      out_amb = out_amb / std::sqrt(space_.ambient_dot(out_amb, out_amb));
    }
    Vec n = space_.lower_tangent(x, out_amb);
    n = space_.normalize_tangent(q, n);
    return p.side == Side::outer_wall ? -n : n;
  }

  /// Projects q onto piece i where a closed form exists (balls, flat
  /// half-spaces); returns q unchanged otherwise.
  Vec snap_to_piece(int i, const Vec& q) const {
    const BoundaryPiece& p = pieces_[static_cast<std::size_t>(i)];
    if (const auto* b = std::get_if<BallShape>(&p.shape)) {
      if (space_.curvature() == 0) {
        const Vec c = ball_center_near(i, q);
        const Vec d = q - c;
        const double r = norm(d);
        if (r == 0.0) return q;
        return space_.canonical(c + d * (b->radius / r));
      }
      const Vec x = space_.lift(q);
      const Vec cx = space_.lift(b->center);
      Vec w = space_.project_tangent(cx, x);
      const double wn = space_.ambient_dot(w, w);
      if (!(wn > 0.0)) return q;
      w = w / std::sqrt(wn);
      Vec xs;
      if (space_.curvature() > 0) {
        xs = cx * std::cos(b->radius) + w * std::sin(b->radius);
      } else {
        xs = cx * std::cosh(b->radius) + w * std::sinh(b->radius);
      }
      return space_.lower(xs);
    }
    if (const auto* h = std::get_if<HalfSpaceShape>(&p.shape); h && space_.curvature() == 0) {
      return q - h->normal * ((dot(h->normal, q) - h->offset) / dot(h->normal, h->normal));
    }
    return q;
  }

  // --- crossings -----------------------------------------------------------

  /// Smallest s in (hit_tol, s_cap] where the geodesic from z meets the shape
  /// boundary of any piece. Returns nullopt when no crossing exists.
  std::optional<Crossing> first_crossing(const PhasePoint& z, double s_cap) const {
    if (space_.is_torus()) return first_crossing_torus(z, s_cap);
    const Vec x = space_.lift(z.q);
    const Vec w = space_.lift_tangent(z.q, z.v);
    std::optional<Crossing> best;
    for (int i = 0; i < static_cast<int>(pieces_.size()); ++i) {
      const double limit = best ? best->s : s_cap;
      const double s = piece_crossing(i, z, x, w, limit);
      if (s <= limit && (!best || s < best->s)) best = Crossing{s, i, {}};
    }
    return best;
  }

  /// Center of ball piece i, nearest lattice image to q on the torus.
  Vec ball_center_near(int i, const Vec& q) const {
    const auto& b = std::get<BallShape>(pieces_[static_cast<std::size_t>(i)].shape);
    if (!space_.is_torus()) return b.center;
    return q - space_.displacement(b.center, q);
  }

 private:
  double ball_distance(int i, const Vec& q, const Vec& x) const {
    const auto& b = std::get<BallShape>(pieces_[static_cast<std::size_t>(i)].shape);
    switch (space_.kind()) {
      case SpaceKind::sphere: return std::acos(std::clamp(dot(b.center, x), -1.0, 1.0));
      case SpaceKind::hyperbolic_ball: return space_.distance(b.center, q);
      default: return space_.chart_distance(b.center, q);
    }
  }

  /// Crossing of the geodesic (ambient x, w) with piece i; +inf if none.
  double piece_crossing(int i, const PhasePoint& z, const Vec& x, const Vec& w, double limit) const {
    const double tol = tol_.hit_tol;
    const double inf = std::numeric_limits<double>::infinity();
    const BoundaryPiece& p = pieces_[static_cast<std::size_t>(i)];
    double best = inf;
    auto take = [&](double s) {
      if (s > tol && s < best) best = s;
    };
    int cnt = 0;
    if (const auto* b = std::get_if<BallShape>(&p.shape)) {
      switch (space_.curvature()) {
        case 0: {
          const Vec d = x - b->center;
          const auto r = detail::quadratic_roots(dot(d, w), dot(d, d) - b->radius * b->radius, cnt);
          for (int k = 0; k < cnt; ++k) take(r[k]);
          break;
        }
        case 1: {
          const auto r = detail::trig_roots(dot(b->center, x), dot(b->center, w), std::cos(b->radius), cnt);
          for (int k = 0; k < cnt; ++k)
            if (r[k] < 2.0 * M_PI - tol) take(r[k]);
          break;
        }
        default: {
          const Vec c = ball_ambient_[static_cast<std::size_t>(i)];
          const auto r = detail::hyperbolic_roots(-space_.ambient_dot(c, x), -space_.ambient_dot(c, w),
                                                  std::cosh(b->radius), cnt);
          for (int k = 0; k < cnt; ++k) take(r[k]);
          break;
        }
      }
    } else if (const auto* h = std::get_if<HalfSpaceShape>(&p.shape)) {
      const double a = space_.ambient_dot(h->normal, x), bb = space_.ambient_dot(h->normal, w);
      switch (space_.curvature()) {
        case 0:
          if (bb != 0.0) take((h->offset - a) / bb);
          break;
        case 1: {
          const auto r = detail::trig_roots(a, bb, h->offset, cnt);
          for (int k = 0; k < cnt; ++k)
            if (r[k] < 2.0 * M_PI - tol) take(r[k]);
          break;
        }
        default: {
          const auto r = detail::hyperbolic_roots(a, bb, h->offset, cnt);
          for (int k = 0; k < cnt; ++k) take(r[k]);
          break;
        }
      }
    } else {
      best = fourier_crossing(std::get<FourierShape>(p.shape), p.side, z, limit);
    }
    return best;
  }

  /// Bracketing + bisection along a straight ray for a Fourier wall.
  double fourier_crossing(const FourierShape& f, Side side, const PhasePoint& z, double limit) const {
    const double inf = std::numeric_limits<double>::infinity();
    const double rb = f.radius_bound();
    const Vec d0 = z.q - f.center;
    int cnt = 0;
    const auto r = detail::quadratic_roots(dot(d0, z.v), dot(d0, d0) - rb * rb, cnt);
    if (cnt < 2 || r[1] <= tol_.hit_tol) return inf;
    const double lo = std::max(r[0], 0.0);
    const double hi = std::min(r[1], limit);
    if (!(hi > lo)) return inf;
    const double sign = side == Side::outer_wall ? 1.0 : -1.0;
    auto f_at = [&](double s) {
      const Vec d = d0 + z.v * s;
      return sign * (norm(d) - f.radius(std::atan2(d[1], d[0])).first);
    };
    const double step_target = std::max(fourier_min_radius_, 1e-6) / 32.0;
    const int steps = std::clamp(static_cast<int>(std::ceil((hi - lo) / step_target)), 16, 4096);
    const double h = (hi - lo) / steps;
    double s_prev = std::max(lo, tol_.hit_tol);
    for (int k = 1; k <= steps; ++k) {
      const double s = lo + h * k;
      if (s <= s_prev) continue;
      if (f_at(s) > 0.0) {
        double a = s_prev, b = s;
        const double eps = tol_.hit_tol * 1e-2;
        for (int it = 0; it < 200 && b - a > eps; ++it) {
          const double m = 0.5 * (a + b);
          (f_at(m) > 0.0 ? b : a) = m;
        }
        const double root = 0.5 * (a + b);
        if (root > tol_.hit_tol) return root;
      }
      s_prev = s;
    }
    return inf;
  }

  /// Windowed search through periodic obstacle images.
  std::optional<Crossing> first_crossing_torus(const PhasePoint& z, double s_cap) const {
    const int n = space_.dim();
    const Vec& per = space_.periods();
    double window = per[0];
    for (int i = 1; i < n; ++i) window = std::min(window, per[i]);
    for (double s0 = 0.0; s0 < s_cap; s0 += window) {
      const double s1 = std::min(s0 + window, s_cap);
      const Vec a = z.q + z.v * s0, b = z.q + z.v * s1;
      std::optional<Crossing> best;
      for (int pi = 0; pi < static_cast<int>(pieces_.size()); ++pi) {
        const auto& ball = std::get<BallShape>(pieces_[static_cast<std::size_t>(pi)].shape);
        std::array<int, 3> klo{}, khi{};
        for (int ax = 0; ax < n; ++ax) {
          const double lo = std::min(a[ax], b[ax]) - ball.radius, hi = std::max(a[ax], b[ax]) + ball.radius;
          klo[ax] = static_cast<int>(std::ceil((lo - ball.center[ax]) / per[ax]));
          khi[ax] = static_cast<int>(std::floor((hi - ball.center[ax]) / per[ax]));
        }
        std::array<int, 3> k = klo;
        if (n < 3) klo[2] = khi[2] = k[2] = 0;
        for (k[2] = klo[2]; k[2] <= khi[2]; ++k[2])
          for (k[1] = klo[1]; k[1] <= khi[1]; ++k[1])
            for (k[0] = klo[0]; k[0] <= khi[0]; ++k[0]) {
              Vec c = ball.center;
              for (int ax = 0; ax < n; ++ax) c[ax] += per[ax] * k[ax];
              const Vec d = z.q - c;
              int cnt = 0;
              const auto r = detail::quadratic_roots(dot(d, z.v), dot(d, d) - ball.radius * ball.radius, cnt);
              for (int j = 0; j < cnt; ++j) {
                const double s = r[j];
                if (s > tol_.hit_tol && s <= s1 && (!best || s < best->s)) best = Crossing{s, pi, k};
              }
            }
      }
      if (best) return best;
    }
    return std::nullopt;
  }

  void prepare() {
    ball_ambient_.assign(pieces_.size(), Vec{});
    fourier_min_radius_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (auto* b = std::get_if<BallShape>(&pieces_[i].shape)) {
        if (space_.kind() == SpaceKind::sphere) b->center = normalized(b->center);
        if (space_.is_torus()) b->center = space_.canonical(b->center);
        ball_ambient_[i] = space_.lift(b->center);
      } else if (const auto* f = std::get_if<FourierShape>(&pieces_[i].shape)) {
        for (int k = 0; k < 2048; ++k) {
          fourier_min_radius_ = std::min(fourier_min_radius_, f->radius(2.0 * M_PI * k / 2048).first);
        }
      }
    }
  }

  void fail(const std::string& msg) const {
    throw BilliardError(BilliardError::Code::invalid_table, "table '" + name_ + "': " + msg);
  }

  void validate() const {
    if (pieces_.empty()) fail("at least one boundary piece is required");
    if (!(tol_.hit_tol > 0.0) || !(tol_.grazing_tol > 0.0) || !(tol_.boundary_tol > 0.0))
      fail("tolerances must be positive");
    const int n = space_.dim();
    bool bounded_outer = false;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const BoundaryPiece& p = pieces_[i];
      if (const auto* b = std::get_if<BallShape>(&p.shape)) {
        if (!(b->radius > 0.0)) fail("ball radius must be positive");
        if (!space_.valid_point(b->center)) fail("ball center is not a valid chart point");
        if (space_.kind() == SpaceKind::sphere && !(b->radius < M_PI)) fail("spherical ball radius must be < pi");
        if (space_.is_torus()) {
          if (p.side != Side::obstacle) fail("flat torus pieces must be obstacles");
          for (int ax = 0; ax < n; ++ax)
            if (!(2.0 * b->radius < space_.periods()[ax])) fail("torus obstacle overlaps its own image");
        }
        if (p.side == Side::outer_wall) bounded_outer = true;
      } else if (const auto* h = std::get_if<HalfSpaceShape>(&p.shape)) {
        if (space_.is_torus()) fail("half-spaces are not supported on the flat torus");
        if (norm(h->normal) == 0.0) fail("half-space normal must be nonzero");
      } else {
        const auto& f = std::get<FourierShape>(p.shape);
        if (space_.kind() != SpaceKind::euclidean || n != 2) fail("Fourier walls require a Euclidean plane");
        if (!(fourier_min_radius_ > 0.0)) fail("Fourier radius must stay positive");
        (void)f;
        if (p.side == Side::outer_wall) bounded_outer = true;
      }
    }
    if ((space_.kind() == SpaceKind::euclidean || space_.kind() == SpaceKind::hyperbolic_ball) && !bounded_outer)
      fail("a bounded outer wall (ball or Fourier) is required");
    // Obstacles must be pairwise disjoint and disjoint from the outer walls.
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (pieces_[i].side != Side::obstacle) continue;
      for (std::size_t j = 0; j < pieces_.size(); ++j) {
        if (i == j) continue;
        const auto* bi = std::get_if<BallShape>(&pieces_[i].shape);
        const auto* bj = std::get_if<BallShape>(&pieces_[j].shape);
        if (bi && bj) {
          const double d = space_.kind() == SpaceKind::sphere
                               ? std::acos(std::clamp(dot(bi->center, bj->center), -1.0, 1.0))
                               : space_.distance(bi->center, bj->center);
          if (pieces_[j].side == Side::obstacle && !(d > bi->radius + bj->radius))
            fail("obstacles " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
          if (pieces_[j].side == Side::outer_wall && !(d + bi->radius < bj->radius))
            fail("obstacle " + std::to_string(i) + " is not inside outer wall " + std::to_string(j));
          continue;
        }
        for (const Vec& q : piece_boundary_samples(static_cast<int>(i), 256)) {
          if (!(piece_gauge(static_cast<int>(j), q) < 0.0))
            fail("obstacle " + std::to_string(i) + " touches piece " + std::to_string(j));
        }
        for (const Vec& q : piece_boundary_samples(static_cast<int>(j), 256)) {
          if (!(piece_gauge(static_cast<int>(i), q) < 0.0))
            fail("piece " + std::to_string(j) + " enters obstacle " + std::to_string(i));
        }
      }
    }
  }

 public:
  /// Deterministic points on the boundary of piece i (empty for
  /// half-spaces, which have no compact parametrization).
  std::vector<Vec> piece_boundary_samples(int i, int count) const {
    std::vector<Vec> out;
    const BoundaryPiece& p = pieces_[static_cast<std::size_t>(i)];
    if (const auto* f = std::get_if<FourierShape>(&p.shape)) {
      for (int k = 0; k < count; ++k) {
        const double th = 2.0 * M_PI * k / count;
        out.push_back(f->center + Vec{std::cos(th), std::sin(th)} * f->radius(th).first);
      }
      return out;
    }
    const auto* b = std::get_if<BallShape>(&p.shape);
    if (!b) return out;
    const Vec cx = ball_ambient_[static_cast<std::size_t>(i)];
    const auto tb = space_.ambient_tangent_basis(cx);
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      Vec dir;
      if (space_.dim() == 2) {
        const double th = 2.0 * M_PI * k / count;
        dir = tb[0] * std::cos(th) + tb[1] * std::sin(th);
      } else {
        const double zc = 1.0 - (2.0 * k + 1.0) / count;
        const double rr = std::sqrt(std::fmax(0.0, 1.0 - zc * zc));
        dir = tb[0] * (rr * std::cos(golden * k)) + tb[1] * (rr * std::sin(golden * k)) + tb[2] * zc;
      }
      Vec x, w;
      space_.ambient_geodesic(cx, dir, b->radius, x, w);
      out.push_back(space_.canonical(space_.lower(x)));
    }
    return out;
  }

 private:
  double estimate_diameter() const {
    if (space_.is_torus()) {
      double s = 0.0;
      for (int i = 0; i < space_.dim(); ++i) s += space_.periods()[i] * space_.periods()[i];
      return std::sqrt(s);
    }
    double d = space_.kind() == SpaceKind::sphere ? M_PI : std::numeric_limits<double>::infinity();
    for (const BoundaryPiece& p : pieces_) {
      if (p.side != Side::outer_wall) continue;
      if (const auto* b = std::get_if<BallShape>(&p.shape)) d = std::min(d, 2.0 * b->radius);
      if (const auto* f = std::get_if<FourierShape>(&p.shape)) d = std::min(d, 2.0 * f->radius_bound());
    }
    return d;
  }

  ModelSpace space_;
  std::vector<BoundaryPiece> pieces_;
  Tolerances tol_;
  std::string name_;
  double diameter_ = 0.0;
  double fourier_min_radius_ = 0.0;
  std::vector<Vec> ball_ambient_;
};

}  // namespace billiards
