#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "billiards/expected.hpp"
#include "billiards/geometry.hpp"
#include "billiards/rng.hpp"
#include "billiards/table.hpp"

namespace billiards {

/// Metric-orthonormal frame of T_qM at a boundary point: inward normal
/// followed by n - 1 boundary tangents.
struct BoundaryFrame {
  Vec normal;
  std::array<Vec, 2> tangents{};
};

inline BoundaryFrame boundary_frame(const Table& table, int piece, const Vec& q) {
  const ModelSpace& sp = table.space();
  BoundaryFrame f;
  f.normal = table.inward_normal_of(piece, q);
  if (sp.dim() == 2) {
    if (sp.kind() == SpaceKind::sphere) {
      f.tangents[0] = cross(q, f.normal);
    } else {
      f.tangents[0] = Vec{-f.normal[1], f.normal[0]};
    }
    f.tangents[0] = sp.normalize_tangent(q, f.tangents[0]);
    return f;
  }
  // n = 3: Gram-Schmidt from chart axes, preferring the last axis.
  const int cd = sp.chart_dim();
  std::vector<Vec> found{f.normal};
  std::array<int, 4> order{cd - 1, 0, 1, 2};
  for (int idx : order) {
    if (found.size() == 3) break;
    if (idx < 0 || idx >= cd) continue;
    Vec e = basis(static_cast<std::size_t>(idx));
    if (sp.kind() == SpaceKind::sphere) e -= q * dot(e, q);
    const double base = sp.metric_norm(q, e);
    if (base < 1e-12) continue;
    Vec w = e;
    for (const Vec& b : found) w -= b * sp.metric_dot(q, w, b);
    const double nn = sp.metric_norm(q, w);
    if (nn < 0.3 * base) continue;
    found.push_back(w / nn);
  }
  f.tangents[0] = found[1];
  f.tangents[1] = found[2];
  return f;
}

/// Coordinates of a boundary phase point: piece, position on the piece and
/// direction relative to the inward normal.
///
/// Position: n = 2 polar angle phi in [0, 2 pi) about the piece center;
/// n = 3 (cos of polar angle in [-1, 1], azimuth in [0, 2 pi)).
/// Direction: n = 2 signed angle theta in (-pi, pi] from the inward normal
/// towards the boundary tangent; n = 3 (angle from the normal in [0, pi],
/// azimuth in [0, 2 pi)). Inward directions have |theta| < pi/2.
struct BoundaryCoords {
  int piece = -1;
  std::array<double, 2> pos{};
  std::array<double, 2> dir{};
};

namespace detail {

inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a < 0.0) a += 2.0 * M_PI;
  return a;
}

/// Ambient center and tangent basis used for position coordinates.
inline std::vector<Vec> center_basis(const Table& table, const BallShape& b) {
  return table.space().ambient_tangent_basis(table.space().lift(b.center));
}

}  // namespace detail

inline Expected<BoundaryCoords> boundary_coords(const Table& table, const PhasePoint& z) {
  if (!table.on_boundary(z.q)) return TraceError::not_on_boundary;
  const ModelSpace& sp = table.space();
  BoundaryCoords c;
  c.piece = table.nearest_piece(z.q);
  const BoundaryPiece& p = table.pieces()[static_cast<std::size_t>(c.piece)];
  if (const auto* b = std::get_if<BallShape>(&p.shape)) {
    const Vec cq = table.ball_center_near(c.piece, z.q);
    Vec w;
    Vec cx = sp.lift(cq);
    if (sp.curvature() == 0) {
      w = z.q - cq;
    } else {
      w = sp.project_tangent(cx, sp.lift(z.q));
    }
    const auto tb = detail::center_basis(table, *b);
    if (sp.dim() == 2) {
      c.pos[0] = detail::wrap_angle(std::atan2(sp.ambient_dot(w, tb[1]), sp.ambient_dot(w, tb[0])));
    } else {
      const double wn = std::sqrt(sp.ambient_dot(w, w));
      c.pos[0] = std::clamp(sp.ambient_dot(w, tb[2]) / wn, -1.0, 1.0);
      c.pos[1] = detail::wrap_angle(std::atan2(sp.ambient_dot(w, tb[1]), sp.ambient_dot(w, tb[0])));
    }
  } else if (const auto* f = std::get_if<FourierShape>(&p.shape)) {
    const Vec d = z.q - f->center;
    c.pos[0] = detail::wrap_angle(std::atan2(d[1], d[0]));
  } else {
    c.pos[0] = z.q[0];
    c.pos[1] = z.q[1];
  }
  const BoundaryFrame fr = boundary_frame(table, c.piece, z.q);
  const double vn = sp.metric_dot(z.q, z.v, fr.normal);
  const double v1 = sp.metric_dot(z.q, z.v, fr.tangents[0]);
  if (sp.dim() == 2) {
    c.dir[0] = std::atan2(v1, vn);
  } else {
    const double v2 = sp.metric_dot(z.q, z.v, fr.tangents[1]);
    c.dir[0] = std::atan2(std::hypot(v1, v2), vn);
    c.dir[1] = detail::wrap_angle(std::atan2(v2, v1));
  }
  return c;
}

/// Boundary position of piece coordinates (inverse of the position part).
inline Vec boundary_position(const Table& table, int piece, const std::array<double, 2>& pos) {
  const ModelSpace& sp = table.space();
  const BoundaryPiece& p = table.pieces()[static_cast<std::size_t>(piece)];
  if (const auto* b = std::get_if<BallShape>(&p.shape)) {
    const auto tb = detail::center_basis(table, *b);
    Vec w;
    if (sp.dim() == 2) {
      w = tb[0] * std::cos(pos[0]) + tb[1] * std::sin(pos[0]);
    } else {
      const double s = std::sqrt(std::fmax(0.0, 1.0 - pos[0] * pos[0]));
      w = tb[0] * (s * std::cos(pos[1])) + tb[1] * (s * std::sin(pos[1])) + tb[2] * pos[0];
    }
    Vec x, dw;
    sp.ambient_geodesic(sp.lift(b->center), w, b->radius, x, dw);
    return table.snap_to_piece(piece, sp.canonical(sp.lower(x)));
  }
  if (const auto* f = std::get_if<FourierShape>(&p.shape)) {
    return f->center + Vec{std::cos(pos[0]), std::sin(pos[0])} * f->radius(pos[0]).first;
  }
  throw BilliardError(BilliardError::Code::unsupported, "half-space pieces have no position coordinates");
}

/// Phase point from coordinates (inverse of boundary_coords).
inline PhasePoint from_boundary_coords(const Table& table, const BoundaryCoords& c) {
  const ModelSpace& sp = table.space();
  PhasePoint z;
  z.q = boundary_position(table, c.piece, c.pos);
  const BoundaryFrame fr = boundary_frame(table, c.piece, z.q);
  if (sp.dim() == 2) {
    z.v = fr.normal * std::cos(c.dir[0]) + fr.tangents[0] * std::sin(c.dir[0]);
  } else {
    const double s = std::sin(c.dir[0]);
    z.v = fr.normal * std::cos(c.dir[0]) + fr.tangents[0] * (s * std::cos(c.dir[1])) +
          fr.tangents[1] * (s * std::sin(c.dir[1]));
  }
  z.v = sp.normalize_tangent(z.q, z.v);
  return z;
}

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Box in boundary-coordinate space; piece -1 matches every piece.
struct PhaseBox {
  int piece = -1;
  std::array<Interval, 2> pos{};
  std::array<Interval, 2> dir{};

  bool contains(const BoundaryCoords& c) const {
    if (piece >= 0 && c.piece != piece) return false;
    return pos[0].contains(c.pos[0]) && pos[1].contains(c.pos[1]) && dir[0].contains(c.dir[0]) &&
           dir[1].contains(c.dir[1]);
  }
};

/// (n-1)-volume of the boundary of piece i.
inline double piece_boundary_area(const Table& table, int i) {
  const ModelSpace& sp = table.space();
  const BoundaryPiece& p = table.pieces()[static_cast<std::size_t>(i)];
  if (const auto* b = std::get_if<BallShape>(&p.shape)) {
    const double r = b->radius;
    double radial = r;
    if (sp.curvature() > 0) radial = std::sin(r);
    if (sp.curvature() < 0) radial = std::sinh(r);
    return unit_sphere_volume(sp.dim() - 1) * std::pow(radial, sp.dim() - 1);
  }
  if (const auto* f = std::get_if<FourierShape>(&p.shape)) {
    constexpr int kNodes = 8192;
    double s = 0.0;
    for (int k = 0; k < kNodes; ++k) {
      const auto [r, dr] = f->radius(2.0 * M_PI * k / kNodes);
      s += std::hypot(r, dr);
    }
    return s * 2.0 * M_PI / kNodes;
  }
  throw BilliardError(BilliardError::Code::unsupported, "half-space pieces have no finite boundary area");
}

/// Sampler of boundary phase points for the measure with density
/// cos(theta) dA dS (the invariant boundary measure of the billiard), and of
/// uniform boundary positions.
class BoundarySampler {
 public:
  explicit BoundarySampler(const Table& table) : table_(&table) {
    const int np = static_cast<int>(table.pieces().size());
    double acc = 0.0;
    fourier_density_max_.assign(static_cast<std::size_t>(np), 0.0);
    for (int i = 0; i < np; ++i) {
      const double a = piece_boundary_area(table, i);
      areas_.push_back(a);
      acc += a;
      cumulative_.push_back(acc);
      if (const auto* f = std::get_if<FourierShape>(&table.pieces()[static_cast<std::size_t>(i)].shape)) {
        double m = 0.0;
        for (int k = 0; k < 8192; ++k) {
          const auto [r, dr] = f->radius(2.0 * M_PI * k / 8192);
          m = std::fmax(m, std::hypot(r, dr));
        }
        fourier_density_max_[static_cast<std::size_t>(i)] = 1.02 * m;
      }
    }
    total_area_ = acc;
  }

  const Table& table() const { return *table_; }
  double total_area() const { return total_area_; }
  double piece_area(int i) const { return areas_[static_cast<std::size_t>(i)]; }

  /// Uniform boundary position (piece chosen by area).
  BoundaryCoords draw_position(CounterRng& rng) const {
    BoundaryCoords c;
    const double u = rng.uniform() * total_area_;
    c.piece = 0;
    while (c.piece + 1 < static_cast<int>(cumulative_.size()) && u >= cumulative_[static_cast<std::size_t>(c.piece)])
      ++c.piece;
    const BoundaryPiece& p = table_->pieces()[static_cast<std::size_t>(c.piece)];
    if (const auto* f = std::get_if<FourierShape>(&p.shape)) {
      const double bound = fourier_density_max_[static_cast<std::size_t>(c.piece)];
      for (;;) {
        const double th = 2.0 * M_PI * rng.uniform();
        const auto [r, dr] = f->radius(th);
        if (rng.uniform() * bound <= std::hypot(r, dr)) {
          c.pos[0] = th;
          break;
        }
      }
    } else if (table_->dim() == 2) {
      c.pos[0] = 2.0 * M_PI * rng.uniform();
    } else {
      c.pos[0] = 2.0 * rng.uniform() - 1.0;
      c.pos[1] = 2.0 * M_PI * rng.uniform();
    }
    return c;
  }

  /// Boundary phase point with density proportional to cos(theta) on the
  /// inward hemisphere. Directions in the grazing band are redrawn and
  /// counted in `grazing_rejections`.
  BoundaryCoords draw_coords(CounterRng& rng, std::uint64_t* grazing_rejections = nullptr) const {
    BoundaryCoords c = draw_position(rng);
    const double g = table_->tolerances().grazing_tol;
    for (;;) {
      if (table_->dim() == 2) {
        const double u = 2.0 * rng.uniform() - 1.0;
        c.dir[0] = std::asin(u);
        if (std::sqrt(std::fmax(0.0, 1.0 - u * u)) > g) break;
      } else {
        const double u = rng.uniform();
        c.dir[0] = std::asin(std::sqrt(u));
        c.dir[1] = 2.0 * M_PI * rng.uniform();
        if (std::sqrt(1.0 - u) > g) break;
      }
      if (grazing_rejections) ++*grazing_rejections;
    }
    return c;
  }

  PhasePoint draw(CounterRng& rng, std::uint64_t* grazing_rejections = nullptr) const {
    return from_boundary_coords(*table_, draw_coords(rng, grazing_rejections));
  }

  /// Boundary phase point with a direction uniform on the full unit sphere
  /// of T_qM (inward and outward).
  PhasePoint draw_uniform_fiber(CounterRng& rng) const {
    BoundaryCoords c = draw_position(rng);
    if (table_->dim() == 2) {
      c.dir[0] = M_PI * (2.0 * rng.uniform() - 1.0);
    } else {
      c.dir[0] = std::acos(2.0 * rng.uniform() - 1.0);
      c.dir[1] = 2.0 * M_PI * rng.uniform();
    }
    return from_boundary_coords(*table_, c);
  }

 private:
  const Table* table_;
  std::vector<double> areas_;
  std::vector<double> cumulative_;
  std::vector<double> fourier_density_max_;
  double total_area_ = 0.0;
};

}  // namespace billiards
