#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "billiards/coords.hpp"
#include "billiards/dynamics.hpp"
#include "billiards/estimate.hpp"
#include "billiards/expected.hpp"
#include "billiards/geometry.hpp"
#include "billiards/measure.hpp"
#include "billiards/parallel.hpp"
#include "billiards/rng.hpp"
#include "billiards/table.hpp"

namespace billiards {

/// Geodesic ball L containing the table in its interior.
struct EnclosingBody {
  Vec center;           // chart coordinates
  double radius = 0.0;  // geodesic radius
};

namespace detail {

/// Largest geodesic distance from c to the outer walls of the table.
inline double outer_extent(const Table& table, const Vec& c) {
  const ModelSpace& sp = table.space();
  double r = 0.0;
  for (int i = 0; i < static_cast<int>(table.pieces().size()); ++i) {
    if (table.pieces()[static_cast<std::size_t>(i)].side != Side::outer_wall) continue;
    for (const Vec& q : table.piece_boundary_samples(i, 4096)) r = std::max(r, sp.distance(c, q));
  }
  return r;
}

}  // namespace detail

/// Default body: concentric with the first outer wall, radius twice the
/// extent of the table (Euclidean and hyperbolic) or midway between the
/// cap radius and pi/2 (sphere).
inline EnclosingBody default_enclosing_body(const Table& table) {
  const ModelSpace& sp = table.space();
  if (sp.is_torus())
    throw BilliardError(BilliardError::Code::unsupported, "the flat torus has no enclosing geodesic ball");
  const BoundaryPiece* outer = nullptr;
  for (const auto& p : table.pieces())
    if (p.side == Side::outer_wall && !std::holds_alternative<HalfSpaceShape>(p.shape)) {
      outer = &p;
      break;
    }
  if (!outer) throw BilliardError(BilliardError::Code::unsupported, "an enclosing body needs a ball or Fourier outer wall");
  EnclosingBody body;
  if (const auto* b = std::get_if<BallShape>(&outer->shape)) {
    body.center = b->center;
  } else {
    body.center = std::get<FourierShape>(outer->shape).center;
  }
  const double extent = detail::outer_extent(table, body.center);
  if (sp.kind() == SpaceKind::sphere) {
    if (!(extent < M_PI / 2))
      throw BilliardError(BilliardError::Code::unsupported, "spherical table is not inside an open hemisphere");
    body.radius = 0.5 * (extent + M_PI / 2);
  } else {
    body.radius = 2.0 * extent;
  }
  return body;
}

/// Well-balanced Lyapunov function F(z) = arc length of the backward
/// geodesic from z to the boundary of the enclosing body. Along any
/// geodesic F grows at unit rate.
class LyapunovF {
 public:
  LyapunovF(const ModelSpace& space, EnclosingBody body) : space_(space), body_(body), center_(space.lift(body.center)) {}

  const EnclosingBody& body() const { return body_; }

  /// F(z); NaN when z is not inside the body.
  double operator()(const PhasePoint& z) const { return backward_exit(z); }

  /// Cosine between the geodesic of z and the normal of the body at its
  /// backward and forward crossings (both must be transversal).
  std::pair<double, double> crossing_cosines(const PhasePoint& z) const {
    const double tb = crossing_time({z.q, -z.v});
    const double tf = crossing_time(z);
    return {crossing_cos({z.q, -z.v}, tb), crossing_cos(z, tf)};
  }

  /// Arc length from the forward crossing back to the backward crossing.
  double chord_in_body(const PhasePoint& z) const { return crossing_time({z.q, -z.v}) + crossing_time(z); }

 private:
  double backward_exit(const PhasePoint& z) const { return crossing_time({z.q, -z.v}); }

  /// First positive time at which the geodesic from z leaves the body.
  double crossing_time(const PhasePoint& z) const {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    int cnt = 0;
    switch (space_.curvature()) {
      case 0: {
        const Vec d = z.q - body_.center;
        const auto r = detail::quadratic_roots(dot(d, z.v), dot(d, d) - body_.radius * body_.radius, cnt);
        return cnt == 2 && r[0] <= 0.0 && r[1] >= 0.0 ? r[1] : nan;
      }
      case 1: {
        const Vec x = space_.lift(z.q), w = space_.lift_tangent(z.q, z.v);
        if (!(dot(center_, x) >= std::cos(body_.radius))) return nan;
        const auto r = detail::trig_roots(dot(center_, x), dot(center_, w), std::cos(body_.radius), cnt);
        if (cnt == 0) return nan;
        return cnt == 1 ? r[0] : std::min(r[0], r[1]);
      }
      default: {
        const Vec x = space_.lift(z.q), w = space_.lift_tangent(z.q, z.v);
        const auto r = detail::hyperbolic_roots(-space_.ambient_dot(center_, x), -space_.ambient_dot(center_, w),
                                                std::cosh(body_.radius), cnt);
        return cnt == 2 && r[0] <= 0.0 && r[1] >= 0.0 ? r[1] : nan;
      }
    }
  }

  double crossing_cos(const PhasePoint& z, double t) const {
    const PhasePoint p = geodesic_flow(space_, z, t);
    const Vec x = space_.lift(p.q), w = space_.lift_tangent(p.q, p.v);
    Vec radial = space_.project_tangent(x, x - center_);
    if (space_.curvature() == 0) radial = p.q - body_.center;
    const double rn = std::sqrt(std::fabs(space_.ambient_dot(radial, radial)));
    return rn > 0.0 ? std::fabs(space_.ambient_dot(radial, w)) / rn : 0.0;
  }

  ModelSpace space_;
  EnclosingBody body_;
  Vec center_;
};

/// Builds F and checks on a pilot sample of boundary chords that every
/// chord extended both ways crosses the boundary of the body transversally
/// at two distinct points.
inline LyapunovF build_well_balanced_F(const Table& table, const EnclosingBody& body, std::uint64_t pilot = 2000,
                                       std::uint64_t seed = 0x5eed) {
  const ModelSpace& sp = table.space();
  if (sp.is_torus()) throw BilliardError(BilliardError::Code::unsupported, "no well-balanced F on the flat torus");
  if (!(body.radius > 0.0)) throw BilliardError(BilliardError::Code::body_too_small, "body radius must be positive");
  if (sp.kind() == SpaceKind::sphere && !(body.radius < M_PI / 2))
    throw BilliardError(BilliardError::Code::body_too_small, "spherical body must be a cap smaller than a hemisphere");
  LyapunovF F(sp, body);
  const double g = table.tolerances().grazing_tol;
  const BoundarySampler sampler(table);
  for (std::uint64_t i = 0; i < pilot; ++i) {
    CounterRng rng(seed, streams::pilot, i);
    const PhasePoint z = sampler.draw_uniform_fiber(rng);
    const double f = F(z);
    const auto [cb, cf] = F.crossing_cosines(z);
    if (!std::isfinite(f) || !(f > 0.0) || !(cb > g) || !(cf > g) || !(F.chord_in_body(z) > 0.0))
      throw BilliardError(BilliardError::Code::body_too_small,
                          "pilot chord " + std::to_string(i) + " does not cross the body boundary transversally twice");
  }
  return F;
}

inline LyapunovF build_well_balanced_F(const Table& table) {
  return build_well_balanced_F(table, default_enclosing_body(table));
}

/// F(C(z)) - F(z); zero on degenerate chords.
inline Expected<double> delta_F(const Table& table, const LyapunovF& F, const PhasePoint& z) {
  const auto chord = causality_map(table, z);
  if (!chord) return chord.error();
  if (chord->degenerate) return 0.0;
  return F(chord->exit) - F(chord->entry);
}

struct FVariation {
  double var = 0.0;
  double F_min = 0.0;
  double F_max = 0.0;
};

/// Empirical variation of F over boundary phase points drawn from the
/// invariant measure and from the uniform fiber measure.
inline FVariation var_F_boundary(const Table& table, const LyapunovF& F, std::uint64_t count, std::uint64_t seed,
                                 int workers = 1) {
  const BoundarySampler sampler(table);
  struct MinMax {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
  };
  const MinMax mm = parallel_blocks(
      count, workers, MinMax{},
      [&](std::uint64_t b, std::uint64_t e) {
        MinMax m;
        for (std::uint64_t i = b; i < e; ++i) {
          CounterRng r1(seed, streams::boundary_sampler, i);
          CounterRng r2(seed, streams::uniform_fiber, i);
          for (const PhasePoint& z : {sampler.draw(r1), sampler.draw_uniform_fiber(r2)}) {
            const double f = F(z);
            m.lo = std::min(m.lo, f);
            m.hi = std::max(m.hi, f);
          }
        }
        return m;
      },
      [](MinMax& out, const MinMax& p) {
        out.lo = std::min(out.lo, p.lo);
        out.hi = std::max(out.hi, p.hi);
      });
  return {mm.hi - mm.lo, mm.lo, mm.hi};
}

/// Mass of the chords crossing the level t of F:
/// A(t) = mu{z : F(z) <= t < F(z) + Delta_F(z)}.
inline Estimate slice_area(const Table& table, const LyapunovF& F, double t, std::uint64_t count, std::uint64_t seed,
                           int workers = 1) {
  const BoundarySampler sampler(table);
  const double total = trajectory_space_volume(table);
  return parallel_blocks(
      count, workers, Estimate{},
      [&](std::uint64_t b, std::uint64_t e) {
        Estimate est;
        for (std::uint64_t i = b; i < e; ++i) {
          CounterRng rng(seed, streams::boundary_sampler, i);
          const PhasePoint z = sampler.draw(rng);
          const auto chord = causality_map(table, z);
          if (!chord || chord->degenerate) {
            est.add(0.0);
            continue;
          }
          const double f0 = F(chord->entry), f1 = F(chord->exit);
          est.add(f0 <= t && t < f1 ? total : 0.0);
        }
        return est;
      },
      [](Estimate& out, const Estimate& p) { out.merge(p); });
}

struct SliceCurve {
  std::vector<double> t;
  std::vector<Estimate> area;
  double integral = 0.0;         // trapezoid rule over the grid
  double integral_stderr = 0.0;  // from the per-sample trapezoid sums
  double F_min = 0.0;
  double F_max = 0.0;
  double total_mass = 0.0;
};

/// A(t) on a uniform grid of `points` levels over [F_min, F_max] from a
/// single sample: each chord contributes to every level it crosses.
inline SliceCurve slice_area_curve(const Table& table, const LyapunovF& F, int points, std::uint64_t count,
                                   std::uint64_t seed, int workers = 1) {
  if (points < 2) throw BilliardError(BilliardError::Code::invalid_argument, "need at least two grid points");
  const BoundarySampler sampler(table);
  SliceCurve curve;
  curve.total_mass = trajectory_space_volume(table);
  const double total = curve.total_mass;
  // Pass 1: F at entry and exit for every sample.
  std::vector<double> f0(count), f1(count);
  parallel_for(count, workers, [&](std::uint64_t i) {
    CounterRng rng(seed, streams::boundary_sampler, i);
    const auto chord = causality_map(table, sampler.draw(rng));
    if (!chord || chord->degenerate) {
      f0[i] = f1[i] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    f0[i] = F(chord->entry);
    f1[i] = F(chord->exit);
  });
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (std::isnan(f0[i])) continue;
    lo = std::min(lo, f0[i]);
    hi = std::max(hi, f1[i]);
  }
  curve.F_min = lo;
  curve.F_max = hi;
  const double dt = (hi - lo) / (points - 1);
  for (int k = 0; k < points; ++k) curve.t.push_back(lo + dt * k);
  // Pass 2: per-level indicators and per-sample trapezoid sums.
  struct Acc {
    std::vector<Estimate> area;
    Estimate integral;
  };
  const Acc init{std::vector<Estimate>(static_cast<std::size_t>(points)), Estimate{}};
  const Acc acc = parallel_blocks(
      count, workers, init,
      [&](std::uint64_t b, std::uint64_t e) {
        Acc a = init;
        for (std::uint64_t i = b; i < e; ++i) {
          double sum = 0.0;
          for (int k = 0; k < points; ++k) {
            const double t = curve.t[static_cast<std::size_t>(k)];
            const bool in = !std::isnan(f0[i]) && f0[i] <= t && t < f1[i];
            a.area[static_cast<std::size_t>(k)].add(in ? total : 0.0);
            if (in) sum += (k == 0 || k == points - 1) ? 0.5 : 1.0;
          }
          a.integral.add(total * sum * dt);
        }
        return a;
      },
      [](Acc& out, const Acc& p) {
        for (std::size_t k = 0; k < out.area.size(); ++k) out.area[k].merge(p.area[k]);
        out.integral.merge(p.integral);
      });
  curve.area = acc.area;
  curve.integral = acc.integral.mean();
  curve.integral_stderr = acc.integral.std_error();
  return curve;
}

}  // namespace billiards
