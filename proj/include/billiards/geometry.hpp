#pragma once

#include <cmath>
#include <numeric>
#include <string_view>
#include <vector>

#include "billiards/expected.hpp"
#include "billiards/space.hpp"
#include "billiards/table.hpp"

namespace billiards {

enum class StratumLabel {
  transversal_in,   // interior of the inward locus
  transversal_out,  // interior of the outward locus
  tangent_convex,   // tangency, geodesic leaves the domain on both sides
  tangent_concave,  // tangency, geodesic stays in the domain (discontinuity locus)
};

constexpr std::string_view to_string(StratumLabel s) {
  switch (s) {
    case StratumLabel::transversal_in: return "transversal_in";
    case StratumLabel::transversal_out: return "transversal_out";
    case StratumLabel::tangent_convex: return "tangent_convex";
    case StratumLabel::tangent_concave: return "tangent_concave";
  }
  return "unknown";
}

struct Stratum {
  StratumLabel label = StratumLabel::transversal_in;
  double cos_in = 0.0;  // cosine between v and the inward normal

  bool tangent() const { return label == StratumLabel::tangent_convex || label == StratumLabel::tangent_concave; }
};

struct HitRecord {
  double s_hit = 0.0;
  PhasePoint hit;  // position on the boundary and velocity on arrival
  int piece = -1;
  std::array<int, 3> image{};
  double cos_in = 0.0;
  Stratum stratum;
};

/// Re-imposes the chart constraints on a phase point: canonical position,
/// velocity tangent to the sphere and of unit metric length.
inline PhasePoint rebase(const ModelSpace& space, PhasePoint z) {
  z.q = space.canonical(z.q);
  if (space.kind() == SpaceKind::sphere) z.v -= z.q * dot(z.v, z.q);
  z.v = space.normalize_tangent(z.q, z.v);
  return z;
}

/// Time-s point of the unit-speed geodesic through z (negative s runs
/// backwards). Closed form in every model space.
inline PhasePoint geodesic_flow(const ModelSpace& space, const PhasePoint& z, double s) {
  if (space.curvature() == 0) return rebase(space, {z.q + z.v * s, z.v});
  const Vec x = space.lift(z.q);
  const Vec w = space.lift_tangent(z.q, z.v);
  Vec x1, w1;
  space.ambient_geodesic(x, w, s, x1, w1);
  return rebase(space, {space.lower(x1), space.lower_tangent(x1, w1)});
}

/// Unit normal pointing into the domain at a boundary point.
inline Expected<Vec> inward_normal(const Table& table, const Vec& q) {
  if (!table.on_boundary(q)) return TraceError::not_on_boundary;
  return table.inward_normal_of(table.nearest_piece(q), q);
}

namespace detail {

inline Stratum classify_on_piece(const Table& table, int piece, const PhasePoint& z) {
  const ModelSpace& sp = table.space();
  const Vec n = table.inward_normal_of(piece, z.q);
  const double c = sp.metric_dot(z.q, z.v, n);
  const double g = table.tolerances().grazing_tol;
  if (c > g) return {StratumLabel::transversal_in, c};
  if (c < -g) return {StratumLabel::transversal_out, c};
  // Tangency: the sign of the second derivative of the gauge along the
  // geodesic decides whether the geodesic leaves or stays in the domain.
  const double h = 1e-4 * std::fmin(1.0, table.diameter());
  const double f0 = table.piece_gauge(piece, z.q);
  const double fp = table.piece_gauge(piece, geodesic_flow(sp, z, h).q);
  const double fm = table.piece_gauge(piece, geodesic_flow(sp, z, -h).q);
  const double second = (fp + fm - 2.0 * f0) / (h * h);
  return {second < 0.0 ? StratumLabel::tangent_concave : StratumLabel::tangent_convex, c};
}

}  // namespace detail

/// Morse stratum of a boundary phase point.
inline Expected<Stratum> classify_boundary_point(const Table& table, const PhasePoint& z) {
  if (!table.on_boundary(z.q)) return TraceError::not_on_boundary;
  return detail::classify_on_piece(table, table.nearest_piece(z.q), z);
}

/// First boundary hit of the geodesic from z at arc length in
/// (hit_tol, l_max]. Interior starts are allowed; boundary starts must not
/// point strictly outward.
inline Expected<HitRecord> first_boundary_hit(const Table& table, const PhasePoint& z) {
  const Tolerances& tol = table.tolerances();
  if (!table.contains(z.q, tol.boundary_tol)) return TraceError::outside_domain;
  if (table.on_boundary(z.q)) {
    const int p = table.nearest_piece(z.q);
    const Vec n = table.inward_normal_of(p, z.q);
    if (table.space().metric_dot(z.q, z.v, n) < -tol.grazing_tol) return TraceError::degenerate_start;
  }
  const auto crossing = table.first_crossing(z, table.l_max());
  if (!crossing) return TraceError::trapped;
  HitRecord rec;
  rec.s_hit = crossing->s;
  rec.piece = crossing->piece;
  rec.image = crossing->image;
  PhasePoint at = geodesic_flow(table.space(), z, crossing->s);
  at.q = table.snap_to_piece(crossing->piece, at.q);
  rec.hit = rebase(table.space(), at);
  rec.stratum = detail::classify_on_piece(table, rec.piece, rec.hit);
  rec.cos_in = rec.stratum.cos_in;
  return rec;
}

/// Axis-aligned chart box enclosing the domain.
struct ChartBox {
  Vec lo, hi;
};

inline ChartBox domain_chart_box(const Table& table) {
  const ModelSpace& sp = table.space();
  ChartBox box;
  const int d = sp.chart_dim();
  if (sp.is_torus()) {
    for (int i = 0; i < d; ++i) box.hi[i] = sp.periods()[i];
    return box;
  }
  if (sp.kind() == SpaceKind::sphere) {
    for (int i = 0; i < d; ++i) {
      box.lo[i] = -1.0;
      box.hi[i] = 1.0;
    }
    return box;
  }
  for (int i = 0; i < d; ++i) {
    box.lo[i] = -std::numeric_limits<double>::infinity();
    box.hi[i] = std::numeric_limits<double>::infinity();
  }
  for (int p = 0; p < static_cast<int>(table.pieces().size()); ++p) {
    if (table.pieces()[static_cast<std::size_t>(p)].side != Side::outer_wall) continue;
    const auto pts = table.piece_boundary_samples(p, 1024);
    if (pts.empty()) continue;
    for (int i = 0; i < d; ++i) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const Vec& q : pts) {
        lo = std::fmin(lo, q[i]);
        hi = std::fmax(hi, q[i]);
      }
      const double m = 0.02 * (hi - lo) + 1e-9;
      box.lo[i] = std::fmax(box.lo[i], lo - m);
      box.hi[i] = std::fmin(box.hi[i], hi + m);
    }
  }
  return box;
}

/// Connectivity probe of the domain: random chart points inside M are
/// joined when the chart segment between them stays inside M; the domain
/// passes when the resulting graph is connected.
template <class Rng>
bool probe_connectivity(const Table& table, Rng& rng, int points = 200) {
  const ModelSpace& sp = table.space();
  const ChartBox box = domain_chart_box(table);
  const int d = sp.chart_dim();
  std::vector<Vec> pts;
  for (int tries = 0; static_cast<int>(pts.size()) < points && tries < 200 * points; ++tries) {
    Vec q;
    for (int i = 0; i < d; ++i) q[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * rng.uniform();
    if (sp.kind() == SpaceKind::sphere) {
      if (norm(q) < 1e-3 || norm(q) > 1.0) continue;
      q = normalized(q);
    }
    if (sp.kind() == SpaceKind::hyperbolic_ball && dot(q, q) >= 1.0) continue;
    if (table.gauge(q) < 0.0) pts.push_back(q);
  }
  if (pts.size() < 2) return !pts.empty();
  std::vector<int> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
    return a;
  };
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const int ri = find(static_cast<int>(i)), rj = find(static_cast<int>(j));
      if (ri == rj) continue;
      const Vec delta = sp.displacement(pts[i], pts[j]);
      bool ok = true;
      for (int k = 1; k < 64 && ok; ++k) {
        Vec q = pts[i] + delta * (k / 64.0);
        if (sp.kind() == SpaceKind::sphere) q = normalized(q);
        ok = table.gauge(sp.canonical(q)) < 0.0;
      }
      if (ok) parent[static_cast<std::size_t>(ri)] = rj;
    }
  const int root = find(0);
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (find(static_cast<int>(i)) != root) return false;
  return true;
}

}  // namespace billiards
