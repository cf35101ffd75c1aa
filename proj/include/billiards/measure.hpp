#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "billiards/coords.hpp"
#include "billiards/dynamics.hpp"
#include "billiards/estimate.hpp"
#include "billiards/expected.hpp"
#include "billiards/geometry.hpp"
#include "billiards/parallel.hpp"
#include "billiards/rng.hpp"
#include "billiards/table.hpp"

namespace billiards {

/// Density of the invariant boundary measure with respect to the boundary
/// phase volume: the cosine between v and the inward normal.
inline Expected<double> mu_theta_density(const Table& table, const PhasePoint& z) {
  if (!table.on_boundary(z.q)) return TraceError::not_on_boundary;
  const Vec n = table.inward_normal_of(table.nearest_piece(z.q), z.q);
  return table.space().metric_dot(z.q, z.v, n);
}

/// (n-1)-volume of the boundary.
inline double boundary_volume(const Table& table) {
  double s = 0.0;
  for (int i = 0; i < static_cast<int>(table.pieces().size()); ++i) s += piece_boundary_area(table, i);
  return s;
}

/// Total mass of the invariant boundary measure on the inward locus:
/// vol(B^{n-1}) * vol(dM).
inline double trajectory_space_volume(const Table& table) {
  return unit_ball_volume(table.dim() - 1) * boundary_volume(table);
}

/// Samples from the invariant boundary measure; every point carries the
/// same weight normalization / size.
struct WeightedSampleSet {
  std::vector<PhasePoint> points;
  std::vector<BoundaryCoords> coords;
  double normalization = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t grazing_rejections = 0;

  double weight() const { return points.empty() ? 0.0 : normalization / static_cast<double>(points.size()); }
};

inline WeightedSampleSet sample_mu_theta(const Table& table, std::uint64_t count, std::uint64_t seed,
                                         int workers = 1) {
  if (count < 1) throw BilliardError(BilliardError::Code::invalid_argument, "count must be >= 1");
  const BoundarySampler sampler(table);
  WeightedSampleSet set;
  set.points.resize(count);
  set.coords.resize(count);
  set.seed = seed;
  set.normalization = trajectory_space_volume(table);
  set.grazing_rejections = parallel_blocks(
      count, workers, std::uint64_t{0},
      [&](std::uint64_t b, std::uint64_t e) {
        std::uint64_t rejected = 0;
        for (std::uint64_t i = b; i < e; ++i) {
          CounterRng rng(seed, streams::boundary_sampler, i);
          set.coords[i] = sampler.draw_coords(rng, &rejected);
          set.points[i] = from_boundary_coords(table, set.coords[i]);
        }
        return rejected;
      },
      [](std::uint64_t& out, std::uint64_t p) { out += p; });
  return set;
}

namespace detail {

/// Volume of a geodesic ball of radius r in the model space of curvature k.
inline double geodesic_ball_volume(int n, int k, double r) {
  if (k == 0) return unit_ball_volume(n) * std::pow(r, n);
  if (k < 0) return n == 2 ? 2.0 * M_PI * (std::cosh(r) - 1.0) : M_PI * (std::sinh(2.0 * r) - 2.0 * r);
  return n == 2 ? 2.0 * M_PI * (1.0 - std::cos(r)) : M_PI * (2.0 * r - std::sin(2.0 * r));
}

/// Area enclosed by a radial Fourier curve.
inline double fourier_area(const FourierShape& f) {
  double s = f.cos_coeffs.empty() ? 0.0 : f.cos_coeffs[0] * f.cos_coeffs[0];
  for (std::size_t k = 1; k < f.harmonics(); ++k) {
    const double a = k < f.cos_coeffs.size() ? f.cos_coeffs[k] : 0.0;
    const double b = k < f.sin_coeffs.size() ? f.sin_coeffs[k] : 0.0;
    s += 0.5 * (a * a + b * b);
  }
  return M_PI * s;
}

}  // namespace detail

struct DomainVolumes {
  double vol_M = 0.0;
  double vol_dM = 0.0;
  double vol_M_stderr = 0.0;  // zero for closed-form volumes
  bool analytic = true;
};

/// Monte Carlo volume of the domain by rejection in the chart.
inline DomainVolumes domain_volumes_monte_carlo(const Table& table, std::uint64_t count, std::uint64_t seed,
                                                int workers = 1) {
  const ModelSpace& sp = table.space();
  const ChartBox box = domain_chart_box(table);
  const int d = sp.chart_dim();
  double box_volume = 1.0;
  if (sp.kind() == SpaceKind::sphere) {
    box_volume = unit_sphere_volume(sp.dim());
  } else {
    for (int i = 0; i < d; ++i) box_volume *= box.hi[i] - box.lo[i];
  }
  const Estimate est = parallel_blocks(
      count, workers, Estimate{},
      [&](std::uint64_t b, std::uint64_t e) {
        Estimate part;
        for (std::uint64_t i = b; i < e; ++i) {
          CounterRng rng(seed, streams::domain_points, i);
          Vec q;
          double w = 1.0;
          if (sp.kind() == SpaceKind::sphere) {
            for (int k = 0; k < d; ++k) q[k] = rng.normal();
            q = normalized(q);
          } else {
            for (int k = 0; k < d; ++k) q[k] = rng.uniform(box.lo[k], box.hi[k]);
            if (sp.kind() == SpaceKind::hyperbolic_ball) {
              if (dot(q, q) >= 1.0) {
                part.add(0.0);
                continue;
              }
              w = std::pow(sp.conformal_factor(q), sp.dim());
            }
          }
          part.add(table.contains(q) ? w : 0.0);
        }
        return part;
      },
      [](Estimate& out, const Estimate& p) { out.merge(p); });
  DomainVolumes v;
  v.analytic = false;
  v.vol_M = box_volume * est.mean();
  v.vol_M_stderr = box_volume * est.std_error();
  v.vol_dM = boundary_volume(table);
  return v;
}

/// Volume of M and of its boundary. Closed forms cover a single outer ball
/// or Fourier wall (or none on the sphere and torus) with ball obstacles;
/// other tables fall back to Monte Carlo.
inline DomainVolumes domain_volumes(const Table& table, std::uint64_t mc_count = 1'000'000, std::uint64_t seed = 1,
                                    int workers = 1) {
  const ModelSpace& sp = table.space();
  const int n = sp.dim();
  std::optional<double> outer;
  int outer_count = 0;
  double obstacles = 0.0;
  bool closed_form = true;
  for (const BoundaryPiece& p : table.pieces()) {
    if (const auto* b = std::get_if<BallShape>(&p.shape)) {
      const double v = detail::geodesic_ball_volume(n, sp.curvature(), b->radius);
      if (p.side == Side::outer_wall) {
        outer = v;
        ++outer_count;
      } else {
        obstacles += v;
      }
    } else if (const auto* f = std::get_if<FourierShape>(&p.shape)) {
      const double v = detail::fourier_area(*f);
      if (p.side == Side::outer_wall) {
        outer = v;
        ++outer_count;
      } else {
        obstacles += v;
      }
    } else {
      closed_form = false;
    }
  }
  if (outer_count > 1) closed_form = false;
  if (!outer) {
    if (sp.is_torus()) {
      outer = 1.0;
      for (int i = 0; i < n; ++i) *outer *= sp.periods()[i];
    } else if (sp.kind() == SpaceKind::sphere) {
      outer = unit_sphere_volume(n);
    } else {
      closed_form = false;
    }
  }
  if (!closed_form) return domain_volumes_monte_carlo(table, mc_count, seed, workers);
  DomainVolumes v;
  v.vol_M = *outer - obstacles;
  v.vol_dM = boundary_volume(table);
  return v;
}

/// Outcome of the pushforward test on one box K.
struct BoxTest {
  PhaseBox box;
  Estimate mu_K;           // mass of K
  Estimate mu_preimage_K;  // mass of B^{-1}(K)
  Estimate difference;     // paired 1_K(B z) - 1_K(z), in mass units
  double z_score = 0.0;
};

struct PreservationReport {
  std::vector<BoxTest> boxes;
  std::uint64_t count = 0;
  std::uint64_t excluded = 0;  // trapped or grazing samples
  double total_mass = 0.0;

  double max_abs_z() const {
    double m = 0.0;
    for (const auto& b : boxes) m = std::fmax(m, std::fabs(b.z_score));
    return m;
  }
};

/// Compares the mass of each box with the mass of its preimage under the
/// billiard map, using one sample from the invariant measure for both.
/// Samples whose orbit step is trapped or grazing are excluded.
inline PreservationReport measure_preservation_test(const Table& table, const ReflectionLaw& law,
                                                    const std::vector<PhaseBox>& boxes, std::uint64_t count,
                                                    std::uint64_t seed, int workers = 1) {
  if (count < 1) throw BilliardError(BilliardError::Code::invalid_argument, "count must be >= 1");
  const BoundarySampler sampler(table);
  const double total = trajectory_space_volume(table);
  const std::size_t nb = boxes.size();
  struct Acc {
    std::vector<Estimate> k, pre, diff;
    std::uint64_t excluded = 0;
  };
  Acc init{std::vector<Estimate>(nb), std::vector<Estimate>(nb), std::vector<Estimate>(nb), 0};
  const Acc acc = parallel_blocks(
      count, workers, init,
      [&](std::uint64_t b, std::uint64_t e) {
        Acc a = init;
        for (std::uint64_t i = b; i < e; ++i) {
          CounterRng rng(seed, streams::boundary_sampler, i);
          const BoundaryCoords c0 = sampler.draw_coords(rng);
          const PhasePoint z = from_boundary_coords(table, c0);
          const auto step = billiard_map(table, law, z);
          if (!step || step->chord.grazing_exit) {
            ++a.excluded;
            continue;
          }
          const auto c1 = boundary_coords(table, step->next);
          if (!c1) {
            ++a.excluded;
            continue;
          }
          for (std::size_t j = 0; j < nb; ++j) {
            const double in0 = boxes[j].contains(c0) ? total : 0.0;
            const double in1 = boxes[j].contains(*c1) ? total : 0.0;
            a.k[j].add(in0);
            a.pre[j].add(in1);
            a.diff[j].add(in1 - in0);
          }
        }
        return a;
      },
      [](Acc& out, const Acc& p) {
        for (std::size_t j = 0; j < out.k.size(); ++j) {
          out.k[j].merge(p.k[j]);
          out.pre[j].merge(p.pre[j]);
          out.diff[j].merge(p.diff[j]);
        }
        out.excluded += p.excluded;
      });
  PreservationReport rep;
  rep.count = count;
  rep.excluded = acc.excluded;
  rep.total_mass = total;
  for (std::size_t j = 0; j < nb; ++j) {
    if (acc.k[j].mean() == 0.0)
      throw BilliardError(BilliardError::Code::degenerate_set, "box " + std::to_string(j) + " has empirical mass 0");
    BoxTest t{boxes[j], acc.k[j], acc.pre[j], acc.diff[j], 0.0};
    const double se = acc.diff[j].std_error();
    t.z_score = se > 0.0 ? acc.diff[j].mean() / se : (acc.diff[j].mean() == 0.0 ? 0.0 : INFINITY);
    rep.boxes.push_back(t);
  }
  return rep;
}

/// Random boxes in boundary coordinates, each confined to one piece.
inline std::vector<PhaseBox> random_phase_boxes(const Table& table, int count, std::uint64_t seed) {
  std::vector<PhaseBox> out;
  const int np = static_cast<int>(table.pieces().size());
  for (int i = 0; i < count; ++i) {
    CounterRng rng(seed, streams::boxes, static_cast<std::uint64_t>(i));
    PhaseBox b;
    b.piece = static_cast<int>(rng.uniform() * np);
    if (table.dim() == 2) {
      const double w = rng.uniform(0.5, 2.5);
      const double lo = rng.uniform(0.0, 2.0 * M_PI - w);
      b.pos[0] = {lo, lo + w};
      const double wd = rng.uniform(0.3, 1.2);
      const double dlo = rng.uniform(-M_PI / 2, M_PI / 2 - wd);
      b.dir[0] = {dlo, dlo + wd};
    } else {
      const double w = rng.uniform(0.4, 1.2);
      const double lo = rng.uniform(-1.0, 1.0 - w);
      b.pos[0] = {lo, lo + w};
      const double wa = rng.uniform(1.0, 4.0);
      const double alo = rng.uniform(0.0, 2.0 * M_PI - wa);
      b.pos[1] = {alo, alo + wa};
      const double wd = rng.uniform(0.3, 1.0);
      const double dlo = rng.uniform(0.0, M_PI / 2 - wd);
      b.dir[0] = {dlo, dlo + wd};
    }
    out.push_back(b);
  }
  return out;
}

}  // namespace billiards
