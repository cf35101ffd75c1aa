#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "billiards/coords.hpp"
#include "billiards/dynamics.hpp"
#include "billiards/estimate.hpp"
#include "billiards/expected.hpp"
#include "billiards/lyapunov.hpp"
#include "billiards/measure.hpp"
#include "billiards/parallel.hpp"
#include "billiards/rng.hpp"
#include "billiards/table.hpp"

namespace billiards {

/// Chord observable: its length, or the F-variation Delta_F = F(exit) - F(entry).
struct Observable {
  enum class Kind { chord_length, delta_f };
  Kind kind = Kind::chord_length;
  const LyapunovF* F = nullptr;

  static Observable chord_length() { return {}; }
  static Observable delta_f(const LyapunovF& f) { return {Kind::delta_f, &f}; }

  double operator()(const ChordRecord& c) const {
    if (kind == Kind::chord_length) return c.length;
    if (c.degenerate) return 0.0;
    return (*F)(c.exit) - (*F)(c.entry);
  }
};

struct SpaceAverage {
  Estimate estimate;
  std::uint64_t count = 0;
  std::uint64_t trapped = 0;
  std::uint64_t grazing = 0;

  double excluded_fraction() const {
    return count ? static_cast<double>(trapped + grazing) / static_cast<double>(count) : 0.0;
  }
};

/// Average of the observable over the invariant boundary measure. Trapped
/// and grazing chords are excluded and counted; more than 1% excluded is an
/// error.
inline SpaceAverage space_average(const Table& table, const Observable& obs, std::uint64_t count, std::uint64_t seed,
                                  int workers = 1) {
  if (count < 1) throw BilliardError(BilliardError::Code::invalid_argument, "count must be >= 1");
  const BoundarySampler sampler(table);
  SpaceAverage out = parallel_blocks(
      count, workers, SpaceAverage{},
      [&](std::uint64_t b, std::uint64_t e) {
        SpaceAverage a;
        for (std::uint64_t i = b; i < e; ++i) {
          CounterRng rng(seed, streams::boundary_sampler, i);
          const auto chord = causality_map(table, sampler.draw(rng));
          if (!chord) {
            ++a.trapped;
          } else if (chord->grazing_exit) {
            ++a.grazing;
          } else {
            a.estimate.add(obs(*chord));
          }
        }
        return a;
      },
      [](SpaceAverage& o, const SpaceAverage& p) {
        o.estimate.merge(p.estimate);
        o.trapped += p.trapped;
        o.grazing += p.grazing;
      });
  out.count = count;
  if (out.excluded_fraction() > 0.01)
    throw BilliardError(BilliardError::Code::too_many_trapped,
                        "excluded fraction " + std::to_string(out.excluded_fraction()) + " exceeds 1%");
  return out;
}

/// Running Birkhoff means along one billiard orbit.
struct TimeAverage {
  std::vector<std::pair<std::uint64_t, double>> running;  // (bounces, mean) at powers of 2 and at the end
  double mean = 0.0;
  std::uint64_t bounces = 0;
  Termination termination = Termination::completed;
};

inline TimeAverage time_average(const Table& table, const ReflectionLaw& law, const Observable& obs,
                                const PhasePoint& z0, std::uint64_t m) {
  const auto stratum = classify_boundary_point(table, z0);
  if (!stratum) throw TraceFailure(stratum.error());
  if (stratum->label != StratumLabel::transversal_in) throw TraceFailure(TraceError::wrong_stratum);
  TimeAverage out;
  Estimate acc;
  std::uint64_t next_mark = 1;
  const auto [term, k] = trace_orbit(table, law, z0, m, [&](const ChordRecord& c) {
    if (c.grazing_exit) return false;
    acc.add(obs(c));
    if (acc.count() == next_mark) {
      out.running.emplace_back(acc.count(), acc.mean());
      next_mark *= 2;
    }
    return true;
  });
  out.termination = term;
  out.bounces = acc.count();
  out.mean = acc.mean();
  if (out.running.empty() || out.running.back().first != acc.count()) out.running.emplace_back(acc.count(), acc.mean());
  return out;
}

/// Birkhoff comparison: time averages from several starters against the
/// space average of the same observable.
struct AverageReport {
  SpaceAverage space_avg;
  std::vector<TimeAverage> time_avg;
  std::optional<double> prediction;
  std::vector<double> agreement;  // |time - space| / |space| per starter

  int agreeing(double tolerance) const {
    int n = 0;
    for (double a : agreement) n += a < tolerance;
    return n;
  }
};

inline AverageReport birkhoff_report(const Table& table, const ReflectionLaw& law, const Observable& obs,
                                     int starters, std::uint64_t m, std::uint64_t space_count, std::uint64_t seed,
                                     int workers = 1) {
  AverageReport rep;
  rep.space_avg = space_average(table, obs, space_count, seed, workers);
  const BoundarySampler sampler(table);
  rep.time_avg.resize(static_cast<std::size_t>(starters));
  parallel_for(static_cast<std::uint64_t>(starters), workers, [&](std::uint64_t i) {
    CounterRng rng(seed, streams::starters, i);
    rep.time_avg[i] = time_average(table, law, obs, sampler.draw(rng), m);
  });
  const double s = rep.space_avg.estimate.mean();
  for (const auto& t : rep.time_avg) rep.agreement.push_back(std::fabs(t.mean - s) / std::fabs(s));
  return rep;
}

/// Mean chord length predicted from the volumes:
/// (vol S^{n-1} / vol B^{n-1}) * vol(M) / vol(dM).
inline double mean_free_path_prediction(int n, double vol_M, double vol_dM) {
  return unit_sphere_volume(n - 1) / unit_ball_volume(n - 1) * vol_M / vol_dM;
}

struct MeanFreePath {
  double prediction = 0.0;
  SpaceAverage space;
  DomainVolumes volumes;
  double relative_gap = 0.0;
  double z_score = 0.0;
  std::string note;
};

inline MeanFreePath mean_free_path(const Table& table, std::uint64_t count, std::uint64_t seed, int workers = 1) {
  MeanFreePath r;
  r.volumes = domain_volumes(table, 1'000'000, seed, workers);
  r.prediction = mean_free_path_prediction(table.dim(), r.volumes.vol_M, r.volumes.vol_dM);
  r.space = space_average(table, Observable::chord_length(), count, seed, workers);
  const double mean = r.space.estimate.mean();
  r.relative_gap = (mean - r.prediction) / r.prediction;
  const double se = r.space.estimate.std_error();
  r.z_score = se > 0.0 ? (mean - r.prediction) / se : 0.0;
  if (r.space.trapped > 0)
    r.note = std::to_string(r.space.trapped) + " of " + std::to_string(count) +
             " samples reached the length cap and were excluded; the table may be trapping";
  if (!r.volumes.analytic) r.note += (r.note.empty() ? "" : "; ") + std::string("vol_M is a Monte Carlo estimate");
  return r;
}

/// Running volume estimates recovered from a chord-length sequence:
/// vol_M(k) = (vol B^{n-1} / vol S^{n-1}) * vol_dM * mean(l_1..l_k).
/// The running mean uses exact fixed-point sums, so the result does not
/// depend on the order of the lengths.
inline std::vector<double> hear_volume(const std::vector<double>& lengths, double vol_dM, int n) {
  if (lengths.empty()) throw BilliardError(BilliardError::Code::empty_sequence, "no chord lengths given");
  if (!(vol_dM > 0.0)) throw BilliardError(BilliardError::Code::invalid_argument, "boundary volume must be positive");
  const double factor = unit_ball_volume(n - 1) / unit_sphere_volume(n - 1) * vol_dM;
  std::vector<double> out;
  out.reserve(lengths.size());
  Estimate acc;
  for (double l : lengths) {
    acc.add(l);
    out.push_back(factor * acc.mean());
  }
  return out;
}

struct RecurrenceResult {
  double returned_fraction = 0.0;
  double mean_return_count = 0.0;
  std::uint64_t starters = 0;
  std::uint64_t trapped = 0;
  std::uint64_t grazing = 0;
};

/// Fraction of starters drawn from the invariant measure restricted to U
/// whose billiard orbit re-enters U within m bounces.
inline RecurrenceResult recurrence_test(const Table& table, const ReflectionLaw& law, const PhaseBox& U,
                                        std::uint64_t starters, std::uint64_t m, std::uint64_t seed, int workers = 1) {
  const BoundarySampler sampler(table);
  struct Acc {
    std::uint64_t returned = 0, returns = 0, trapped = 0, grazing = 0;
  };
  const Acc acc = parallel_blocks(
      starters, workers, Acc{},
      [&](std::uint64_t b, std::uint64_t e) {
        Acc a;
        for (std::uint64_t i = b; i < e; ++i) {
          CounterRng rng(seed, streams::starters, i);
          BoundaryCoords c;
          int tries = 0;
          do {
            c = sampler.draw_coords(rng);
            if (++tries > 10'000'000)
              throw BilliardError(BilliardError::Code::degenerate_set, "recurrence box has no sampled mass");
          } while (!U.contains(c));
          if (m == 0) continue;
          std::uint64_t count = 0;
          const auto [term, k] = trace_orbit(table, law, from_boundary_coords(table, c), m, [&](const ChordRecord& ch) {
            if (ch.grazing_exit || ch.degenerate) return true;
            PhasePoint next{ch.exit.q, detail::involution_vector(law, table, ch.exit_piece, ch.exit.q, ch.exit.v)};
            const auto cc = boundary_coords(table, next);
            if (cc && U.contains(*cc)) ++count;
            return true;
          });
          (void)k;
          if (term == Termination::trapped) ++a.trapped;
          if (term == Termination::grazing) ++a.grazing;
          a.returns += count;
          if (count > 0) ++a.returned;
        }
        return a;
      },
      [](Acc& o, const Acc& p) {
        o.returned += p.returned;
        o.returns += p.returns;
        o.trapped += p.trapped;
        o.grazing += p.grazing;
      });
  RecurrenceResult r;
  r.starters = starters;
  r.trapped = acc.trapped;
  r.grazing = acc.grazing;
  if (starters > 0) {
    r.returned_fraction = static_cast<double>(acc.returned) / static_cast<double>(starters);
    r.mean_return_count = static_cast<double>(acc.returns) / static_cast<double>(starters);
  }
  return r;
}

/// One inequality or identity check.
struct InequalityCheck {
  enum class Status { pass, fail, skipped };
  std::string name;
  Status status = Status::skipped;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs / lhs for inequalities, relative error for identities
  std::string note;
};

constexpr std::string_view to_string(InequalityCheck::Status s) {
  switch (s) {
    case InequalityCheck::Status::pass: return "pass";
    case InequalityCheck::Status::fail: return "fail";
    case InequalityCheck::Status::skipped: return "skipped";
  }
  return "unknown";
}

struct InequalityOptions {
  std::uint64_t probe_samples = 100'000;
  std::uint64_t slice_samples = 100'000;
  int slice_points = 100;
  double identity_tolerance = 0.03;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct InequalityReport {
  std::vector<InequalityCheck> checks;
  double gd_estimate = 0.0;
  DomainVolumes volumes;

  bool all_pass() const {
    for (const auto& c : checks)
      if (c.status == InequalityCheck::Status::fail) return false;
    return true;
  }
  const InequalityCheck* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Longest chord among normal-incidence shots from deterministic boundary
/// points. Diameters of convex tables are realized by double normals, so
/// these shots complement the random probe.
inline double normal_shot_max_chord(const Table& table, int per_piece = 4096) {
  double best = 0.0;
  for (int i = 0; i < static_cast<int>(table.pieces().size()); ++i) {
    for (const Vec& q : table.piece_boundary_samples(i, per_piece)) {
      if (!table.on_boundary(q)) continue;
      const PhasePoint z{q, table.inward_normal_of(i, q)};
      const auto c = causality_map(table, z);
      if (c) best = std::max(best, c->length);
    }
  }
  return best;
}

inline InequalityReport inequality_report(const Table& table, const LyapunovF& F, const InequalityOptions& opt = {}) {
  InequalityReport rep;
  const int n = table.dim();
  rep.volumes = domain_volumes(table, 1'000'000, opt.seed, opt.workers);
  const TrappingProbe probe = trapping_probe(table, opt.probe_samples, 0.0, opt.seed, opt.workers);
  rep.gd_estimate = std::max(probe.max_chord, normal_shot_max_chord(table));
  const double ratio = unit_ball_volume(n - 1) / unit_sphere_volume(n - 1);

  InequalityCheck gd;
  gd.name = "diameter_volume";
  gd.lhs = rep.volumes.vol_M;
  gd.rhs = ratio * rep.gd_estimate * rep.volumes.vol_dM;
  gd.margin = gd.rhs / gd.lhs;
  gd.status = gd.lhs <= gd.rhs ? InequalityCheck::Status::pass : InequalityCheck::Status::fail;
  gd.note = "uses the largest observed chord, a lower bound for the geodesic diameter";
  rep.checks.push_back(gd);

  const SliceCurve curve = slice_area_curve(table, F, opt.slice_points, opt.slice_samples, opt.seed, opt.workers);
  InequalityCheck bound;
  bound.name = "slice_area_bound";
  bound.rhs = curve.total_mass;
  for (const auto& a : curve.area) bound.lhs = std::max(bound.lhs, a.mean());
  bound.margin = bound.rhs / bound.lhs;
  bound.status = bound.lhs <= bound.rhs * (1.0 + 1e-12) ? InequalityCheck::Status::pass : InequalityCheck::Status::fail;
  bound.note = "max over the level grid of A(t) against the trajectory-space volume";
  rep.checks.push_back(bound);

  InequalityCheck ident;
  ident.name = "slice_integral_identity";
  ident.lhs = curve.integral;
  ident.rhs = unit_sphere_volume(n - 1) * rep.volumes.vol_M;
  ident.margin = std::fabs(ident.lhs - ident.rhs) / ident.rhs;
  ident.status = ident.margin < opt.identity_tolerance ? InequalityCheck::Status::pass : InequalityCheck::Status::fail;
  ident.note = "av(A) * var(F) = integral of A(t) dt against vol(S^{n-1}) * vol(M)";
  rep.checks.push_back(ident);

  InequalityCheck vol;
  vol.name = "trajectory_volume_vs_boundary";
  vol.status = InequalityCheck::Status::skipped;
  vol.note = "needs the induced metric on the boundary of the phase space, which is not modelled";
  rep.checks.push_back(vol);
  return rep;
}

}  // namespace billiards
