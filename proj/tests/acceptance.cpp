// End-to-end acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "billiards/billiards.hpp"

namespace {

using namespace billiards;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int workers() { return default_workers(); }

Outcome mfp_within(const std::string& preset, double expected, std::uint64_t n, std::uint64_t seed) {
  const MeanFreePath m = mean_free_path(make_preset(preset), n, seed, workers());
  const double mean = m.space.estimate.mean(), se = m.space.estimate.std_error();
  const double z = (mean - expected) / se;
  return {std::fabs(z) < 3.0 && std::fabs(m.prediction - expected) < 1e-4,
          fmt("%s mean=%.6f stderr=%.6f expected=%.6f formula=%.6f z=%.2f", preset.c_str(), mean, se, expected,
              m.prediction, z)};
}

Outcome criterion_1() { return mfp_within("disk", M_PI / 2.0, 1'000'000, 101); }

Outcome criterion_2() { return mfp_within("ball3", 4.0 / 3.0, 1'000'000, 102); }

Outcome criterion_3() {
  const std::uint64_t n = 1'000'000;
  const MeanFreePath m = mean_free_path(make_preset("torus-one-ball"), n, 103, workers());
  const double capped = static_cast<double>(m.space.trapped) / static_cast<double>(n);
  const double gap = (m.space.estimate.mean() - 4.8429) / 4.8429;
  return {std::fabs(m.prediction - 4.8429) < 5e-5 && std::fabs(gap) < 0.01 && capped < 1e-3,
          fmt("mean=%.5f prediction=%.5f gap=%.3f%% capped_fraction=%.2e (trapping table: chords above L_max=%.0f "
              "are excluded)",
              m.space.estimate.mean(), m.prediction, 100.0 * gap, capped, make_preset("torus-one-ball").l_max())};
}

Outcome criterion_4() {
  const Outcome h = mfp_within("hyperbolic-disk-1", M_PI * std::tanh(0.5), 1'000'000, 104);
  const Outcome s = mfp_within("spherical-cap-pi4", M_PI * std::tan(M_PI / 8.0), 1'000'000, 105);
  return {h.pass && s.pass, h.detail + "; " + s.detail};
}

Outcome criterion_5() {
  std::string detail;
  bool pass = true;
  for (const std::string name : {"disk", "torus-two-balls"}) {
    const Table t = make_preset(name);
    const PreservationReport r =
        measure_preservation_test(t, ReflectionLaw::elastic(), random_phase_boxes(t, 20, 5), 1'000'000, 105, workers());
    pass = pass && r.boxes.size() == 20 && r.max_abs_z() < 4.0;
    detail += fmt("%s max|z|=%.2f excluded=%llu; ", name.c_str(), r.max_abs_z(),
                  static_cast<unsigned long long>(r.excluded));
  }
  return {pass, detail};
}

Outcome criterion_6() {
  const AverageReport r = birkhoff_report(make_preset("torus-two-balls"), ReflectionLaw::elastic(),
                                          Observable::chord_length(), 10, 100'000, 1'000'000, 106, workers());
  double worst = 0.0;
  for (double a : r.agreement) worst = std::max(worst, a);
  const int ok = r.agreeing(0.02);
  return {ok >= 9, fmt("%d/10 starters within 2%% (worst %.3f%%), space average %.5f", ok, 100.0 * worst,
                       r.space_avg.estimate.mean())};
}

Outcome criterion_7() {
  const Table disk = make_preset("disk");
  const LyapunovF F = build_well_balanced_F(disk);
  const BoundarySampler sampler(disk);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 10'000; ++i) {
    CounterRng rng(107, streams::validation, i);
    const PhasePoint z = sampler.draw(rng);
    const auto c = causality_map(disk, z);
    const auto d = delta_F(disk, F, z);
    if (!c || !d) return {false, "chord failed"};
    worst = std::max(worst, std::fabs(*d - c->length));
  }
  return {worst < 1e-9, fmt("max|Delta_F - length| = %.2e over 10^4 chords", worst)};
}

Outcome criterion_8() {
  const Table disk = make_preset("disk");
  const double closed = trajectory_space_volume(disk);
  // Quadrature of the density over positions (periodic trapezoid) and
  // direction angles (composite Simpson).
  const int np = 64, nt = 2000;
  double quad = 0.0;
  for (int i = 0; i < np; ++i) {
    double inner = 0.0;
    for (int k = 0; k <= nt; ++k) {
      BoundaryCoords c;
      c.piece = 0;
      c.pos[0] = 2.0 * M_PI * i / np;
      c.dir[0] = -M_PI / 2.0 + M_PI * k / nt;
      const double w = (k == 0 || k == nt) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      inner += w * *mu_theta_density(disk, from_boundary_coords(disk, c));
    }
    quad += inner * (M_PI / nt) / 3.0;
  }
  quad *= 2.0 * M_PI / np;
  const BoundarySampler sampler(disk);
  Estimate e;
  for (std::uint64_t i = 0; i < 1'000'000; ++i) {
    CounterRng rng(108, streams::uniform_fiber, i);
    e.add(std::fmax(0.0, *mu_theta_density(disk, sampler.draw_uniform_fiber(rng))) * sampler.total_area() * 2.0 * M_PI);
  }
  const double z = (e.mean() - 4.0 * M_PI) / e.std_error();
  return {std::fabs(closed - 4.0 * M_PI) < 1e-12 && std::fabs(quad - closed) < 1e-9 && std::fabs(z) < 3.0,
          fmt("closed=%.12f quadrature=%.12f sampled=%.5f+-%.5f (z=%.2f)", closed, quad, e.mean(), e.std_error(), z)};
}

Outcome criterion_9() {
  const Table disk = make_preset("disk");
  const SliceCurve c = slice_area_curve(disk, build_well_balanced_F(disk), 100, 100'000, 109, workers());
  const double target = 2.0 * M_PI * M_PI;
  double a_max = 0.0;
  for (const auto& a : c.area) a_max = std::max(a_max, a.mean());
  const double gap = (c.integral - target) / target;
  return {std::fabs(gap) < 0.02 && a_max <= 4.0 * M_PI * (1.0 + 1e-12),
          fmt("integral=%.5f target=%.5f gap=%.3f%% max A=%.5f bound 4pi=%.5f", c.integral, target, 100.0 * gap, a_max,
              4.0 * M_PI)};
}

Outcome criterion_10() {
  std::string detail;
  bool pass = true;
  const std::vector<std::pair<std::string, double>> cases{{"disk", 4.0 / M_PI}, {"ball3", 1.5}};
  for (const auto& [name, margin] : cases) {
    const Table t = make_preset(name);
    InequalityOptions opt;
    opt.workers = workers();
    opt.seed = 110;
    const InequalityReport r = inequality_report(t, build_well_balanced_F(t), opt);
    const InequalityCheck* gd = r.find("diameter_volume");
    const bool ok = r.all_pass() && gd && std::fabs(gd->margin - margin) < 1e-3 * margin;
    pass = pass && ok;
    detail += fmt("%s gd=%.6f margin=%.5f (exact %.5f) all_pass=%d; ", name.c_str(), r.gd_estimate,
                  gd ? gd->margin : 0.0, margin, r.all_pass());
  }
  return {pass, detail};
}

Outcome criterion_11() {
  PhaseBox U;
  U.piece = 0;
  U.pos[0] = {0.0, 0.1};
  U.dir[0] = {0.4, 0.6};
  const RecurrenceResult r = recurrence_test(make_preset("disk"), ReflectionLaw::elastic(), U, 1000, 10'000, 111, workers());
  return {r.returned_fraction > 0.99, fmt("returned_fraction=%.4f over %llu starters, mean returns %.1f",
                                          r.returned_fraction, static_cast<unsigned long long>(r.starters),
                                          r.mean_return_count)};
}

Outcome criterion_12() {
  const Table disk = make_preset("disk");
  const Table cap = make_preset("spherical-cap-pi4");
  const Table torus(ModelSpace::flat_torus({1.0, 1.0}),
                    {BoundaryPiece{BallShape{{0.25, 0.25}, 0.15}, Side::obstacle},
                     BoundaryPiece{BallShape{{0.75, 0.75}, 0.15}, Side::obstacle}},
                    {}, "symmetric-torus");
  double worst = 0.0;
  worst = std::max(worst, conjugacy_residual(disk, disk, conjugacy::rotation(1.0), 10'000, 112, workers()).max_residual);
  worst = std::max(worst, conjugacy_residual(disk, disk, conjugacy::reflection(), 10'000, 112, workers()).max_residual);
  worst = std::max(worst, conjugacy_residual(cap, cap, conjugacy::rotation(2.0), 10'000, 112, workers()).max_residual);
  worst = std::max(worst, conjugacy_residual(torus, torus, conjugacy::torus_translation(torus.space(), {0.5, 0.5}),
                                             10'000, 112, workers())
                              .max_residual);
  const LyapunovF F = build_well_balanced_F(disk);
  const ChordCloud cloud = reconstruct_chords(scattering_grid(disk, &F, 64, 64, workers()), disk.space(), 0.01);
  const double h = hausdorff_domain_to_cloud(disk, cloud.points);
  return {worst < 1e-9 && h < 0.05, fmt("max isometry residual=%.2e hausdorff(64x64)=%.4f cloud=%zu points", worst, h,
                                        cloud.points.size())};
}

Outcome criterion_13() {
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  const std::vector<std::string> names{"disk", "ball3", "ellipse", "torus-two-balls", "hyperbolic-disk-1",
                                       "spherical-cap-pi4"};
  const ReflectionLaw rescaled = ReflectionLaw::rescaled({1.7, 0.3});
  for (const auto& name : names) {
    const Table t = make_preset(name);
    const ModelSpace& sp = t.space();
    const BoundarySampler sampler(t);
    const LyapunovF* F = nullptr;
    std::optional<LyapunovF> f_store;
    if (!sp.is_torus()) {
      f_store = build_well_balanced_F(t);
      F = &*f_store;
    }
    const std::uint64_t n = name == "disk" || name == "torus-two-balls" ? 100'000 : 10'000;
    double inv = 0.0, rev = 0.0, comp = 0.0, replay = 0.0, additive = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      CounterRng rng(113, streams::validation, i);
      const PhasePoint z = sampler.draw(rng);
      for (const ReflectionLaw& law : {ReflectionLaw::elastic(), rescaled}) {
        const auto once = apply_involution(law, t, z);
        const auto twice = apply_involution(law, t, *once);
        inv = std::max(inv, max_abs_diff(twice->v, z.v));
      }
      if (i >= 10'000) continue;
      const auto c = causality_map(t, z);
      if (!c || c->grazing_exit) continue;
      const PhasePoint r = geodesic_flow(sp, z, c->length);
      replay = std::max(replay, sp.chart_distance(r.q, c->exit.q));
      const auto back = causality_map(t, {c->exit.q, -c->exit.v});
      if (back) rev = std::max({rev, sp.chart_distance(back->exit.q, z.q), std::fabs(back->length - c->length)});
      const double s = rng.uniform() * c->length, u = rng.uniform() * c->length;
      const PhasePoint a = geodesic_flow(sp, z, s + u), b = geodesic_flow(sp, geodesic_flow(sp, z, s), u);
      comp = std::max(comp, sp.chart_distance(a.q, b.q));
      if (F) {
        const PhasePoint mid = geodesic_flow(sp, z, s);
        additive = std::max(additive, std::fabs(((*F)(mid) - (*F)(z)) + ((*F)(c->exit) - (*F)(mid)) - c->length));
        additive = std::max(additive, std::fabs((*F)(mid) - (*F)(z) - s));
      }
    }
    check(inv < 1e-12, fmt("%s involution %.1e", name.c_str(), inv));
    check(rev < 1e-9, fmt("%s time reversal %.1e", name.c_str(), rev));
    check(comp < 1e-11, fmt("%s flow composition %.1e", name.c_str(), comp));
    check(replay < 1e-9, fmt("%s chord replay %.1e", name.c_str(), replay));
    check(additive < 1e-9, fmt("%s Delta_F additivity %.1e", name.c_str(), additive));
  }
  // Estimate merge exactness.
  Estimate whole, left, right;
  for (std::uint64_t i = 0; i < 100'000; ++i) {
    CounterRng rng(113, 0, i);
    const double x = rng.uniform(0.0, 10.0);
    whole.add(x);
    (i % 3 ? left : right).add(x);
  }
  check(Estimate::merged(left, right) == whole && Estimate::merged(right, left) == whole, "estimate merge");
  // Determinism across worker counts.
  const Table sinai = make_preset("torus-two-balls");
  const auto a1 = space_average(sinai, Observable::chord_length(), 100'000, 113, 1);
  const auto a8 = space_average(sinai, Observable::chord_length(), 100'000, 113, 8);
  check(a1.estimate == a8.estimate, "space average 1 vs 8 workers");
  const auto boxes = random_phase_boxes(sinai, 5, 113);
  const auto p1 = measure_preservation_test(sinai, ReflectionLaw::elastic(), boxes, 50'000, 113, 1);
  const auto p3 = measure_preservation_test(sinai, ReflectionLaw::elastic(), boxes, 50'000, 113, 3);
  bool same = true;
  for (std::size_t j = 0; j < boxes.size(); ++j) same = same && p1.boxes[j].difference == p3.boxes[j].difference;
  check(same, "preservation test 1 vs 3 workers");
  std::string detail = failures.empty() ? "all invariants hold" : "";
  for (const auto& f : failures) detail += f + "; ";
  return {failures.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"mean free path, disk", criterion_1},
      {"mean free path, ball", criterion_2},
      {"mean free path, torus minus one ball", criterion_3},
      {"mean free path, hyperbolic disk and spherical cap", criterion_4},
      {"measure preservation", criterion_5},
      {"Birkhoff agreement", criterion_6},
      {"well-balanced identity", criterion_7},
      {"trajectory-space volume", criterion_8},
      {"slice identity", criterion_9},
      {"inequality report", criterion_10},
      {"recurrence", criterion_11},
      {"holography", criterion_12},
      {"property suite", criterion_13},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
