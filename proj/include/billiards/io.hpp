#pragma once

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "billiards/config.hpp"
#include "billiards/dynamics.hpp"
#include "billiards/ergodic.hpp"
#include "billiards/estimate.hpp"
#include "billiards/holography.hpp"
#include "billiards/lyapunov.hpp"
#include "billiards/measure.hpp"
#include "json.hpp"

namespace billiards {

inline json vec_json(const Vec& v, int dims) {
  json a = json::array();
  for (int i = 0; i < dims; ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const ModelSpace& sp, const PhasePoint& z) {
  return {{"q", vec_json(z.q, sp.chart_dim())}, {"v", vec_json(z.v, sp.chart_dim())}};
}

inline json to_json(const Estimate& e) {
  return {{"mean", e.mean()}, {"stderr", e.std_error()}, {"count", e.count()}};
}

/// One chord per line in orbit dumps.
inline json to_json(const ModelSpace& sp, const ChordRecord& c) {
  return {{"entry", to_json(sp, c.entry)},
          {"exit", to_json(sp, c.exit)},
          {"length", c.length},
          {"entry_piece", c.entry_piece},
          {"exit_piece", c.exit_piece},
          {"entry_stratum", std::string(to_string(c.entry_stratum.label))},
          {"exit_stratum", std::string(to_string(c.exit_stratum.label))},
          {"exit_cos", c.exit_stratum.cos_in},
          {"degenerate", c.degenerate},
          {"grazing_exit", c.grazing_exit}};
}

inline json to_json(const Table& t) {
  json pieces = json::array();
  const int d = t.space().chart_dim();
  for (const auto& p : t.pieces()) {
    json j;
    j["side"] = p.side == Side::outer_wall ? "outer_wall" : "obstacle";
    if (const auto* b = std::get_if<BallShape>(&p.shape)) {
      j["shape"] = "ball";
      j["center"] = vec_json(b->center, d);
      j["radius"] = b->radius;
    } else if (const auto* h = std::get_if<HalfSpaceShape>(&p.shape)) {
      j["shape"] = "half_space";
      j["normal"] = vec_json(h->normal, d + (t.space().kind() == SpaceKind::hyperbolic_ball ? 1 : 0));
      j["offset"] = h->offset;
    } else {
      const auto& f = std::get<FourierShape>(p.shape);
      j["shape"] = "fourier";
      j["center"] = vec_json(f.center, 2);
      j["cos"] = f.cos_coeffs;
      j["sin"] = f.sin_coeffs;
    }
    pieces.push_back(j);
  }
  json out{{"name", t.name()},
           {"space", t.space().name()},
           {"dimension", t.dim()},
           {"pieces", pieces},
           {"tolerances",
            {{"hit_tol", t.tolerances().hit_tol},
             {"grazing_tol", t.tolerances().grazing_tol},
             {"boundary_tol", t.tolerances().boundary_tol},
             {"l_max", t.l_max()}}}};
  if (t.space().is_torus()) out["periods"] = vec_json(t.space().periods(), t.dim());
  return out;
}

inline json to_json(const SpaceAverage& s) {
  return {{"estimate", to_json(s.estimate)},
          {"samples", s.count},
          {"trapped", s.trapped},
          {"grazing", s.grazing},
          {"excluded_fraction", s.excluded_fraction()}};
}

inline json to_json(const DomainVolumes& v) {
  return {{"vol_M", v.vol_M}, {"vol_dM", v.vol_dM}, {"vol_M_stderr", v.vol_M_stderr}, {"analytic", v.analytic}};
}

inline json to_json(const MeanFreePath& m) {
  return {{"prediction", m.prediction},
          {"space", to_json(m.space)},
          {"volumes", to_json(m.volumes)},
          {"relative_gap", m.relative_gap},
          {"z_score", m.z_score},
          {"note", m.note}};
}

inline json to_json(const TrappingProbe& p) {
  return {{"escape_fraction", p.escape_fraction}, {"max_chord", p.max_chord}, {"grazing_fraction", p.grazing_fraction},
          {"samples", p.samples},           {"trapped", p.trapped},        {"l_max", p.l_max}};
}

inline json to_json(const PhaseBox& b) {
  auto iv = [](const Interval& i) {
    json a = json::array();
    a.push_back(std::isfinite(i.lo) ? json(i.lo) : json(nullptr));
    a.push_back(std::isfinite(i.hi) ? json(i.hi) : json(nullptr));
    return a;
  };
  return {{"piece", b.piece}, {"pos", {iv(b.pos[0]), iv(b.pos[1])}}, {"dir", {iv(b.dir[0]), iv(b.dir[1])}}};
}

inline json to_json(const PreservationReport& r) {
  json boxes = json::array();
  for (const auto& b : r.boxes)
    boxes.push_back({{"box", to_json(b.box)},
                     {"mu_K", to_json(b.mu_K)},
                     {"mu_preimage_K", to_json(b.mu_preimage_K)},
                     {"z_score", b.z_score}});
  return {{"boxes", boxes},
          {"samples", r.count},
          {"excluded", r.excluded},
          {"total_mass", r.total_mass},
          {"max_abs_z", r.max_abs_z()}};
}

inline json to_json(const RecurrenceResult& r) {
  return {{"returned_fraction", r.returned_fraction},
          {"mean_return_count", r.mean_return_count},
          {"starters", r.starters},
          {"trapped", r.trapped},
          {"grazing", r.grazing}};
}

inline json to_json(const InequalityReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"status", std::string(to_string(c.status))},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"margin", c.margin},
                      {"note", c.note}});
  return {{"checks", checks}, {"gd_estimate", r.gd_estimate}, {"volumes", to_json(r.volumes)}, {"all_pass", r.all_pass()}};
}

inline json to_json(const ConjugacyResidual& r) {
  return {{"max_residual", std::isfinite(r.max_residual) ? json(r.max_residual) : json("inf")},
          {"mean_residual", r.mean_residual},
          {"samples", r.samples},
          {"skipped", r.skipped},
          {"invalid_image", r.invalid_image}};
}

inline json to_json(const ModelSpace& sp, const ScatteringRecord& r) {
  return {{"entry", to_json(sp, r.entry)}, {"exit", to_json(sp, r.exit)}, {"F_entry", r.F_entry}, {"F_exit", r.F_exit}};
}

/// Writes one JSON document per line.
template <class It, class Fn>
void write_jsonl(std::ostream& out, It begin, It end, Fn&& to_line) {
  for (It it = begin; it != end; ++it) out << to_line(*it).dump() << '\n';
}

/// CSV of boundary-measure samples: chart position, direction and weight.
inline void write_samples_csv(std::ostream& out, const ModelSpace& sp, const WeightedSampleSet& s) {
  const int d = sp.chart_dim();
  for (int i = 0; i < d; ++i) out << "q" << i << ',';
  for (int i = 0; i < d; ++i) out << "v" << i << ',';
  out << "weight\n";
  out.precision(17);
  const double w = s.weight();
  for (const PhasePoint& z : s.points) {
    for (int i = 0; i < d; ++i) out << z.q[i] << ',';
    for (int i = 0; i < d; ++i) out << z.v[i] << ',';
    out << w << '\n';
  }
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BilliardError(BilliardError::Code::invalid_argument, "cannot write '" + path + "'");
  out.precision(17);
  return out;
}

}  // namespace billiards
