#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "billiards/coords.hpp"
#include "billiards/estimate.hpp"
#include "billiards/expected.hpp"
#include "billiards/geometry.hpp"
#include "billiards/parallel.hpp"
#include "billiards/rng.hpp"
#include "billiards/table.hpp"

namespace billiards {

/// Anisotropic stretch of the boundary metric used by the rescaled
/// reflection: g~ = g + (factor^2 - 1) e (x) e with the unit direction
/// e = cos(tilt) n + sin(tilt) t_1 in the boundary frame. factor = 1 gives g.
struct BoundaryStretch {
  double factor = 1.0;
  double tilt = 0.0;
};

/// Fiberwise involution of the boundary unit sphere bundle.
struct ReflectionLaw {
  enum class Kind { elastic, rescaled };
  Kind kind = Kind::elastic;
  BoundaryStretch fallback;
  std::vector<BoundaryStretch> per_piece;

  static ReflectionLaw elastic() { return {}; }

  static ReflectionLaw rescaled(BoundaryStretch all, std::vector<BoundaryStretch> pieces = {}) {
    if (!(all.factor > 0.0)) throw BilliardError(BilliardError::Code::invalid_argument, "stretch factor must be positive");
    for (const auto& p : pieces)
      if (!(p.factor > 0.0)) throw BilliardError(BilliardError::Code::invalid_argument, "stretch factor must be positive");
    return {Kind::rescaled, all, std::move(pieces)};
  }

  const BoundaryStretch& stretch(int piece) const {
    if (piece >= 0 && piece < static_cast<int>(per_piece.size())) return per_piece[static_cast<std::size_t>(piece)];
    return fallback;
  }
};

namespace detail {

/// tau applied to v at boundary point q of `piece`. Linear in v up to the
/// final renormalization, so tau o tau = id and tau fixes exactly T(dM).
inline Vec involution_vector(const ReflectionLaw& law, const Table& table, int piece, const Vec& q, const Vec& v) {
  const ModelSpace& sp = table.space();
  if (law.kind == ReflectionLaw::Kind::elastic) {
    const Vec n = table.inward_normal_of(piece, q);
    return sp.normalize_tangent(q, v - n * (2.0 * sp.metric_dot(q, v, n)));
  }
  const BoundaryFrame fr = boundary_frame(table, piece, q);
  const BoundaryStretch& st = law.stretch(piece);
  const Vec e = fr.normal * std::cos(st.tilt) + fr.tangents[0] * std::sin(st.tilt);
  const double k = st.factor * st.factor - 1.0;
  auto gt = [&](const Vec& a, const Vec& b) {
    return sp.metric_dot(q, a, b) + k * sp.metric_dot(q, a, e) * sp.metric_dot(q, b, e);
  };
  // g~-normal of T(dM): g~^{-1} applied to g(n, .).
  Vec nt = e * (-(1.0 - 1.0 / (st.factor * st.factor)) * sp.metric_dot(q, e, fr.normal)) + fr.normal;
  nt = nt / std::sqrt(gt(nt, nt));
  Vec y = v / std::sqrt(gt(v, v));
  y = y - nt * (2.0 * gt(y, nt));
  return sp.normalize_tangent(q, y);
}

}  // namespace detail

/// The involution tau on any boundary phase point (no direction check).
inline Expected<PhasePoint> apply_involution(const ReflectionLaw& law, const Table& table, const PhasePoint& z) {
  if (!table.on_boundary(z.q)) return TraceError::not_on_boundary;
  return PhasePoint{z.q, detail::involution_vector(law, table, table.nearest_piece(z.q), z.q, z.v)};
}

/// Reflection of an outgoing (or tangent) boundary phase point.
inline Expected<PhasePoint> reflect(const ReflectionLaw& law, const Table& table, const PhasePoint& z) {
  if (!table.on_boundary(z.q)) return TraceError::not_on_boundary;
  const int piece = table.nearest_piece(z.q);
  const Vec n = table.inward_normal_of(piece, z.q);
  if (table.space().metric_dot(z.q, z.v, n) > table.tolerances().grazing_tol) return TraceError::wrong_stratum;
  return PhasePoint{z.q, detail::involution_vector(law, table, piece, z.q, z.v)};
}

/// One application of the causality map.
struct ChordRecord {
  PhasePoint entry;
  PhasePoint exit;
  double length = 0.0;
  Stratum entry_stratum;
  Stratum exit_stratum;
  int entry_piece = -1;
  int exit_piece = -1;
  std::array<int, 3> exit_image{};
  bool degenerate = false;    // C(x) = x at a tangency without a forward segment
  bool grazing_exit = false;  // |cos| at the exit inside the grazing band
};

/// C(z): the first return to the boundary of the geodesic through an
/// inward (or tangent) boundary phase point.
inline Expected<ChordRecord> causality_map(const Table& table, const PhasePoint& z) {
  if (!table.on_boundary(z.q)) return TraceError::not_on_boundary;
  ChordRecord rec;
  rec.entry = z;
  rec.entry_piece = table.nearest_piece(z.q);
  rec.entry_stratum = detail::classify_on_piece(table, rec.entry_piece, z);
  switch (rec.entry_stratum.label) {
    case StratumLabel::transversal_out: return TraceError::wrong_stratum;
    case StratumLabel::tangent_convex:
      rec.exit = z;
      rec.exit_stratum = rec.entry_stratum;
      rec.exit_piece = rec.entry_piece;
      rec.degenerate = true;
      return rec;
    default: break;
  }
  auto hit = first_boundary_hit(table, z);
  if (!hit) return hit.error();
  rec.exit = hit->hit;
  rec.length = hit->s_hit;
  rec.exit_piece = hit->piece;
  rec.exit_image = hit->image;
  rec.exit_stratum = hit->stratum;
  rec.grazing_exit = hit->cos_in > -table.tolerances().grazing_tol;
  return rec;
}

struct BilliardStep {
  PhasePoint next;
  ChordRecord chord;
};

/// B = tau o C. Degenerate chords pass the point through unchanged.
inline Expected<BilliardStep> billiard_map(const Table& table, const ReflectionLaw& law, const PhasePoint& z) {
  auto chord = causality_map(table, z);
  if (!chord) return chord.error();
  BilliardStep step{z, *chord};
  if (!chord->degenerate) {
    step.next = {chord->exit.q,
                 detail::involution_vector(law, table, chord->exit_piece, chord->exit.q, chord->exit.v)};
  }
  return step;
}

enum class Termination { completed, trapped, grazing };

constexpr std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::trapped: return "trapped";
    case Termination::grazing: return "grazing";
  }
  return "unknown";
}

/// Streams up to k_max chords of the billiard orbit of z0 to `visit`.
/// Stops after a degenerate chord (a fixed point), on a grazing exit (the
/// grazing chord is still visited) or when the trace is trapped. `visit`
/// may return false to stop early. Returns the termination reason and the
/// number of chords visited.
template <class Visitor>
std::pair<Termination, std::uint64_t> trace_orbit(const Table& table, const ReflectionLaw& law, PhasePoint z,
                                                  std::uint64_t k_max, Visitor&& visit) {
  std::uint64_t k = 0;
  while (k < k_max) {
    auto step = billiard_map(table, law, z);
    if (!step) {
      if (step.error() == TraceError::trapped) return {Termination::trapped, k};
      throw TraceFailure(step.error());
    }
    ++k;
    const bool go_on = visit(step->chord);
    if (step->chord.grazing_exit) return {Termination::grazing, k};
    if (step->chord.degenerate || !go_on) break;
    z = step->next;
  }
  return {Termination::completed, k};
}

struct OrbitRecord {
  std::vector<ChordRecord> chords;
  Termination termination = Termination::completed;
};

inline OrbitRecord iterate_orbit(const Table& table, const ReflectionLaw& law, const PhasePoint& z0, std::uint64_t k_max) {
  if (k_max < 1) throw BilliardError(BilliardError::Code::invalid_argument, "k_max must be >= 1");
  OrbitRecord orbit;
  orbit.chords.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(k_max, 1u << 20)));
  orbit.termination = trace_orbit(table, law, z0, k_max, [&](const ChordRecord& c) {
                        orbit.chords.push_back(c);
                        return true;
                      }).first;
  return orbit;
}

struct TrappingProbe {
  double escape_fraction = 0.0;
  double max_chord = 0.0;  // lower bound for the geodesic diameter
  double grazing_fraction = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t trapped = 0;
  double l_max = 0.0;
};

/// Monte Carlo trapping probe over boundary entries drawn from the
/// invariant boundary measure.
inline TrappingProbe trapping_probe(const Table& table, std::uint64_t sample_count, double l_max, std::uint64_t seed,
                                    int workers = 1) {
  if (sample_count < 1) throw BilliardError(BilliardError::Code::invalid_argument, "sample_count must be >= 1");
  const Table capped = l_max > 0.0 ? table.with_l_max(l_max) : table;
  const BoundarySampler sampler(capped);
  struct Acc {
    std::uint64_t escaped = 0, grazing = 0, trapped = 0;
    double max_chord = 0.0;
  };
  const Acc acc = parallel_blocks(
      sample_count, workers, Acc{},
      [&](std::uint64_t b, std::uint64_t e) {
        Acc a;
        for (std::uint64_t i = b; i < e; ++i) {
          CounterRng rng(seed, streams::boundary_sampler, i);
          const auto chord = causality_map(capped, sampler.draw(rng));
          if (!chord) {
            ++a.trapped;
            continue;
          }
          ++a.escaped;
          if (chord->grazing_exit) ++a.grazing;
          a.max_chord = std::max(a.max_chord, chord->length);
        }
        return a;
      },
      [](Acc& out, const Acc& p) {
        out.escaped += p.escaped;
        out.grazing += p.grazing;
        out.trapped += p.trapped;
        out.max_chord = std::max(out.max_chord, p.max_chord);
      });
  TrappingProbe r;
  r.samples = sample_count;
  r.trapped = acc.trapped;
  r.escape_fraction = static_cast<double>(acc.escaped) / static_cast<double>(sample_count);
  r.grazing_fraction = static_cast<double>(acc.grazing) / static_cast<double>(sample_count);
  r.max_chord = acc.max_chord;
  r.l_max = capped.l_max();
  return r;
}

}  // namespace billiards
