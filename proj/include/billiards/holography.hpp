#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "billiards/coords.hpp"
#include "billiards/dynamics.hpp"
#include "billiards/expected.hpp"
#include "billiards/geometry.hpp"
#include "billiards/lyapunov.hpp"
#include "billiards/parallel.hpp"
#include "billiards/rng.hpp"
#include "billiards/table.hpp"

namespace billiards {

/// Map between boundary phase spaces, used as a candidate conjugacy.
using BoundaryMap = std::function<PhasePoint(const PhasePoint&)>;

namespace conjugacy {

/// Rotation by `angle` in the first two chart coordinates about `center`;
/// further coordinates are kept (a rotation about the third axis on the
/// sphere and in three dimensions).
inline BoundaryMap rotation(double angle, Vec center = {}) {
  const double c = std::cos(angle), s = std::sin(angle);
  auto turn = [=](Vec w) {
    const double x = w[0], y = w[1];
    w[0] = c * x - s * y;
    w[1] = s * x + c * y;
    return w;
  };
  return [=](const PhasePoint& z) { return PhasePoint{center + turn(z.q - center), turn(z.v)}; };
}

/// Reflection across the horizontal line through `center`, applied to
/// positions and directions alike.
inline BoundaryMap reflection(Vec center = {}) {
  return [=](const PhasePoint& z) {
    return PhasePoint{Vec{z.q[0], 2.0 * center[1] - z.q[1], z.q[2]}, Vec{z.v[0], -z.v[1], z.v[2]}};
  };
}

/// Translation of a flat torus table; positions are wrapped by `space`.
inline BoundaryMap torus_translation(const ModelSpace& space, Vec shift) {
  return [=](const PhasePoint& z) { return PhasePoint{space.canonical(z.q + shift), z.v}; };
}

/// Identity in boundary coordinates: same piece, position parameter and
/// direction angles on the second table.
inline BoundaryMap coordinate_transfer(const Table& from, const Table& to) {
  return [&from, &to](const PhasePoint& z) {
    const auto c = boundary_coords(from, z);
    if (!c) throw TraceFailure(c.error());
    return from_boundary_coords(to, *c);
  };
}

}  // namespace conjugacy

/// Distance between phase points: chart distance of positions combined
/// with the difference of the chart velocities.
inline double phase_distance(const ModelSpace& space, const PhasePoint& a, const PhasePoint& b) {
  return std::hypot(space.chart_distance(a.q, b.q), norm(a.v - b.v));
}

struct ConjugacyResidual {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t skipped = 0;        // trapped or grazing samples
  std::uint64_t invalid_image = 0;  // phi(z) is not an inward boundary point of the second table
};

/// Residual of phi o C_1 = C_2 o phi over samples from the invariant
/// measure of the first table. A phi that leaves the inward boundary
/// locus of the second table has infinite residual.
inline ConjugacyResidual conjugacy_residual(const Table& t1, const Table& t2, const BoundaryMap& phi,
                                            std::uint64_t count, std::uint64_t seed, int workers = 1) {
  const BoundarySampler sampler(t1);
  struct Acc {
    double max = 0.0;
    double sum = 0.0;
    std::uint64_t n = 0, skipped = 0, invalid = 0;
  };
  const Acc acc = parallel_blocks(
      count, workers, Acc{},
      [&](std::uint64_t b, std::uint64_t e) {
        Acc a;
        for (std::uint64_t i = b; i < e; ++i) {
          CounterRng rng(seed, streams::boundary_sampler, i);
          const PhasePoint z = sampler.draw(rng);
          const auto c1 = causality_map(t1, z);
          if (!c1 || c1->grazing_exit) {
            ++a.skipped;
            continue;
          }
          PhasePoint pz;
          try {
            pz = phi(z);
          } catch (const std::exception&) {
            ++a.invalid;
            continue;
          }
          const auto c2 = causality_map(t2, pz);
          if (!c2 && c2.error() != TraceError::trapped) {
            ++a.invalid;
            continue;
          }
          if (!c2 || c2->grazing_exit) {
            ++a.skipped;
            continue;
          }
          double r;
          try {
            r = phase_distance(t2.space(), phi(c1->exit), c2->exit);
          } catch (const std::exception&) {
            ++a.invalid;
            continue;
          }
          a.max = std::max(a.max, r);
          a.sum += r;
          ++a.n;
        }
        return a;
      },
      [](Acc& o, const Acc& p) {
        o.max = std::max(o.max, p.max);
        o.sum += p.sum;
        o.n += p.n;
        o.skipped += p.skipped;
        o.invalid += p.invalid;
      });
  ConjugacyResidual r{acc.max, acc.n ? acc.sum / static_cast<double>(acc.n) : 0.0, acc.n, acc.skipped, acc.invalid};
  if (acc.invalid > 0) r.max_residual = std::numeric_limits<double>::infinity();
  return r;
}

struct ScatteringRecord {
  PhasePoint entry;
  PhasePoint exit;
  double F_entry = 0.0;
  double F_exit = 0.0;
};

/// Boundary-confined scattering data of a table.
struct ScatteringDataset {
  std::string table;
  std::string grid;
  std::vector<ScatteringRecord> records;
  std::uint64_t omitted = 0;  // trapped, grazing or degenerate entries
};

namespace detail {

/// Scattering record of z. Without F the chord is parametrized from its
/// entry (F_entry = 0, F_exit = length), which is well balanced along it.
inline bool scattering_record(const Table& table, const LyapunovF* F, const PhasePoint& z, ScatteringRecord& out) {
  const auto chord = causality_map(table, z);
  if (!chord || chord->grazing_exit || chord->degenerate) return false;
  out.entry = chord->entry;
  out.exit = chord->exit;
  if (F) {
    out.F_entry = (*F)(chord->entry);
    out.F_exit = (*F)(chord->exit);
  } else {
    out.F_entry = 0.0;
    out.F_exit = chord->length;
  }
  return true;
}

}  // namespace detail

/// Scattering data on a regular grid of boundary coordinates: for each
/// piece `positions` cell centers along the boundary times `directions`
/// cell centers of the inward direction angle (n = 2). For n = 3 both
/// position and both direction parameters get the same resolutions.
inline ScatteringDataset scattering_grid(const Table& table, const LyapunovF* F, int positions, int directions,
                                         int workers = 1) {
  if (positions < 1 || directions < 1) throw BilliardError(BilliardError::Code::invalid_argument, "empty grid");
  const int np = static_cast<int>(table.pieces().size());
  const int n = table.dim();
  const std::uint64_t per_piece = n == 2 ? static_cast<std::uint64_t>(positions) * directions
                                         : static_cast<std::uint64_t>(positions) * positions * directions * directions;
  const std::uint64_t total = per_piece * static_cast<std::uint64_t>(np);
  std::vector<ScatteringRecord> recs(total);
  std::vector<char> ok(total, 0);
  parallel_for(total, workers, [&](std::uint64_t idx) {
    BoundaryCoords c;
    c.piece = static_cast<int>(idx / per_piece);
    std::uint64_t r = idx % per_piece;
    if (n == 2) {
      const auto i = r / static_cast<std::uint64_t>(directions), j = r % static_cast<std::uint64_t>(directions);
      c.pos[0] = 2.0 * M_PI * (static_cast<double>(i) + 0.5) / positions;
      c.dir[0] = -M_PI / 2 + M_PI * (static_cast<double>(j) + 0.5) / directions;
    } else {
      const auto d1 = r % static_cast<std::uint64_t>(directions);
      r /= static_cast<std::uint64_t>(directions);
      const auto d0 = r % static_cast<std::uint64_t>(directions);
      r /= static_cast<std::uint64_t>(directions);
      const auto p1 = r % static_cast<std::uint64_t>(positions);
      const auto p0 = r / static_cast<std::uint64_t>(positions);
      c.pos[0] = -1.0 + 2.0 * (static_cast<double>(p0) + 0.5) / positions;
      c.pos[1] = 2.0 * M_PI * (static_cast<double>(p1) + 0.5) / positions;
      c.dir[0] = 0.5 * M_PI * (static_cast<double>(d0) + 0.5) / directions;
      c.dir[1] = 2.0 * M_PI * (static_cast<double>(d1) + 0.5) / directions;
    }
    ok[idx] = detail::scattering_record(table, F, from_boundary_coords(table, c), recs[idx]);
  });
  ScatteringDataset data;
  data.table = table.name();
  data.grid = std::to_string(positions) + "x" + std::to_string(directions);
  for (std::uint64_t i = 0; i < total; ++i) {
    if (ok[i]) {
      data.records.push_back(recs[i]);
    } else {
      ++data.omitted;
    }
  }
  return data;
}

/// Scattering data from entries drawn from the invariant measure.
inline ScatteringDataset scattering_random(const Table& table, const LyapunovF* F, std::uint64_t count,
                                           std::uint64_t seed, int workers = 1) {
  const BoundarySampler sampler(table);
  std::vector<ScatteringRecord> recs(count);
  std::vector<char> ok(count, 0);
  parallel_for(count, workers, [&](std::uint64_t i) {
    CounterRng rng(seed, streams::boundary_sampler, i);
    ok[i] = detail::scattering_record(table, F, sampler.draw(rng), recs[i]);
  });
  ScatteringDataset data;
  data.table = table.name();
  data.grid = "random:" + std::to_string(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    if (ok[i]) {
      data.records.push_back(recs[i]);
    } else {
      ++data.omitted;
    }
  }
  return data;
}

struct ChordCloud {
  std::vector<Vec> points;
  std::vector<double> segment_lengths;  // reconstructed length per used record
  std::uint64_t used = 0;
  std::uint64_t ambiguous = 0;  // antipodal endpoints on the sphere
};

/// Rebuilds each chord as the geodesic segment between its endpoints and
/// samples it every h units of arc length. On the torus the lattice image
/// of the exit point is chosen by following the entry direction for
/// F_exit - F_entry units.
inline ChordCloud reconstruct_chords(const ScatteringDataset& data, const ModelSpace& space, double h) {
  if (!(h > 0.0)) throw BilliardError(BilliardError::Code::invalid_argument, "resolution must be positive");
  ChordCloud cloud;
  for (const ScatteringRecord& r : data.records) {
    const Vec a = r.entry.q;
    Vec b = r.exit.q;
    double len = 0.0;
    std::function<Vec(double)> at;
    if (space.curvature() == 0) {
      if (space.is_torus()) {
        const Vec target = a + r.entry.v * (r.F_exit - r.F_entry);
        for (int i = 0; i < space.dim(); ++i) {
          const double p = space.periods()[i];
          b[i] += p * std::round((target[i] - b[i]) / p);
        }
      }
      len = norm(b - a);
      at = [=, &space](double s) { return space.canonical(a + (b - a) * (len > 0.0 ? s / len : 0.0)); };
    } else {
      const Vec xa = space.lift(a), xb = space.lift(b);
      const double ip = space.ambient_dot(xa, xb);
      if (space.curvature() > 0) {
        if (ip < -1.0 + 1e-12) {
          ++cloud.ambiguous;
          continue;
        }
        len = std::acos(std::clamp(ip, -1.0, 1.0));
        at = [=](double s) {
          const double sl = std::sin(len);
          if (sl == 0.0) return xa;
          return normalized(xa * (std::sin(len - s) / sl) + xb * (std::sin(s) / sl));
        };
      } else {
        len = std::acosh(std::max(1.0, -ip));
        at = [=, &space](double s) {
          const double sl = std::sinh(len);
          if (sl == 0.0) return a;
          return space.lower(xa * (std::sinh(len - s) / sl) + xb * (std::sinh(s) / sl));
        };
      }
    }
    const int steps = std::max(1, static_cast<int>(std::ceil(len / h)));
    for (int k = 0; k <= steps; ++k) cloud.points.push_back(at(len * k / steps));
    cloud.segment_lengths.push_back(len);
    ++cloud.used;
  }
  return cloud;
}

namespace detail {

/// Uniform grid hash over chart points for nearest-neighbour queries.
class PointGrid {
 public:
  PointGrid(const std::vector<Vec>& pts, int dims, double cell) : pts_(pts), dims_(dims), cell_(cell) {
    for (std::size_t i = 0; i < pts.size(); ++i) cells_[key(cell_of(pts[i]))].push_back(i);
  }

  /// Chart distance from q to the nearest point, searching outward rings
  /// until the ring bound exceeds the best distance found.
  double nearest(const Vec& q) const {
    const auto c = cell_of(q);
    double best = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring < 1 << 16; ++ring) {
      visit_ring(c, ring, [&](std::size_t i) { best = std::min(best, norm(pts_[i] - q)); });
      if (best <= ring * cell_) break;
    }
    return best;
  }

 private:
  using Cell = std::array<long, 4>;

  Cell cell_of(const Vec& q) const {
    Cell c{};
    for (int i = 0; i < dims_; ++i) c[static_cast<std::size_t>(i)] = static_cast<long>(std::floor(q[i] / cell_));
    return c;
  }

  static std::uint64_t key(const Cell& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (long v : c) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ULL;
    return h;
  }

  template <class Fn>
  void visit_ring(const Cell& c, int ring, Fn&& fn) const {
    Cell o{};
    visit_rec(c, ring, 0, o, false, fn);
  }

  template <class Fn>
  void visit_rec(const Cell& c, int ring, int axis, Cell& off, bool on_shell, Fn& fn) const {
    if (axis == dims_) {
      if (!on_shell && ring > 0) return;
      Cell k = c;
      for (int i = 0; i < dims_; ++i) k[static_cast<std::size_t>(i)] += off[static_cast<std::size_t>(i)];
      const auto it = cells_.find(key(k));
      if (it == cells_.end()) return;
      for (std::size_t i : it->second)
        if (cell_of(pts_[i]) == k) fn(i);
      return;
    }
    for (int d = -ring; d <= ring; ++d) {
      off[static_cast<std::size_t>(axis)] = d;
      visit_rec(c, ring, axis + 1, off, on_shell || d == -ring || d == ring, fn);
    }
  }

  const std::vector<Vec>& pts_;
  int dims_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace detail

/// One-sided Hausdorff distance (chart metric) from a reference sample of
/// the domain to the cloud: the largest distance from a reference point to
/// its nearest cloud point. The reference sample is a regular chart grid
/// with `per_axis` nodes per axis, restricted to the domain.
inline double hausdorff_domain_to_cloud(const Table& table, const std::vector<Vec>& cloud, int per_axis = 200) {
  if (cloud.empty()) return std::numeric_limits<double>::infinity();
  const ModelSpace& sp = table.space();
  const ChartBox box = domain_chart_box(table);
  const int d = sp.chart_dim();
  double extent = 0.0;
  for (int i = 0; i < d; ++i) extent = std::max(extent, box.hi[i] - box.lo[i]);
  const detail::PointGrid grid(cloud, d, extent / 64.0);
  double worst = 0.0;
  std::array<int, 4> idx{};
  const long total = static_cast<long>(std::pow(per_axis, d));
  for (long k = 0; k < total; ++k) {
    long r = k;
    for (int i = 0; i < d; ++i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(r % per_axis);
      r /= per_axis;
    }
    Vec q;
    for (int i = 0; i < d; ++i) q[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * (idx[static_cast<std::size_t>(i)] + 0.5) / per_axis;
    if (sp.kind() == SpaceKind::sphere) {
      if (norm(q) < 1e-9) continue;
      q = normalized(q);
    }
    if (sp.kind() == SpaceKind::hyperbolic_ball && dot(q, q) >= 1.0) continue;
    if (!table.contains(q)) continue;
    worst = std::max(worst, grid.nearest(q));
  }
  return worst;
}

/// One grid cell of the trajectory-space atlas.
struct AtlasCell {
  int piece = -1;
  int i = 0;  // position index
  int j = 0;  // direction index
  BoundaryCoords coords;
  bool valid = false;  // false when trapped, grazing or degenerate
  PhasePoint entry;
  PhasePoint exit;
  int exit_piece = -1;
  double F_entry = 0.0;
  double F_exit = 0.0;
};

struct AtlasEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double jump = 0.0;
  bool discontinuity = false;
};

struct TrajectoryAtlas {
  int positions = 0;
  int directions = 0;
  std::vector<AtlasCell> cells;
  std::vector<AtlasEdge> edges;
  std::vector<double> cell_diameter;  // per piece, in (arc length, angle) units

  std::size_t discontinuity_count() const {
    return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [](const AtlasEdge& e) { return e.discontinuity; }));
  }
};

/// Discrete atlas of the inward boundary locus (n = 2): cells labelled by
/// their chord endpoints and F-values; neighbouring cells whose exit points
/// jump by more than 10 cell diameters are marked as discontinuity edges.
inline TrajectoryAtlas trajectory_atlas(const Table& table, const LyapunovF* F, int positions, int directions,
                                        int workers = 1) {
  if (table.dim() != 2) throw BilliardError(BilliardError::Code::unsupported, "the atlas is implemented for n = 2");
  if (positions < 8 || directions < 8)
    throw BilliardError(BilliardError::Code::invalid_argument, "atlas resolution must be at least 8 per parameter");
  const int np = static_cast<int>(table.pieces().size());
  TrajectoryAtlas atlas;
  atlas.positions = positions;
  atlas.directions = directions;
  const std::size_t per_piece = static_cast<std::size_t>(positions) * static_cast<std::size_t>(directions);
  atlas.cells.resize(per_piece * static_cast<std::size_t>(np));
  for (int p = 0; p < np; ++p) {
    const double arc = piece_boundary_area(table, p) / positions;
    atlas.cell_diameter.push_back(std::hypot(arc, M_PI / directions));
  }
  parallel_for(atlas.cells.size(), workers, [&](std::uint64_t idx) {
    AtlasCell& cell = atlas.cells[idx];
    cell.piece = static_cast<int>(idx / per_piece);
    const auto r = idx % per_piece;
    cell.i = static_cast<int>(r / static_cast<std::size_t>(directions));
    cell.j = static_cast<int>(r % static_cast<std::size_t>(directions));
    cell.coords.piece = cell.piece;
    cell.coords.pos[0] = 2.0 * M_PI * (cell.i + 0.5) / positions;
    cell.coords.dir[0] = -M_PI / 2 + M_PI * (cell.j + 0.5) / directions;
    const PhasePoint z = from_boundary_coords(table, cell.coords);
    const auto chord = causality_map(table, z);
    cell.entry = z;
    if (!chord || chord->grazing_exit || chord->degenerate) return;
    cell.valid = true;
    cell.exit = chord->exit;
    cell.exit_piece = chord->exit_piece;
    cell.F_entry = F ? (*F)(chord->entry) : 0.0;
    cell.F_exit = F ? (*F)(chord->exit) : chord->length;
  });
  const ModelSpace& sp = table.space();
  auto link = [&](std::size_t a, std::size_t b) {
    const AtlasCell& ca = atlas.cells[a];
    const AtlasCell& cb = atlas.cells[b];
    AtlasEdge e{a, b, 0.0, false};
    if (ca.valid && cb.valid) {
      e.jump = sp.chart_distance(ca.exit.q, cb.exit.q);
      e.discontinuity = e.jump > 10.0 * atlas.cell_diameter[static_cast<std::size_t>(ca.piece)];
    } else if (ca.valid != cb.valid) {
      e.jump = std::numeric_limits<double>::infinity();
      e.discontinuity = true;
    }
    atlas.edges.push_back(e);
  };
  for (int p = 0; p < np; ++p)
    for (int i = 0; i < positions; ++i)
      for (int j = 0; j < directions; ++j) {
        const std::size_t a = static_cast<std::size_t>(p) * per_piece + static_cast<std::size_t>(i * directions + j);
        const std::size_t right = static_cast<std::size_t>(p) * per_piece +
                                  static_cast<std::size_t>(((i + 1) % positions) * directions + j);
        link(a, right);  // positions are periodic
        if (j + 1 < directions) link(a, a + 1);
      }
  return atlas;
}

}  // namespace billiards
