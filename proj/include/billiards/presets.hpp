#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "billiards/expected.hpp"
#include "billiards/space.hpp"
#include "billiards/table.hpp"

namespace billiards {

/// Radial Fourier fit of the ellipse x^2/a^2 + y^2/b^2 = 1 about its
/// center with `harmonics` cosine terms (trapezoid quadrature).
inline FourierShape ellipse_fourier(double a, double b, int harmonics = 24) {
  constexpr int kNodes = 4096;
  FourierShape f;
  f.cos_coeffs.assign(static_cast<std::size_t>(harmonics) + 1, 0.0);
  f.sin_coeffs.assign(static_cast<std::size_t>(harmonics) + 1, 0.0);
  for (int k = 0; k < kNodes; ++k) {
    const double th = 2.0 * M_PI * k / kNodes;
    const double r = a * b / std::hypot(b * std::cos(th), a * std::sin(th));
    for (int m = 0; m <= harmonics; ++m) f.cos_coeffs[static_cast<std::size_t>(m)] += r * std::cos(m * th);
  }
  f.cos_coeffs[0] /= kNodes;
  for (int m = 1; m <= harmonics; ++m) f.cos_coeffs[static_cast<std::size_t>(m)] *= 2.0 / kNodes;
  return f;
}

struct PresetInfo {
  std::string name;
  std::string description;
  std::string dynamics;  // literature status of the billiard dynamics
};

inline const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog{
      {"disk", "Euclidean unit disk", "integrable (not ergodic)"},
      {"ball3", "Euclidean unit ball in R^3", "integrable (not ergodic)"},
      {"ellipse", "Euclidean ellipse with semi-axes 1.2 and 0.8 as a radial Fourier wall", "integrable (not ergodic)"},
      {"torus-one-ball", "unit flat 2-torus minus a disk of radius 0.1", "dispersing, infinite horizon (trapping)"},
      {"torus-two-balls", "unit flat 2-torus minus disks of radii 0.4 and 0.12 blocking every line",
       "dispersing, finite horizon (ergodic, Sinai)"},
      {"hyperbolic-disk-0.5", "hyperbolic disk of geodesic radius 0.5", "integrable (not ergodic)"},
      {"hyperbolic-disk-1", "hyperbolic disk of geodesic radius 1", "integrable (not ergodic)"},
      {"hyperbolic-disk-2", "hyperbolic disk of geodesic radius 2", "integrable (not ergodic)"},
      {"spherical-cap-pi6", "spherical cap of geodesic radius pi/6", "integrable (not ergodic)"},
      {"spherical-cap-pi4", "spherical cap of geodesic radius pi/4", "integrable (not ergodic)"},
  };
  return catalog;
}

inline const PresetInfo& preset_info(const std::string& name) {
  for (const auto& p : preset_catalog())
    if (p.name == name) return p;
  throw BilliardError(BilliardError::Code::invalid_argument, "unknown preset '" + name + "'");
}

inline Table make_preset(const std::string& name, Tolerances tol = {}) {
  preset_info(name);
  auto ball = [](Vec c, double r, Side s) { return BoundaryPiece{BallShape{c, r}, s}; };
  if (name == "disk") return Table(ModelSpace::euclidean(2), {ball({0, 0}, 1.0, Side::outer_wall)}, tol, name);
  if (name == "ball3") return Table(ModelSpace::euclidean(3), {ball({0, 0, 0}, 1.0, Side::outer_wall)}, tol, name);
  if (name == "ellipse")
    return Table(ModelSpace::euclidean(2), {BoundaryPiece{ellipse_fourier(1.2, 0.8), Side::outer_wall}}, tol, name);
  if (name == "torus-one-ball")
    return Table(ModelSpace::flat_torus({1.0, 1.0}), {ball({0.5, 0.5}, 0.1, Side::obstacle)}, tol, name);
  if (name == "torus-two-balls")
    return Table(ModelSpace::flat_torus({1.0, 1.0}),
                 {ball({0.5, 0.5}, 0.4, Side::obstacle), ball({0.0, 0.0}, 0.12, Side::obstacle)}, tol, name);
  if (name.rfind("hyperbolic-disk-", 0) == 0) {
    const double r = std::stod(name.substr(16));
    return Table(ModelSpace::hyperbolic_ball(2), {ball({0, 0}, r, Side::outer_wall)}, tol, name);
  }
  const double rho = name == "spherical-cap-pi6" ? M_PI / 6 : M_PI / 4;
  return Table(ModelSpace::sphere(2), {ball({0, 0, 1}, rho, Side::outer_wall)}, tol, name);
}

}  // namespace billiards
