#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "billiards/expected.hpp"
#include "billiards/presets.hpp"
#include "billiards/space.hpp"
#include "billiards/table.hpp"
#include "json.hpp"

namespace billiards {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void config_error(const std::string& msg) {
  throw BilliardError(BilliardError::Code::invalid_argument, "config: " + msg);
}

inline Vec vec_from_json(const json& j, const char* field) {
  if (!j.is_array() || j.empty() || j.size() > Vec::kCapacity) config_error(std::string(field) + " must be an array of 1-4 numbers");
  Vec v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) config_error(std::string(field) + " must contain numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

inline std::vector<double> doubles_from_json(const json& j, const char* field) {
  if (!j.is_array()) config_error(std::string(field) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) config_error(std::string(field) + " must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

template <class T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) config_error(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(std::string("field '") + key + "' has the wrong type");
  }
}

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) config_error("unknown field '" + k + "' in " + where);
  }
}

}  // namespace detail

inline Tolerances tolerances_from_json(const json& j) {
  detail::check_keys(j, {"hit_tol", "grazing_tol", "boundary_tol", "l_max"}, "tolerances");
  Tolerances t;
  t.hit_tol = j.value("hit_tol", t.hit_tol);
  t.grazing_tol = j.value("grazing_tol", t.grazing_tol);
  t.boundary_tol = j.value("boundary_tol", t.boundary_tol);
  t.l_max = j.value("l_max", t.l_max);
  return t;
}

/// Table from a JSON document (schema in docs/config-schema.md). A
/// document with a "preset" field loads the named preset, optionally with
/// overridden tolerances.
inline Table table_from_json(const json& j) {
  if (!j.is_object()) detail::config_error("top level must be an object");
  const Tolerances tol = j.contains("tolerances") ? tolerances_from_json(j.at("tolerances")) : Tolerances{};
  if (j.contains("preset")) {
    detail::check_keys(j, {"preset", "tolerances"}, "preset config");
    return make_preset(detail::required<std::string>(j, "preset"), tol);
  }
  detail::check_keys(j, {"name", "space", "dimension", "periods", "pieces", "tolerances"}, "table");
  const auto kind = detail::required<std::string>(j, "space");
  const int n = detail::required<int>(j, "dimension");
  if (n < 2 || n > 3) detail::config_error("dimension must be 2 or 3");
  ModelSpace space = ModelSpace::euclidean(n);
  if (kind == "euclidean") {
  } else if (kind == "flat_torus") {
    const auto periods = detail::doubles_from_json(j.value("periods", json::array()), "periods");
    if (static_cast<int>(periods.size()) != n) detail::config_error("periods must have one entry per dimension");
    for (double p : periods)
      if (!(p > 0.0)) detail::config_error("periods must be positive");
    space = ModelSpace::flat_torus(periods);
  } else if (kind == "hyperbolic_ball") {
    space = ModelSpace::hyperbolic_ball(n);
  } else if (kind == "sphere") {
    space = ModelSpace::sphere(n);
  } else {
    detail::config_error("unknown space '" + kind + "'");
  }
  if (!j.contains("pieces") || !j.at("pieces").is_array()) detail::config_error("pieces must be an array");
  std::vector<BoundaryPiece> pieces;
  for (const json& p : j.at("pieces")) {
    if (!p.is_object()) detail::config_error("each piece must be an object");
    const auto shape = detail::required<std::string>(p, "shape");
    const auto side_s = p.value("side", std::string("outer_wall"));
    Side side;
    if (side_s == "outer_wall") {
      side = Side::outer_wall;
    } else if (side_s == "obstacle") {
      side = Side::obstacle;
    } else {
      detail::config_error("side must be 'outer_wall' or 'obstacle'");
    }
    if (shape == "ball") {
      detail::check_keys(p, {"shape", "side", "center", "radius"}, "ball piece");
      pieces.push_back({BallShape{detail::vec_from_json(p.at("center"), "center"), detail::required<double>(p, "radius")}, side});
    } else if (shape == "half_space") {
      detail::check_keys(p, {"shape", "side", "normal", "offset"}, "half_space piece");
      pieces.push_back({HalfSpaceShape{detail::vec_from_json(p.at("normal"), "normal"), p.value("offset", 0.0)}, side});
    } else if (shape == "fourier") {
      detail::check_keys(p, {"shape", "side", "center", "cos", "sin"}, "fourier piece");
      FourierShape f;
      f.center = p.contains("center") ? detail::vec_from_json(p.at("center"), "center") : Vec{};
      f.cos_coeffs = detail::doubles_from_json(p.at("cos"), "cos");
      f.sin_coeffs = p.contains("sin") ? detail::doubles_from_json(p.at("sin"), "sin") : std::vector<double>{0.0};
      pieces.push_back({f, side});
    } else if (shape == "ellipse") {
      detail::check_keys(p, {"shape", "side", "center", "semi_axes", "harmonics"}, "ellipse piece");
      const auto ax = detail::doubles_from_json(p.at("semi_axes"), "semi_axes");
      if (ax.size() != 2 || !(ax[0] > 0.0) || !(ax[1] > 0.0)) detail::config_error("semi_axes must be two positive numbers");
      FourierShape f = ellipse_fourier(ax[0], ax[1], p.value("harmonics", 24));
      if (p.contains("center")) f.center = detail::vec_from_json(p.at("center"), "center");
      pieces.push_back({f, side});
    } else {
      detail::config_error("unknown shape '" + shape + "'");
    }
  }
  return Table(space, std::move(pieces), tol, j.value("name", std::string("custom")));
}

inline Table load_table_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::config_error("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    detail::config_error("'" + path + "' is not valid JSON: " + e.what());
  }
  return table_from_json(j);
}

}  // namespace billiards
