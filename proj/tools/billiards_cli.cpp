// Batch front-end: table presets, experiment subcommands, report emission.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "billiards/billiards.hpp"
#include "billiards/config.hpp"
#include "billiards/io.hpp"

#ifndef BILLIARDS_VERSION
#define BILLIARDS_VERSION "unknown"
#endif

namespace {

using namespace billiards;

enum ExitCode { kOk = 0, kValidation = 1, kRuntime = 2 };

/// Failure raised by the front-end itself, mapped to an exit code.
struct CliError : std::runtime_error {
  CliError(int code, const std::string& kind, const std::string& msg) : std::runtime_error(msg), exit_code(code), kind(kind) {}
  int exit_code;
  std::string kind;
};

struct Common {
  std::string preset;
  std::string config;
  std::string samples = "1e5";
  std::string bounces = "1e3";
  std::uint64_t seed = 1;
  int workers = 0;
  std::string out;
  double lmax = 0.0;
  std::string law = "elastic";
  double stretch = 1.0;
  double tilt = 0.0;
};

std::uint64_t parse_count(const std::string& s, const char* flag) {
  double v = 0.0;
  try {
    std::size_t pos = 0;
    v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw CliError(kValidation, "invalid_argument", std::string(flag) + " must be a number, got '" + s + "'");
  }
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15)
    throw CliError(kValidation, "invalid_argument", std::string(flag) + " must be a non-negative integer, got '" + s + "'");
  return static_cast<std::uint64_t>(v);
}

Table load_table(const Common& c) {
  if (c.preset.empty() == c.config.empty())
    throw CliError(kValidation, "invalid_argument", "exactly one of --preset or --config is required");
  Tolerances tol;
  if (c.lmax > 0.0) tol.l_max = c.lmax;
  if (!c.preset.empty()) return make_preset(c.preset, tol);
  Table t = load_table_config(c.config);
  return c.lmax > 0.0 ? t.with_l_max(c.lmax) : t;
}

ReflectionLaw make_law(const Common& c) {
  if (c.law == "elastic") return ReflectionLaw::elastic();
  if (c.law == "rescaled") return ReflectionLaw::rescaled({c.stretch, c.tilt});
  throw CliError(kValidation, "invalid_argument", "--law must be 'elastic' or 'rescaled'");
}

int workers_of(const Common& c) { return c.workers > 0 ? c.workers : default_workers(); }

void add_common(CLI::App* app, Common& c, bool table = true) {
  if (table) {
    app->add_option("--preset", c.preset, "table preset name (see list-presets)");
    app->add_option("--config", c.config, "JSON table config file");
    app->add_option("--lmax", c.lmax, "length cap for a single chord (default 1e4 x diameter)");
  }
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--workers", c.workers, "worker threads (default: $BILLIARDS_WORKERS or all cores)");
  app->add_option("--out", c.out, "output directory for reports and streams");
}

void add_law(CLI::App* app, Common& c) {
  app->add_option("--law", c.law, "reflection law: elastic or rescaled")->capture_default_str();
  app->add_option("--stretch", c.stretch, "rescaled law: boundary metric stretch factor")->capture_default_str();
  app->add_option("--tilt", c.tilt, "rescaled law: stretch direction angle from the normal")->capture_default_str();
}

std::filesystem::path out_path(const Common& c, const std::string& file) {
  std::filesystem::create_directories(c.out);
  return std::filesystem::path(c.out) / file;
}

/// Envelope around a payload: the payload is a pure function of the
/// configuration and seed; timing and version live outside it.
json envelope(const std::string& command, const json& config, const Common& c, const json& payload, double wall) {
  return {{"command", command},
          {"version", BILLIARDS_VERSION},
          {"config", config},
          {"seed", c.seed},
          {"workers", workers_of(c)},
          {"wall_time_s", wall},
          {"payload", payload}};
}

json base_config(const Common& c, const Table* t) {
  json j{{"preset", c.preset.empty() ? json(nullptr) : json(c.preset)},
         {"config_file", c.config.empty() ? json(nullptr) : json(c.config)},
         {"samples", c.samples},
         {"bounces", c.bounces},
         {"lmax", c.lmax},
         {"law", {{"kind", c.law}, {"stretch", c.stretch}, {"tilt", c.tilt}}}};
  if (t) j["table"] = to_json(*t);
  return j;
}

std::string dynamics_label(const Common& c) {
  if (c.preset.empty()) return "unknown (custom table)";
  return preset_info(c.preset).dynamics;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric billiards laboratory: billiard maps, invariant boundary measure and ergodic averages"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(BILLIARDS_VERSION));
  Common c;

  auto* list = app.add_subcommand("list-presets", "list the built-in tables");

  auto* simulate = app.add_subcommand("simulate", "iterate billiard orbits and dump chords as JSON Lines");
  add_common(simulate, c);
  add_law(simulate, c);
  simulate->add_option("--bounces", c.bounces, "bounces per orbit")->capture_default_str();
  std::string starters_s = "1";
  simulate->add_option("--starters", starters_s, "number of orbits (starts drawn from the invariant measure)");

  auto* mfp = app.add_subcommand("mfp", "mean free path: Monte Carlo space average against the volume formula");
  add_common(mfp, c);
  mfp->add_option("--samples", c.samples, "boundary samples")->capture_default_str();

  auto* measure = app.add_subcommand("measure-check", "pushforward test of the invariant measure on random boxes");
  add_common(measure, c);
  add_law(measure, c);
  measure->add_option("--samples", c.samples, "boundary samples")->capture_default_str();
  int n_boxes = 20;
  measure->add_option("--boxes", n_boxes, "number of random boxes")->capture_default_str();
  bool dump_samples = false;
  measure->add_flag("--dump-samples", dump_samples, "also write the sample set as CSV");

  auto* recurrence = app.add_subcommand("recurrence", "return statistics of orbits started in a phase box");
  add_common(recurrence, c);
  add_law(recurrence, c);
  recurrence->add_option("--bounces", c.bounces, "bounces per orbit")->capture_default_str();
  std::string rec_starters = "1000";
  recurrence->add_option("--starters", rec_starters, "number of starters")->capture_default_str();
  std::vector<double> box_pos{0.0, 0.1}, box_dir{0.4, 0.6};
  int box_piece = 0;
  recurrence->add_option("--box-pos", box_pos, "position interval (lo hi) of the first coordinate")->expected(2);
  recurrence->add_option("--box-dir", box_dir, "direction-angle interval (lo hi)")->expected(2);
  recurrence->add_option("--box-piece", box_piece, "boundary piece of the box (-1 for all)");

  auto* slices = app.add_subcommand("slices", "level-slice areas A(t) of the well-balanced Lyapunov function");
  add_common(slices, c);
  slices->add_option("--samples", c.samples, "boundary samples (one pass for all levels)")->capture_default_str();
  int points = 100;
  slices->add_option("--points", points, "levels on the t-grid")->capture_default_str();

  auto* probe = app.add_subcommand("probe", "trapping probe and geodesic-diameter estimate");
  add_common(probe, c);
  probe->add_option("--samples", c.samples, "boundary samples")->capture_default_str();

  auto* reconstruct = app.add_subcommand("reconstruct", "rebuild the chord cloud from scattering data");
  add_common(reconstruct, c);
  int grid = 64;
  double h = 0.01;
  reconstruct->add_option("--grid", grid, "grid cells per boundary parameter")->capture_default_str();
  reconstruct->add_option("--step", h, "sampling step along reconstructed chords")->capture_default_str();

  auto* conj = app.add_subcommand("conjugacy", "residual of a candidate conjugacy between two scattering maps");
  add_common(conj, c);
  conj->add_option("--samples", c.samples, "boundary samples")->capture_default_str();
  std::string map_kind = "rotation", preset2, config2;
  double angle = 1.0;
  std::vector<double> shift{0.25, 0.5};
  conj->add_option("--map", map_kind, "rotation, reflection, translation or transfer")->capture_default_str();
  conj->add_option("--angle", angle, "rotation angle")->capture_default_str();
  conj->add_option("--shift", shift, "torus translation vector");
  conj->add_option("--preset2", preset2, "second table preset (default: same table)");
  conj->add_option("--config2", config2, "second table config file");

  auto* hear = app.add_subcommand("hear", "recover vol(M) from a sequence of bounce lengths");
  add_common(hear, c, false);
  std::string lengths_file;
  double boundary = 0.0;
  int dim = 2;
  hear->add_option("--lengths", lengths_file, "file with one chord length per line (CSV first column)")->required();
  hear->add_option("--boundary", boundary, "boundary volume vol(dM)")->required();
  hear->add_option("--dim", dim, "dimension n of M")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << '\n';
    return kValidation;
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  try {
    if (list->parsed()) {
      json a = json::array();
      for (const auto& p : preset_catalog())
        a.push_back({{"name", p.name}, {"description", p.description}, {"dynamics", p.dynamics}});
      std::cout << a.dump(2) << '\n';
      return kOk;
    }
    std::string command;
    json payload;
    json config;
    const int W = workers_of(c);

    if (hear->parsed()) {
      command = "hear";
      std::ifstream in(lengths_file);
      if (!in) throw CliError(kValidation, "invalid_argument", "cannot open '" + lengths_file + "'");
      std::vector<double> lengths;
      std::string line;
      while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const std::string cell = line.substr(0, comma);
        if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          lengths.push_back(std::stod(cell));
        } catch (const std::exception&) {
          if (lengths.empty()) continue;  // header line
          throw CliError(kValidation, "invalid_argument", "bad length '" + cell + "' in '" + lengths_file + "'");
        }
      }
      const auto running = hear_volume(lengths, boundary, dim);
      json curve = json::array();
      for (std::size_t k = 1; k <= running.size(); k *= 2) curve.push_back({{"k", k}, {"vol_M", running[k - 1]}});
      payload = {{"vol_M", running.back()}, {"count", running.size()}, {"running", curve}};
      config = {{"lengths", lengths_file}, {"boundary", boundary}, {"dim", dim}};
      if (!c.out.empty()) {
        auto f = open_output(out_path(c, "hear.csv").string());
        f << "k,vol_M\n";
        for (std::size_t k = 0; k < running.size(); ++k) f << k + 1 << ',' << running[k] << '\n';
      }
    } else {
      const Table table = load_table(c);
      config = base_config(c, &table);

      if (simulate->parsed()) {
        command = "simulate";
        const auto k_max = parse_count(c.bounces, "--bounces");
        const auto n_orbits = parse_count(starters_s, "--starters");
        if (k_max < 1) throw CliError(kValidation, "invalid_argument", "--bounces must be >= 1");
        const ReflectionLaw law = make_law(c);
        const BoundarySampler sampler(table);
        std::vector<OrbitRecord> orbits(n_orbits);
        parallel_for(n_orbits, W, [&](std::uint64_t i) {
          CounterRng rng(c.seed, streams::starters, i);
          orbits[i] = iterate_orbit(table, law, sampler.draw(rng), k_max);
        });
        json summary = json::array();
        for (std::size_t i = 0; i < orbits.size(); ++i) {
          Estimate len;
          for (const auto& ch : orbits[i].chords) len.add(ch.length);
          summary.push_back({{"orbit", i},
                             {"chords", orbits[i].chords.size()},
                             {"termination", std::string(to_string(orbits[i].termination))},
                             {"mean_length", len.mean()}});
        }
        payload = {{"orbits", summary}, {"dynamics", dynamics_label(c)}};
        if (!c.out.empty()) {
          auto f = open_output(out_path(c, "orbits.jsonl").string());
          for (std::size_t i = 0; i < orbits.size(); ++i)
            for (std::size_t k = 0; k < orbits[i].chords.size(); ++k) {
              json j = to_json(table.space(), orbits[i].chords[k]);
              j["orbit"] = i;
              j["bounce"] = k;
              f << j.dump() << '\n';
            }
          auto s = open_output(out_path(c, "orbits.csv").string());
          s << "orbit,chords,termination,mean_length\n";
          for (const auto& o : summary)
            s << o["orbit"] << ',' << o["chords"] << ',' << o["termination"].get<std::string>() << ','
              << o["mean_length"].get<double>() << '\n';
        }
      } else if (mfp->parsed()) {
        command = "mfp";
        const auto n = parse_count(c.samples, "--samples");
        const MeanFreePath m = mean_free_path(table, n, c.seed, W);
        payload = to_json(m);
        payload["dynamics"] = dynamics_label(c);
        payload["capped_fraction"] = static_cast<double>(m.space.trapped) / static_cast<double>(n);
        if (c.preset == "torus-one-ball")
          payload["caveat"] =
              "the flat torus minus one convex ball is trapping: some geodesics never meet the obstacle, so chords "
              "longer than the length cap are excluded and counted in capped_fraction";
      } else if (measure->parsed()) {
        command = "measure-check";
        const auto n = parse_count(c.samples, "--samples");
        const auto boxes = random_phase_boxes(table, n_boxes, c.seed);
        const PreservationReport r = measure_preservation_test(table, make_law(c), boxes, n, c.seed, W);
        payload = to_json(r);
        payload["pass_abs_z_below_4"] = r.max_abs_z() < 4.0;
        if (dump_samples && !c.out.empty()) {
          auto f = open_output(out_path(c, "samples.csv").string());
          write_samples_csv(f, table.space(), sample_mu_theta(table, n, c.seed, W));
        }
      } else if (recurrence->parsed()) {
        command = "recurrence";
        PhaseBox U;
        U.piece = box_piece;
        U.pos[0] = {box_pos[0], box_pos[1]};
        U.dir[0] = {box_dir[0], box_dir[1]};
        const auto r = recurrence_test(table, make_law(c), U, parse_count(rec_starters, "--starters"),
                                       parse_count(c.bounces, "--bounces"), c.seed, W);
        payload = to_json(r);
        payload["box"] = to_json(U);
      } else if (slices->parsed()) {
        command = "slices";
        const LyapunovF F = build_well_balanced_F(table);
        const auto n = parse_count(c.samples, "--samples");
        const SliceCurve curve = slice_area_curve(table, F, points, n, c.seed, W);
        const DomainVolumes v = domain_volumes(table, 1'000'000, c.seed, W);
        double a_max = 0.0;
        for (const auto& a : curve.area) a_max = std::max(a_max, a.mean());
        const double predicted = unit_sphere_volume(table.dim() - 1) * v.vol_M;
        payload = {{"integral", curve.integral},
                   {"integral_stderr", curve.integral_stderr},
                   {"predicted_integral", predicted},
                   {"relative_gap", (curve.integral - predicted) / predicted},
                   {"F_min", curve.F_min},
                   {"F_max", curve.F_max},
                   {"average_area", curve.integral / (curve.F_max - curve.F_min)},
                   {"max_area", a_max},
                   {"trajectory_space_volume", curve.total_mass},
                   {"body", {{"center", vec_json(F.body().center, table.space().chart_dim())}, {"radius", F.body().radius}}}};
        if (!c.out.empty()) {
          auto f = open_output(out_path(c, "slices.csv").string());
          f << "t,mean,stderr\n";
          for (std::size_t k = 0; k < curve.t.size(); ++k)
            f << curve.t[k] << ',' << curve.area[k].mean() << ',' << curve.area[k].std_error() << '\n';
        }
      } else if (probe->parsed()) {
        command = "probe";
        const TrappingProbe p = trapping_probe(table, parse_count(c.samples, "--samples"), c.lmax, c.seed, W);
        payload = to_json(p);
        payload["gd_estimate"] = std::max(p.max_chord, normal_shot_max_chord(table));
        json warnings = json::array();
        if (p.max_chord > 100.0 * table.diameter())
          warnings.push_back("longest chord exceeds 100 table diameters: the geodesic diameter looks unbounded "
                             "(trapping signature; it grows with --lmax)");
        if (p.escape_fraction < 1.0) warnings.push_back("some samples reached the length cap without a boundary hit");
        payload["warnings"] = warnings;
      } else if (reconstruct->parsed()) {
        command = "reconstruct";
        std::optional<LyapunovF> F;
        if (!table.space().is_torus()) F = build_well_balanced_F(table);
        const ScatteringDataset data = scattering_grid(table, F ? &*F : nullptr, grid, grid, W);
        const ChordCloud cloud = reconstruct_chords(data, table.space(), h);
        double depth = -std::numeric_limits<double>::infinity();
        for (const Vec& q : cloud.points) depth = std::max(depth, table.gauge(q));
        payload = {{"records", data.records.size()},
                   {"omitted", data.omitted},
                   {"cloud_points", cloud.points.size()},
                   {"ambiguous", cloud.ambiguous},
                   {"hausdorff_domain_to_cloud", hausdorff_domain_to_cloud(table, cloud.points)},
                   {"max_gauge_on_cloud", depth},
                   {"grid", data.grid},
                   {"h", h}};
        if (!c.out.empty()) {
          auto f = open_output(out_path(c, "dataset.jsonl").string());
          for (const auto& r : data.records) f << to_json(table.space(), r).dump() << '\n';
          auto g = open_output(out_path(c, "cloud.csv").string());
          const int d = table.space().chart_dim();
          for (int i = 0; i < d; ++i) g << (i ? "," : "") << 'q' << i;
          g << '\n';
          for (const Vec& q : cloud.points) {
            for (int i = 0; i < d; ++i) g << (i ? "," : "") << q[i];
            g << '\n';
          }
        }
      } else if (conj->parsed()) {
        command = "conjugacy";
        if (!preset2.empty() && !config2.empty())
          throw CliError(kValidation, "invalid_argument", "give at most one of --preset2 and --config2");
        const Table second = !preset2.empty() ? make_preset(preset2)
                             : !config2.empty() ? load_table_config(config2)
                                                : table;
        BoundaryMap phi;
        if (map_kind == "rotation") {
          phi = conjugacy::rotation(angle);
        } else if (map_kind == "reflection") {
          phi = conjugacy::reflection();
        } else if (map_kind == "translation") {
          Vec s;
          for (std::size_t i = 0; i < shift.size() && i < Vec::kCapacity; ++i) s[i] = shift[i];
          phi = conjugacy::torus_translation(table.space(), s);
        } else if (map_kind == "transfer") {
          phi = conjugacy::coordinate_transfer(table, second);
        } else {
          throw CliError(kValidation, "invalid_argument", "unknown --map '" + map_kind + "'");
        }
        const auto r = conjugacy_residual(table, second, phi, parse_count(c.samples, "--samples"), c.seed, W);
        payload = to_json(r);
        payload["map"] = map_kind;
        payload["second_table"] = second.name();
        config["second_table"] = to_json(second);
      }
    }
    const json report = envelope(command, config, c, payload, elapsed());
    std::cout << report.dump(2) << '\n';
    if (!c.out.empty()) {
      auto f = open_output(out_path(c, command + ".json").string());
      f << report.dump(2) << '\n';
    }
    return kOk;
  } catch (const CliError& e) {
    std::cerr << json{{"error", {{"kind", e.kind}, {"message", e.what()}}}}.dump() << '\n';
    return e.exit_code;
  } catch (const BilliardError& e) {
    const bool validation = e.code() == BilliardError::Code::invalid_argument ||
                            e.code() == BilliardError::Code::invalid_table ||
                            e.code() == BilliardError::Code::unsupported;
    std::cerr << json{{"error", {{"kind", std::string(to_string(e.code()))}, {"message", e.what()}}}}.dump() << '\n';
    return validation ? kValidation : kRuntime;
  } catch (const TraceFailure& e) {
    std::cerr << json{{"error", {{"kind", "trace"}, {"message", e.what()}}}}.dump() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"kind", "runtime"}, {"message", e.what()}}}}.dump() << '\n';
    return kRuntime;
  }
}
