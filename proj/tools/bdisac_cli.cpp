#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "bdisac/bcd.hpp"
#include "bdisac/config_io.hpp"
#include "bdisac/results_io.hpp"

using namespace bdisac;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

Scheme parse_scheme(const std::string& s) {
  if (s == "spp") return Scheme::Spp;
  if (s == "sp") return Scheme::Sp;
  if (s == "tdma") return Scheme::TdmaFdma;
  if (s == "nobd") return Scheme::NoBd;
  throw CLI::ValidationError("--schemes", "unknown scheme '" + s + "'");
}

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "results";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int parallel = 1;
  bool svg = false;
};

SceneConfig load_scene_config(const GlobalArgs& g) {
  SceneConfig cfg = g.config_path.empty() ? default_config() : load_config(g.config_path);
  if (g.seed_set) cfg.seed = g.seed;
  return cfg;
}

void print_record(const ParetoRecord& r) {
  std::cout << to_string(r.scheme) << " " << to_string(r.mode)
            << " level=" << format_double(r.level) << " I_r=" << format_double(r.smi)
            << " C_d=" << format_double(r.rate) << " bits/s/Hz"
            << (r.converged ? "" : " (not converged)")
            << (r.feasible ? "" : " (infeasible)") << "\n";
}

ParetoCurve curve_of(const Scene& scene, const std::vector<BcdRun>& runs) {
  ParetoCurve curve;
  const double unit = scene.config.report_unit();
  for (const auto& run : runs) {
    ParetoRecord rec;
    rec.level = run.level / unit;
    rec.smi = run.metrics.smi / unit;
    rec.rate = run.metrics.rate / unit;
    rec.scheme = run.scheme;
    rec.mode = run.mode;
    rec.converged = run.converged;
    rec.feasible = run.feasible;
    rec.outer_iterations = run.outer_iterations;
    rec.seed = run.seed;
    rec.wall_ms = run.wall_ms;
    rec.on_boundary = run.feasible;
    curve.records.push_back(rec);
    curve.runs.push_back(run);
  }
  return curve;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pareto boundary solver for a backscatter-assisted OFDM "
               "sensing and communication system"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "scene configuration file");
  auto* seed_opt = app.add_option("--seed", g.seed, "override the scene RNG seed");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--parallel", g.parallel, "sweep worker count")->capture_default_str();
  app.add_flag("--svg", g.svg, "also render plot tables as SVG");

  std::string mode_str = "p1";
  double gamma = -1;
  std::string schemes_str = "spp";
  int level_count = 10;

  auto* single = app.add_subcommand("single", "solve one constrained problem");
  single->add_option("--mode", mode_str, "p1 (sensing-centric) or p2 (comm-centric)")
      ->check(CLI::IsMember({"p1", "p2"}));
  single->add_option("--gamma", gamma, "constraint floor in bits/s/Hz")->required();
  single->add_option("--scheme", schemes_str, "spp|sp|tdma|nobd")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "trace a Pareto boundary");
  sweep->add_option("--mode", mode_str, "p1 or p2")->check(CLI::IsMember({"p1", "p2"}));
  sweep->add_option("--levels", level_count, "number of constraint levels")
      ->capture_default_str();
  sweep->add_option("--schemes", schemes_str, "comma-separated scheme list")
      ->capture_default_str();

  auto* benchmark = app.add_subcommand("benchmark", "compare schemes at one level");
  benchmark->add_option("--schemes", schemes_str, "comma-separated scheme list")
      ->capture_default_str();
  benchmark->add_option("--gamma", gamma, "constraint floor in bits/s/Hz (default: mid-range)");
  benchmark->add_option("--mode", mode_str, "p1 or p2")->check(CLI::IsMember({"p1", "p2"}));

  auto* verify = app.add_subcommand("verify", "sweep and check region properties");
  verify->add_option("--levels", level_count, "number of constraint levels")
      ->capture_default_str();

  std::string n_range = "0:200";
  double cost_ratio = 2.0;
  double unit_cost = 1.0;
  int cost_steps = 41;
  auto* cost = app.add_subcommand("cost", "emit the hardware cost curves");
  cost->add_option("--n-range", n_range, "element count range a:b")->capture_default_str();
  cost->add_option("--c", cost_ratio, "metasurface-to-antenna cost ratio in [2,10]")
      ->capture_default_str();
  cost->add_option("--c0", unit_cost, "unit element cost")->capture_default_str();
  cost->add_option("--steps", cost_steps, "table rows")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  g.seed_set = seed_opt->count() > 0;

  try {
    fs::create_directories(g.out_dir);

    RunManifest manifest;
    manifest.config_path = g.config_path;
    manifest.output_dir = g.out_dir;
    manifest.mode = mode_str;

    std::vector<std::string> scheme_names;
    {
      std::stringstream ss(schemes_str);
      std::string item;
      while (std::getline(ss, item, ',')) scheme_names.push_back(item);
    }
    manifest.schemes = scheme_names;

    if (cost->parsed()) {
      manifest.command = "cost";
      const auto colon = n_range.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("--n-range expects a:b");
      const double n_min = std::stod(n_range.substr(0, colon));
      const double n_max = std::stod(n_range.substr(colon + 1));
      emit_cost_table(n_min, n_max, cost_steps, cost_ratio, unit_cost,
                      (fs::path(g.out_dir) / "cost.csv").string());
      const CostTriple t = cost_model(n_max, cost_ratio, unit_cost);
      std::cout << "cost at N=" << n_max << ": RIS=" << format_double(t.ris)
                << " BD-SPP=" << format_double(t.bd_spp)
                << " BD-SP=" << format_double(t.bd_sp) << "\n";
      write_manifest(manifest, g.out_dir);
      return kExitOk;
    }

    const SceneConfig cfg = load_scene_config(g);
    const Scene scene = make_scene(cfg);
    const double unit = cfg.report_unit();
    const ProblemMode mode =
        mode_str == "p2" ? ProblemMode::RateMax : ProblemMode::SensingMax;
    manifest.seeds = {cfg.seed};

    if (single->parsed()) {
      manifest.command = "single";
      manifest.levels = {gamma};
      const Scheme scheme = parse_scheme(scheme_names.at(0));
      const BcdRun run = mode == ProblemMode::SensingMax
                             ? solve_p1(scene, gamma * unit, scheme)
                             : solve_p2(scene, gamma * unit, scheme);
      const ParetoCurve curve = curve_of(scene, {run});
      emit_results(curve, g.out_dir);
      write_manifest(manifest, g.out_dir);
      print_record(curve.records[0]);
      return run.feasible ? kExitOk : kExitInfeasible;
    }

    if (sweep->parsed()) {
      manifest.command = "sweep";
      // Matched levels must be feasible for every requested scheme; the
      // BD-free bound is the restrictive one when nobd is in the list.
      Scene grid_scene = scene;
      for (const auto& name : scheme_names)
        if (parse_scheme(name) == Scheme::NoBd) grid_scene = strip_bds(scene);
      const std::vector<double> levels = default_level_grid(grid_scene, mode, level_count);
      for (double l : levels) manifest.levels.push_back(l / unit);

      bool all_feasible = true;
      std::vector<std::string> curve_files;
      for (const auto& name : scheme_names) {
        const Scheme scheme = parse_scheme(name);
        const ParetoCurve curve =
            sweep_pareto(scene, levels, mode, scheme, {}, g.parallel);
        const fs::path dir = fs::path(g.out_dir) / name;
        emit_results(curve, dir.string());
        curve_files.push_back((dir / "curve.csv").string());
        for (const auto& r : curve.records) {
          print_record(r);
          all_feasible = all_feasible && r.feasible;
        }
      }
      plot_data(curve_files, scheme_names,
                (fs::path(g.out_dir) / "boundary.csv").string(), g.svg);
      write_manifest(manifest, g.out_dir);
      return all_feasible ? kExitOk : kExitInfeasible;
    }

    if (benchmark->parsed()) {
      manifest.command = "benchmark";
      const ObjectiveBounds nb = objective_bounds(strip_bds(scene));
      const double level = gamma >= 0
                               ? gamma * unit
                               : 0.5 * (mode == ProblemMode::SensingMax ? nb.rate_max
                                                                        : nb.smi_max);
      manifest.levels = {level / unit};
      std::vector<BcdRun> runs;
      for (const auto& name : scheme_names)
        runs.push_back(run_benchmark(scene, parse_scheme(name), level, mode));
      const ParetoCurve curve = curve_of(scene, runs);
      emit_results(curve, g.out_dir);
      plot_data({(fs::path(g.out_dir) / "curve.csv").string()}, {"benchmark"},
                (fs::path(g.out_dir) / "comparison.csv").string(), g.svg);
      write_manifest(manifest, g.out_dir);
      bool all_feasible = true;
      for (const auto& r : curve.records) {
        print_record(r);
        all_feasible = all_feasible && r.feasible;
      }
      return all_feasible ? kExitOk : kExitInfeasible;
    }

    if (verify->parsed()) {
      manifest.command = "verify";
      const std::vector<double> levels =
          default_level_grid(scene, ProblemMode::SensingMax, level_count);
      const ParetoCurve curve =
          sweep_pareto(scene, levels, ProblemMode::SensingMax, Scheme::Spp, {}, g.parallel);
      emit_results(curve, g.out_dir);
      write_manifest(manifest, g.out_dir);
      const RegionReport report = verify_region_properties(curve, scene);
      std::cout << "boundary points checked: " << report.points_checked << "\n";
      std::cout << "throttled variants checked: " << report.throttles_checked << "\n";
      for (const auto& v : report.violations) std::cout << "violation: " << v << "\n";
      std::cout << (report.ok ? "region properties hold\n"
                              : "region properties violated\n");
      return report.ok ? kExitOk : kExitError;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
