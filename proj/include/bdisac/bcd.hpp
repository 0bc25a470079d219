#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bdisac/metrics.hpp"
#include "bdisac/scene.hpp"
#include "bdisac/types.hpp"

namespace bdisac {

enum class Scheme { Spp, Sp, TdmaFdma, NoBd };

std::string to_string(Scheme scheme);
std::string to_string(ProblemMode mode);

struct TracePoint {
  int outer_iter = 0;
  std::string block;  // "init", "re", "power", "phase"
  double smi = 0;
  double rate = 0;
  double lambda = 0;
  double rho = 0;
};

struct BcdOptions {
  int max_outer = 30;
  double rel_tol = 1e-4;  // on both metrics, two consecutive iterations
  bool per_symbol_phases = false;
  // Independent restarts (random and extreme RE grids); the best final
  // solution wins. All restarts are seed-deterministic.
  int num_starts = 4;
  // Extra SPP-only restarts with randomized initial phases. SP keeps the
  // fixed sequence, so these never run for it.
  int num_phase_starts = 2;
};

/// One constrained solve: mode P1 maximizes SMI with a rate floor, mode P2
/// maximizes rate with an SMI floor.
struct BcdRun {
  ProblemMode mode = ProblemMode::SensingMax;
  Scheme scheme = Scheme::Spp;
  double level = 0;  // the active floor (gamma_c or gamma_s), raw units
  std::vector<TracePoint> trace;
  bool converged = false;
  bool feasible = false;
  int outer_iterations = 0;
  AllocationState state;
  MetricPair metrics;
  std::uint64_t seed = 0;
  double wall_ms = 0;
  double feasibility_bound = 0;  // certifying single-objective bound
  std::string failure;
};

BcdRun solve_p1(const Scene& scene, double gamma_c, Scheme scheme,
                const BcdOptions& opts = {});
BcdRun solve_p2(const Scene& scene, double gamma_s, Scheme scheme,
                const BcdOptions& opts = {});

/// Single-objective extremes of the scene (rate with everything devoted to
/// communication, SMI with everything devoted to sensing) under the fixed BD
/// sequence. Used for feasibility certificates and sweep level grids.
struct ObjectiveBounds {
  double smi_max = 0;
  double rate_max = 0;
};
ObjectiveBounds objective_bounds(const Scene& scene);

/// Reporting row: level and metrics in bits/s/Hz (normalized by N * delta_f).
struct ParetoRecord {
  double level = 0;
  double smi = 0;
  double rate = 0;
  Scheme scheme = Scheme::Spp;
  ProblemMode mode = ProblemMode::SensingMax;
  bool converged = false;
  bool feasible = false;
  int outer_iterations = 0;
  std::uint64_t seed = 0;
  double wall_ms = 0;
  bool on_boundary = false;  // survives dominance filtering
};

struct ParetoCurve {
  std::vector<ParetoRecord> records;
  std::vector<BcdRun> runs;  // aligned with records
};

/// Solves every level (ascending) and annotates dominance. Levels must lie in
/// the feasible range; failed levels are recorded and skipped.
ParetoCurve sweep_pareto(const Scene& scene, const std::vector<double>& levels,
                         ProblemMode mode, Scheme scheme, const BcdOptions& opts = {},
                         int parallel_workers = 1);

/// Evenly spaced levels between 2% and 98% of the relevant single-objective
/// maximum.
std::vector<double> default_level_grid(const Scene& scene, ProblemMode mode,
                                       int count = 10);

/// Non-optimized split or BD-free benchmark at one level.
BcdRun run_benchmark(const Scene& scene, Scheme scheme, double level,
                     ProblemMode mode = ProblemMode::SensingMax,
                     const BcdOptions& opts = {});

/// Region normality and boundedness checks: throttled variants of boundary
/// solutions must stay feasible, component-wise dominated, and inside the
/// single-objective bounding box.
struct RegionReport {
  bool ok = true;
  int points_checked = 0;
  int throttles_checked = 0;
  std::vector<std::string> violations;
};
RegionReport verify_region_properties(const ParetoCurve& curve, const Scene& scene,
                                      int throttles_per_point = 50,
                                      std::uint64_t seed = 7);

/// Closed-form hardware cost triples. c must lie in [2, 10].
struct CostTriple {
  double ris = 0;
  double bd_spp = 0;
  double bd_sp = 0;
};
CostTriple cost_model(double element_count, double cost_ratio, double unit_cost);

}  // namespace bdisac
