#pragma once

#include <vector>

#include "bdisac/types.hpp"

namespace bdisac {

/// Smoothed l0 surrogate g(w; delta) = ln(1 + w/delta) / ln(1 + 1/delta).
/// Strictly increasing and concave on w >= 0, g(0) = 0, g(1) = 1.
/// Throws std::domain_error for w < 0 or delta <= 0.
double smooth_l0(double w, double delta);

/// Tangent coefficients of the surrogate at the expansion point: the affine
/// map gamma * w + kappa upper-bounds g everywhere and touches it there.
struct ScaLinearization {
  RealGrid gamma;
  RealGrid kappa;
};
ScaLinearization sca_linearize(const RealGrid& indicator, double delta);

/// Per-RE inputs of the allocation subproblem, all computed at fixed power
/// and phases. `sensing` is the unweighted per-RE sensing score; `rate` the
/// per-RE rate score.
struct ReScores {
  RealGrid sensing;
  RealGrid rate;
};

struct RelaxedAllocation {
  RealGrid indicator;  // in [0,1]
  bool feasible = false;
  double objective = 0;  // weighted sensing objective of the relaxed point
};

/// Exact solution of the relaxed per-iteration subproblem: maximize the
/// weighted sensing objective over indicator in [lower, 1] subject to the
/// retained-rate floor. The single coupling constraint makes this a
/// fractional-knapsack LP solved by density ordering.
///
/// SensingMax: max sum I*s + (1-I)*eta_c*s  s.t.  sum (1-I)*r >= level.
/// RateMax:    max sum (1-I)*r              s.t.  sum I*s + (1-I)*eta_c*s >= level.
RelaxedAllocation solve_relaxed_allocation(const ReScores& scores, double level,
                                           const RealGrid& lower_bounds,
                                           double eta_c,
                                           ProblemMode mode = ProblemMode::SensingMax);

/// Hard threshold at 0.5 (ties go to radar).
IntGrid threshold_allocation(const RealGrid& relaxed);

/// Greedy feasibility repair: flips REs across the partition, best
/// gain-to-loss ratio first, until the floor metric is met. Returns the
/// repaired grid; `feasible` reports whether the floor was reachable at all.
struct RepairResult {
  IntGrid allocation;
  bool feasible = false;
};
RepairResult repair_allocation(const IntGrid& allocation, const ReScores& scores,
                               double level, double eta_c,
                               ProblemMode mode = ProblemMode::SensingMax);

struct ScaOptions {
  double delta = 1e-3;
  double eps_re = 1.0;  // stop when fewer binary changes than this
  int max_iters = 50;
  double eta_c = 0.5;
  ProblemMode mode = ProblemMode::SensingMax;
};

struct ScaResult {
  IntGrid allocation;
  bool feasible = false;
  int iterations = 0;
  std::vector<double> objective_trace;  // accepted objective after each sweep
  double objective = 0;
};

/// Iterated linearize -> LP -> threshold -> repair loop with an incumbent
/// safeguard, so the reported objective trace is non-decreasing.
ScaResult run_sca(const RealGrid& initial, const ReScores& scores, double level,
                  const ScaOptions& opts);

/// Objective helpers shared with tests and the orchestrator.
double allocation_objective(const IntGrid& allocation, const ReScores& scores,
                            double eta_c, ProblemMode mode);
double retained_rate(const IntGrid& allocation, const ReScores& scores);
double weighted_sensing(const IntGrid& allocation, const ReScores& scores,
                        double eta_c);

}  // namespace bdisac
