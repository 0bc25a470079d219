#pragma once

#include <vector>

#include "bdisac/metrics.hpp"
#include "bdisac/scene.hpp"
#include "bdisac/types.hpp"

namespace bdisac {

/// One augmented-Lagrangian outer iterate.
struct AlState {
  int iteration = 0;
  double lambda = 0;
  double rho = 0;
  double residual = 0;   // floor-metric value minus floor
  double grad_norm = 0;  // Frobenius norm of the floor-metric gradient
  double objective = 0;  // problem objective at this iterate
};

struct WaterfillResult {
  RealGrid power;
  double nu = 0;    // total-power multiplier (water-level parameter)
  double beta = 0;  // self-consistent floor-constraint weight
  bool degenerate = false;  // every channel gain zero
  int evaluations = 0;
};

/// Maximizer of the augmented Lagrangian at fixed (lambda, rho): nested
/// bisections on the floor weight beta = lambda - rho*(metric - floor) and on
/// the total-power multiplier, with an exact per-RE stationarity solve.
WaterfillResult waterfill_power(const EffectiveChannels& eff, const IntGrid& radar_mask,
                                const SignMatrix& bd_signs, double lambda, double rho,
                                double level, const SceneConfig& config, Cx rcs,
                                ProblemMode mode = ProblemMode::SensingMax);

/// lambda' = max{0, lambda + rho * residual}.
double update_multiplier(double lambda, double rho, double residual);

/// rho' = min(rho_max, rho * max(2, grad_norm / grad_norm_prev)).
double update_penalty(double rho, double grad_norm, double grad_norm_prev,
                      double rho_max);

struct PowerLoopOptions {
  double eps_power = 0;  // squared Frobenius change; config default when 0
  int max_iters = 60;
  ProblemMode mode = ProblemMode::SensingMax;
  double feas_tol_rel = 1e-6;  // on the floor level
};

struct PowerLoopResult {
  RealGrid power;
  bool converged = false;
  bool feasible = false;
  double objective = 0;     // problem objective of the returned power
  double floor_metric = 0;  // constrained metric of the returned power
  double lambda = 0;        // multipliers attached to the returned iterate
  double rho = 0;
  double nu = 0;
  std::vector<AlState> trace;
};

/// Augmented-Lagrangian loop around waterfill_power. Keeps the best feasible
/// iterate seen and returns it, so an infeasible floor yields the
/// maximal-floor-metric iterate with `feasible = false`.
PowerLoopResult run_power_loop(const EffectiveChannels& eff, const IntGrid& radar_mask,
                               const SignMatrix& bd_signs, double level,
                               const SceneConfig& config, Cx rcs,
                               const PowerLoopOptions& opts = {});

/// Relative stationarity residual of the returned power under the attached
/// multipliers: max over REs of the projected-gradient violation divided by
/// the largest marginal-utility scale. Complementarity of bound-active REs is
/// included.
double kkt_residual(const RealGrid& power, const EffectiveChannels& eff,
                    const IntGrid& radar_mask, const SceneConfig& config, Cx rcs,
                    double lambda, double rho, double level, double nu,
                    ProblemMode mode = ProblemMode::SensingMax);

/// Exact solver for the floor-constrained power problem on concave instances:
/// dual bisection on the constraint multiplier around the water-filling core.
/// Used by the orchestrator's feasibility bounds and by test oracles.
struct ConstrainedPowerResult {
  RealGrid power;
  double objective = 0;
  double floor_metric = 0;
  bool feasible = false;
};
/// `coarse` trades accuracy for speed (used for candidate ranking).
ConstrainedPowerResult solve_power_dual(const EffectiveChannels& eff,
                                        const IntGrid& radar_mask,
                                        const SceneConfig& config, Cx rcs,
                                        double level,
                                        ProblemMode mode = ProblemMode::SensingMax,
                                        bool coarse = false);

}  // namespace bdisac
