#pragma once

#include <functional>
#include <vector>

#include "bdisac/scene.hpp"
#include "bdisac/types.hpp"

namespace bdisac {

/// Homogenized per-symbol quadratic forms of dimension K+1. The last
/// coordinate carries the direct-path term, so for any sign vector x in
/// {+/-1}^K and xt = [x; 1]:
///   xt^H q_sensing[m] xt = |aggregated G_m(x)|^2,
///   xt^H q_comm[m]    xt = |aggregated H_m(x)|^2.
struct QuadraticForms {
  std::vector<Eigen::MatrixXcd> q_sensing;
  std::vector<Eigen::MatrixXcd> q_comm;
  int dim = 0;  // K + 1

  Eigen::MatrixXd sensing_real_sum() const;  // Re(sum_m q_sensing[m])
  Eigen::MatrixXd comm_real_sum() const;     // Re(sum_m q_comm[m])
};

/// Builds the rank-1 forms from per-symbol channel aggregates. Sensing
/// aggregation sums radar REs at weight 1 and communication REs at eta_c;
/// communication aggregation sums communication REs.
QuadraticForms build_quadratic_forms(const ChannelSet& channels,
                                     const SceneConfig& config,
                                     const IntGrid& radar_mask);

struct SdpOptions {
  double tolerance = 1e-9;  // ADMM fixed-point residual, relative
  int max_iters = 50000;
  int anneal_steps = 9;        // slope schedule 1, 2, 4, ..., 2^(steps-1)
  int randomization_samples = 200;
  double rank_one_ratio = 1e-3;  // second/first eigenvalue threshold
};

struct SdpSolution {
  Eigen::MatrixXd X;             // PSD, unit diagonal
  double objective = 0;          // <A, X>
  double constraint_value = 0;   // <B, X>
  Eigen::VectorXd dominant;      // unit-norm dominant eigenvector
  double rank_ratio = 0;         // second / first eigenvalue
  int iterations = 0;
  bool converged = false;
  bool feasible = true;  // surrogate level reachable
};

/// Maximize <A, X> subject to <B, X> >= level, diag(X) = 1, X PSD, by ADMM
/// splitting between the affine set and the PSD cone. A and B are real
/// symmetric (the real parts of the Hermitian forms; sign vectors are real so
/// the imaginary parts contribute nothing).
SdpSolution solve_sdp(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      double level, const SdpOptions& opts = {});

/// True-metric evaluation callback: given a K-vector of signs, returns
/// {objective, floor metric} of the full system.
using PhaseEvaluator =
    std::function<std::pair<double, double>(const Eigen::VectorXi&)>;

struct RoundingResult {
  Eigen::VectorXi signs;         // K entries, +/-1
  std::vector<double> phases;    // phi_k = pi/2 (1 - x_k)
  double objective = 0;
  double floor_metric = 0;
  bool used_randomization = false;
  bool kept_incumbent = false;
};

/// Eigenvector rounding with deterministic annealing and Gaussian
/// randomization fallback. Never returns a candidate worse than the
/// incumbent: if no candidate meets the floor or beats it, the incumbent is
/// kept.
RoundingResult round_solution(const SdpSolution& sol, const PhaseEvaluator& evaluate,
                              double floor_level, const Eigen::VectorXi& incumbent,
                              const SdpOptions& opts = {}, std::uint64_t seed = 0);

/// Enumerates all 2^K sign vectors (K <= 16) and returns the feasible
/// maximizer of the true objective; `any_feasible` is false when no vector
/// meets the floor, in which case the floor-maximal vector is returned.
struct PhaseOracleResult {
  Eigen::VectorXi signs;
  double objective = 0;
  double floor_metric = 0;
  bool any_feasible = false;
};
PhaseOracleResult exhaustive_phase_oracle(int bd_count, const PhaseEvaluator& evaluate,
                                          double floor_level);

}  // namespace bdisac
