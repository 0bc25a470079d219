#include "bdisac/bd_mod.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace bdisac {

Eigen::MatrixXd QuadraticForms::sensing_real_sum() const {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& q : q_sensing) sum += q.real();
  return sum;
}

Eigen::MatrixXd QuadraticForms::comm_real_sum() const {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& q : q_comm) sum += q.real();
  return sum;
}

QuadraticForms build_quadratic_forms(const ChannelSet& channels,
                                     const SceneConfig& config,
                                     const IntGrid& radar_mask) {
  const int k_count = channels.bd_count();
  const int m_count = config.grid.num_symbols;
  const int n_count = config.grid.num_subcarriers;
  const double eta_c = config.comm_sensing_weight;
  const auto alphas = config.bds.alphas();
  const bool bistatic = config.geometry == Geometry::Bistatic;

  QuadraticForms forms;
  forms.dim = k_count + 1;
  forms.q_sensing.reserve(m_count);
  forms.q_comm.reserve(m_count);

  for (int m = 0; m < m_count; ++m) {
    Eigen::VectorXcd hr = Eigen::VectorXcd::Zero(k_count + 1);
    Eigen::VectorXcd hc = Eigen::VectorXcd::Zero(k_count + 1);
    for (int n = 0; n < n_count; ++n) {
      const bool radar = radar_mask(m, n) != 0;
      const double ws = radar ? 1.0 : eta_c;
      const Cx direct_s = bistatic
                              ? channels.bs_target(m, n) * channels.target_rx(m, n)
                              : channels.bs_target(m, n);
      hr(k_count) += ws * direct_s;
      if (!radar) hc(k_count) += channels.bs_user(m, n);
      for (int k = 0; k < k_count; ++k) {
        const Cx sense_prod =
            bistatic ? channels.bs_target(m, n) * channels.bd_target[k](m, n) *
                           channels.bd_rx[k](m, n)
                     : channels.bs_bd_sense[k](m, n) * channels.bd_target[k](m, n);
        hr(k) += ws * alphas[k] * sense_prod;
        if (!radar)
          hc(k) += alphas[k] * channels.bs_bd[k](m, n) * channels.bd_user[k](m, n);
      }
    }
    forms.q_sensing.push_back(hr * hr.adjoint());
    forms.q_comm.push_back(hc * hc.adjoint());
  }
  return forms;
}

namespace {

Eigen::MatrixXd psd_project(const Eigen::MatrixXd& y) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

SdpSolution solve_sdp(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      double level, const SdpOptions& opts) {
  const int n = static_cast<int>(A.rows());
  SdpSolution out;

  // Quick necessary bound: <B, X> <= n * lambda_max(B) on the spectraplex.
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    if (level > n * std::max(0.0, es.eigenvalues().maxCoeff()) * (1 + 1e-9) + 1e-12)
      out.feasible = false;
  }

  Eigen::MatrixXd b_off = B;
  b_off.diagonal().setZero();
  const double b_off_norm2 = b_off.squaredNorm();
  const double tr_b_diag = B.diagonal().sum();
  if (b_off_norm2 <= 0 && tr_b_diag < level) out.feasible = false;

  auto project_affine = [&](Eigen::MatrixXd y) {
    y = 0.5 * (y + y.transpose());
    y.diagonal().setOnes();
    if (b_off_norm2 > 0) {
      const double v = tr_b_diag + (b_off.array() * y.array()).sum();
      if (v < level) y += ((level - v) / b_off_norm2) * b_off;
    }
    return y;
  };

  const double a_scale = std::max(A.norm(), 1e-12);
  double sigma = a_scale / n;
  Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd X = Z;

  const double tol = opts.tolerance;
  for (int it = 1; it <= opts.max_iters; ++it) {
    X = project_affine(Z - U + A / sigma);
    Eigen::MatrixXd z_new = psd_project(X + U);
    const double dual = sigma * (z_new - Z).norm();
    Z = z_new;
    U += X - Z;
    const double primal = (X - Z).norm();
    out.iterations = it;
    const double ref = std::max(1.0, std::max(X.norm(), Z.norm()));
    if (primal <= tol * ref && dual <= tol * a_scale) {
      out.converged = true;
      break;
    }
    if (it % 100 == 0) {
      if (primal > 10 * dual / a_scale * ref) {
        sigma *= 2;
        U *= 0.5;
      } else if (dual / a_scale * ref > 10 * primal) {
        sigma *= 0.5;
        U *= 2;
      }
    }
  }

  // Report on the PSD iterate with the unit diagonal restored.
  out.X = Z;
  out.X.diagonal().setOnes();
  out.X = 0.5 * (out.X + out.X.transpose());
  out.objective = (A.array() * out.X.array()).sum();
  out.constraint_value = (B.array() * out.X.array()).sum();
  if (out.constraint_value < level - 1e-6 * std::max(1.0, std::abs(level)))
    out.feasible = false;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.X);
  const int top = n - 1;
  out.dominant = es.eigenvectors().col(top);
  const double e1 = std::max(es.eigenvalues()(top), 1e-300);
  const double e2 = n >= 2 ? std::max(es.eigenvalues()(top - 1), 0.0) : 0.0;
  out.rank_ratio = e2 / e1;
  return out;
}

namespace {

Eigen::VectorXi hard_signs(const Eigen::VectorXd& v) {
  Eigen::VectorXi x(v.size());
  for (int i = 0; i < v.size(); ++i) x(i) = v(i) >= 0 ? 1 : -1;
  return x;
}

}  // namespace

RoundingResult round_solution(const SdpSolution& sol, const PhaseEvaluator& evaluate,
                              double floor_level, const Eigen::VectorXi& incumbent,
                              const SdpOptions& opts, std::uint64_t seed) {
  const int n = static_cast<int>(sol.dominant.size());
  const int k_count = n - 1;

  Eigen::VectorXd v = sol.dominant;
  if (v(k_count) < 0) v = -v;

  // Deterministic annealing: sharpen the soft sign until it matches the hard
  // threshold, then read the binary vector off the final slope.
  Eigen::VectorXd soft = v;
  double slope = 1.0;
  for (int s = 0; s < opts.anneal_steps; ++s, slope *= 2.0)
    soft = (slope * v.array()).tanh();
  Eigen::VectorXi anneal = hard_signs(soft.head(k_count));

  const double floor_tol = 1e-9 * std::max(1.0, std::abs(floor_level));
  auto feasible = [&](double f) { return f >= floor_level - floor_tol; };

  RoundingResult out;
  auto [obj0, f0] = evaluate(anneal);

  struct Candidate {
    Eigen::VectorXi x;
    double obj;
    double floor;
  };
  std::vector<Candidate> cands;
  cands.push_back({anneal, obj0, f0});

  if (sol.rank_ratio > opts.rank_one_ratio || !feasible(f0)) {
    out.used_randomization = true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.X);
    Eigen::MatrixXd root =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Rng rng(seed ^ 0x5851f42d4c957f2dULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int s = 0; s < opts.randomization_samples; ++s) {
      Eigen::VectorXd g(n);
      for (int i = 0; i < n; ++i) g(i) = gauss(rng);
      Eigen::VectorXd y = root * g;
      if (y(k_count) < 0) y = -y;
      Eigen::VectorXi x = hard_signs(y.head(k_count));
      auto [obj, f] = evaluate(x);
      cands.push_back({std::move(x), obj, f});
    }
  }

  auto [inc_obj, inc_floor] = evaluate(incumbent);

  const Candidate* best = nullptr;
  for (const auto& c : cands) {
    if (!feasible(c.floor)) continue;
    if (!best || c.obj > best->obj) best = &c;
  }

  if (best && (!feasible(inc_floor) || best->obj >= inc_obj)) {
    out.signs = best->x;
    out.objective = best->obj;
    out.floor_metric = best->floor;
  } else {
    out.signs = incumbent;
    out.objective = inc_obj;
    out.floor_metric = inc_floor;
    out.kept_incumbent = true;
  }
  out.phases.resize(k_count);
  for (int k = 0; k < k_count; ++k) out.phases[k] = sign_to_phase(out.signs(k));
  return out;
}

PhaseOracleResult exhaustive_phase_oracle(int bd_count, const PhaseEvaluator& evaluate,
                                          double floor_level) {
  if (bd_count > 16) throw std::invalid_argument("exhaustive oracle limited to K <= 16");
  if (bd_count < 0) throw std::invalid_argument("bd_count must be >= 0");

  const double floor_tol = 1e-9 * std::max(1.0, std::abs(floor_level));
  PhaseOracleResult out;
  double best_floor = -std::numeric_limits<double>::infinity();
  Eigen::VectorXi floor_best;

  const std::uint32_t patterns = 1u << bd_count;
  for (std::uint32_t bits = 0; bits < patterns; ++bits) {
    Eigen::VectorXi x(bd_count);
    for (int k = 0; k < bd_count; ++k) x(k) = (bits >> k) & 1 ? 1 : -1;
    auto [obj, f] = evaluate(x);
    if (f > best_floor) {
      best_floor = f;
      floor_best = x;
    }
    if (f >= floor_level - floor_tol) {
      if (!out.any_feasible || obj > out.objective) {
        out.any_feasible = true;
        out.objective = obj;
        out.floor_metric = f;
        out.signs = x;
      }
    }
  }
  if (!out.any_feasible) {
    out.signs = floor_best;
    out.floor_metric = best_floor;
    auto [obj, f] = evaluate(floor_best);
    out.objective = obj;
    (void)f;
  }
  return out;
}

}  // namespace bdisac
