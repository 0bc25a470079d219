#include "bdisac/power_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bdisac {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Per-RE channel terms with noise folded in: the sensing log argument is
// 1 + a*P and the rate log argument is 1 + h*P.
struct ReTerms {
  std::vector<double> a;
  std::vector<double> h;
  std::vector<char> radar;
  int rows = 0, cols = 0;
  double prefix = 0;  // (delta_f / T_o) / ln 2
};

ReTerms build_terms(const EffectiveChannels& eff, const IntGrid& radar_mask,
                    const SceneConfig& cfg, Cx rcs) {
  ReTerms t;
  t.rows = radar_mask.rows();
  t.cols = radar_mask.cols();
  t.prefix = cfg.grid.subcarrier_spacing / cfg.grid.total_symbol_duration() / kLn2;
  const double rcs2 = std::norm(rcs);
  const size_t n = static_cast<size_t>(t.rows) * t.cols;
  t.a.resize(n);
  t.h.resize(n);
  t.radar.resize(n);
  for (int m = 0; m < t.rows; ++m)
    for (int c = 0; c < t.cols; ++c) {
      const size_t i = static_cast<size_t>(m) * t.cols + c;
      const double g2 = std::norm(eff.sensing(m, c));
      t.a[i] = rcs2 * g2 * g2 / cfg.noise_sensing;
      t.h[i] = std::norm(eff.comm(m, c)) / cfg.noise_comm;
      t.radar[i] = radar_mask(m, c) ? 1 : 0;
    }
  return t;
}

struct Weights {
  double ws = 0;
  double wr = 0;
};

Weights re_weights(bool radar, double beta, double eta_c, ProblemMode mode) {
  if (mode == ProblemMode::SensingMax)
    return radar ? Weights{1.0, 0.0} : Weights{eta_c, beta};
  return radar ? Weights{beta, 0.0} : Weights{beta * eta_c, 1.0};
}

double utility(const ReTerms& t, size_t i, const Weights& w, double p) {
  return t.prefix * (w.ws * std::log1p(t.a[i] * p) + w.wr * std::log1p(t.h[i] * p));
}

double marginal(const ReTerms& t, size_t i, const Weights& w, double p) {
  return t.prefix * (w.ws * t.a[i] / (1.0 + t.a[i] * p) + w.wr * t.h[i] / (1.0 + t.h[i] * p));
}

// argmax over [0, cap] of utility(p) - nu*p. Stationary points satisfy a
// quadratic; all real roots plus the interval ends are compared exactly.
double best_power(const ReTerms& t, size_t i, const Weights& w, double nu, double cap) {
  const double a = t.a[i];
  const double h = t.h[i];
  const double k = t.prefix;
  double cands[4] = {0.0, cap, -1.0, -1.0};
  int n_cands = 2;

  const double c2 = nu * a * h;
  const double c1 = nu * (a + h) - k * a * h * (w.ws + w.wr);
  const double c0 = nu - k * (w.ws * a + w.wr * h);
  const double scale = std::max({std::abs(c2) * cap * cap, std::abs(c1) * cap, std::abs(c0), 1e-300});
  if (std::abs(c2) * cap * cap > 1e-14 * scale) {
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      // Numerically stable pair of roots.
      const double q = -0.5 * (c1 + (c1 >= 0 ? sq : -sq));
      const double r1 = q / c2;
      const double r2 = (q != 0) ? c0 / q : r1;
      if (r1 > 0 && r1 < cap) cands[n_cands++] = r1;
      if (r2 > 0 && r2 < cap) cands[n_cands++] = r2;
    }
  } else if (std::abs(c1) > 1e-300) {
    const double r = -c0 / c1;
    if (r > 0 && r < cap) cands[n_cands++] = r;
  }

  double best_p = 0, best_v = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n_cands; ++j) {
    const double p = cands[j];
    const double v = utility(t, i, w, p) - nu * p;
    if (v > best_v || (v == best_v && p < best_p)) {
      best_v = v;
      best_p = p;
    }
  }
  return best_p;
}

// Water-level solve: per-RE argmax under a common total-power multiplier,
// bisected so the budget binds (or nu = 0 when it does not).
struct LevelSolve {
  std::vector<double> power;
  double nu = 0;
  double total = 0;
};

LevelSolve solve_at_weights(const ReTerms& t, const std::vector<Weights>& w,
                            double budget, double cap) {
  const size_t n = t.a.size();
  LevelSolve out;
  out.power.assign(n, 0.0);

  auto fill = [&](double nu) {
    double total = 0;
    for (size_t i = 0; i < n; ++i) {
      out.power[i] = best_power(t, i, w[i], nu, cap);
      total += out.power[i];
    }
    return total;
  };

  double total0 = fill(0.0);
  if (total0 <= budget) {
    out.nu = 0;
    out.total = total0;
    return out;
  }

  double hi = 0;
  for (size_t i = 0; i < n; ++i)
    hi = std::max(hi, t.prefix * (w[i].ws * t.a[i] + std::max(0.0, w[i].wr) * t.h[i]));
  hi = hi * (1.0 + 1e-9) + 1e-300;
  double lo = 0;

  double total = total0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    total = fill(mid);
    if (total > budget)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * hi) break;
    if (std::abs(total - budget) <= 1e-13 * budget && total <= budget) break;
  }
  out.nu = hi;
  out.total = fill(hi);  // feasible side of the bracket
  if (out.total > budget && out.total > 0) {
    const double shrink = budget / out.total;
    for (double& p : out.power) p *= shrink;
    out.total = budget;
  }
  return out;
}

std::vector<Weights> weights_for_beta(const ReTerms& t, double beta, double eta_c,
                                      ProblemMode mode) {
  std::vector<Weights> w(t.a.size());
  for (size_t i = 0; i < t.a.size(); ++i) w[i] = re_weights(t.radar[i], beta, eta_c, mode);
  return w;
}

// Raw floor metric (rate for SensingMax, SMI for RateMax) of a power vector.
double floor_metric_of(const ReTerms& t, const std::vector<double>& p, double eta_c,
                       ProblemMode mode) {
  double total = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (mode == ProblemMode::SensingMax) {
      if (!t.radar[i]) total += t.prefix * kLn2 * std::log2(1.0 + t.h[i] * p[i]);
    } else {
      const double w = t.radar[i] ? 1.0 : eta_c;
      total += t.prefix * kLn2 * w * std::log2(1.0 + t.a[i] * p[i]);
    }
  }
  return total;
}

double objective_of(const ReTerms& t, const std::vector<double>& p, double eta_c,
                    ProblemMode mode) {
  return floor_metric_of(t, p, eta_c,
                         mode == ProblemMode::SensingMax ? ProblemMode::RateMax
                                                         : ProblemMode::SensingMax);
}

RealGrid to_grid(const ReTerms& t, const std::vector<double>& p) {
  RealGrid g(t.rows, t.cols);
  for (int m = 0; m < t.rows; ++m)
    for (int c = 0; c < t.cols; ++c) g(m, c) = p[static_cast<size_t>(m) * t.cols + c];
  return g;
}

double floor_gradient_norm(const ReTerms& t, const std::vector<double>& p, double eta_c,
                           ProblemMode mode) {
  double sq = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    double g = 0;
    if (mode == ProblemMode::SensingMax) {
      if (!t.radar[i]) g = t.prefix * t.h[i] / (1.0 + t.h[i] * p[i]);
    } else {
      const double w = t.radar[i] ? 1.0 : eta_c;
      g = t.prefix * w * t.a[i] / (1.0 + t.a[i] * p[i]);
    }
    sq += g * g;
  }
  return std::sqrt(sq);
}

}  // namespace

double update_multiplier(double lambda, double rho, double residual) {
  return std::max(0.0, lambda + rho * residual);
}

double update_penalty(double rho, double grad_norm, double grad_norm_prev,
                      double rho_max) {
  const double ratio = grad_norm_prev > 0 ? grad_norm / grad_norm_prev : 1.0;
  return std::min(rho_max, rho * std::max(2.0, ratio));
}

WaterfillResult waterfill_power(const EffectiveChannels& eff, const IntGrid& radar_mask,
                                const SignMatrix& /*bd_signs*/, double lambda, double rho,
                                double level, const SceneConfig& config, Cx rcs,
                                ProblemMode mode) {
  const ReTerms t = build_terms(eff, radar_mask, config, rcs);
  const double cap = config.power_cap();
  const double budget = config.total_power;

  WaterfillResult out;
  out.degenerate = true;
  for (size_t i = 0; i < t.a.size(); ++i)
    if (t.a[i] > 0 || t.h[i] > 0) out.degenerate = false;
  if (out.degenerate) {
    out.power = RealGrid::Zero(t.rows, t.cols);
    return out;
  }

  // Self-consistency: the floor weight must reproduce the floor metric it
  // induces. g(beta) = lambda - rho*(F(P(beta)) - level) - beta is strictly
  // decreasing, so the root is bracketed and bisected.
  auto eval = [&](double beta) {
    const auto w = weights_for_beta(t, beta, config.comm_sensing_weight, mode);
    LevelSolve ls = solve_at_weights(t, w, budget, cap);
    ++out.evaluations;
    const double f = floor_metric_of(t, ls.power, config.comm_sensing_weight, mode);
    return std::make_pair(ls, lambda - rho * (f - level) - beta);
  };

  double hi = lambda + rho * level + 1.0;
  auto [ls_hi, g_hi] = eval(hi);
  double lo = hi - 1.0;
  LevelSolve ls_lo = ls_hi;
  double g_lo = g_hi;
  double step = 1.0;
  for (int it = 0; it < 200; ++it) {
    std::tie(ls_lo, g_lo) = eval(lo);
    if (g_lo >= 0) break;
    step *= 4.0;
    lo -= step;
  }

  LevelSolve best = g_lo >= 0 ? ls_lo : ls_hi;
  double beta = g_lo >= 0 ? lo : hi;
  double best_gap = std::abs(g_lo >= 0 ? g_lo : g_hi);
  for (int it = 0; it < 220 && hi > lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    auto [ls_mid, g_mid] = eval(mid);
    if (std::abs(g_mid) < best_gap) {
      best = ls_mid;
      beta = mid;
      best_gap = std::abs(g_mid);
    }
    if (g_mid > 0)
      lo = mid;
    else
      hi = mid;
    if (best_gap <= 1e-11 * std::max(1.0, std::abs(mid))) break;
  }

  out.power = to_grid(t, best.power);
  out.nu = best.nu;
  out.beta = beta;
  return out;
}

PowerLoopResult run_power_loop(const EffectiveChannels& eff, const IntGrid& radar_mask,
                               const SignMatrix& bd_signs, double level,
                               const SceneConfig& config, Cx rcs,
                               const PowerLoopOptions& opts) {
  const ReTerms t = build_terms(eff, radar_mask, config, rcs);
  const double cap = config.power_cap();
  const double budget = config.total_power;
  const double eta_c = config.comm_sensing_weight;
  const double eps = opts.eps_power > 0 ? opts.eps_power : config.eps_power_effective();
  const double feas_tol = opts.feas_tol_rel * std::max(level, 1e-300);

  PowerLoopResult out;

  // Unconstrained objective maximizer: when it already meets the floor the
  // constraint is slack and nothing else can do better.
  {
    const auto w = weights_for_beta(t, 0.0, eta_c, opts.mode);
    LevelSolve ls = solve_at_weights(t, w, budget, cap);
    const double f = floor_metric_of(t, ls.power, eta_c, opts.mode);
    if (f >= level - feas_tol) {
      out.power = to_grid(t, ls.power);
      out.converged = true;
      out.feasible = true;
      out.objective = objective_of(t, ls.power, eta_c, opts.mode);
      out.floor_metric = f;
      out.lambda = 0;
      out.rho = 0;
      out.nu = ls.nu;
      out.trace.push_back({0, 0.0, 0.0, f - level,
                           floor_gradient_norm(t, ls.power, eta_c, opts.mode),
                           out.objective});
      return out;
    }
  }

  const double rho0 = 1.0 / std::max(config.bandwidth(), 1.0);
  const double rho_max = 1e6 * rho0;
  double lambda = 0;
  double rho = rho0;
  double grad_prev = 0;

  RealGrid prev_power = RealGrid::Constant(t.rows, t.cols,
                                           std::min(config.uniform_power(), cap));

  bool have_best = false;
  double best_obj = -std::numeric_limits<double>::infinity();
  double fallback_floor = -std::numeric_limits<double>::infinity();
  RealGrid fallback_power;
  double fallback_obj = 0;

  for (int d = 1; d <= opts.max_iters; ++d) {
    WaterfillResult wf =
        waterfill_power(eff, radar_mask, bd_signs, lambda, rho, level, config, rcs, opts.mode);
    if (wf.degenerate) {
      out.power = wf.power;
      out.converged = true;
      out.feasible = level <= 0;
      return out;
    }

    std::vector<double> p(t.a.size());
    for (int m = 0; m < t.rows; ++m)
      for (int c = 0; c < t.cols; ++c)
        p[static_cast<size_t>(m) * t.cols + c] = wf.power(m, c);

    const double f = floor_metric_of(t, p, eta_c, opts.mode);
    const double obj = objective_of(t, p, eta_c, opts.mode);
    const double grad = floor_gradient_norm(t, p, eta_c, opts.mode);
    out.trace.push_back({d, lambda, rho, f - level, grad, obj});

    if (f >= level - feas_tol && (!have_best || obj > best_obj)) {
      have_best = true;
      best_obj = obj;
      out.power = wf.power;
      out.objective = obj;
      out.floor_metric = f;
      out.lambda = lambda;
      out.rho = rho;
      out.nu = wf.nu;
    }
    if (f > fallback_floor) {
      fallback_floor = f;
      fallback_power = wf.power;
      fallback_obj = obj;
    }

    const double change = (wf.power - prev_power).squaredNorm();
    prev_power = wf.power;

    lambda = update_multiplier(lambda, rho, f - level);
    if (d >= 2) rho = update_penalty(rho, grad, grad_prev, rho_max);
    grad_prev = grad;

    // The inner solve is exact, so the iterate stabilizes long before rho is
    // large enough to enforce the floor; keep driving the multipliers until
    // the floor holds too.
    if (change <= eps && f >= level - feas_tol) {
      out.converged = true;
      break;
    }
  }

  if (have_best) {
    out.feasible = true;
  } else {
    out.feasible = false;
    out.converged = false;
    out.power = fallback_power;
    out.objective = fallback_obj;
    out.floor_metric = fallback_floor;
    out.lambda = lambda;
    out.rho = rho;
    out.nu = 0;
  }
  return out;
}

double kkt_residual(const RealGrid& power, const EffectiveChannels& eff,
                    const IntGrid& radar_mask, const SceneConfig& config, Cx rcs,
                    double lambda, double rho, double level, double nu,
                    ProblemMode mode) {
  const ReTerms t = build_terms(eff, radar_mask, config, rcs);
  const double cap = config.power_cap();
  const double eta_c = config.comm_sensing_weight;

  std::vector<double> p(t.a.size());
  for (int m = 0; m < t.rows; ++m)
    for (int c = 0; c < t.cols; ++c)
      p[static_cast<size_t>(m) * t.cols + c] = power(m, c);

  const double f = floor_metric_of(t, p, eta_c, mode);
  const double beta = lambda - rho * (f - level);

  double scale = std::max(nu, 1e-300);
  for (size_t i = 0; i < p.size(); ++i) {
    const Weights w = re_weights(t.radar[i], beta, eta_c, mode);
    scale = std::max(scale, std::abs(marginal(t, i, w, 0.0)));
  }

  double worst = 0;
  double total = 0;
  const double edge = 1e-9 * cap;
  for (size_t i = 0; i < p.size(); ++i) {
    const Weights w = re_weights(t.radar[i], beta, eta_c, mode);
    const double m = marginal(t, i, w, p[i]);
    total += p[i];
    double viol;
    if (p[i] <= edge)
      viol = std::max(0.0, m - nu);
    else if (p[i] >= cap - edge)
      viol = std::max(0.0, nu - m);
    else
      viol = std::abs(m - nu);
    worst = std::max(worst, viol);
  }
  double res = worst / scale;
  if (nu > 1e-12 * scale)
    res = std::max(res, std::abs(total - config.total_power) / config.total_power);
  return res;
}

ConstrainedPowerResult solve_power_dual(const EffectiveChannels& eff,
                                        const IntGrid& radar_mask,
                                        const SceneConfig& config, Cx rcs,
                                        double level, ProblemMode mode, bool coarse) {
  const int bisect_iters = coarse ? 45 : 150;
  const double bisect_tol = coarse ? 1e-7 : 1e-13;
  const ReTerms t = build_terms(eff, radar_mask, config, rcs);
  const double cap = config.power_cap();
  const double budget = config.total_power;
  const double eta_c = config.comm_sensing_weight;

  ConstrainedPowerResult out;

  auto solve_t = [&](double tw) {
    std::vector<Weights> w(t.a.size());
    for (size_t i = 0; i < t.a.size(); ++i) {
      if (mode == ProblemMode::SensingMax)
        w[i] = t.radar[i] ? Weights{1.0, 0.0} : Weights{eta_c, tw};
      else
        w[i] = t.radar[i] ? Weights{tw, 0.0} : Weights{tw * eta_c, 1.0};
    }
    return solve_at_weights(t, w, budget, cap);
  };

  LevelSolve unc = solve_t(0.0);
  double f = floor_metric_of(t, unc.power, eta_c, mode);
  if (f >= level) {
    out.power = to_grid(t, unc.power);
    out.objective = objective_of(t, unc.power, eta_c, mode);
    out.floor_metric = f;
    out.feasible = true;
    return out;
  }

  // Largest reachable floor decides feasibility outright.
  {
    std::vector<Weights> w(t.a.size());
    for (size_t i = 0; i < t.a.size(); ++i) {
      if (mode == ProblemMode::SensingMax)
        w[i] = t.radar[i] ? Weights{0.0, 0.0} : Weights{0.0, 1.0};
      else
        w[i] = t.radar[i] ? Weights{1.0, 0.0} : Weights{eta_c, 0.0};
    }
    LevelSolve fs = solve_at_weights(t, w, budget, cap);
    const double fmax = floor_metric_of(t, fs.power, eta_c, mode);
    if (fmax < level) {
      out.power = to_grid(t, fs.power);
      out.objective = objective_of(t, fs.power, eta_c, mode);
      out.floor_metric = fmax;
      out.feasible = false;
      return out;
    }
  }

  double lo = 0, hi = 1;
  LevelSolve ls = unc;
  for (int it = 0; it < 200; ++it) {
    ls = solve_t(hi);
    f = floor_metric_of(t, ls.power, eta_c, mode);
    if (f >= level) break;
    lo = hi;
    hi *= 4.0;
  }

  LevelSolve feas = ls;  // floor-satisfying side
  for (int it = 0; it < bisect_iters && hi - lo > bisect_tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    ls = solve_t(mid);
    f = floor_metric_of(t, ls.power, eta_c, mode);
    if (f >= level) {
      hi = mid;
      feas = ls;
    } else {
      lo = mid;
    }
  }

  out.power = to_grid(t, feas.power);
  out.objective = objective_of(t, feas.power, eta_c, mode);
  out.floor_metric = floor_metric_of(t, feas.power, eta_c, mode);
  out.feasible = true;
  return out;
}

}  // namespace bdisac
