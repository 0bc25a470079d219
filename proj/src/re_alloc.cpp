#include "bdisac/re_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bdisac {

double smooth_l0(double w, double delta) {
  if (delta <= 0) throw std::domain_error("smooth_l0: delta must be > 0");
  if (w < 0) throw std::domain_error("smooth_l0: w must be >= 0");
  return std::log1p(w / delta) / std::log1p(1.0 / delta);
}

ScaLinearization sca_linearize(const RealGrid& indicator, double delta) {
  const double log_den = std::log1p(1.0 / delta);
  ScaLinearization lin;
  lin.gamma = RealGrid(indicator.rows(), indicator.cols());
  lin.kappa = RealGrid(indicator.rows(), indicator.cols());
  for (int m = 0; m < indicator.rows(); ++m)
    for (int n = 0; n < indicator.cols(); ++n) {
      const double v = indicator(m, n);
      const double gamma = 1.0 / (log_den * (delta + v));
      lin.gamma(m, n) = gamma;
      lin.kappa(m, n) = smooth_l0(v, delta) - gamma * v;
    }
  return lin;
}

double weighted_sensing(const IntGrid& allocation, const ReScores& scores,
                        double eta_c) {
  double total = 0;
  for (int m = 0; m < allocation.rows(); ++m)
    for (int n = 0; n < allocation.cols(); ++n)
      total += (allocation(m, n) ? 1.0 : eta_c) * scores.sensing(m, n);
  return total;
}

double retained_rate(const IntGrid& allocation, const ReScores& scores) {
  double total = 0;
  for (int m = 0; m < allocation.rows(); ++m)
    for (int n = 0; n < allocation.cols(); ++n)
      if (!allocation(m, n)) total += scores.rate(m, n);
  return total;
}

double allocation_objective(const IntGrid& allocation, const ReScores& scores,
                            double eta_c, ProblemMode mode) {
  return mode == ProblemMode::SensingMax ? weighted_sensing(allocation, scores, eta_c)
                                         : retained_rate(allocation, scores);
}

namespace {

// maximize sum c_i x_i  s.t.  sum a_i x_i <= budget,  lo_i <= x_i <= 1.
// Single coupling constraint: exact by density ordering.
struct KnapsackLp {
  bool feasible = false;
  std::vector<double> x;
  double objective = 0;
};

KnapsackLp solve_knapsack_lp(const std::vector<double>& c, const std::vector<double>& a,
                             double budget, const std::vector<double>& lo) {
  const size_t n = c.size();
  KnapsackLp out;
  out.x = lo;

  // Raises that cost nothing against the budget and help the objective.
  for (size_t i = 0; i < n; ++i)
    if (c[i] > 0 && a[i] <= 0) out.x[i] = 1.0;

  double load = 0;
  for (size_t i = 0; i < n; ++i) load += a[i] * out.x[i];

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  if (load > budget) {
    // Recover feasibility by raising budget-relieving entries, cheapest
    // objective loss per unit of relief first.
    std::vector<size_t> relief;
    for (size_t i = 0; i < n; ++i)
      if (a[i] < 0 && out.x[i] < 1.0) relief.push_back(i);
    std::sort(relief.begin(), relief.end(), [&](size_t l, size_t r) {
      return c[l] / a[l] < c[r] / a[r];
    });
    for (size_t i : relief) {
      if (load <= budget) break;
      const double room = 1.0 - out.x[i];
      const double need = (load - budget) / (-a[i]);
      const double step = std::min(room, need);
      out.x[i] += step;
      load += a[i] * step;
    }
    if (load > budget + 1e-12 * (1.0 + std::abs(budget))) return out;  // infeasible
  }

  // Spend remaining budget on the densest positive entries.
  std::vector<size_t> gains;
  for (size_t i = 0; i < n; ++i)
    if (c[i] > 0 && a[i] > 0 && out.x[i] < 1.0) gains.push_back(i);
  std::sort(gains.begin(), gains.end(), [&](size_t l, size_t r) {
    return c[l] / a[l] > c[r] / a[r];
  });
  for (size_t i : gains) {
    const double slack = budget - load;
    if (slack <= 0) break;
    const double step = std::min(1.0 - out.x[i], slack / a[i]);
    out.x[i] += step;
    load += a[i] * step;
  }

  out.feasible = true;
  for (size_t i = 0; i < n; ++i) out.objective += c[i] * out.x[i];
  return out;
}

}  // namespace

RelaxedAllocation solve_relaxed_allocation(const ReScores& scores, double level,
                                           const RealGrid& lower_bounds, double eta_c,
                                           ProblemMode mode) {
  const int rows = scores.sensing.rows();
  const int cols = scores.sensing.cols();
  const size_t n = static_cast<size_t>(rows) * cols;

  std::vector<double> c(n), a(n), lo(n);
  double budget = 0;
  double constant = 0;
  if (mode == ProblemMode::SensingMax) {
    // max sum I*s + (1-I)*eta*s  <=>  max sum I*(1-eta)*s + eta*sum s
    double rate_total = 0;
    for (int m = 0; m < rows; ++m)
      for (int nn = 0; nn < cols; ++nn) {
        const size_t i = static_cast<size_t>(m) * cols + nn;
        c[i] = (1.0 - eta_c) * scores.sensing(m, nn);
        a[i] = scores.rate(m, nn);
        lo[i] = std::clamp(lower_bounds(m, nn), 0.0, 1.0);
        rate_total += scores.rate(m, nn);
        constant += eta_c * scores.sensing(m, nn);
      }
    budget = rate_total - level;
  } else {
    // max sum (1-I)*r  <=>  max -sum I*r + sum r,
    // s.t. sum I*(1-eta)*s >= level - eta*sum s.
    double sense_total = 0;
    for (int m = 0; m < rows; ++m)
      for (int nn = 0; nn < cols; ++nn) {
        const size_t i = static_cast<size_t>(m) * cols + nn;
        c[i] = -scores.rate(m, nn);
        a[i] = -(1.0 - eta_c) * scores.sensing(m, nn);
        lo[i] = std::clamp(lower_bounds(m, nn), 0.0, 1.0);
        sense_total += scores.sensing(m, nn);
        constant += scores.rate(m, nn);
      }
    budget = eta_c * sense_total - level;
  }

  KnapsackLp lp = solve_knapsack_lp(c, a, budget, lo);
  RelaxedAllocation out;
  out.feasible = lp.feasible;
  out.indicator = RealGrid(rows, cols);
  if (!lp.feasible) {
    out.indicator.setZero();
    return out;
  }
  for (int m = 0; m < rows; ++m)
    for (int nn = 0; nn < cols; ++nn)
      out.indicator(m, nn) = lp.x[static_cast<size_t>(m) * cols + nn];
  out.objective = lp.objective + constant;
  return out;
}

IntGrid threshold_allocation(const RealGrid& relaxed) {
  IntGrid out(relaxed.rows(), relaxed.cols());
  for (int m = 0; m < relaxed.rows(); ++m)
    for (int n = 0; n < relaxed.cols(); ++n) out(m, n) = relaxed(m, n) >= 0.5 ? 1 : 0;
  return out;
}

RepairResult repair_allocation(const IntGrid& allocation, const ReScores& scores,
                               double level, double eta_c, ProblemMode mode) {
  RepairResult out;
  out.allocation = allocation;
  const double tiny = 1e-300;

  if (mode == ProblemMode::SensingMax) {
    double rate = retained_rate(out.allocation, scores);
    if (rate >= level) {
      out.feasible = true;
      return out;
    }
    // Flip radar REs to communication, best rate gain per sensing loss first.
    std::vector<std::pair<int, int>> radar;
    for (int m = 0; m < allocation.rows(); ++m)
      for (int n = 0; n < allocation.cols(); ++n)
        if (allocation(m, n)) radar.emplace_back(m, n);
    std::sort(radar.begin(), radar.end(), [&](const auto& l, const auto& r) {
      const double dl = scores.rate(l.first, l.second) /
                        ((1.0 - eta_c) * scores.sensing(l.first, l.second) + tiny);
      const double dr = scores.rate(r.first, r.second) /
                        ((1.0 - eta_c) * scores.sensing(r.first, r.second) + tiny);
      return dl > dr;
    });
    for (const auto& [m, n] : radar) {
      if (rate >= level) break;
      out.allocation(m, n) = 0;
      rate += scores.rate(m, n);
    }
    out.feasible = rate >= level;
  } else {
    double sensing = weighted_sensing(out.allocation, scores, eta_c);
    if (sensing >= level) {
      out.feasible = true;
      return out;
    }
    std::vector<std::pair<int, int>> comm;
    for (int m = 0; m < allocation.rows(); ++m)
      for (int n = 0; n < allocation.cols(); ++n)
        if (!allocation(m, n)) comm.emplace_back(m, n);
    std::sort(comm.begin(), comm.end(), [&](const auto& l, const auto& r) {
      const double dl = (1.0 - eta_c) * scores.sensing(l.first, l.second) /
                        (scores.rate(l.first, l.second) + tiny);
      const double dr = (1.0 - eta_c) * scores.sensing(r.first, r.second) /
                        (scores.rate(r.first, r.second) + tiny);
      return dl > dr;
    });
    for (const auto& [m, n] : comm) {
      if (sensing >= level) break;
      out.allocation(m, n) = 1;
      sensing += (1.0 - eta_c) * scores.sensing(m, n);
    }
    out.feasible = sensing >= level;
  }
  return out;
}

namespace {

// Greedy improvement sweep: spend leftover floor slack on flips that raise
// the objective, densest first. Keeps feasibility by construction.
IntGrid pack_allocation(const IntGrid& allocation, const ReScores& scores, double level,
                        double eta_c, ProblemMode mode) {
  IntGrid out = allocation;
  if (mode == ProblemMode::SensingMax) {
    double rate = retained_rate(out, scores);
    std::vector<std::pair<int, int>> comm;
    for (int m = 0; m < out.rows(); ++m)
      for (int n = 0; n < out.cols(); ++n)
        if (!out(m, n)) comm.emplace_back(m, n);
    std::sort(comm.begin(), comm.end(), [&](const auto& l, const auto& r) {
      return (1.0 - eta_c) * scores.sensing(l.first, l.second) /
                 (scores.rate(l.first, l.second) + 1e-300) >
             (1.0 - eta_c) * scores.sensing(r.first, r.second) /
                 (scores.rate(r.first, r.second) + 1e-300);
    });
    for (const auto& [m, n] : comm)
      if (rate - scores.rate(m, n) >= level) {
        out(m, n) = 1;
        rate -= scores.rate(m, n);
      }
  } else {
    double sensing = weighted_sensing(out, scores, eta_c);
    std::vector<std::pair<int, int>> radar;
    for (int m = 0; m < out.rows(); ++m)
      for (int n = 0; n < out.cols(); ++n)
        if (out(m, n)) radar.emplace_back(m, n);
    std::sort(radar.begin(), radar.end(), [&](const auto& l, const auto& r) {
      return scores.rate(l.first, l.second) /
                 ((1.0 - eta_c) * scores.sensing(l.first, l.second) + 1e-300) >
             scores.rate(r.first, r.second) /
                 ((1.0 - eta_c) * scores.sensing(r.first, r.second) + 1e-300);
    });
    for (const auto& [m, n] : radar)
      if (sensing - (1.0 - eta_c) * scores.sensing(m, n) >= level) {
        out(m, n) = 0;
        sensing -= (1.0 - eta_c) * scores.sensing(m, n);
      }
  }
  return out;
}

}  // namespace

ScaResult run_sca(const RealGrid& initial, const ReScores& scores, double level,
                  const ScaOptions& opts) {
  ScaResult out;

  // Degenerate weight: the allocation no longer affects the sensing
  // objective, so default to the rate-maximal all-communication grid.
  if (opts.eta_c >= 1.0) {
    out.allocation = IntGrid::Zero(scores.sensing.rows(), scores.sensing.cols());
    RepairResult rep = repair_allocation(out.allocation, scores, level, opts.eta_c, opts.mode);
    out.allocation = rep.allocation;
    out.feasible = rep.feasible;
    out.objective = allocation_objective(out.allocation, scores, opts.eta_c, opts.mode);
    out.objective_trace.push_back(out.objective);
    out.iterations = 1;
    return out;
  }

  RealGrid ind = initial.cwiseMax(0.0).cwiseMin(1.0);

  double best_obj = -std::numeric_limits<double>::infinity();
  IntGrid best_alloc;
  bool have_best = false;

  // A feasible binary start seeds the incumbent, so the result never falls
  // below it.
  {
    const RepairResult rep =
        repair_allocation(threshold_allocation(ind), scores, level, opts.eta_c, opts.mode);
    if (rep.feasible) {
      best_alloc = pack_allocation(rep.allocation, scores, level, opts.eta_c, opts.mode);
      best_obj = allocation_objective(best_alloc, scores, opts.eta_c, opts.mode);
      have_best = true;
    }
  }
  IntGrid prev = have_best ? best_alloc
                           : threshold_allocation(ind);

  for (int it = 1; it <= opts.max_iters; ++it) {
    out.iterations = it;
    ScaLinearization lin = sca_linearize(ind, opts.delta);
    RealGrid lo(ind.rows(), ind.cols());
    for (int m = 0; m < ind.rows(); ++m)
      for (int n = 0; n < ind.cols(); ++n)
        lo(m, n) = std::clamp(lin.kappa(m, n) / (1.0 + lin.gamma(m, n)), 0.0, 1.0);

    if (opts.mode == ProblemMode::SensingMax) {
      // Surrogate bounds can lock more radar than the rate floor allows.
      // Restart the linearization at zero for the cheapest such REs.
      double reachable = 0;
      for (int m = 0; m < ind.rows(); ++m)
        for (int n = 0; n < ind.cols(); ++n)
          reachable += (1.0 - lo(m, n)) * scores.rate(m, n);
      if (reachable < level) {
        std::vector<std::pair<int, int>> cells;
        for (int m = 0; m < ind.rows(); ++m)
          for (int n = 0; n < ind.cols(); ++n)
            if (lo(m, n) > 0) cells.emplace_back(m, n);
        std::sort(cells.begin(), cells.end(), [&](const auto& l, const auto& r) {
          const double dl = lo(l.first, l.second) * scores.rate(l.first, l.second) /
                            ((1.0 - opts.eta_c) * scores.sensing(l.first, l.second) + 1e-300);
          const double dr = lo(r.first, r.second) * scores.rate(r.first, r.second) /
                            ((1.0 - opts.eta_c) * scores.sensing(r.first, r.second) + 1e-300);
          return dl > dr;
        });
        for (const auto& [m, n] : cells) {
          if (reachable >= level) break;
          reachable += lo(m, n) * scores.rate(m, n);
          lo(m, n) = 0;
          ind(m, n) = 0;
        }
      }
    }

    RelaxedAllocation sol =
        solve_relaxed_allocation(scores, level, lo, opts.eta_c, opts.mode);
    if (!sol.feasible) {
      out.feasible = false;
      out.allocation = have_best ? best_alloc : prev;
      out.objective = best_obj;
      return out;
    }

    IntGrid bin = threshold_allocation(sol.indicator);
    RepairResult rep = repair_allocation(bin, scores, level, opts.eta_c, opts.mode);
    if (!rep.feasible) {
      out.feasible = false;
      out.allocation = rep.allocation;
      out.objective = allocation_objective(rep.allocation, scores, opts.eta_c, opts.mode);
      return out;
    }
    const IntGrid packed =
        pack_allocation(rep.allocation, scores, level, opts.eta_c, opts.mode);

    const double obj = allocation_objective(packed, scores, opts.eta_c, opts.mode);
    if (!have_best || obj > best_obj) {
      best_obj = obj;
      best_alloc = packed;
      have_best = true;
    }
    out.objective_trace.push_back(best_obj);

    // Convergence is measured on the accepted sequence.
    const int changes = (best_alloc - prev).cwiseAbs().sum();
    prev = best_alloc;
    ind = sol.indicator;
    if (changes < opts.eps_re) break;
  }

  out.feasible = true;
  out.allocation = best_alloc;
  out.objective = best_obj;
  return out;
}

}  // namespace bdisac
