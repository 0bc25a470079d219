// Acceptance suite: one criterion per number, each printing a PASS/FAIL line.
// Run with no arguments for all criteria; exit code is the failure count.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "bdisac/bcd.hpp"
#include "bdisac/bd_mod.hpp"
#include "bdisac/metrics.hpp"
#include "bdisac/power_alloc.hpp"
#include "bdisac/re_alloc.hpp"
#include "bdisac/scene.hpp"
#include "test_util.hpp"

using namespace bdisac;
using namespace bdisac::testing;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

bool report(int criterion, const char* label, bool pass, const std::string& detail,
            double seconds, double budget_s) {
  const bool in_budget = budget_s <= 0 || seconds <= budget_s;
  std::printf("[%s] criterion %2d: %s (%s; %.1fs%s)\n",
              pass && in_budget ? "PASS" : "FAIL", criterion, label, detail.c_str(),
              seconds, in_budget ? "" : " OVER BUDGET");
  std::fflush(stdout);
  return pass && in_budget;
}

SceneConfig desk_scene_config(int n, int m, int k, std::uint64_t seed) {
  SceneConfig cfg = desk_config(m, n, k, seed);
  cfg.noise_sensing = 1e-10;
  cfg.noise_comm = 1e-8;
  return cfg;
}

// ---------------------------------------------------------------- criterion 1

bool criterion_1() {
  Timer timer;
  const double budget = 10.0;
  int checked = 0;
  double worst = 0;

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SceneConfig cfg = desk_scene_config(16, 2, 8, seed + 1);
    const Scene scene = make_scene(cfg);
    Rng rng(seed * 7 + 3);
    AllocationState st = random_state(cfg, rng);
    st.bd_signs = scene.fixed_signs;
    st.power = st.power.cwiseMax(0.02 * cfg.power_cap());
    const EffectiveChannels eff =
        compose_effective_channels(scene.channels, st.bd_signs, cfg);

    const auto [d_smi, d_rate] = metric_gradients(st, eff, cfg, scene.rcs);
    const double h = 1e-6 * cfg.power_cap();
    std::uniform_int_distribution<int> pick_m(0, 1), pick_n(0, 15);
    for (int probe = 0; probe < 6; ++probe) {
      const int m = pick_m(rng), n = pick_n(rng);
      AllocationState up = st, dn = st;
      up.power(m, n) += h;
      dn.power(m, n) -= h;
      const MetricPair mu = evaluate_metrics(up, eff, cfg, scene.rcs);
      const MetricPair md = evaluate_metrics(dn, eff, cfg, scene.rcs);
      const double fd_smi = (mu.smi - md.smi) / (2 * h);
      const double fd_rate = (mu.rate - md.rate) / (2 * h);
      if (std::abs(fd_smi) > 1e-9 * std::abs(mu.smi)) {
        worst = std::max(worst, std::abs(d_smi(m, n) - fd_smi) / std::abs(fd_smi));
        ++checked;
      }
      if (std::abs(fd_rate) > 1e-9 * std::abs(mu.rate)) {
        worst = std::max(worst, std::abs(d_rate(m, n) - fd_rate) / std::abs(fd_rate));
        ++checked;
      }
    }
  }

  const bool pass = worst < 1e-5 && checked > 500;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%d probes, worst relative error %.2e",
                checked, worst);
  return report(1, "analytic gradients match central finite differences", pass,
                detail, timer.seconds(), budget);
}

// ---------------------------------------------------------------- criterion 2

struct ToyInstance {
  SceneConfig cfg;
  EffectiveChannels eff;
  IntGrid mask;
  std::array<double, 4> a{}, h{};
};

ToyInstance make_toy(std::uint64_t seed) {
  ToyInstance toy;
  toy.cfg = small_config(1, 4, 0, seed);
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  toy.eff.sensing = CxGrid(1, 4);
  toy.eff.comm = CxGrid(1, 4);
  toy.mask = IntGrid::Zero(1, 4);
  for (int i = 0; i < 4; ++i) {
    toy.a[i] = u(rng);
    toy.h[i] = u(rng);
    toy.eff.sensing(0, i) = std::pow(toy.a[i], 0.25);
    toy.eff.comm(0, i) = std::sqrt(toy.h[i]);
    toy.mask(0, i) = i < 2 ? 1 : 0;
  }
  return toy;
}

template <typename F>
double refine_grid_search(const F& value, double cap, double budget) {
  const int steps = 13;
  std::array<double, 4> center{cap / 2, cap / 2, cap / 2, cap / 2};
  double half = cap / 2;
  double best = -1e300;
  std::array<double, 4> best_p = center;
  for (int round = 0; round < 7; ++round) {
    std::array<double, 4> lo, hi;
    for (int d = 0; d < 4; ++d) {
      lo[d] = std::max(0.0, center[d] - half);
      hi[d] = std::min(cap, center[d] + half);
    }
    std::array<double, 4> p{};
    for (int i0 = 0; i0 < steps; ++i0) {
      p[0] = lo[0] + (hi[0] - lo[0]) * i0 / 12.0;
      for (int i1 = 0; i1 < steps; ++i1) {
        p[1] = lo[1] + (hi[1] - lo[1]) * i1 / 12.0;
        for (int i2 = 0; i2 < steps; ++i2) {
          p[2] = lo[2] + (hi[2] - lo[2]) * i2 / 12.0;
          for (int i3 = 0; i3 < steps; ++i3) {
            p[3] = lo[3] + (hi[3] - lo[3]) * i3 / 12.0;
            if (p[0] + p[1] + p[2] + p[3] > budget + 1e-12) continue;
            const double v = value(p);
            if (v > best) {
              best = v;
              best_p = p;
            }
          }
        }
      }
    }
    center = best_p;
    half = std::max(2.4 * (2 * half / 12.0), 1e-4);
  }
  return best;
}

bool criterion_2() {
  Timer timer;
  const double budget = 60.0;
  int ok = 0;
  double worst_gap = 0, worst_kkt = 0;

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ToyInstance toy = make_toy(seed + 11);
    const double prefix =
        toy.cfg.grid.subcarrier_spacing / toy.cfg.grid.total_symbol_duration();

    auto rate_of = [&](const std::array<double, 4>& p) {
      double r = 0;
      for (int i = 2; i < 4; ++i) r += prefix * std::log2(1.0 + toy.h[i] * p[i]);
      return r;
    };
    auto smi_of = [&](const std::array<double, 4>& p) {
      double s = 0;
      for (int i = 0; i < 4; ++i) {
        const double w = i < 2 ? 1.0 : toy.cfg.comm_sensing_weight;
        s += prefix * w * std::log2(1.0 + toy.a[i] * p[i]);
      }
      return s;
    };

    const double rate_max =
        refine_grid_search(rate_of, toy.cfg.power_cap(), toy.cfg.total_power);
    const double gamma = 0.5 * rate_max;
    auto constrained = [&](const std::array<double, 4>& p) {
      return rate_of(p) >= gamma ? smi_of(p) : -1e300;
    };
    const double oracle =
        refine_grid_search(constrained, toy.cfg.power_cap(), toy.cfg.total_power);

    const PowerLoopResult res = run_power_loop(toy.eff, toy.mask, SignMatrix(0, 1),
                                               gamma, toy.cfg, Cx(1, 0));
    if (!res.feasible) continue;
    const std::array<double, 4> solved{res.power(0, 0), res.power(0, 1),
                                       res.power(0, 2), res.power(0, 3)};
    const double gap = (oracle - smi_of(solved)) / std::max(std::abs(oracle), 1e-12);
    worst_gap = std::max(worst_gap, gap);

    const double kkt = kkt_residual(res.power, toy.eff, toy.mask, toy.cfg, Cx(1, 0),
                                    res.lambda, res.rho, gamma, res.nu);
    worst_kkt = std::max(worst_kkt, kkt);
    if (gap <= 1e-3 && kkt < 1e-8) ++ok;
  }

  const bool pass = ok == 50;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%d/50 within 1e-3 of the grid oracle, worst gap %.2e, worst KKT %.2e",
                ok, worst_gap, worst_kkt);
  return report(2, "water-filling matches the dense grid-search oracle", pass, detail,
                timer.seconds(), budget);
}

// ---------------------------------------------------------------- criterion 3

bool criterion_3() {
  Timer timer;
  const double budget = 60.0;
  int quality_hits = 0, feasible_hits = 0;

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(400 + seed);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    ReScores scores;
    scores.sensing = RealGrid(1, 10);
    scores.rate = RealGrid(1, 10);
    for (int n = 0; n < 10; ++n) {
      scores.sensing(0, n) = u(rng);
      scores.rate(0, n) = u(rng);
    }
    const double eta_c = 0.5;
    const double level = 0.5 * scores.rate.sum();

    double exhaustive = -1e300;
    for (std::uint32_t bits = 0; bits < (1u << 10); ++bits) {
      IntGrid alloc(1, 10);
      for (int n = 0; n < 10; ++n) alloc(0, n) = (bits >> n) & 1;
      if (retained_rate(alloc, scores) < level) continue;
      exhaustive = std::max(exhaustive, weighted_sensing(alloc, scores, eta_c));
    }

    RealGrid start(1, 10);
    std::bernoulli_distribution coin(0.5);
    for (int n = 0; n < 10; ++n) start(0, n) = coin(rng) ? 1.0 : 0.0;
    ScaOptions opts;
    opts.eta_c = eta_c;
    const ScaResult res = run_sca(start, scores, level, opts);

    if (res.feasible && retained_rate(res.allocation, scores) >= level - 1e-9)
      ++feasible_hits;
    if (res.objective >= 0.95 * exhaustive) ++quality_hits;
  }

  const bool pass = quality_hits >= 45 && feasible_hits == 50;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%d/50 at >=95%% of exhaustive, %d/50 feasible",
                quality_hits, feasible_hits);
  return report(3, "SCA with threshold and repair is near-optimal and feasible", pass,
                detail, timer.seconds(), budget);
}

// ---------------------------------------------------------------- criterion 4

bool criterion_4() {
  Timer timer;
  const double budget = 120.0;
  int quality_hits = 0, bound_hits = 0;

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(900 + seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(11, 11);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(11, 11);
    for (int t = 0; t < 4; ++t) {
      Eigen::VectorXcd ha(11), hb(11);
      for (int i = 0; i < 11; ++i) {
        ha(i) = Cx(g(rng), g(rng));
        hb(i) = Cx(g(rng), g(rng));
      }
      A += (ha * ha.adjoint()).real();
      B += (hb * hb.adjoint()).real();
    }

    auto eval = [&](const Eigen::VectorXi& x) {
      Eigen::VectorXd v(11);
      for (int i = 0; i < 10; ++i) v(i) = x(i);
      v(10) = 1.0;
      return std::make_pair<double, double>(v.transpose() * A * v,
                                            v.transpose() * B * v);
    };

    double floor_max = -1e300;
    for (std::uint32_t bits = 0; bits < (1u << 10); ++bits) {
      Eigen::VectorXi x(10);
      for (int k = 0; k < 10; ++k) x(k) = (bits >> k) & 1 ? 1 : -1;
      floor_max = std::max(floor_max, eval(x).second);
    }
    const double level = 0.4 * floor_max;

    const PhaseOracleResult oracle = exhaustive_phase_oracle(10, eval, level);
    const SdpSolution sol = solve_sdp(A, B, level);
    if (sol.objective >= oracle.objective * (1 - 1e-6)) ++bound_hits;

    // rounding starts from a neutral feasible incumbent: the floor maximizer
    Eigen::VectorXi incumbent(10);
    {
      double best_f = -1e300;
      for (std::uint32_t bits = 0; bits < (1u << 10); ++bits) {
        Eigen::VectorXi x(10);
        for (int k = 0; k < 10; ++k) x(k) = (bits >> k) & 1 ? 1 : -1;
        const double f = eval(x).second;
        if (f > best_f) {
          best_f = f;
          incumbent = x;
        }
      }
    }
    const RoundingResult rounded =
        round_solution(sol, eval, level, incumbent, {}, seed);
    if (rounded.floor_metric >= level * (1 - 1e-9) &&
        rounded.objective >= 0.95 * oracle.objective)
      ++quality_hits;
  }

  const bool pass = quality_hits >= 45 && bound_hits == 50;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%d/50 rounded at >=0.95x oracle, %d/50 SDP upper bounds hold",
                quality_hits, bound_hits);
  return report(4, "SDR rounding is near-optimal and the relaxation bounds hold", pass,
                detail, timer.seconds(), budget);
}

// ---------------------------------------------------------------- criterion 5

bool criterion_5() {
  Timer timer;
  const double budget = 300.0;
  int converged_fast = 0, monotone_ok = 0;
  const int seeds = 20;

  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    SceneConfig cfg = desk_scene_config(32, 4, 16, seed);
    const Scene scene = make_scene(cfg);
    const ObjectiveBounds b = objective_bounds(scene);
    const BcdRun run = solve_p1(scene, 0.5 * b.rate_max, Scheme::Spp);

    if (run.converged && run.outer_iterations <= 10) ++converged_fast;

    bool monotone = true;
    bool feasible_yet = false;
    double prev = -1e300;
    for (const auto& t : run.trace) {
      if (!feasible_yet && t.rate >= 0.5 * b.rate_max * (1 - 1e-9)) feasible_yet = true;
      if (!feasible_yet) continue;
      if (t.smi < prev - 1e-9 * std::max(1.0, std::abs(prev))) monotone = false;
      prev = t.smi;
    }
    if (monotone) ++monotone_ok;
  }

  const bool pass = converged_fast >= 18 && monotone_ok == seeds;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "%d/20 converged within 10 outer iterations, %d/20 monotone traces",
                converged_fast, monotone_ok);
  return report(5, "BCD converges quickly with monotone traces on the desk scene",
                pass, detail, timer.seconds(), budget);
}

// ---------------------------------------------------------------- criterion 6

bool criterion_6() {
  Timer timer;
  const double budget = 600.0;
  std::vector<double> smi_gain, rate_gain;
  const int seeds = 20;

  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    SceneConfig cfg = desk_scene_config(32, 4, 16, 100 + seed);
    const Scene scene = make_scene(cfg);
    const Scene bare = strip_bds(scene);
    const ObjectiveBounds nb = objective_bounds(bare);

    const double gamma_c = 0.5 * nb.rate_max;
    const BcdRun spp_p1 = solve_p1(scene, gamma_c, Scheme::Spp);
    const BcdRun nobd_p1 = solve_p1(scene, gamma_c, Scheme::NoBd);
    if (spp_p1.feasible && nobd_p1.feasible)
      smi_gain.push_back(spp_p1.metrics.smi / nobd_p1.metrics.smi);

    const double gamma_s = 0.5 * nb.smi_max;
    const BcdRun spp_p2 = solve_p2(scene, gamma_s, Scheme::Spp);
    const BcdRun nobd_p2 = solve_p2(scene, gamma_s, Scheme::NoBd);
    if (spp_p2.feasible && nobd_p2.feasible)
      rate_gain.push_back(spp_p2.metrics.rate / nobd_p2.metrics.rate);
  }

  auto median = [](std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  const double med_smi = median(smi_gain);
  const double med_rate = median(rate_gain);

  const bool pass = smi_gain.size() == seeds && rate_gain.size() == seeds &&
                    med_smi >= 1.10 && med_rate >= 1.10;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "median SMI gain %.3fx, median rate gain %.3fx over no-BD", med_smi,
                med_rate);
  return report(6, "BDs lift both metrics by at least 10% at matched floors", pass,
                detail, timer.seconds(), budget);
}

// ---------------------------------------------------------------- criterion 7

bool criterion_7() {
  Timer timer;
  const double budget = 600.0;

  SceneConfig cfg = desk_scene_config(24, 2, 8, 777);
  const Scene scene = make_scene(cfg);
  const std::vector<double> levels = default_level_grid(scene, ProblemMode::SensingMax, 10);
  const ParetoCurve curve =
      sweep_pareto(scene, levels, ProblemMode::SensingMax, Scheme::Spp);

  bool monotone = true;
  for (size_t i = 1; i < curve.records.size(); ++i)
    if (curve.records[i].smi > curve.records[i - 1].smi * (1 + 1e-6) + 1e-12)
      monotone = false;

  bool non_dominated = true;
  for (size_t i = 0; i < curve.records.size(); ++i)
    for (size_t j = 0; j < curve.records.size(); ++j) {
      if (i == j || !curve.records[i].on_boundary || !curve.records[j].on_boundary)
        continue;
      if (curve.records[i].smi > curve.records[j].smi * (1 + 1e-9) + 1e-12 &&
          curve.records[i].rate > curve.records[j].rate * (1 + 1e-9) + 1e-12)
        non_dominated = false;
    }

  const RegionReport region = verify_region_properties(curve, scene, 50);

  bool all_feasible = true;
  for (const auto& r : curve.records) all_feasible = all_feasible && r.feasible;

  const bool pass = monotone && non_dominated && region.ok && all_feasible;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "monotone=%d non-dominated=%d normality=%d (%d points, %d throttles)",
                monotone, non_dominated, region.ok, region.points_checked,
                region.throttles_checked);
  return report(7, "sweeps are monotone, non-dominated, and normal", pass, detail,
                timer.seconds(), budget);
}

// ---------------------------------------------------------------- criterion 8

bool criterion_8() {
  Timer timer;
  int violations = 0, comparisons = 0;

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SceneConfig cfg = desk_scene_config(16, 2, 8, 200 + seed);
    const Scene scene = make_scene(cfg);
    const ObjectiveBounds nb = objective_bounds(strip_bds(scene));
    for (double frac : {0.25, 0.5, 0.75}) {
      const double gamma = frac * nb.rate_max;
      const BcdRun spp = solve_p1(scene, gamma, Scheme::Spp);
      const BcdRun sp = solve_p1(scene, gamma, Scheme::Sp);
      const BcdRun nobd = solve_p1(scene, gamma, Scheme::NoBd);
      ++comparisons;
      if (!(spp.feasible && sp.feasible && nobd.feasible)) {
        ++violations;
        continue;
      }
      if (spp.metrics.smi < sp.metrics.smi * (1 - 1e-6) - 1e-12) ++violations;
      if (sp.metrics.smi < nobd.metrics.smi * (1 - 1e-6) - 1e-12) ++violations;
    }
  }

  const bool pass = violations == 0;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "%d violations over %d matched comparisons",
                violations, comparisons);
  return report(8, "SPP >= SP >= no-BD at every matched level and seed", pass, detail,
                timer.seconds(), 0);
}

// ---------------------------------------------------------------- criterion 9

bool criterion_9() {
  Timer timer;
  const double budget = 1.0;
  bool pass = true;

  const CostTriple c100 = cost_model(100, 2.0, 1.0);
  pass = pass && std::abs(c100.ris - 100.0 / 23.0 * 100.0) < 1e-9;
  pass = pass && std::abs(c100.bd_spp - (0.5 + 50.0 / 23.0) * 100.0) < 1e-9;
  pass = pass && std::abs(c100.bd_sp - 7.0 / 23.0 * 100.0) < 1e-9;

  for (double n : {1.0, 10.0, 500.0})
    for (double c0 : {0.25, 1.0, 3.0}) {
      const CostTriple t = cost_model(n, 2.0, c0);
      pass = pass && std::abs(t.bd_sp / t.ris - 0.07) < 1e-12;
      pass = pass && std::abs(t.bd_spp / t.ris - 0.615) < 1e-3;
    }

  return report(9, "cost model reproduces the closed forms and scale-free ratios",
                pass, "BD-SP/RIS = 0.07, BD-SPP/RIS = 0.615 at c = 2", timer.seconds(),
                budget);
}

// --------------------------------------------------------------- criterion 10

double tiny_joint_oracle(const Scene& scene, double gamma_c) {
  const SceneConfig& cfg = scene.config;
  const int cells = cfg.grid.num_symbols * cfg.grid.num_subcarriers;
  const int k = cfg.bds.count;
  double best = -1e300;
  for (std::uint32_t pbits = 0; pbits < (1u << k); ++pbits) {
    SignMatrix signs(k, cfg.grid.num_symbols);
    for (int i = 0; i < k; ++i)
      for (int m = 0; m < cfg.grid.num_symbols; ++m)
        signs(i, m) = (pbits >> i) & 1 ? 1 : -1;
    const EffectiveChannels eff =
        compose_effective_channels(scene.channels, signs, cfg);
    for (std::uint32_t rbits = 0; rbits < (1u << cells); ++rbits) {
      IntGrid mask(cfg.grid.num_symbols, cfg.grid.num_subcarriers);
      for (int c = 0; c < cells; ++c)
        mask(c / cfg.grid.num_subcarriers, c % cfg.grid.num_subcarriers) =
            (rbits >> c) & 1;
      const ConstrainedPowerResult res =
          solve_power_dual(eff, mask, cfg, scene.rcs, gamma_c);
      if (res.feasible) best = std::max(best, res.objective);
    }
  }
  return best;
}

bool criterion_10() {
  Timer timer;
  const double budget = 600.0;
  int hits = 0;
  const int seeds = 20;
  double worst_ratio = 1e300;

  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    SceneConfig cfg = desk_scene_config(6, 1, 6, 300 + seed);
    const Scene scene = make_scene(cfg);
    const ObjectiveBounds b = objective_bounds(scene);
    const double gamma = 0.5 * b.rate_max;

    const double oracle = tiny_joint_oracle(scene, gamma);
    const BcdRun run = solve_p1(scene, gamma, Scheme::Spp);
    if (!run.feasible || oracle <= 0) continue;
    const double ratio = run.metrics.smi / oracle;
    worst_ratio = std::min(worst_ratio, ratio);
    if (ratio >= 0.95) ++hits;
  }

  const bool pass = hits >= 16;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "%d/20 within 5%% of the joint optimum, worst %.3f",
                hits, worst_ratio);
  return report(10, "full pipeline is near the joint brute-force optimum on tiny scenes",
                pass, detail, timer.seconds(), budget);
}

}  // namespace

int main(int argc, char** argv) {
  const int which = argc > 1 ? std::atoi(argv[1]) : 0;
  using Criterion = bool (*)();
  const Criterion criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4,
                                criterion_5, criterion_6, criterion_7, criterion_8,
                                criterion_9, criterion_10};
  int failures = 0;
  for (int i = 0; i < 10; ++i) {
    if (which != 0 && which != i + 1) continue;
    if (!criteria[i]()) ++failures;
  }
  return failures;
}
