#include "bdisac/bcd.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>

#include "bdisac/bd_mod.hpp"
#include "bdisac/power_alloc.hpp"
#include "bdisac/re_alloc.hpp"

namespace bdisac {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Spp: return "spp";
    case Scheme::Sp: return "sp";
    case Scheme::TdmaFdma: return "tdma";
    case Scheme::NoBd: return "nobd";
  }
  return "?";
}

std::string to_string(ProblemMode mode) {
  return mode == ProblemMode::SensingMax ? "p1" : "p2";
}

namespace {

double mode_objective(const MetricPair& m, ProblemMode mode) {
  return mode == ProblemMode::SensingMax ? m.smi : m.rate;
}
double mode_floor(const MetricPair& m, ProblemMode mode) {
  return mode == ProblemMode::SensingMax ? m.rate : m.smi;
}

/// Unweighted per-RE scores at the current power, as the RE subproblem sees
/// them: sensing at weight 1 everywhere, rate everywhere.
ReScores score_grids(const RealGrid& power, const EffectiveChannels& eff,
                     const SceneConfig& cfg, Cx rcs) {
  const double prefix = cfg.grid.subcarrier_spacing / cfg.grid.total_symbol_duration();
  const double rcs2 = std::norm(rcs);
  ReScores s;
  s.sensing = RealGrid(power.rows(), power.cols());
  s.rate = RealGrid(power.rows(), power.cols());
  for (int m = 0; m < power.rows(); ++m)
    for (int n = 0; n < power.cols(); ++n) {
      const double g2 = std::norm(eff.sensing(m, n));
      const double a = rcs2 * g2 * g2 / cfg.noise_sensing;
      const double h = std::norm(eff.comm(m, n)) / cfg.noise_comm;
      s.sensing(m, n) = prefix * std::log2(1.0 + a * power(m, n));
      s.rate(m, n) = prefix * std::log2(1.0 + h * power(m, n));
    }
  return s;
}

struct Incumbent {
  AllocationState state;
  EffectiveChannels eff;
  MetricPair metrics;
  bool feasible = false;
};

class BcdSolver {
 public:
  BcdSolver(const Scene& scene, ProblemMode mode, double level, Scheme scheme,
            const BcdOptions& opts, int start_index = 0)
      : scene_(scene), cfg_(scene.config), mode_(mode), level_(level),
        scheme_(scheme), opts_(opts), start_index_(start_index) {}

  BcdRun run() {
    const auto t0 = std::chrono::steady_clock::now();
    BcdRun out;
    out.mode = mode_;
    out.scheme = scheme_;
    out.level = level_;
    out.seed = cfg_.seed;

    const ObjectiveBounds bounds = objective_bounds(scene_);
    const double bound = mode_ == ProblemMode::SensingMax ? bounds.rate_max : bounds.smi_max;
    out.feasibility_bound = bound;
    if (level_ > bound * (1 + 1e-9)) {
      out.feasible = false;
      out.failure = "floor above the single-objective bound";
      out.state = initial_state();
      out.metrics = evaluate(out.state).metrics;
      out.wall_ms = elapsed_ms(t0);
      return out;
    }

    Incumbent inc = evaluate(scheme_ == Scheme::TdmaFdma ? tdma_state() : initial_state());
    trace_.push_back(point(0, "init", inc));

    if (scheme_ == Scheme::TdmaFdma) {
      out.state = inc.state;
      out.metrics = inc.metrics;
      out.feasible = inc.feasible;
      out.converged = true;
      out.outer_iterations = 0;
      out.trace = std::move(trace_);
      out.wall_ms = elapsed_ms(t0);
      return out;
    }

    bool phases_enabled = false;
    const bool phases_available = scheme_ == Scheme::Spp && cfg_.bds.count > 0 &&
                                  cfg_.bds.modulation == BdModulationMode::Dynamic;

    int stable = 0;
    int outer = 0;
    for (outer = 1; outer <= opts_.max_outer; ++outer) {
      const MetricPair before = inc.metrics;
      bool changed = false;

      changed |= re_block(inc, outer);
      changed |= power_block(inc, outer);
      if (phases_enabled) changed |= phase_block(inc, outer);

      const double scale_i = std::max(std::abs(inc.metrics.smi), 1e-12);
      const double scale_c = std::max(std::abs(inc.metrics.rate), 1e-12);
      const bool small = std::abs(inc.metrics.smi - before.smi) < opts_.rel_tol * scale_i &&
                         std::abs(inc.metrics.rate - before.rate) < opts_.rel_tol * scale_c;
      stable = small ? stable + 1 : 0;

      const bool settled = (!changed) || stable >= 2;
      if (settled) {
        if (phases_available && !phases_enabled) {
          phases_enabled = true;
          stable = 0;
          continue;
        }
        out.converged = true;
        break;
      }
    }

    out.outer_iterations = std::min(outer, opts_.max_outer);
    out.state = inc.state;
    out.metrics = inc.metrics;
    out.feasible = inc.feasible;
    out.trace = std::move(trace_);
    out.wall_ms = elapsed_ms(t0);
    return out;
  }

 private:
  static double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }

  double floor_tolerance() const { return 1e-9 * std::max(level_, 1.0); }

  Incumbent evaluate(const AllocationState& state) const {
    Incumbent inc;
    inc.state = state;
    inc.eff = compose_effective_channels(scene_.channels, state.bd_signs, cfg_);
    inc.metrics = evaluate_metrics(state, inc.eff, cfg_, scene_.rcs);
    inc.feasible = mode_floor(inc.metrics, mode_) >= level_ - floor_tolerance();
    return inc;
  }

  TracePoint point(int outer, const char* block, const Incumbent& inc,
                   double lambda = 0, double rho = 0) const {
    return {outer, block, inc.metrics.smi, inc.metrics.rate, lambda, rho};
  }

  AllocationState initial_state() const {
    const int m = cfg_.grid.num_symbols;
    const int n = cfg_.grid.num_subcarriers;
    AllocationState st;
    st.bd_signs = scene_.fixed_signs;
    st.power = RealGrid::Constant(m, n, std::min(cfg_.uniform_power(), cfg_.power_cap()));

    Rng rng(cfg_.seed ^ (std::bit_cast<std::uint64_t>(level_) * 0x9e3779b97f4a7c15ULL) ^
            (static_cast<std::uint64_t>(start_index_) * 0xd1b54a32d192ed03ULL));
    std::bernoulli_distribution coin(0.5);

    // Starts beyond the shared base set also randomize the phase signs.
    if (start_index_ >= opts_.num_starts && st.bd_signs.size() > 0)
      for (int k = 0; k < st.bd_signs.rows(); ++k)
        for (int i = 0; i < st.bd_signs.cols(); ++i)
          st.bd_signs(k, i) = coin(rng) ? 1 : -1;

    // Start 1 is all-radar, start 2 all-communication; the rest are random
    // 50/50 grids on distinct seed streams.
    if (start_index_ == 1) {
      st.radar_mask = IntGrid::Ones(m, n);
      return st;
    }
    if (start_index_ == 2) {
      st.radar_mask = IntGrid::Zero(m, n);
      return st;
    }
    st.radar_mask = IntGrid(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) st.radar_mask(i, j) = coin(rng) ? 1 : 0;
    return st;
  }

  AllocationState tdma_state() const {
    const int m = cfg_.grid.num_symbols;
    const int n = cfg_.grid.num_subcarriers;
    AllocationState st;
    st.bd_signs = scene_.fixed_signs;
    st.power = RealGrid::Constant(m, n, std::min(cfg_.uniform_power(), cfg_.power_cap()));
    st.radar_mask = IntGrid(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        st.radar_mask(i, j) = m >= 2 ? (i % 2 == 0 ? 1 : 0) : (j % 2 == 0 ? 1 : 0);
    return st;
  }

  /// Safeguarded acceptance: never regress the objective, never leave the
  /// feasible set once reached; before that, any feasibility progress counts.
  bool try_accept(Incumbent& inc, const AllocationState& candidate) {
    Incumbent cand = evaluate(candidate);
    const double cand_obj = mode_objective(cand.metrics, mode_);
    const double inc_obj = mode_objective(inc.metrics, mode_);
    const double slack = 1e-12 * std::max(1.0, std::abs(inc_obj));

    bool accept = false;
    if (!inc.feasible) {
      accept = cand.feasible ||
               mode_floor(cand.metrics, mode_) > mode_floor(inc.metrics, mode_);
    } else {
      accept = cand.feasible && cand_obj >= inc_obj - slack;
    }
    if (accept) inc = std::move(cand);
    return accept;
  }

  bool re_block(Incumbent& inc, int outer) {
    ScaOptions opts;
    opts.delta = cfg_.sca_delta;
    opts.eps_re = cfg_.eps_re;
    opts.eta_c = cfg_.comm_sensing_weight;
    opts.mode = mode_;
    const RealGrid init = inc.state.radar_mask.cast<double>();

    // Scores taken at the current power are self-fulfilling (starved REs look
    // worthless), so a second candidate is generated from uniform-power
    // scores. Both are judged with their power re-solved.
    const ReScores at_current = score_grids(inc.state.power, inc.eff, cfg_, scene_.rcs);
    const RealGrid uniform = RealGrid::Constant(
        inc.state.power.rows(), inc.state.power.cols(),
        std::min(cfg_.uniform_power(), cfg_.power_cap()));
    const ReScores at_uniform = score_grids(uniform, inc.eff, cfg_, scene_.rcs);

    bool changed = false;
    for (const ReScores* scores : {&at_current, &at_uniform}) {
      const ScaResult res = run_sca(init, *scores, level_, opts);
      if (!res.feasible || res.allocation.size() == 0) continue;
      if ((res.allocation - inc.state.radar_mask).cwiseAbs().sum() == 0) continue;

      AllocationState cand = inc.state;
      cand.radar_mask = res.allocation;
      changed |= try_accept(inc, cand);

      const ConstrainedPowerResult pw =
          solve_power_dual(inc.eff, res.allocation, cfg_, scene_.rcs, level_, mode_);
      if (pw.feasible) {
        cand.power = pw.power;
        changed |= try_accept(inc, cand);
      }
    }
    trace_.push_back(point(outer, "re", inc));
    return changed;
  }

  bool power_block(Incumbent& inc, int outer) {
    PowerLoopOptions opts;
    opts.mode = mode_;
    PowerLoopResult res = run_power_loop(inc.eff, inc.state.radar_mask,
                                         inc.state.bd_signs, level_, cfg_, scene_.rcs, opts);
    bool changed = false;
    if (res.power.size() > 0) {
      AllocationState cand = inc.state;
      cand.power = res.power;
      const bool moved = (cand.power - inc.state.power).norm() >
                         1e-9 * std::max(1.0, inc.state.power.norm());
      changed = moved && try_accept(inc, cand);
    }
    trace_.push_back(point(outer, "power", inc, res.lambda, res.rho));
    return changed;
  }

  bool phase_block(Incumbent& inc, int outer) {
    const int k_count = cfg_.bds.count;
    const int m_count = cfg_.grid.num_symbols;

    int comm_res = 0;
    double comm_power = 0;
    for (int m = 0; m < m_count; ++m)
      for (int n = 0; n < cfg_.grid.num_subcarriers; ++n)
        if (!inc.state.radar_mask(m, n)) {
          ++comm_res;
          comm_power += inc.state.power(m, n);
        }

    const QuadraticForms forms =
        build_quadratic_forms(scene_.channels, cfg_, inc.state.radar_mask);
    Eigen::MatrixXd obj_form = forms.sensing_real_sum();
    Eigen::MatrixXd con_form = forms.comm_real_sum();
    if (mode_ == ProblemMode::RateMax) std::swap(obj_form, con_form);

    // Incumbent majority vector anchors both the surrogate level clamp and
    // the rounding fallback.
    Eigen::VectorXi inc_vec(k_count);
    for (int k = 0; k < k_count; ++k) {
      int s = 0;
      for (int m = 0; m < m_count; ++m) s += inc.state.bd_signs(k, m);
      inc_vec(k) = s >= 0 ? 1 : -1;
    }
    Eigen::VectorXd inc_lift(k_count + 1);
    for (int k = 0; k < k_count; ++k) inc_lift(k) = inc_vec(k);
    inc_lift(k_count) = 1.0;
    const double inc_con = inc_lift.transpose() * con_form * inc_lift;

    const double surrogate = std::min(surrogate_level(comm_res, comm_power), inc_con);

    SdpOptions sdp_opts;
    const SdpSolution sol = solve_sdp(obj_form, con_form, surrogate, sdp_opts);

    auto evaluator = [&](const Eigen::VectorXi& x) {
      AllocationState st = inc.state;
      for (int m = 0; m < m_count; ++m) st.bd_signs.col(m) = x;
      const EffectiveChannels eff = compose_effective_channels(scene_.channels, st.bd_signs, cfg_);
      const MetricPair mp = evaluate_metrics(st, eff, cfg_, scene_.rcs);
      return std::make_pair(mode_objective(mp, mode_), mode_floor(mp, mode_));
    };

    const RoundingResult rounded = round_solution(sol, evaluator, level_, inc_vec,
                                                  sdp_opts, cfg_.seed + outer);

    bool changed = false;
    if (!rounded.kept_incumbent &&
        (rounded.signs - inc_vec).cwiseAbs().sum() > 0) {
      AllocationState cand = inc.state;
      for (int m = 0; m < m_count; ++m) cand.bd_signs.col(m) = rounded.signs;
      changed |= try_accept(inc, cand);
    }

    // Polish: rank the rounded vector, the incumbent, and their one-bit
    // neighbors with the power re-solved, then hand the winner to the
    // safeguard. Fixed-power ranking alone locks phases and allocation into
    // each other.
    {
      std::vector<Eigen::VectorXi> pool;
      pool.push_back(rounded.signs);
      pool.push_back(inc_vec);
      for (int k = 0; k < k_count; ++k) {
        Eigen::VectorXi flip = rounded.signs;
        flip(k) = -flip(k);
        pool.push_back(std::move(flip));
      }

      double best_obj = -std::numeric_limits<double>::infinity();
      Eigen::VectorXi best_signs;
      RealGrid best_power;
      for (const auto& x : pool) {
        SignMatrix signs(k_count, m_count);
        for (int m = 0; m < m_count; ++m) signs.col(m) = x;
        const EffectiveChannels eff2 =
            compose_effective_channels(scene_.channels, signs, cfg_);
        const ConstrainedPowerResult pw = solve_power_dual(
            eff2, inc.state.radar_mask, cfg_, scene_.rcs, level_, mode_, true);
        if (!pw.feasible) continue;
        if (pw.objective > best_obj) {
          best_obj = pw.objective;
          best_signs = x;
          best_power = pw.power;
        }
      }
      if (best_signs.size() > 0) {
        AllocationState cand = inc.state;
        for (int m = 0; m < m_count; ++m) cand.bd_signs.col(m) = best_signs;
        const EffectiveChannels eff2 =
            compose_effective_channels(scene_.channels, cand.bd_signs, cfg_);
        const ConstrainedPowerResult pw = solve_power_dual(
            eff2, inc.state.radar_mask, cfg_, scene_.rcs, level_, mode_);
        if (pw.feasible) {
          cand.power = pw.power;
          changed |= try_accept(inc, cand);
        }
      }
    }
    trace_.push_back(point(outer, "phase", inc));
    return changed;
  }

  /// Inversion of the floor level onto the linear channel-power scale the SDP
  /// constraint lives on: per-RE SNR needed if the floor were spread evenly,
  /// mapped back through the mean allocated power.
  double surrogate_level(int comm_res, double comm_power) const {
    const double dfto = cfg_.grid.subcarrier_spacing / cfg_.grid.total_symbol_duration();
    if (mode_ == ProblemMode::SensingMax) {
      if (comm_res == 0 || comm_power <= 0) return 0;
      const double per_re_bits = level_ / (dfto * comm_res);
      const double mean_power = comm_power / comm_res;
      const double snr = std::pow(2.0, std::min(per_re_bits, 60.0)) - 1.0;
      return comm_res * cfg_.noise_comm * snr / mean_power;
    }
    const int rows = cfg_.grid.num_symbols;
    const int cols = cfg_.grid.num_subcarriers;
    const double total_res = static_cast<double>(rows) * cols;
    const double mean_power = std::max(cfg_.uniform_power(), 1e-300);
    if (level_ <= 0) return 0;
    const double per_re_bits = level_ / (dfto * total_res);
    const double snr = std::pow(2.0, std::min(per_re_bits, 60.0)) - 1.0;
    const double rcs2 = std::max(std::norm(scene_.rcs), 1e-300);
    const double g4 = cfg_.noise_sensing * snr / (rcs2 * mean_power);
    return total_res * std::sqrt(std::max(g4, 0.0));
  }

  const Scene& scene_;
  const SceneConfig& cfg_;
  ProblemMode mode_;
  double level_;
  Scheme scheme_;
  BcdOptions opts_;
  int start_index_ = 0;
  std::vector<TracePoint> trace_;
};

BcdRun solve(const Scene& scene, double level, Scheme scheme, ProblemMode mode,
             const BcdOptions& opts) {
  if (scheme == Scheme::NoBd) {
    const Scene stripped = strip_bds(scene);
    BcdRun run = solve(stripped, level, Scheme::Spp, mode, opts);
    run.scheme = Scheme::NoBd;
    return run;
  }

  int starts = scheme == Scheme::TdmaFdma ? 1 : std::max(1, opts.num_starts);
  if (scheme == Scheme::Spp && scene.config.bds.count > 0 &&
      scene.config.bds.modulation == BdModulationMode::Dynamic)
    starts += std::max(0, opts.num_phase_starts);
  BcdRun best;
  double total_ms = 0;
  for (int s = 0; s < starts; ++s) {
    BcdSolver solver(scene, mode, level, scheme, opts, s);
    BcdRun run = solver.run();
    total_ms += run.wall_ms;
    const bool better =
        s == 0 ||
        (run.feasible && !best.feasible) ||
        (run.feasible == best.feasible &&
         mode_objective(run.metrics, mode) > mode_objective(best.metrics, mode));
    if (better) best = std::move(run);
  }
  best.wall_ms = total_ms;
  return best;
}

}  // namespace

BcdRun solve_p1(const Scene& scene, double gamma_c, Scheme scheme, const BcdOptions& opts) {
  return solve(scene, gamma_c, scheme, ProblemMode::SensingMax, opts);
}

BcdRun solve_p2(const Scene& scene, double gamma_s, Scheme scheme, const BcdOptions& opts) {
  return solve(scene, gamma_s, scheme, ProblemMode::RateMax, opts);
}

ObjectiveBounds objective_bounds(const Scene& scene) {
  const SceneConfig& cfg = scene.config;
  const EffectiveChannels eff =
      compose_effective_channels(scene.channels, scene.fixed_signs, cfg);
  ObjectiveBounds b;
  const IntGrid all_comm = IntGrid::Zero(cfg.grid.num_symbols, cfg.grid.num_subcarriers);
  const IntGrid all_radar = IntGrid::Ones(cfg.grid.num_symbols, cfg.grid.num_subcarriers);
  b.rate_max =
      solve_power_dual(eff, all_comm, cfg, scene.rcs, 0.0, ProblemMode::RateMax).objective;
  b.smi_max =
      solve_power_dual(eff, all_radar, cfg, scene.rcs, 0.0, ProblemMode::SensingMax).objective;
  return b;
}

std::vector<double> default_level_grid(const Scene& scene, ProblemMode mode, int count) {
  const ObjectiveBounds b = objective_bounds(scene);
  const double top = mode == ProblemMode::SensingMax ? b.rate_max : b.smi_max;
  std::vector<double> levels(count);
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.5 : 0.02 + (0.98 - 0.02) * i / (count - 1.0);
    levels[i] = f * top;
  }
  return levels;
}

ParetoCurve sweep_pareto(const Scene& scene, const std::vector<double>& levels,
                         ProblemMode mode, Scheme scheme, const BcdOptions& opts,
                         int parallel_workers) {
  ParetoCurve curve;
  curve.runs.resize(levels.size());

  auto solve_one = [&](size_t i) {
    curve.runs[i] = mode == ProblemMode::SensingMax
                        ? solve_p1(scene, levels[i], scheme, opts)
                        : solve_p2(scene, levels[i], scheme, opts);
  };

  if (parallel_workers > 1) {
    std::vector<std::future<void>> futures;
    std::atomic<size_t> next{0};
    const int workers = std::min<int>(parallel_workers, static_cast<int>(levels.size()));
    for (int w = 0; w < workers; ++w)
      futures.push_back(std::async(std::launch::async, [&]() {
        for (size_t i = next.fetch_add(1); i < levels.size(); i = next.fetch_add(1))
          solve_one(i);
      }));
    for (auto& f : futures) f.get();
  } else {
    for (size_t i = 0; i < levels.size(); ++i) solve_one(i);
  }

  // Records carry normalized (bits/s/Hz) values; runs keep the raw metrics.
  const double unit = scene.config.report_unit();
  for (size_t i = 0; i < levels.size(); ++i) {
    const BcdRun& run = curve.runs[i];
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
    curve.records.push_back(rec);
  }

  // Dominance annotation over the successful records.
  for (size_t i = 0; i < curve.records.size(); ++i) {
    ParetoRecord& a = curve.records[i];
    if (!a.feasible) {
      a.on_boundary = false;
      continue;
    }
    bool dominated = false;
    for (size_t j = 0; j < curve.records.size() && !dominated; ++j) {
      if (i == j || !curve.records[j].feasible) continue;
      const ParetoRecord& b = curve.records[j];
      const double ti = 1e-12 * std::max(1.0, std::abs(a.smi));
      const double tc = 1e-12 * std::max(1.0, std::abs(a.rate));
      if (b.smi >= a.smi - ti && b.rate >= a.rate - tc &&
          (b.smi > a.smi + ti || b.rate > a.rate + tc))
        dominated = true;
    }
    a.on_boundary = !dominated;
  }
  return curve;
}

BcdRun run_benchmark(const Scene& scene, Scheme scheme, double level, ProblemMode mode,
                     const BcdOptions& opts) {
  return solve(scene, level, scheme, mode, opts);
}

RegionReport verify_region_properties(const ParetoCurve& curve, const Scene& scene,
                                      int throttles_per_point, std::uint64_t seed) {
  RegionReport report;
  const SceneConfig& cfg = scene.config;

  const BcdOptions opts;
  const double smi_box =
      solve_p1(scene, 0.0, Scheme::Spp, opts).metrics.smi * (1 + 1e-9) + 1e-12;
  const double rate_box =
      solve_p2(scene, 0.0, Scheme::Spp, opts).metrics.rate * (1 + 1e-9) + 1e-12;

  Rng rng(seed);
  std::uniform_real_distribution<double> scale(0.05, 0.95);
  std::bernoulli_distribution mute(0.5);

  for (size_t i = 0; i < curve.records.size(); ++i) {
    if (!curve.records[i].on_boundary) continue;
    const BcdRun& run = curve.runs[i];
    ++report.points_checked;

    const EffectiveChannels eff =
        compose_effective_channels(scene.channels, run.state.bd_signs, cfg);
    const MetricPair base = evaluate_metrics(run.state, eff, cfg, scene.rcs);

    if (base.smi > smi_box || base.rate > rate_box) {
      report.ok = false;
      report.violations.push_back("boundary point outside the single-objective box");
    }

    for (int t = 0; t < throttles_per_point; ++t) {
      ++report.throttles_checked;
      AllocationState variant = run.state;
      if (t % 2 == 0) {
        variant.power *= scale(rng);
      } else {
        for (int m = 0; m < variant.power.rows(); ++m)
          for (int n = 0; n < variant.power.cols(); ++n)
            if (!variant.radar_mask(m, n) && mute(rng)) variant.power(m, n) = 0;
      }
      const MetricPair mp = evaluate_metrics(variant, eff, cfg, scene.rcs);

      const double ti = 1e-9 * std::max(1.0, base.smi);
      const double tc = 1e-9 * std::max(1.0, base.rate);
      const bool inside = mp.smi >= 0 && mp.rate >= 0 && mp.smi <= base.smi + ti &&
                          mp.rate <= base.rate + tc && mp.smi <= smi_box &&
                          mp.rate <= rate_box &&
                          variant.power.sum() <= cfg.total_power * (1 + 1e-9) &&
                          variant.power.maxCoeff() <= cfg.power_cap() * (1 + 1e-9);
      if (!inside) {
        report.ok = false;
        report.violations.push_back("throttled variant escaped the region at record " +
                                    std::to_string(i));
      }
    }
  }
  return report;
}

CostTriple cost_model(double element_count, double cost_ratio, double unit_cost) {
  if (element_count < 0) throw std::domain_error("element count must be >= 0");
  if (cost_ratio < 2.0 || cost_ratio > 10.0)
    throw std::domain_error("cost ratio must lie in [2, 10]");
  if (unit_cost <= 0) throw std::domain_error("unit cost must be > 0");
  CostTriple out;
  out.ris = (100.0 / 23.0) * element_count * unit_cost;
  out.bd_spp = (1.0 / cost_ratio + 50.0 / 23.0) * element_count * unit_cost;
  out.bd_sp = (7.0 / 23.0) * element_count * unit_cost;
  return out;
}

}  // namespace bdisac
