#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bdisac/metrics.hpp"
#include "test_util.hpp"

using namespace bdisac;
using namespace bdisac::testing;

namespace {

double prefix_of(const SceneConfig& cfg) {
  return cfg.grid.subcarrier_spacing / cfg.grid.total_symbol_duration();
}

/// Independent one-line re-evaluations of the metric formulas.
double smi_oracle(const AllocationState& st, const EffectiveChannels& eff,
                  const SceneConfig& cfg, Cx rcs) {
  double total = 0;
  for (int m = 0; m < st.power.rows(); ++m)
    for (int n = 0; n < st.power.cols(); ++n)
      total += prefix_of(cfg) * (st.radar_mask(m, n) ? 1.0 : cfg.comm_sensing_weight) *
               std::log2(1.0 + std::norm(rcs) * std::pow(std::abs(eff.sensing(m, n)), 4) *
                                   st.power(m, n) / cfg.noise_sensing);
  return total;
}

double rate_oracle(const AllocationState& st, const EffectiveChannels& eff,
                   const SceneConfig& cfg) {
  double total = 0;
  for (int m = 0; m < st.power.rows(); ++m)
    for (int n = 0; n < st.power.cols(); ++n)
      if (!st.radar_mask(m, n))
        total += prefix_of(cfg) * std::log2(1.0 + std::norm(eff.comm(m, n)) *
                                                      st.power(m, n) / cfg.noise_comm);
  return total;
}

}  // namespace

TEST_CASE("single radar RE at unit SNR contributes one prefix-weighted bit") {
  SceneConfig cfg = small_config(1, 1, 0);
  AllocationState st;
  st.radar_mask = IntGrid::Ones(1, 1);
  st.power = RealGrid::Constant(1, 1, 1.0);
  st.bd_signs = SignMatrix(0, 1);
  EffectiveChannels eff;
  eff.comm = CxGrid::Ones(1, 1);
  eff.sensing = CxGrid::Ones(1, 1);  // |G|^4 P / sigma_r^2 = 1

  const MetricPair mp = sensing_mutual_information(st, eff, cfg, Cx(1, 0));
  CHECK(mp.smi == doctest::Approx(prefix_of(cfg)).epsilon(1e-12));
}

TEST_CASE("zero power means zero SMI and zero rate") {
  SceneConfig cfg = small_config(2, 3, 0);
  AllocationState st;
  st.radar_mask = IntGrid::Zero(2, 3);
  st.power = RealGrid::Zero(2, 3);
  st.bd_signs = SignMatrix(0, 2);
  Rng rng(1);
  const EffectiveChannels eff = random_effective(cfg, rng);
  const MetricPair mp = evaluate_metrics(st, eff, cfg, Cx(1, 0));
  CHECK(mp.smi == 0.0);
  CHECK(mp.rate == 0.0);
}

TEST_CASE("all-radar grid has zero communication rate") {
  SceneConfig cfg = small_config(2, 3, 0);
  Rng rng(2);
  AllocationState st = random_state(cfg, rng);
  st.radar_mask.setOnes();
  const EffectiveChannels eff = random_effective(cfg, rng);
  CHECK(communication_rate(st, eff, cfg).rate == 0.0);
}

TEST_CASE("single comm RE at SNR 3 carries two prefix-weighted bits") {
  SceneConfig cfg = small_config(1, 1, 0);
  AllocationState st;
  st.radar_mask = IntGrid::Zero(1, 1);
  st.power = RealGrid::Constant(1, 1, 3.0);
  st.bd_signs = SignMatrix(0, 1);
  EffectiveChannels eff;
  eff.comm = CxGrid::Ones(1, 1);
  eff.sensing = CxGrid::Ones(1, 1);
  const MetricPair mp = communication_rate(st, eff, cfg);
  CHECK(mp.rate == doctest::Approx(2.0 * prefix_of(cfg)).epsilon(1e-12));
}

TEST_CASE("metrics match the formula oracle on random grids") {
  SceneConfig cfg = small_config(4, 4, 0);
  cfg.comm_sensing_weight = 1.0;
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const AllocationState st = random_state(cfg, rng);
    const EffectiveChannels eff = random_effective(cfg, rng);
    const MetricPair mp = evaluate_metrics(st, eff, cfg, Cx(1, 0));
    CHECK(mp.smi == doctest::Approx(smi_oracle(st, eff, cfg, Cx(1, 0))).epsilon(1e-12));
    CHECK(mp.rate == doctest::Approx(rate_oracle(st, eff, cfg)).epsilon(1e-12));
    CHECK(mp.smi_scores.sum() == doctest::Approx(mp.smi).epsilon(1e-12));
    CHECK(mp.rate_scores.sum() == doctest::Approx(mp.rate).epsilon(1e-12));
  }
}

TEST_CASE("gradient at zero power under unit normalized gain") {
  SceneConfig cfg = small_config(1, 1, 0);
  AllocationState st;
  st.radar_mask = IntGrid::Ones(1, 1);
  st.power = RealGrid::Zero(1, 1);
  st.bd_signs = SignMatrix(0, 1);
  EffectiveChannels eff;
  eff.comm = CxGrid::Ones(1, 1);
  eff.sensing = CxGrid::Ones(1, 1);  // |a_t G G^H|^2 == sigma_r^2
  const auto [d_smi, d_rate] = metric_gradients(st, eff, cfg, Cx(1, 0));
  CHECK(d_smi(0, 0) ==
        doctest::Approx(prefix_of(cfg) / std::log(2.0)).epsilon(1e-12));
  CHECK(d_rate(0, 0) == 0.0);  // radar RE carries no rate
}

TEST_CASE("analytic gradients match central finite differences") {
  SceneConfig cfg = small_config(2, 4, 0);
  Rng rng(7);
  const double h = 1e-6 * cfg.power_cap();
  for (int trial = 0; trial < 20; ++trial) {
    AllocationState st = random_state(cfg, rng);
    st.power = st.power.cwiseMax(0.05);  // keep away from the boundary
    const EffectiveChannels eff = random_effective(cfg, rng);
    const auto [d_smi, d_rate] = metric_gradients(st, eff, cfg, Cx(1, 0));
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 4; ++n) {
        AllocationState up = st, dn = st;
        up.power(m, n) += h;
        dn.power(m, n) -= h;
        const double fd_smi = (smi_oracle(up, eff, cfg, Cx(1, 0)) -
                               smi_oracle(dn, eff, cfg, Cx(1, 0))) /
                              (2 * h);
        const double fd_rate =
            (rate_oracle(up, eff, cfg) - rate_oracle(dn, eff, cfg)) / (2 * h);
        if (std::abs(fd_smi) > 1e-12)
          CHECK(d_smi(m, n) == doctest::Approx(fd_smi).epsilon(1e-5));
        if (std::abs(fd_rate) > 1e-12)
          CHECK(d_rate(m, n) == doctest::Approx(fd_rate).epsilon(1e-5));
      }
  }
}

TEST_CASE("augmented lagrangian") {
  SceneConfig cfg = small_config(2, 3, 0);
  Rng rng(9);
  const AllocationState st = random_state(cfg, rng);
  const EffectiveChannels eff = random_effective(cfg, rng);
  const MetricPair mp = evaluate_metrics(st, eff, cfg, Cx(1, 0));

  SUBCASE("at the constraint boundary the value is exactly the SMI") {
    CHECK(augmented_lagrangian(st, eff, cfg, Cx(1, 0), 2.0, 5.0, mp.rate) ==
          doctest::Approx(mp.smi).epsilon(1e-12));
  }
  SUBCASE("unpenalized limit recovers the SMI") {
    CHECK(augmented_lagrangian(st, eff, cfg, Cx(1, 0), 0.0, 1e-300, 0.0) ==
          doctest::Approx(mp.smi).epsilon(1e-9));
  }
  SUBCASE("random multipliers match the term-by-term formula") {
    const double lambda = 0.7, rho = 2.3, gamma = 0.4 * mp.rate;
    const double resid = mp.rate - gamma;
    CHECK(augmented_lagrangian(st, eff, cfg, Cx(1, 0), lambda, rho, gamma) ==
          doctest::Approx(mp.smi + lambda * resid - 0.5 * rho * resid * resid)
              .epsilon(1e-12));
  }
}

TEST_CASE("metrics are increasing and concave in per-RE power") {
  SceneConfig cfg = small_config(2, 3, 0);
  Rng rng(13);
  AllocationState st = random_state(cfg, rng);
  const EffectiveChannels eff = random_effective(cfg, rng);
  const double h = 0.05;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 3; ++n) {
      AllocationState lo = st, mid = st, hi = st;
      lo.power(m, n) = 0.5;
      mid.power(m, n) = 0.5 + h;
      hi.power(m, n) = 0.5 + 2 * h;
      const double a = smi_oracle(lo, eff, cfg, Cx(1, 0));
      const double b = smi_oracle(mid, eff, cfg, Cx(1, 0));
      const double c = smi_oracle(hi, eff, cfg, Cx(1, 0));
      CHECK(b > a);          // strictly increasing (all gains nonzero a.s.)
      CHECK(c - 2 * b + a <= 1e-12);  // second difference non-positive
    }
}

TEST_CASE("flipping a comm RE to radar trades rate for sensing when eta_c < 1") {
  SceneConfig cfg = small_config(2, 3, 0);
  cfg.comm_sensing_weight = 0.4;
  Rng rng(17);
  AllocationState st = random_state(cfg, rng, 0.0);  // everything communication
  st.power = st.power.cwiseMax(0.01);
  const EffectiveChannels eff = random_effective(cfg, rng);
  const MetricPair base = evaluate_metrics(st, eff, cfg, Cx(1, 0));
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 3; ++n) {
      AllocationState flipped = st;
      flipped.radar_mask(m, n) = 1;
      const MetricPair mp = evaluate_metrics(flipped, eff, cfg, Cx(1, 0));
      CHECK(mp.rate <= base.rate + 1e-12);
      CHECK(mp.smi >= base.smi - 1e-12);
    }
}

TEST_CASE("allocation state validation enforces the invariants") {
  SceneConfig cfg = small_config(2, 3, 1);
  Rng rng(19);
  AllocationState st = random_state(cfg, rng);
  st.validate(cfg);

  AllocationState bad = st;
  bad.radar_mask(0, 0) = 2;
  CHECK_THROWS_AS(bad.validate(cfg), std::invalid_argument);

  bad = st;
  bad.power(0, 0) = -1.0;
  CHECK_THROWS_AS(bad.validate(cfg), std::invalid_argument);

  bad = st;
  bad.power.setConstant(cfg.power_cap());  // blows the total budget
  CHECK_THROWS_AS(bad.validate(cfg), std::invalid_argument);

  bad = st;
  bad.bd_signs(0, 0) = 0;
  CHECK_THROWS_AS(bad.validate(cfg), std::invalid_argument);
}
