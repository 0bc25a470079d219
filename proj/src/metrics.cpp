#include "bdisac/metrics.hpp"

#include <cmath>

namespace bdisac {

namespace {
constexpr double kLn2 = 0.6931471805599453;

double rate_prefix(const SceneConfig& cfg) {
  return cfg.grid.subcarrier_spacing / cfg.grid.total_symbol_duration();
}
}  // namespace

void AllocationState::validate(const SceneConfig& config) const {
  const int m = config.grid.num_symbols;
  const int n = config.grid.num_subcarriers;
  if (radar_mask.rows() != m || radar_mask.cols() != n)
    throw std::invalid_argument("radar_mask shape mismatch");
  if (power.rows() != m || power.cols() != n)
    throw std::invalid_argument("power shape mismatch");
  if (bd_signs.rows() != config.bds.count || bd_signs.cols() != m)
    throw std::invalid_argument("bd_signs shape mismatch");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const int v = radar_mask(i, j);
      if (v != 0 && v != 1) throw std::invalid_argument("radar_mask must be binary");
      const double p = power(i, j);
      if (p < 0 || p > config.power_cap() * (1 + 1e-9))
        throw std::invalid_argument("power outside [0, P_max]");
    }
  for (int k = 0; k < bd_signs.rows(); ++k)
    for (int i = 0; i < m; ++i)
      if (bd_signs(k, i) != 1 && bd_signs(k, i) != -1)
        throw std::invalid_argument("bd_signs must be +/-1");
  if (power.sum() > config.total_power * (1 + 1e-9))
    throw std::invalid_argument("total power budget exceeded");
}

MetricPair sensing_mutual_information(const AllocationState& state,
                                      const EffectiveChannels& eff,
                                      const SceneConfig& config, Cx rcs) {
  const double prefix = rate_prefix(config);
  const double rcs2 = std::norm(rcs);
  MetricPair out;
  out.smi_scores = RealGrid::Zero(state.power.rows(), state.power.cols());
  out.rate_scores = RealGrid::Zero(state.power.rows(), state.power.cols());
  for (int m = 0; m < state.power.rows(); ++m)
    for (int n = 0; n < state.power.cols(); ++n) {
      const double g2 = std::norm(eff.sensing(m, n));
      const double gain = rcs2 * g2 * g2 / config.noise_sensing;  // |a_t|^2 |G|^4 / s_r^2
      const double w = state.radar_mask(m, n) ? 1.0 : config.comm_sensing_weight;
      const double s = prefix * w * std::log2(1.0 + gain * state.power(m, n));
      out.smi_scores(m, n) = s;
      out.smi += s;
    }
  return out;
}

MetricPair communication_rate(const AllocationState& state,
                              const EffectiveChannels& eff,
                              const SceneConfig& config) {
  const double prefix = rate_prefix(config);
  MetricPair out;
  out.smi_scores = RealGrid::Zero(state.power.rows(), state.power.cols());
  out.rate_scores = RealGrid::Zero(state.power.rows(), state.power.cols());
  for (int m = 0; m < state.power.rows(); ++m)
    for (int n = 0; n < state.power.cols(); ++n) {
      if (state.radar_mask(m, n)) continue;
      const double snr = std::norm(eff.comm(m, n)) * state.power(m, n) / config.noise_comm;
      const double r = prefix * std::log2(1.0 + snr);
      out.rate_scores(m, n) = r;
      out.rate += r;
    }
  return out;
}

MetricPair evaluate_metrics(const AllocationState& state,
                            const EffectiveChannels& eff,
                            const SceneConfig& config, Cx rcs) {
  MetricPair smi = sensing_mutual_information(state, eff, config, rcs);
  MetricPair rate = communication_rate(state, eff, config);
  smi.rate = rate.rate;
  smi.rate_scores = std::move(rate.rate_scores);
  return smi;
}

std::pair<RealGrid, RealGrid> metric_gradients(const AllocationState& state,
                                               const EffectiveChannels& eff,
                                               const SceneConfig& config, Cx rcs) {
  const double prefix = rate_prefix(config) / kLn2;
  const double rcs2 = std::norm(rcs);
  RealGrid d_smi = RealGrid::Zero(state.power.rows(), state.power.cols());
  RealGrid d_rate = RealGrid::Zero(state.power.rows(), state.power.cols());
  for (int m = 0; m < state.power.rows(); ++m)
    for (int n = 0; n < state.power.cols(); ++n) {
      const double g2 = std::norm(eff.sensing(m, n));
      const double a = rcs2 * g2 * g2;
      const double w = state.radar_mask(m, n) ? 1.0 : config.comm_sensing_weight;
      d_smi(m, n) = prefix * w * a / (config.noise_sensing + a * state.power(m, n));
      if (!state.radar_mask(m, n)) {
        const double h = std::norm(eff.comm(m, n));
        d_rate(m, n) = prefix * h / (config.noise_comm + h * state.power(m, n));
      }
    }
  return {std::move(d_smi), std::move(d_rate)};
}

double augmented_lagrangian(const AllocationState& state,
                            const EffectiveChannels& eff,
                            const SceneConfig& config, Cx rcs, double lambda,
                            double rho, double gamma_c) {
  const MetricPair m = evaluate_metrics(state, eff, config, rcs);
  const double resid = m.rate - gamma_c;
  return m.smi + lambda * resid - 0.5 * rho * resid * resid;
}

}  // namespace bdisac
