#pragma once

#include <utility>

#include "bdisac/scene.hpp"
#include "bdisac/types.hpp"

namespace bdisac {

/// Full decision vector: RE assignment, per-RE power, BD signs.
struct AllocationState {
  IntGrid radar_mask;   // 1 = radar RE, 0 = communication RE
  RealGrid power;       // [W], entrywise in [0, P_max]
  SignMatrix bd_signs;  // K x M, entries +/-1

  void validate(const SceneConfig& config) const;
};

/// Per-RE score grids together with their totals.
struct MetricPair {
  double smi = 0;   // I_r
  double rate = 0;  // C_d
  RealGrid smi_scores;
  RealGrid rate_scores;
};

/// Sensing mutual information. Radar REs count at weight 1, communication
/// REs at weight eta_c. Returns the total and the per-RE score grid.
MetricPair sensing_mutual_information(const AllocationState& state,
                                      const EffectiveChannels& eff,
                                      const SceneConfig& config, Cx rcs);

/// Communication rate over communication REs only.
MetricPair communication_rate(const AllocationState& state,
                              const EffectiveChannels& eff,
                              const SceneConfig& config);

/// Both metrics in one pass.
MetricPair evaluate_metrics(const AllocationState& state,
                            const EffectiveChannels& eff,
                            const SceneConfig& config, Cx rcs);

/// Analytic per-RE derivatives of (I_r, C_d) with respect to power, under the
/// same delta_f / T_o prefix as the metrics themselves.
std::pair<RealGrid, RealGrid> metric_gradients(const AllocationState& state,
                                               const EffectiveChannels& eff,
                                               const SceneConfig& config, Cx rcs);

/// I_r + lambda (C_d - gamma_c) - rho/2 (C_d - gamma_c)^2.
double augmented_lagrangian(const AllocationState& state,
                            const EffectiveChannels& eff,
                            const SceneConfig& config, Cx rcs, double lambda,
                            double rho, double gamma_c);

}  // namespace bdisac
