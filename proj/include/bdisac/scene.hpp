#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdisac/types.hpp"

namespace bdisac {

/// OFDM time-frequency grid geometry. Subcarrier frequencies are baseband
/// offsets n * subcarrier_spacing; symbol start times are m * (T + T_G).
struct OfdmGrid {
  int num_symbols = 8;             // M
  int num_subcarriers = 128;       // N
  double subcarrier_spacing = 0;   // delta_f [Hz]; 1/T when left at 0
  double symbol_duration = 4.1470e-6;  // T [s]
  double guard_duration = 0;       // T_G [s]; T/8 when left at 0

  double total_symbol_duration() const { return symbol_duration + guard_duration; }
  std::vector<double> subcarrier_frequencies() const;
  std::vector<double> symbol_start_times() const;

  void apply_derived_defaults();
  void validate() const;
};

enum class RcsMode { DeterministicExpected, Sampled };
enum class Geometry { Monostatic, Bistatic };
enum class BdHost { Bs, User, Target };
enum class BdModulationMode { FixedSequence, Dynamic };

struct BdPopulation {
  int count = 50;                 // K
  double attenuation = 0.5;       // alpha_k, shared default
  double activity_min = 0.1;      // [m]
  double activity_max = 0.5;      // [m]
  BdHost host = BdHost::Bs;
  BdModulationMode modulation = BdModulationMode::Dynamic;

  std::vector<double> alphas() const { return std::vector<double>(count, attenuation); }
  void validate() const;
};

/// All physical and algorithmic scene parameters.
struct SceneConfig {
  OfdmGrid grid;
  BdPopulation bds;

  double total_power = 1e-3;       // P_t [W]
  double per_re_power_cap = 0;     // P_max [W]; 10x uniform share when 0
  double noise_sensing = 1e-11;    // sigma_r^2 [W]
  double noise_comm = 1e-9;        // sigma_c^2 [W]
  double rcs_variance = 1.0;       // sigma_t^2
  RcsMode rcs_mode = RcsMode::DeterministicExpected;

  double bs_target_distance = 8.0;   // D_ST [m]
  double bs_user_distance = 10.0;    // d_BU [m]
  double comm_sensing_weight = 0.5;  // eta_c in [0,1]

  std::uint64_t seed = 1;

  double eps_power = 0;     // eps_1, squared Frobenius power change; derived when 0
  double eps_re = 1.0;      // eps_2, RE changes per SCA sweep
  double eps_phase = 0.5;   // eps_3, phase sign changes
  double sca_delta = 1e-3;  // smoothed-l0 constant
  int max_outer = 30;

  Geometry geometry = Geometry::Monostatic;

  // Channel generation controls.
  int paths_per_link = 4;
  double path_loss_exponent = 2.0;
  double doppler_max = 200.0;        // [Hz]
  double delay_spread = 5e-8;        // excess-delay scale [s]
  double carrier_frequency = 28e9;   // [Hz], reference only

  double uniform_power() const {
    return total_power / (grid.num_symbols * grid.num_subcarriers);
  }
  double power_cap() const {
    return per_re_power_cap > 0 ? per_re_power_cap : 10.0 * uniform_power();
  }
  double eps_power_effective() const {
    return eps_power > 0 ? eps_power : 1e-12 * total_power * total_power;
  }
  /// Total bandwidth N * delta_f.
  double bandwidth() const { return grid.num_subcarriers * grid.subcarrier_spacing; }

  /// Normalizer mapping raw metrics onto bits/s/Hz spectral efficiency
  /// (per-RE average with the guard-interval overhead), the unit used in
  /// reports and for constraint levels at the CLI.
  double report_unit() const {
    return bandwidth() * grid.num_symbols * grid.subcarrier_spacing;
  }

  void apply_derived_defaults();
  void validate() const;
};

/// Multipath parameters of one link, all vectors sized path_count().
struct PathSet {
  std::vector<Cx> amplitude;
  std::vector<double> delay;    // [s], all < T_G
  std::vector<double> doppler;  // [Hz]
  int path_count() const { return static_cast<int>(amplitude.size()); }
};

/// Frequency responses of every link on the full grid.
struct ChannelSet {
  CxGrid bs_user;                  // H_bu
  CxGrid bs_target;                // H_st
  CxGrid target_rx;                // H_tr, bistatic only
  std::vector<CxGrid> bs_bd;       // H_bk
  std::vector<CxGrid> bd_user;     // H_ku
  std::vector<CxGrid> bs_bd_sense; // H_sk
  std::vector<CxGrid> bd_target;   // H_kt
  std::vector<CxGrid> bd_rx;       // H_kr, bistatic only

  int bd_count() const { return static_cast<int>(bs_bd.size()); }
  void validate(const OfdmGrid& grid) const;
};

/// Effective channels for a fixed BD sign assignment.
struct EffectiveChannels {
  CxGrid comm;     // H_c
  CxGrid sensing;  // G
};

/// Evaluates one multipath sum on the grid. Shared by the generator and the
/// direct-sum test oracles.
CxGrid evaluate_path_response(const PathSet& paths, const OfdmGrid& grid);

/// Draws every link's multipath channel. Deterministic for a given seed.
/// Throws std::invalid_argument when geometry forces a delay >= T_G.
ChannelSet generate_channels(const SceneConfig& config, std::uint64_t rng_seed);

struct ComposeOptions {
  // Test hook for the monostatic/bistatic cross-check: when false, bistatic
  // BD terms use H_sk in place of the H_st*H_tk cascade.
  bool bistatic_cascade = true;
};

/// Combines direct and BD-reflected paths into the effective channels for a
/// K x M sign assignment. Throws on shape mismatch.
EffectiveChannels compose_effective_channels(const ChannelSet& channels,
                                             const SignMatrix& signs,
                                             const SceneConfig& config,
                                             const ComposeOptions& opts = {});

/// Target RCS draw. DeterministicExpected returns sqrt(sigma_t^2) so that
/// |alpha_t|^2 equals the variance exactly.
Cx sample_rcs(const SceneConfig& config, Rng& rng);

/// Seed-deterministic fixed BD modulation sequence (+/-1 per device and symbol).
SignMatrix fixed_bd_signs(const SceneConfig& config);

/// A fully generated scene: immutable after construction.
struct Scene {
  SceneConfig config;
  ChannelSet channels;
  Cx rcs;
  SignMatrix fixed_signs;
};

Scene make_scene(const SceneConfig& config);

/// Same scene with every BD removed (K = 0).
Scene strip_bds(const Scene& scene);

}  // namespace bdisac
