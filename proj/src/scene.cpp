#include "bdisac/scene.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace bdisac {

namespace {

struct Point {
  double x = 0;
  double y = 0;
};

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

constexpr double kMinDistance = 0.05;  // [m], keeps the power law finite

}  // namespace

void OfdmGrid::apply_derived_defaults() {
  if (subcarrier_spacing <= 0 && symbol_duration > 0)
    subcarrier_spacing = 1.0 / symbol_duration;
  if (guard_duration <= 0) guard_duration = symbol_duration / 8.0;
}

void OfdmGrid::validate() const {
  if (num_symbols < 1) throw std::invalid_argument("num_symbols must be >= 1");
  if (num_subcarriers < 1) throw std::invalid_argument("num_subcarriers must be >= 1");
  if (subcarrier_spacing <= 0) throw std::invalid_argument("subcarrier_spacing must be > 0");
  if (symbol_duration <= 0) throw std::invalid_argument("symbol_duration must be > 0");
  if (guard_duration <= 0) throw std::invalid_argument("guard_duration must be > 0");
}

std::vector<double> OfdmGrid::subcarrier_frequencies() const {
  std::vector<double> f(num_subcarriers);
  for (int n = 0; n < num_subcarriers; ++n) f[n] = n * subcarrier_spacing;
  return f;
}

std::vector<double> OfdmGrid::symbol_start_times() const {
  std::vector<double> t(num_symbols);
  const double t_o = total_symbol_duration();
  for (int m = 0; m < num_symbols; ++m) t[m] = m * t_o;
  return t;
}

void BdPopulation::validate() const {
  if (count < 0) throw std::invalid_argument("bd_count must be >= 0");
  if (attenuation < 0 || attenuation > 1)
    throw std::invalid_argument("bd_attenuation must lie in [0, 1]");
  if (activity_min <= 0 || activity_max < activity_min)
    throw std::invalid_argument("bd_activity range must satisfy 0 < min <= max");
}

void SceneConfig::apply_derived_defaults() { grid.apply_derived_defaults(); }

void SceneConfig::validate() const {
  grid.validate();
  bds.validate();
  if (total_power <= 0) throw std::invalid_argument("total_power must be > 0");
  if (power_cap() <= 0) throw std::invalid_argument("per_re_power_cap must be > 0");
  if (noise_sensing <= 0) throw std::invalid_argument("noise_sensing must be > 0");
  if (noise_comm <= 0) throw std::invalid_argument("noise_comm must be > 0");
  if (rcs_variance < 0) throw std::invalid_argument("rcs_variance must be >= 0");
  if (comm_sensing_weight < 0 || comm_sensing_weight > 1)
    throw std::invalid_argument("comm_sensing_weight must lie in [0, 1]");
  if (sca_delta <= 0) throw std::invalid_argument("sca_delta must be > 0");
  if (bs_target_distance <= 0 || bs_user_distance <= 0)
    throw std::invalid_argument("distances must be > 0");
  if (paths_per_link < 1) throw std::invalid_argument("paths_per_link must be >= 1");
}

void ChannelSet::validate(const OfdmGrid& grid) const {
  auto check = [&](const CxGrid& g, const char* name) {
    if (g.rows() != grid.num_symbols || g.cols() != grid.num_subcarriers)
      throw std::invalid_argument(std::string(name) + ": grid shape mismatch");
    if (!g.allFinite()) throw std::invalid_argument(std::string(name) + ": non-finite entry");
  };
  check(bs_user, "bs_user");
  check(bs_target, "bs_target");
  if (target_rx.size() > 0) check(target_rx, "target_rx");
  for (int k = 0; k < bd_count(); ++k) {
    check(bs_bd[k], "bs_bd");
    check(bd_user[k], "bd_user");
    check(bs_bd_sense[k], "bs_bd_sense");
    check(bd_target[k], "bd_target");
    if (!bd_rx.empty()) check(bd_rx[k], "bd_rx");
  }
}

CxGrid evaluate_path_response(const PathSet& paths, const OfdmGrid& grid) {
  const auto freqs = grid.subcarrier_frequencies();
  const auto times = grid.symbol_start_times();
  CxGrid h = CxGrid::Zero(grid.num_symbols, grid.num_subcarriers);
  for (int l = 0; l < paths.path_count(); ++l) {
    for (int m = 0; m < grid.num_symbols; ++m) {
      const Cx doppler = std::exp(Cx(0, 2.0 * M_PI * paths.doppler[l] * times[m]));
      for (int n = 0; n < grid.num_subcarriers; ++n) {
        const Cx delay = std::exp(Cx(0, -2.0 * M_PI * freqs[n] * paths.delay[l]));
        h(m, n) += paths.amplitude[l] * delay * doppler;
      }
    }
  }
  return h;
}

namespace {

PathSet draw_link_paths(double dist, const SceneConfig& cfg, Rng& rng) {
  const double t_g = cfg.grid.guard_duration;
  const double base_delay = dist / kSpeedOfLight;
  if (base_delay >= t_g)
    throw std::invalid_argument("link delay exceeds the guard interval");

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> dop(-cfg.doppler_max, cfg.doppler_max);

  const int s = cfg.paths_per_link;
  PathSet paths;
  paths.amplitude.resize(s);
  paths.delay.resize(s);
  paths.doppler.resize(s);

  std::vector<double> excess(s, 0.0);
  std::vector<double> profile(s, 0.0);
  double profile_sum = 0;
  for (int l = 0; l < s; ++l) {
    if (l > 0) {
      double e = -cfg.delay_spread * std::log(std::max(unit(rng), 1e-12));
      e = std::min(e, 0.95 * (t_g - base_delay));
      excess[l] = e;
    }
    profile[l] = std::exp(-excess[l] / cfg.delay_spread);
    profile_sum += profile[l];
  }

  const double gain = std::pow(std::max(dist, kMinDistance), -cfg.path_loss_exponent);
  for (int l = 0; l < s; ++l) {
    const double var = gain * profile[l] / profile_sum;
    const double sigma = std::sqrt(var / 2.0);
    paths.amplitude[l] = Cx(sigma * gauss(rng), sigma * gauss(rng));
    paths.delay[l] = base_delay + excess[l];
    paths.doppler[l] = dop(rng);
  }
  return paths;
}

CxGrid draw_link(double dist, const SceneConfig& cfg, Rng& rng) {
  return evaluate_path_response(draw_link_paths(dist, cfg, rng), cfg.grid);
}

}  // namespace

ChannelSet generate_channels(const SceneConfig& config, std::uint64_t rng_seed) {
  config.validate();
  Rng rng(rng_seed);

  const Point bs{0, 0};
  const Point user{config.bs_user_distance, 0};
  const Point target{0, config.bs_target_distance};
  const Point rx{0, -config.bs_target_distance};  // bistatic sensing receiver

  const bool bistatic = config.geometry == Geometry::Bistatic;
  const int k_count = config.bds.count;

  Point host = bs;
  if (config.bds.host == BdHost::User) host = user;
  if (config.bds.host == BdHost::Target) host = target;

  std::uniform_real_distribution<double> radius(config.bds.activity_min,
                                                config.bds.activity_max);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::vector<Point> bd_pos(k_count);
  for (int k = 0; k < k_count; ++k) {
    const double r = radius(rng);
    const double a = angle(rng);
    bd_pos[k] = {host.x + r * std::cos(a), host.y + r * std::sin(a)};
  }

  ChannelSet ch;
  ch.bs_user = draw_link(distance(bs, user), config, rng);
  ch.bs_target = draw_link(distance(bs, target), config, rng);
  if (bistatic) ch.target_rx = draw_link(distance(target, rx), config, rng);

  ch.bs_bd.reserve(k_count);
  ch.bd_user.reserve(k_count);
  ch.bs_bd_sense.reserve(k_count);
  ch.bd_target.reserve(k_count);
  if (bistatic) ch.bd_rx.reserve(k_count);
  for (int k = 0; k < k_count; ++k) {
    ch.bs_bd.push_back(draw_link(distance(bs, bd_pos[k]), config, rng));
    ch.bd_user.push_back(draw_link(distance(bd_pos[k], user), config, rng));
    ch.bs_bd_sense.push_back(draw_link(distance(bs, bd_pos[k]), config, rng));
    ch.bd_target.push_back(draw_link(distance(bd_pos[k], target), config, rng));
    if (bistatic) ch.bd_rx.push_back(draw_link(distance(bd_pos[k], rx), config, rng));
  }
  return ch;
}

EffectiveChannels compose_effective_channels(const ChannelSet& channels,
                                             const SignMatrix& signs,
                                             const SceneConfig& config,
                                             const ComposeOptions& opts) {
  const int k_count = channels.bd_count();
  const int m_count = config.grid.num_symbols;
  if (signs.rows() != k_count || signs.cols() != m_count)
    throw std::invalid_argument("sign matrix shape must be K x M");

  const bool bistatic = config.geometry == Geometry::Bistatic;
  const auto alphas = config.bds.alphas();

  EffectiveChannels eff;
  eff.comm = channels.bs_user;
  eff.sensing = bistatic ? CxGrid(channels.bs_target.cwiseProduct(channels.target_rx))
                         : channels.bs_target;

  for (int k = 0; k < k_count; ++k) {
    const CxGrid comm_product = channels.bs_bd[k].cwiseProduct(channels.bd_user[k]);
    CxGrid sense_product;
    if (!bistatic) {
      sense_product = channels.bs_bd_sense[k].cwiseProduct(channels.bd_target[k]);
    } else if (opts.bistatic_cascade) {
      sense_product = channels.bs_target.cwiseProduct(channels.bd_target[k])
                          .cwiseProduct(channels.bd_rx[k]);
    } else {
      sense_product = channels.bs_bd_sense[k].cwiseProduct(channels.bd_rx[k]);
    }
    for (int m = 0; m < m_count; ++m) {
      const double b = alphas[k] * signs(k, m);
      eff.comm.row(m) += b * comm_product.row(m);
      eff.sensing.row(m) += b * sense_product.row(m);
    }
  }
  return eff;
}

Cx sample_rcs(const SceneConfig& config, Rng& rng) {
  if (config.rcs_mode == RcsMode::DeterministicExpected)
    return Cx(std::sqrt(config.rcs_variance), 0.0);
  std::normal_distribution<double> gauss(0.0, std::sqrt(config.rcs_variance / 2.0));
  return Cx(gauss(rng), gauss(rng));
}

SignMatrix fixed_bd_signs(const SceneConfig& config) {
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::bernoulli_distribution coin(0.5);
  SignMatrix signs(config.bds.count, config.grid.num_symbols);
  for (int k = 0; k < signs.rows(); ++k)
    for (int m = 0; m < signs.cols(); ++m) signs(k, m) = coin(rng) ? 1 : -1;
  return signs;
}

Scene make_scene(const SceneConfig& config) {
  SceneConfig cfg = config;
  cfg.apply_derived_defaults();
  cfg.validate();
  Scene scene;
  scene.config = cfg;
  scene.channels = generate_channels(cfg, cfg.seed);
  Rng rng(cfg.seed ^ 0xa02bdbf7bb3c0a7ULL);
  scene.rcs = sample_rcs(cfg, rng);
  scene.fixed_signs = fixed_bd_signs(cfg);
  return scene;
}

Scene strip_bds(const Scene& scene) {
  Scene out = scene;
  out.config.bds.count = 0;
  out.channels.bs_bd.clear();
  out.channels.bd_user.clear();
  out.channels.bs_bd_sense.clear();
  out.channels.bd_target.clear();
  out.channels.bd_rx.clear();
  out.fixed_signs = SignMatrix(0, scene.config.grid.num_symbols);
  return out;
}

}  // namespace bdisac
