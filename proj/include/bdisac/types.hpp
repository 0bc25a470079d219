#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace bdisac {

using Cx = std::complex<double>;

// Time-frequency grids are stored symbol-major: row m (OFDM symbol),
// column n (subcarrier).
using CxGrid = Eigen::MatrixXcd;
using RealGrid = Eigen::MatrixXd;
using IntGrid = Eigen::MatrixXi;

// BD modulation signs, one row per device, one column per symbol.
// Entries are exactly +1 or -1.
using SignMatrix = Eigen::MatrixXi;

using Rng = std::mt19937_64;

/// Which side of the Pareto trade-off is being maximized. SensingMax keeps a
/// rate floor (P1-style); RateMax keeps an SMI floor (P2-style).
enum class ProblemMode { SensingMax, RateMax };

constexpr double kSpeedOfLight = 299792458.0;

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

inline double sign_to_phase(int sign) { return (1 - sign) * (M_PI / 2.0); }
inline int phase_to_sign(double phase) { return phase > M_PI / 2.0 ? -1 : 1; }

}  // namespace bdisac
