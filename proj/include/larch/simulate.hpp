#pragma once

#include "larch/model.hpp"
#include "larch/noise.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace larch {

struct SimConfig {
  Index burn_in = 2000;
  /// Coefficient truncation for the long-memory family.
  Index trunc_K = 2000;
};

struct TrajectoryMeta {
  std::uint64_t seed = 0;
  Index burn_in = 0;
  Index trunc_K = 0;
  ModelSpec spec = ModelSpec::larch(1);
  Eigen::VectorXd theta;
  NoiseSpec noise = NoiseSpec::gaussian();
};

/// Observed series X_1..X_n (stored 0-based) plus how it was generated.
struct Trajectory {
  Eigen::VectorXd x;
  TrajectoryMeta meta;
  Index n() const { return x.size(); }
};

/**
 * Simulates X_t = xi_t (a_0 + sum_j a_j X_{t-j}) from zero initial lags and
 * discards the first cfg.burn_in values.
 *
 * LARCH(p) uses its p lags; GLARCH iterates the (X_t, sigma_t) recursion
 * directly; long memory truncates the lag sum at cfg.trunc_K. Parameters
 * outside Theta(2) are simulated anyway and reported through `warnings`.
 */
Trajectory simulate(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta,
                    const NoiseSpec& noise, Index n, const SimConfig& cfg, std::uint64_t seed,
                    std::vector<std::string>* warnings = nullptr);

/// E[X_0^2] = a0^2 sigma_xi2 / (1 - sigma_xi2 sum_{k>=1} a_k^2).
double theoretical_sigma2(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta,
                          double sigma_xi2);

/// E[X_0^4] of a LARCH(1) process with parameters (a0, a1).
double larch1_fourth_moment(double a0, double a1, double sigma_xi2, double mu4);

}  // namespace larch
