#pragma once

#include "larch/estimate.hpp"
#include "larch/model.hpp"
#include "larch/noise.hpp"
#include "larch/simulate.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace larch {

struct ExperimentConfig {
  ModelSpec spec = ModelSpec::larch(1);
  Eigen::VectorXd theta_star;
  NoiseSpec noise = NoiseSpec::gaussian();
  std::vector<Index> n_list;
  int reps = 1;
  std::vector<ContrastKind> estimators{ContrastKind::lav()};
  std::uint64_t master_seed = 0;
  SimConfig sim_cfg;
  FitOptions fit_opts;
  /// Map estimators that target the L2-normalized parameter back to the
  /// E|xi| = 1 parametrization of theta_star before taking errors.
  bool rescale = true;

  void validate() const;
};

struct McEntry {
  std::string estimator;
  Index n = 0;
  std::string coordinate;
  double rmse = 0.0;
  double mean_bias = 0.0;
  int reps_used = 0;
  int failures = 0;
};

/// Exact comparison; NaN entries (no usable replication) compare equal.
bool operator==(const McEntry& a, const McEntry& b);

struct McReport {
  std::vector<McEntry> entries;
  std::uint64_t master_seed = 0;
  std::string config_hash;
  int reps = 0;

  /// Entry for (estimator label, n, coordinate index); throws if absent.
  const McEntry& at(const std::string& estimator, Index n, Index coordinate) const;
  /// Per-coordinate RMSE vector for (estimator, n).
  Eigen::VectorXd rmse_of(const std::string& estimator, Index n) const;

  friend bool operator==(const McReport&, const McReport&) = default;
};

/// Seed of the trajectory used by replication r at sample size n.
std::uint64_t replication_seed(std::uint64_t master_seed, Index n, int r);

/// Per-coordinate sqrt(mean(errors^2)) over the rows of a reps x d matrix.
Eigen::VectorXd rmse(const Eigen::Ref<const Eigen::MatrixXd>& errors);

/**
 * Runs every (n, replication) pipeline: simulate on the replication's own
 * stream, fit each estimator on that same trajectory, optionally rescale,
 * record theta_hat - theta_star. Non-converged fits are counted as failures
 * and left out of the RMSE. The report does not depend on `threads`.
 */
McReport run_experiment(const ExperimentConfig& cfg, int threads = 1);

}  // namespace larch
