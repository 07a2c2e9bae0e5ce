#pragma once

#include <Eigen/Core>

#include <functional>

namespace larch {

/// Axis-aligned box [lo, hi] defining the compact parameter set. A coordinate
/// with lo == hi is held fixed by the optimizer.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Eigen::Index dim() const { return lo.size(); }
  void validate() const;
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd project(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct SimplexOptions {
  /// Stop when f_worst - f_best <= tol |f_best| or the simplex diameter is
  /// below tol (1 + |x_best|). Both are invariant to rescaling f by a power of two.
  double tol = 1e-10;
  int max_iter = 2000;
  /// Initial edge length as a fraction of the box width.
  double initial_step = 0.1;
  /// Fresh simplices built around a converged point before accepting it.
  int restarts = 2;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double f_start = 0.0;
  bool converged = false;
  int evals = 0;
  int iterations = 0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Nelder-Mead simplex search; every trial point is projected onto the box.
/// Non-finite objective values are treated as +inf.
SimplexResult minimize_in_box(const Objective& f, const Eigen::Ref<const Eigen::VectorXd>& x0, const Box& box,
                              const SimplexOptions& opts = {});

}  // namespace larch
