#pragma once

#include "larch/contrast.hpp"
#include "larch/model.hpp"
#include "larch/optimize.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>

namespace larch {

/// Which contrast a fit minimizes.
struct ContrastKind {
  enum class Type { Lav, SmoothedQml, WeightedLs };

  static ContrastKind lav() { return {Type::Lav, 0.0}; }
  static ContrastKind sqml(double h);
  static ContrastKind wls() { return {Type::WeightedLs, 0.0}; }

  Type type = Type::Lav;
  double h = 0.0;  // SmoothedQml only

  /// "lav", "wls" or "sqml(h)".
  std::string label() const;
  /// Estimates the L2-normalized parameter (E xi^2 = 1) rather than the L1 one.
  bool targets_l2() const { return type != Type::Lav; }

  friend bool operator==(const ContrastKind&, const ContrastKind&) = default;
};

struct FitOptions {
  Box box;
  int starts = 8;
  double tol = 1e-10;
  int max_iter = 2000;
  /// Lag truncation of M~; defaults to default_trunc_K(spec, n).
  std::optional<Index> trunc_K;
  /// WLS weights tau_1..tau_n; computed from the data when empty.
  std::optional<Eigen::VectorXd> weights;
};

/// Intercept in [0.01, 20]; LARCH/GLARCH slopes in [-0.95, 0.95];
/// long memory c in [-2, 2], d in [0, 0.45].
Box default_box(const ModelSpec& spec);
FitOptions default_fit_options(const ModelSpec& spec);

/// Long memory: min(n-1, 5000). LARCH/GLARCH: n-1 (exact, no lag cut off).
Index default_trunc_K(const ModelSpec& spec, Index n);

struct EstimateResult {
  Eigen::VectorXd theta_hat;
  double contrast = 0.0;
  ContrastKind kind;
  bool converged = false;
  int n_evals = 0;
  int start_index = 0;
  Index trunc_K = 0;
  /// Advisory Theta(2) check at theta_hat with the plug-in noise variance.
  DomainCheck theta2;
};

/// Contrast of `kind` as a function of theta, with data-dependent pieces
/// (weights) computed once.
Objective make_objective(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                         const ContrastKind& kind, Index trunc_K,
                         const std::optional<Eigen::VectorXd>& weights = std::nullopt);

/**
 * Best local minimizer over opts.starts Latin-hypercube starts, each refined
 * by a box-projected Nelder-Mead search. Deterministic given the seed; ties
 * go to the lowest start index.
 */
EstimateResult fit(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x, const ContrastKind& kind,
                   const FitOptions& opts, std::uint64_t seed);

/// Latin-hypercube sample of `count` points in the box.
Eigen::MatrixXd latin_hypercube(const Box& box, int count, std::uint64_t seed);

}  // namespace larch
