#pragma once

#include "larch/model.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

namespace larch {

/// Plug-in estimates of Gamma_1 = E[dM dM^T] and Gamma_2 = E[M^2 dM dM^T].
struct GammaHats {
  Eigen::MatrixXd gamma1;
  Eigen::MatrixXd gamma2;
};

/// Gamma_1 = (1/n) sum_t G_t G_t^T, Gamma_2 = (1/n) sum_t M~_t^2 G_t G_t^T,
/// with G_t = dM~_t/dtheta at theta_hat.
GammaHats gamma_hats(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                     const Eigen::Ref<const Eigen::VectorXd>& x, Index trunc_K);

struct SigmaXiHat {
  double value = 0.0;
  /// Terms where M~_t^2 fell below the guard.
  Index guard_hits = 0;
};

/// (1/n) sum_t X_t^2 / max(M~_t^2, eps_guard) at theta_hat.
SigmaXiHat sigma_xi_hat(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                        const Eigen::Ref<const Eigen::VectorXd>& x, Index trunc_K, double eps_guard = 1e-8);

/// Thrown when Gamma_1 is too ill-conditioned to invert.
class SingularMatrixError : public std::domain_error {
 public:
  SingularMatrixError(const std::string& what, double condition)
      : std::domain_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

struct SandwichCovariance {
  Eigen::MatrixXd gamma1_hat;
  Eigen::MatrixXd gamma2_hat;
  double sigma_xi2_hat = 0.0;
  /// (sigma_xi2 - 1) Gamma_1^-1 Gamma_2 Gamma_1^-1 / n
  Eigen::MatrixXd cov;
  Index n = 0;
  /// Spectral condition number of Gamma_1.
  double condition = 0.0;
};

inline constexpr double kMaxCondition = 1e12;

SandwichCovariance asymptotic_cov(const Eigen::Ref<const Eigen::MatrixXd>& gamma1_hat,
                                  const Eigen::Ref<const Eigen::MatrixXd>& gamma2_hat, double sigma_xi2_hat,
                                  Index n);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// theta_i +- z_{(1+level)/2} sqrt(cov_ii).
std::vector<Interval> confidence_intervals(const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                                           const Eigen::Ref<const Eigen::MatrixXd>& cov, double level);

/// Coordinates that scale with ||xi||_2 when switching from E|xi| = 1 to
/// E xi^2 = 1: every coordinate except GLARCH d_j and the long-memory d.
std::vector<bool> l2_rescale_mask(const ModelSpec& spec);

/// Multiplies the masked coordinates by ||xi||_2 (L1 -> L2 parametrization).
Eigen::VectorXd rescale_to_l2(const Eigen::Ref<const Eigen::VectorXd>& theta, double sigma_xi,
                              const std::vector<bool>& mask);

/// Inverse of rescale_to_l2.
Eigen::VectorXd rescale_from_l2(const Eigen::Ref<const Eigen::VectorXd>& theta, double sigma_xi,
                                const std::vector<bool>& mask);

}  // namespace larch
