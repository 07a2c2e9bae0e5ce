#include "larch/infer.hpp"

#include "larch/contrast.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <sstream>

namespace larch {

GammaHats gamma_hats(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                     const Eigen::Ref<const Eigen::VectorXd>& x, Index trunc_K) {
  validate_params(spec, theta_hat);
  const Eigen::VectorXd th = theta_hat;
  const Eigen::VectorXd m = volatility_path(spec, th, x, trunc_K);
  const Eigen::MatrixXd g = volatility_gradient_path(spec, th, x, trunc_K);
  const double n = static_cast<double>(x.size());

  GammaHats out;
  out.gamma1 = Eigen::MatrixXd(g.cols(), g.cols());
  out.gamma1.setZero().selfadjointView<Eigen::Lower>().rankUpdate(g.transpose(), 1.0 / n);
  const Eigen::MatrixXd gw = m.asDiagonal() * g;
  out.gamma2 = Eigen::MatrixXd(g.cols(), g.cols());
  out.gamma2.setZero().selfadjointView<Eigen::Lower>().rankUpdate(gw.transpose(), 1.0 / n);
  out.gamma1 = out.gamma1.selfadjointView<Eigen::Lower>();
  out.gamma2 = out.gamma2.selfadjointView<Eigen::Lower>();
  return out;
}

SigmaXiHat sigma_xi_hat(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                        const Eigen::Ref<const Eigen::VectorXd>& x, Index trunc_K, double eps_guard) {
  validate_params(spec, theta_hat);
  const Eigen::VectorXd th = theta_hat;
  const RatioVariance r = ratio_variance(x, volatility_path(spec, th, x, trunc_K), eps_guard);
  return {r.value, r.guard_hits};
}

SandwichCovariance asymptotic_cov(const Eigen::Ref<const Eigen::MatrixXd>& gamma1_hat,
                                  const Eigen::Ref<const Eigen::MatrixXd>& gamma2_hat, double sigma_xi2_hat,
                                  Index n) {
  if (gamma1_hat.rows() != gamma1_hat.cols() || gamma2_hat.rows() != gamma2_hat.cols() ||
      gamma1_hat.rows() != gamma2_hat.rows())
    throw std::invalid_argument("asymptotic_cov: Gamma matrices must be square and of equal size");
  if (n < 1) throw std::invalid_argument("asymptotic_cov: n must be positive");

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gamma1_hat);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double lmax = lambda.cwiseAbs().maxCoeff();
  const double lmin = lambda.minCoeff();
  const double condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxCondition)) {
    std::ostringstream os;
    os << "Gamma_1 is singular or ill-conditioned (condition number " << condition << ")";
    throw SingularMatrixError(os.str(), condition);
  }
  const Eigen::MatrixXd inv = eig.eigenvectors() * lambda.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();

  SandwichCovariance out;
  out.gamma1_hat = gamma1_hat;
  out.gamma2_hat = gamma2_hat;
  out.sigma_xi2_hat = sigma_xi2_hat;
  out.n = n;
  out.condition = condition;
  const Eigen::MatrixXd sandwich = inv * gamma2_hat * inv;
  out.cov = (sigma_xi2_hat - 1.0) / static_cast<double>(n) * (0.5 * (sandwich + sandwich.transpose()));
  return out;
}

std::vector<Interval> confidence_intervals(const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                                           const Eigen::Ref<const Eigen::MatrixXd>& cov, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  if (cov.rows() != theta_hat.size() || cov.cols() != theta_hat.size())
    throw std::invalid_argument("covariance does not match the parameter dimension");
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 * (1.0 + level));
  std::vector<Interval> out;
  for (Index i = 0; i < theta_hat.size(); ++i) {
    if (cov(i, i) < 0.0)
      throw std::domain_error("negative variance on the covariance diagonal (coordinate " + std::to_string(i) + ")");
    const double half = z * std::sqrt(cov(i, i));
    out.push_back({theta_hat(i) - half, theta_hat(i) + half});
  }
  return out;
}

std::vector<bool> l2_rescale_mask(const ModelSpec& spec) {
  std::vector<bool> mask(spec.dim(), true);
  if (spec.family() == Family::Glarch)
    for (int j = 1; j <= spec.q(); ++j) mask[spec.p() + j] = false;
  if (spec.family() == Family::LongMemory) mask[2] = false;
  return mask;
}

Eigen::VectorXd rescale_to_l2(const Eigen::Ref<const Eigen::VectorXd>& theta, double sigma_xi,
                              const std::vector<bool>& mask) {
  if (!(sigma_xi > 0.0)) throw std::invalid_argument("rescale: ||xi||_2 must be positive");
  if (static_cast<Index>(mask.size()) != theta.size()) throw std::invalid_argument("rescale: mask size mismatch");
  Eigen::VectorXd out = theta;
  for (Index i = 0; i < out.size(); ++i)
    if (mask[i]) out(i) *= sigma_xi;
  return out;
}

Eigen::VectorXd rescale_from_l2(const Eigen::Ref<const Eigen::VectorXd>& theta, double sigma_xi,
                                const std::vector<bool>& mask) {
  if (!(sigma_xi > 0.0)) throw std::invalid_argument("rescale: ||xi||_2 must be positive");
  return rescale_to_l2(theta, 1.0 / sigma_xi, mask);
}

}  // namespace larch
