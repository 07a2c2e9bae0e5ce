#include "larch/simulate.hpp"

#include <algorithm>
#include <stdexcept>

namespace larch {

namespace {

void simulate_larch(const Eigen::VectorXd& theta, int p, Eigen::Ref<Eigen::VectorXd> buf) {
  // buf holds xi on entry and X on exit.
  const Index total = buf.size();
  for (Index t = 0; t < total; ++t) {
    double vol = theta(0);
    for (int j = 1; j <= p && j <= t; ++j) vol += theta(j) * buf(t - j);
    buf(t) *= vol;
  }
}

void simulate_glarch(const Eigen::VectorXd& theta, int p, int q, Eigen::Ref<Eigen::VectorXd> buf) {
  const Index total = buf.size();
  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(total);
  for (Index t = 0; t < total; ++t) {
    double s = theta(0);
    for (int i = 1; i <= p && i <= t; ++i) s += theta(i) * buf(t - i);
    for (int j = 1; j <= q && j <= t; ++j) s += theta(p + j) * sigma(t - j);
    sigma(t) = s;
    buf(t) *= s;
  }
}

void simulate_truncated(const Eigen::VectorXd& a, Eigen::Ref<Eigen::VectorXd> buf) {
  const Index K = a.size() - 1;
  // Reversed slopes so that each lag sum is one contiguous dot product:
  // rev(K - j) = a_j, paired with buf(t - j).
  const Eigen::VectorXd rev = a.tail(K).reverse();
  const Index total = buf.size();
  for (Index t = 0; t < total; ++t) {
    const Index m = std::min(t, K);
    const double vol = a(0) + rev.tail(m).dot(buf.segment(t - m, m));
    buf(t) *= vol;
  }
}

}  // namespace

Trajectory simulate(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta,
                    const NoiseSpec& noise, Index n, const SimConfig& cfg, std::uint64_t seed,
                    std::vector<std::string>* warnings) {
  if (n < 1) throw std::invalid_argument("simulate needs n >= 1");
  if (cfg.burn_in < 0) throw std::invalid_argument("burn_in must be >= 0");
  if (cfg.trunc_K < spec.order()) throw std::invalid_argument("trunc_K is below the family order");
  validate_params(spec, theta);
  if (!is_stable(spec, theta))
    throw std::domain_error("GLARCH volatility recursion is unstable (sum |d_j| >= 1)");
  if (warnings) {
    const DomainCheck c2 = in_theta2(spec, theta, noise.sigma_xi2);
    if (!c2.inside)
      warnings->push_back("parameters outside Theta(2): margin " + std::to_string(c2.margin));
  }

  const Index total = cfg.burn_in + n;
  Eigen::VectorXd buf = sample_noise(noise, seed, total);
  const Eigen::VectorXd th = theta;
  switch (spec.family()) {
    case Family::LarchP:
      simulate_larch(th, spec.p(), buf);
      break;
    case Family::Glarch:
      simulate_glarch(th, spec.p(), spec.q(), buf);
      break;
    case Family::LongMemory:
      simulate_truncated(expand_coefficients(spec, th, cfg.trunc_K).a, buf);
      break;
  }

  Trajectory out;
  out.x = buf.tail(n);
  out.meta = {seed, cfg.burn_in, cfg.trunc_K, spec, th, noise};
  return out;
}

double theoretical_sigma2(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta,
                          double sigma_xi2) {
  validate_params(spec, theta);
  const double a0 = expand_coefficients(spec, theta, spec.order()).a(0);
  const double denom = 1.0 - sigma_xi2 * slope_sums(spec, theta).sum2;
  if (!(denom > 0.0)) throw std::domain_error("parameters outside Theta(2): E[X^2] is infinite");
  return a0 * a0 * sigma_xi2 / denom;
}

double larch1_fourth_moment(double a0, double a1, double sigma_xi2, double mu4) {
  const double b2 = sigma_xi2 * a1 * a1;
  const double d2 = 1.0 - b2;
  const double d4 = 1.0 - mu4 * a1 * a1 * a1 * a1;
  if (!(d2 > 0.0) || !(d4 > 0.0)) throw std::domain_error("LARCH(1) fourth moment is infinite");
  const double a02 = a0 * a0;
  return a02 * a02 * mu4 * (1.0 + 5.0 * b2) / (d2 * d4);
}

}  // namespace larch
