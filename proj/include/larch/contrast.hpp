#pragma once

#include "larch/model.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace larch {

// Truncated volatility predictor
//
//   M~_t = a_0 + sum_{j=1}^{min(t-1, K)} a_j X_{t-j},   t = 1..n,
//
// i.e. the LARCH(inf) volatility with pre-sample observations set to zero.
// Time indices in this header are 1-based where they refer to t; vectors are
// stored 0-based (x(t-1) holds X_t).

/// M~_t for a single t in 1..n, using coeffs.K as truncation.
template <class Scalar>
Scalar m_tilde(const CoefficientTable<Scalar>& coeffs, const Eigen::Ref<const Eigen::VectorXd>& x, Index t) {
  if (t < 1 || t > x.size())
    throw std::invalid_argument("m_tilde: t=" + std::to_string(t) + " outside 1.." + std::to_string(x.size()));
  Scalar m = coeffs.a(0);
  const Index top = std::min(t - 1, coeffs.K);
  for (Index j = 1; j <= top; ++j) m += coeffs.a(j) * Scalar(x(t - 1 - j));
  return m;
}

/// All of M~_1..M~_n by direct convolution with the coefficient table.
template <class Scalar>
VectorX<Scalar> m_tilde_path(const CoefficientTable<Scalar>& coeffs, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Index n = x.size();
  const Index K = std::min(coeffs.K, n - 1);
  const VectorX<Scalar> xs = x.template cast<Scalar>();
  // rev(K-j) = a_j so each lag sum is a contiguous dot product.
  const VectorX<Scalar> rev = coeffs.a.segment(1, K).reverse();
  VectorX<Scalar> m(n);
  for (Index t = 0; t < n; ++t) {
    const Index len = std::min(t, K);
    m(t) = coeffs.a(0) + rev.tail(len).dot(xs.segment(t - len, len));
  }
  return m;
}

/// Gradient rows dM~_t/dtheta (n x d) by direct convolution with coeffs.grads.
template <class Scalar>
MatrixX<Scalar> m_tilde_gradient_path(const CoefficientTable<Scalar>& coeffs,
                                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Index n = x.size();
  const Index d = coeffs.grads.rows();
  const Index K = std::min(coeffs.K, n - 1);
  const VectorX<Scalar> xs = x.template cast<Scalar>();
  const MatrixX<Scalar> rev = coeffs.grads.middleCols(1, K).rowwise().reverse();
  MatrixX<Scalar> g(n, d);
  for (Index t = 0; t < n; ++t) {
    const Index len = std::min(t, K);
    g.row(t) = coeffs.grads.col(0).transpose() +
               (rev.rightCols(len) * xs.segment(t - len, len)).transpose();
  }
  return g;
}

namespace detail {

// Number of lags that can matter for a sample of length n.
inline Index effective_truncation(const ModelSpec& spec, Index n, Index trunc_K) {
  if (spec.family() == Family::LarchP) return spec.p();
  return std::max(spec.order(), std::min(trunc_K, n - 1));
}

// The GLARCH recursion reproduces the zero-padded convolution exactly when
// no lag is cut off.
inline bool use_glarch_recursion(const ModelSpec& spec, Index n, Index trunc_K) {
  return spec.family() == Family::Glarch && trunc_K >= n - 1;
}

// S_t = sum_{k=1}^{t-1} a_k X_{t-k} satisfies P(B) S = C(B) X~ with zero start.
template <class Scalar>
VectorX<Scalar> glarch_series_path(const ModelSpec& spec, const VectorX<Scalar>& theta,
                                   const Eigen::Ref<const Eigen::VectorXd>& x) {
  const int p = spec.p(), q = spec.q();
  const Index n = x.size();
  VectorX<Scalar> s(n);
  for (Index t = 0; t < n; ++t) {
    Scalar v(0);
    for (int i = 1; i <= p && i <= t; ++i) v += theta(i) * Scalar(x(t - i));
    for (int j = 1; j <= q && j <= t; ++j) v += theta(p + j) * s(t - j);
    s(t) = v;
  }
  return s;
}

}  // namespace detail

/**
 * M~_1..M~_n for any family.
 *
 * LARCH(p) uses its p lags; GLARCH uses the exact O(n(p+q)) recursion when
 * trunc_K >= n-1 and the truncated convolution otherwise; long memory always
 * convolves with a_1..a_K, K = min(trunc_K, n-1).
 */
template <class Derived>
VectorX<typename Derived::Scalar> volatility_path(const ModelSpec& spec, const Eigen::MatrixBase<Derived>& theta_in,
                                                  const Eigen::Ref<const Eigen::VectorXd>& x, Index trunc_K) {
  using Scalar = typename Derived::Scalar;
  if (x.size() < 1) throw std::invalid_argument("volatility_path: empty sample");
  const VectorX<Scalar> theta = theta_in;
  if (detail::use_glarch_recursion(spec, x.size(), trunc_K)) {
    const Scalar a0 = theta(0) / detail::glarch_denominator(spec, theta);
    return (detail::glarch_series_path(spec, theta, x).array() + a0).matrix();
  }
  const auto coeffs = expand_coefficients(spec, theta, detail::effective_truncation(spec, x.size(), trunc_K));
  return m_tilde_path(coeffs, x);
}

/// dM~_t/dtheta as an n x d matrix, same truncation rules as volatility_path.
template <class Derived>
MatrixX<typename Derived::Scalar> volatility_gradient_path(const ModelSpec& spec,
                                                           const Eigen::MatrixBase<Derived>& theta_in,
                                                           const Eigen::Ref<const Eigen::VectorXd>& x,
                                                           Index trunc_K) {
  using Scalar = typename Derived::Scalar;
  if (x.size() < 1) throw std::invalid_argument("volatility_gradient_path: empty sample");
  const VectorX<Scalar> theta = theta_in;
  const Index n = x.size();
  if (!detail::use_glarch_recursion(spec, n, trunc_K)) {
    const auto coeffs = grad_coefficients(spec, theta, detail::effective_truncation(spec, n, trunc_K));
    return m_tilde_gradient_path(coeffs, x);
  }
  // Differentiate S_t = sum_i c_i X~_{t-i} + sum_j d_j S_{t-j} coordinatewise.
  const int p = spec.p(), q = spec.q();
  const Index d = spec.dim();
  const VectorX<Scalar> s = detail::glarch_series_path(spec, theta, x);
  const Scalar denom = detail::glarch_denominator(spec, theta);
  MatrixX<Scalar> g = MatrixX<Scalar>::Zero(n, d);
  for (Index t = 0; t < n; ++t) {
    for (int i = 1; i <= p && i <= t; ++i) g(t, i) += Scalar(x(t - i));
    for (int j = 1; j <= q && j <= t; ++j) {
      g.row(t) += theta(p + j) * g.row(t - j);
      g(t, p + j) += s(t - j);
    }
  }
  g.col(0).setConstant(Scalar(1) / denom);
  for (int j = 1; j <= q; ++j) g.col(p + j).array() += theta(0) / (denom * denom);
  return g;
}

// Contrast kernels on a precomputed volatility path.

template <class Scalar>
Scalar lav_loss(const Eigen::Ref<const Eigen::VectorXd>& x, const VectorX<Scalar>& m) {
  return (x.cwiseAbs().template cast<Scalar>().array() - m.array().abs()).square().mean();
}

template <class Scalar>
Scalar sqml_loss(const Eigen::Ref<const Eigen::VectorXd>& x, const VectorX<Scalar>& m, Scalar h) {
  using std::log;
  const auto denom = (m.array().square() + h).eval();
  const auto num = (x.template cast<Scalar>().array().square() + h);
  return (num / denom + denom.log()).mean();
}

template <class Scalar>
Scalar wls_loss(const Eigen::Ref<const Eigen::VectorXd>& x, const VectorX<Scalar>& m,
                const Eigen::Ref<const Eigen::VectorXd>& weights) {
  const auto resid = (x.template cast<Scalar>().array().square() - m.array().square()).eval();
  return (weights.template cast<Scalar>().array() * resid.square()).mean();
}

/// (1/n) sum_t (|X_t| - |M~_t|)^2.
template <class Derived>
typename Derived::Scalar lav_contrast(const ModelSpec& spec, const Eigen::MatrixBase<Derived>& theta,
                                      const Eigen::Ref<const Eigen::VectorXd>& x, Index trunc_K) {
  return lav_loss(x, volatility_path(spec, theta, x, trunc_K));
}

/// (1/n) sum_t [(h + X_t^2)/(h + M~_t^2) + log(h + M~_t^2)].
template <class Derived>
typename Derived::Scalar sqml_contrast(const ModelSpec& spec, const Eigen::MatrixBase<Derived>& theta,
                                       const Eigen::Ref<const Eigen::VectorXd>& x,
                                       typename Derived::Scalar h, Index trunc_K) {
  if (!(h > 0)) throw std::invalid_argument("smoothing parameter h must be positive");
  return sqml_loss(x, volatility_path(spec, theta, x, trunc_K), h);
}

/// (1/n) sum_t tau_t (X_t^2 - M~_t^2)^2.
template <class Derived>
typename Derived::Scalar wls_contrast(const ModelSpec& spec, const Eigen::MatrixBase<Derived>& theta,
                                      const Eigen::Ref<const Eigen::VectorXd>& x,
                                      const Eigen::Ref<const Eigen::VectorXd>& weights, Index trunc_K) {
  if (weights.size() != x.size())
    throw std::invalid_argument("weights have length " + std::to_string(weights.size()) + ", sample has " +
                                std::to_string(x.size()));
  return wls_loss(x, volatility_path(spec, theta, x, trunc_K), weights);
}

/// (1/n) sum_t X_t^2 / max(M~_t^2, eps_guard), with the number of guarded terms.
struct RatioVariance {
  double value = 0.0;
  Index guard_hits = 0;
};
RatioVariance ratio_variance(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& m,
                             double eps_guard);

/// Order statistic of |X| at 1-based index ceil(0.9 n).
double abs_quantile90(const Eigen::Ref<const Eigen::VectorXd>& x);

/**
 * Down-weighting tau_t = max(1, (1/C) sum_{i=1}^{order} |X_{t-i}| 1{|X_{t-i}| > C})^-4
 * with C the 90% quantile of |X| and pre-sample values zero. An empty order
 * means the whole available past (i = 1..t-1).
 */
Eigen::VectorXd compute_weights(const Eigen::Ref<const Eigen::VectorXd>& x, std::optional<Index> order);

/// Weights with the family's lag rule: p for LARCH(p)/GLARCH(p,q), full past for long memory.
Eigen::VectorXd compute_weights(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace larch
