#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace larch {

using Index = Eigen::Index;

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Parametric family of the LARCH(inf) coefficients a_k(theta).
enum class Family { LarchP, Glarch, LongMemory };

/**
 * Which coefficient family is in use, together with its orders.
 *
 * Parameter layout (dim() entries):
 *   LarchP(p)    (a0, a1, ..., ap)
 *   Glarch(p,q)  (c0, c1, ..., cp, d1, ..., dq)
 *   LongMemory   (a0, c, d)      with a_k = c * k^(d-1)
 */
class ModelSpec {
 public:
  static ModelSpec larch(int p);
  static ModelSpec glarch(int p, int q);
  static ModelSpec long_memory();

  Family family() const { return family_; }
  int p() const { return p_; }
  int q() const { return q_; }
  Index dim() const;
  /// Smallest admissible coefficient truncation.
  Index order() const;
  /// Short name used in JSON and reports: "larch", "glarch", "longmemory".
  std::string family_name() const;
  /// Names of the parameter coordinates, e.g. {"c0","c1","d1"}.
  std::vector<std::string> coordinate_names() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  ModelSpec(Family f, int p, int q) : family_(f), p_(p), q_(q) {}
  Family family_;
  int p_;
  int q_;
};

/// Throws std::invalid_argument unless theta has the right length, a positive
/// intercept and (long memory) a memory parameter in [0, 1/2).
void validate_params(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta);

/// Sufficient stability condition for the GLARCH volatility recursion:
/// sum_j |d_j| < 1. Always true for the other families.
bool is_stable(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta);

/// a_0..a_K and (optionally) the d x (K+1) matrix of their gradients.
template <class Scalar>
struct CoefficientTable {
  VectorX<Scalar> a;
  MatrixX<Scalar> grads;  // empty unless requested
  Index K = 0;
};

namespace detail {

template <class Derived>
void check_expansion_args(const ModelSpec& spec, const Eigen::MatrixBase<Derived>& theta, Index K) {
  if (theta.size() != spec.dim())
    throw std::invalid_argument("parameter vector has length " + std::to_string(theta.size()) +
                                ", expected " + std::to_string(spec.dim()));
  if (K < spec.order())
    throw std::invalid_argument("truncation K=" + std::to_string(K) +
                                " is below the family order " + std::to_string(spec.order()));
}

template <class Scalar>
Scalar glarch_denominator(const ModelSpec& spec, const VectorX<Scalar>& theta) {
  Scalar dsum(0);
  for (int j = 1; j <= spec.q(); ++j) dsum += theta(spec.p() + j);
  const Scalar denom = Scalar(1) - dsum;
  if (denom == Scalar(0))
    throw std::domain_error("GLARCH intercept undefined: sum of d_j equals 1");
  return denom;
}

}  // namespace detail

/**
 * Expands theta into the LARCH(inf) coefficients a_0..a_K.
 *
 * GLARCH coefficients are the power-series coefficients of C(x)/P(x) with
 * C(x) = sum c_i x^i and P(x) = 1 - sum d_j x^j, i.e.
 *   a_k = c_k 1{k<=p} + sum_j d_j a_{k-j},   a_0 = c_0 / (1 - sum d_j).
 */
template <class Derived>
CoefficientTable<typename Derived::Scalar> expand_coefficients(const ModelSpec& spec,
                                                               const Eigen::MatrixBase<Derived>& theta_in,
                                                               Index K) {
  using Scalar = typename Derived::Scalar;
  using std::pow;
  detail::check_expansion_args(spec, theta_in, K);
  const VectorX<Scalar> theta = theta_in;

  CoefficientTable<Scalar> out;
  out.K = K;
  out.a = VectorX<Scalar>::Zero(K + 1);
  switch (spec.family()) {
    case Family::LarchP:
      out.a.head(spec.p() + 1) = theta;
      break;
    case Family::Glarch: {
      const int p = spec.p(), q = spec.q();
      out.a(0) = theta(0) / detail::glarch_denominator(spec, theta);
      for (Index k = 1; k <= K; ++k) {
        Scalar ak = k <= p ? theta(k) : Scalar(0);
        for (int j = 1; j <= q && j < k; ++j) ak += theta(p + j) * out.a(k - j);
        out.a(k) = ak;
      }
      break;
    }
    case Family::LongMemory: {
      const Scalar c = theta(1), d = theta(2);
      out.a(0) = theta(0);
      for (Index k = 1; k <= K; ++k) out.a(k) = c * pow(Scalar(k), d - Scalar(1));
      break;
    }
  }
  return out;
}

/// As expand_coefficients, with grads(i, k) = d a_k / d theta_i filled in analytically.
template <class Derived>
CoefficientTable<typename Derived::Scalar> grad_coefficients(const ModelSpec& spec,
                                                             const Eigen::MatrixBase<Derived>& theta_in,
                                                             Index K) {
  using Scalar = typename Derived::Scalar;
  using std::log;
  using std::pow;
  auto out = expand_coefficients(spec, theta_in, K);
  const VectorX<Scalar> theta = theta_in;
  const Index d = spec.dim();
  out.grads = MatrixX<Scalar>::Zero(d, K + 1);
  auto& g = out.grads;

  switch (spec.family()) {
    case Family::LarchP:
      for (Index k = 0; k < d; ++k) g(k, k) = Scalar(1);
      break;
    case Family::Glarch: {
      const int p = spec.p(), q = spec.q();
      const Scalar denom = detail::glarch_denominator(spec, theta);
      g(0, 0) = Scalar(1) / denom;
      for (int j = 1; j <= q; ++j) g(p + j, 0) = theta(0) / (denom * denom);
      // Differentiating the recursion gives the same recursion on the gradient,
      // driven by e_{c_k} and by a_{k-j} in the d_j direction.
      for (Index k = 1; k <= K; ++k) {
        if (k <= p) g(k, k) = Scalar(1);
        for (int j = 1; j <= q && j < k; ++j) {
          g.col(k) += theta(p + j) * g.col(k - j);
          g(p + j, k) += out.a(k - j);
        }
      }
      break;
    }
    case Family::LongMemory: {
      const Scalar c = theta(1), dm = theta(2);
      g(0, 0) = Scalar(1);
      for (Index k = 1; k <= K; ++k) {
        const Scalar pk = pow(Scalar(k), dm - Scalar(1));
        g(1, k) = pk;
        g(2, k) = c * log(Scalar(k)) * pk;
      }
      break;
    }
  }
  return out;
}

/// sum_{j>=1} a_j^2 and sum_{j>=1} a_j^4 over the full (untruncated) series.
struct SlopeSums {
  double sum2 = 0.0;
  double sum4 = 0.0;
  /// Bound on the neglected remainder of sum2 (0 for finite families).
  double error_bound = 0.0;
};

/// Infinite slope sums. LarchP exactly; GLARCH by running the recursion until
/// the geometric tail is below machine precision (+inf when sum|d_j| >= 1);
/// long memory by a partial sum plus an Euler-Maclaurin tail.
SlopeSums slope_sums(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta);

struct DomainCheck {
  bool inside = false;
  double margin = 0.0;
};

/// sigma_xi2 * sum_{j>=1} a_j^2 < 1 (finite second moment).
DomainCheck in_theta2(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta,
                      double sigma_xi2);

/// mu4 * sum a_j^4 + 6 sigma_xi2 * sum a_j^2 < 1 (finite fourth moment).
DomainCheck in_theta4(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta,
                      double sigma_xi2, double mu4);

}  // namespace larch
