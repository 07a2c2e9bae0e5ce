#include "larch/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace larch {

ModelSpec ModelSpec::larch(int p) {
  if (p < 1) throw std::invalid_argument("LARCH order p must be >= 1");
  return ModelSpec(Family::LarchP, p, 0);
}

ModelSpec ModelSpec::glarch(int p, int q) {
  if (p < 1 || q < 1) throw std::invalid_argument("GLARCH orders p, q must be >= 1");
  return ModelSpec(Family::Glarch, p, q);
}

ModelSpec ModelSpec::long_memory() { return ModelSpec(Family::LongMemory, 0, 0); }

Index ModelSpec::dim() const {
  switch (family_) {
    case Family::LarchP: return p_ + 1;
    case Family::Glarch: return p_ + q_ + 1;
    case Family::LongMemory: return 3;
  }
  return 0;
}

Index ModelSpec::order() const {
  switch (family_) {
    case Family::LarchP: return p_;
    case Family::Glarch: return std::max(p_, q_);
    case Family::LongMemory: return 1;
  }
  return 0;
}

std::string ModelSpec::family_name() const {
  switch (family_) {
    case Family::LarchP: return "larch";
    case Family::Glarch: return "glarch";
    case Family::LongMemory: return "longmemory";
  }
  return {};
}

std::vector<std::string> ModelSpec::coordinate_names() const {
  std::vector<std::string> names;
  switch (family_) {
    case Family::LarchP:
      for (int i = 0; i <= p_; ++i) names.push_back("a" + std::to_string(i));
      break;
    case Family::Glarch:
      for (int i = 0; i <= p_; ++i) names.push_back("c" + std::to_string(i));
      for (int j = 1; j <= q_; ++j) names.push_back("d" + std::to_string(j));
      break;
    case Family::LongMemory:
      names = {"a0", "c", "d"};
      break;
  }
  return names;
}

void validate_params(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != spec.dim())
    throw std::invalid_argument("parameter vector has length " + std::to_string(theta.size()) +
                                ", expected " + std::to_string(spec.dim()));
  if (!theta.allFinite()) throw std::invalid_argument("parameter vector is not finite");
  if (!(theta(0) > 0.0)) throw std::invalid_argument("intercept must be strictly positive");
  if (spec.family() == Family::LongMemory && !(theta(2) >= 0.0 && theta(2) < 0.5))
    throw std::invalid_argument("memory parameter d must lie in [0, 1/2)");
}

bool is_stable(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (spec.family() != Family::Glarch) return true;
  return theta.tail(spec.q()).cwiseAbs().sum() < 1.0;
}

namespace {

// sum_{j>N} C j^{-s} by Euler-Maclaurin, s > 1. The last included
// correction term doubles as the error bound.
struct Tail {
  double value;
  double bound;
};

Tail power_tail(double C, double s, double N) {
  const double f = std::pow(N, -s);
  const double integral = std::pow(N, 1.0 - s) / (s - 1.0);
  const double f1 = -s * f / N;
  const double f3 = -s * (s + 1.0) * (s + 2.0) * f / (N * N * N);
  const double value = integral - 0.5 * f - f1 / 12.0 + f3 / 720.0;
  return {C * value, std::abs(C * f3 / 720.0)};
}

SlopeSums long_memory_sums(double c, double d) {
  constexpr double kTailTolerance = 1e-10;
  constexpr long kMaxTerms = 1'000'000;
  const double s2 = 2.0 * (1.0 - d);
  const double s4 = 4.0 * (1.0 - d);
  const double c2 = c * c;

  SlopeSums out;
  long N = 1024;
  for (;;) {
    double p2 = 0.0, p4 = 0.0;
    // Summed from the small end for accuracy.
    for (long j = N; j >= 1; --j) {
      const double t = std::pow(static_cast<double>(j), d - 1.0);
      const double t2 = t * t;
      p2 += t2;
      p4 += t2 * t2;
    }
    const Tail t2 = power_tail(c2, s2, static_cast<double>(N));
    const Tail t4 = power_tail(c2 * c2, s4, static_cast<double>(N));
    out.sum2 = c2 * p2 + t2.value;
    out.sum4 = c2 * c2 * p4 + t4.value;
    out.error_bound = t2.bound;
    if (t2.bound < kTailTolerance || N >= kMaxTerms) break;
    N = std::min(N * 4, kMaxTerms);
  }
  return out;
}

SlopeSums glarch_sums(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta) {
  SlopeSums out;
  if (!is_stable(spec, theta)) {
    out.sum2 = out.sum4 = out.error_bound = std::numeric_limits<double>::infinity();
    return out;
  }
  const int p = spec.p(), q = spec.q();
  std::deque<double> recent;  // a_{k-1}, a_{k-2}, ... (front = most recent)
  constexpr long kMaxTerms = 10'000'000;
  for (long k = 1; k <= kMaxTerms; ++k) {
    double ak = k <= p ? theta(k) : 0.0;
    for (int j = 1; j <= q && j <= static_cast<int>(recent.size()); ++j)
      ak += theta(p + j) * recent[j - 1];
    recent.push_front(ak);
    if (static_cast<int>(recent.size()) > q) recent.pop_back();
    const double a2 = ak * ak;
    out.sum2 += a2;
    out.sum4 += a2 * a2;
    if (k > std::max(p, q)) {
      double window = 0.0;
      for (double v : recent) window += v * v;
      if (window <= 1e-18 * out.sum2 || window == 0.0) break;
    }
  }
  return out;
}

}  // namespace

SlopeSums slope_sums(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != spec.dim()) throw std::invalid_argument("parameter vector has wrong length");
  switch (spec.family()) {
    case Family::LarchP: {
      const auto slopes = theta.tail(spec.p());
      return {slopes.squaredNorm(), slopes.array().pow(4).sum(), 0.0};
    }
    case Family::Glarch:
      return glarch_sums(spec, theta);
    case Family::LongMemory:
      return long_memory_sums(theta(1), theta(2));
  }
  return {};
}

DomainCheck in_theta2(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta,
                      double sigma_xi2) {
  if (!(sigma_xi2 > 0.0)) throw std::invalid_argument("sigma_xi2 must be positive");
  const double margin = sigma_xi2 * slope_sums(spec, theta).sum2;
  return {margin < 1.0, margin};
}

DomainCheck in_theta4(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& theta,
                      double sigma_xi2, double mu4) {
  if (!(sigma_xi2 > 0.0)) throw std::invalid_argument("sigma_xi2 must be positive");
  if (mu4 < sigma_xi2 * sigma_xi2) throw std::invalid_argument("mu4 must be >= sigma_xi2^2");
  const SlopeSums s = slope_sums(spec, theta);
  const double margin = mu4 * s.sum4 + 6.0 * sigma_xi2 * s.sum2;
  return {margin < 1.0, margin};
}

}  // namespace larch
