#include "larch/contrast.hpp"

#include <algorithm>
#include <vector>

namespace larch {

RatioVariance ratio_variance(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& m,
                             double eps_guard) {
  if (x.size() != m.size() || x.size() == 0) throw std::invalid_argument("ratio_variance: size mismatch");
  if (eps_guard < 0.0) throw std::invalid_argument("ratio_variance: eps_guard must be >= 0");
  RatioVariance out;
  double sum = 0.0;
  for (Index t = 0; t < x.size(); ++t) {
    double m2 = m(t) * m(t);
    if (m2 < eps_guard) {
      m2 = eps_guard;
      ++out.guard_hits;
    }
    sum += x(t) * x(t) / m2;
  }
  out.value = sum / static_cast<double>(x.size());
  return out;
}

double abs_quantile90(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() < 1) throw std::invalid_argument("quantile of an empty sample");
  std::vector<double> a(x.size());
  for (Index i = 0; i < x.size(); ++i) a[i] = std::abs(x(i));
  const auto n = static_cast<Index>(a.size());
  // 1-based rank ceil(0.9 n), computed in integers to avoid 0.9*10 = 8.999...
  const Index rank = (9 * n + 9) / 10;
  auto nth = a.begin() + (rank - 1);
  std::nth_element(a.begin(), nth, a.end());
  return *nth;
}

Eigen::VectorXd compute_weights(const Eigen::Ref<const Eigen::VectorXd>& x, std::optional<Index> order) {
  if (order && *order < 1) throw std::invalid_argument("weight order must be >= 1");
  const double C = abs_quantile90(x);
  if (!(C > 0.0)) throw std::domain_error("degenerate sample: 90% quantile of |X| is zero");

  const Index n = x.size();
  Eigen::VectorXd excess(n);
  for (Index t = 0; t < n; ++t) excess(t) = std::abs(x(t)) > C ? std::abs(x(t)) : 0.0;

  Eigen::VectorXd tau(n);
  double past = 0.0;  // running sum of excess over the whole past
  for (Index t = 0; t < n; ++t) {
    double window = 0.0;
    if (order) {
      for (Index i = 1; i <= *order && i <= t; ++i) window += excess(t - i);
    } else {
      if (t >= 1) past += excess(t - 1);
      window = past;
    }
    const double r = std::max(1.0, window / C);
    tau(t) = 1.0 / (r * r * r * r);
  }
  return tau;
}

Eigen::VectorXd compute_weights(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (spec.family() == Family::LongMemory) return compute_weights(x, std::nullopt);
  return compute_weights(x, Index{spec.p()});
}

}  // namespace larch
