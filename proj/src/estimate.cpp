#include "larch/estimate.hpp"

#include "larch/noise.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace larch {

ContrastKind ContrastKind::sqml(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("smoothing parameter h must be positive");
  return {Type::SmoothedQml, h};
}

std::string ContrastKind::label() const {
  switch (type) {
    case Type::Lav: return "lav";
    case Type::WeightedLs: return "wls";
    case Type::SmoothedQml: {
      std::ostringstream os;
      os << "sqml(" << h << ")";
      return os.str();
    }
  }
  return {};
}

Box default_box(const ModelSpec& spec) {
  const Index d = spec.dim();
  Box box{Eigen::VectorXd::Constant(d, -0.95), Eigen::VectorXd::Constant(d, 0.95)};
  box.lo(0) = 0.01;
  box.hi(0) = 20.0;
  if (spec.family() == Family::LongMemory) {
    box.lo(1) = -2.0;
    box.hi(1) = 2.0;
    box.lo(2) = 0.0;
    box.hi(2) = 0.45;
  }
  return box;
}

FitOptions default_fit_options(const ModelSpec& spec) {
  FitOptions o;
  o.box = default_box(spec);
  return o;
}

Index default_trunc_K(const ModelSpec& spec, Index n) {
  const Index full = std::max<Index>(n - 1, spec.order());
  if (spec.family() == Family::LongMemory) return std::max<Index>(std::min<Index>(full, 5000), spec.order());
  return full;
}

Objective make_objective(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                         const ContrastKind& kind, Index trunc_K, const std::optional<Eigen::VectorXd>& weights) {
  Eigen::VectorXd data = x;
  switch (kind.type) {
    case ContrastKind::Type::Lav:
      return [spec, data, trunc_K](const Eigen::VectorXd& theta) {
        return lav_loss(data, volatility_path(spec, theta, data, trunc_K));
      };
    case ContrastKind::Type::SmoothedQml:
      return [spec, data, trunc_K, h = kind.h](const Eigen::VectorXd& theta) {
        return sqml_loss(data, volatility_path(spec, theta, data, trunc_K), h);
      };
    case ContrastKind::Type::WeightedLs: {
      if (weights && weights->size() != data.size())
        throw std::invalid_argument("weights have length " + std::to_string(weights->size()) + ", sample has " +
                                    std::to_string(data.size()));
      Eigen::VectorXd tau = weights ? *weights : compute_weights(spec, data);
      return [spec, data, trunc_K, tau](const Eigen::VectorXd& theta) {
        return wls_loss(data, volatility_path(spec, theta, data, trunc_K), tau);
      };
    }
  }
  throw std::logic_error("unknown contrast kind");
}

Eigen::MatrixXd latin_hypercube(const Box& box, int count, std::uint64_t seed) {
  box.validate();
  if (count < 1) throw std::invalid_argument("need at least one start");
  std::mt19937_64 eng(derive_seed(seed, 0x1a7));
  auto uniform = [&eng] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  const Index d = box.dim();
  Eigen::MatrixXd pts(count, d);
  std::vector<int> strata(count);
  for (Index j = 0; j < d; ++j) {
    for (int i = 0; i < count; ++i) strata[i] = i;
    for (int i = count - 1; i > 0; --i) {
      const int k = static_cast<int>(uniform() * (i + 1));
      std::swap(strata[i], strata[std::min(k, i)]);
    }
    for (int i = 0; i < count; ++i) {
      const double u = (strata[i] + uniform()) / count;
      pts(i, j) = box.lo(j) + u * (box.hi(j) - box.lo(j));
    }
  }
  return pts;
}

EstimateResult fit(const ModelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x, const ContrastKind& kind,
                   const FitOptions& opts, std::uint64_t seed) {
  if (x.size() < 1) throw std::invalid_argument("fit: empty sample");
  if (x.cwiseAbs().maxCoeff() == 0.0) throw std::domain_error("fit: degenerate all-zero sample");
  if (opts.box.dim() != spec.dim()) throw std::invalid_argument("fit: box dimension does not match model");
  opts.box.validate();
  if (!(opts.box.lo(0) > 0.0)) throw std::invalid_argument("fit: intercept lower bound must be positive");
  if (opts.starts < 1) throw std::invalid_argument("fit: need at least one start");

  const Index trunc_K = opts.trunc_K.value_or(default_trunc_K(spec, x.size()));
  if (trunc_K < spec.order()) throw std::invalid_argument("fit: trunc_K below the family order");
  const Objective objective = make_objective(spec, x, kind, trunc_K, opts.weights);
  const Eigen::MatrixXd starts = latin_hypercube(opts.box, opts.starts, seed);

  SimplexOptions so;
  so.tol = opts.tol;
  so.max_iter = opts.max_iter;

  EstimateResult best;
  best.kind = kind;
  best.trunc_K = trunc_K;
  best.contrast = std::numeric_limits<double>::infinity();
  bool any_improved = false;
  bool have = false;
  for (int s = 0; s < opts.starts; ++s) {
    const SimplexResult r = minimize_in_box(objective, starts.row(s).transpose(), opts.box, so);
    best.n_evals += r.evals;
    any_improved = any_improved || r.f < r.f_start;
    if (!have || r.f < best.contrast) {
      have = true;
      best.theta_hat = r.x;
      best.contrast = r.f;
      best.converged = r.converged;
      best.start_index = s;
    }
  }
  best.converged = best.converged && any_improved;

  const Eigen::VectorXd m = volatility_path(spec, best.theta_hat, x, trunc_K);
  best.theta2 = in_theta2(spec, best.theta_hat, ratio_variance(x, m, 1e-8).value);
  return best;
}

}  // namespace larch
