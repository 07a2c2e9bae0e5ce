#include "larch/estimate.hpp"
#include "larch/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace larch;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(v.size());
  Index i = 0;
  for (double e : v) out(i++) = e;
  return out;
}

const double kL2 = std::sqrt(std::numbers::pi / 2);

}  // namespace

TEST_CASE("contrast kinds") {
  CHECK(ContrastKind::lav().label() == "lav");
  CHECK(ContrastKind::wls().label() == "wls");
  CHECK(ContrastKind::sqml(2).label() == "sqml(2)");
  CHECK(ContrastKind::sqml(0.5).label() == "sqml(0.5)");
  CHECK_THROWS_AS(ContrastKind::sqml(0), std::invalid_argument);
  CHECK_THROWS_AS(ContrastKind::sqml(-1), std::invalid_argument);
  CHECK_FALSE(ContrastKind::lav().targets_l2());
  CHECK(ContrastKind::wls().targets_l2());
  CHECK(ContrastKind::sqml(1).targets_l2());
}

TEST_CASE("default boxes and truncation") {
  const Box b = default_box(ModelSpec::glarch(1, 1));
  CHECK(b.lo == vec({0.01, -0.95, -0.95}));
  CHECK(b.hi == vec({20, 0.95, 0.95}));
  const Box lm = default_box(ModelSpec::long_memory());
  CHECK(lm.lo == vec({0.01, -2, 0}));
  CHECK(lm.hi == vec({20, 2, 0.45}));
  const auto o = default_fit_options(ModelSpec::larch(2));
  CHECK(o.starts == 8);
  CHECK(o.tol == 1e-10);
  CHECK(o.max_iter == 2000);
  CHECK_FALSE(o.trunc_K.has_value());
  CHECK(default_trunc_K(ModelSpec::larch(2), 1000) == 999);
  CHECK(default_trunc_K(ModelSpec::glarch(1, 1), 20000) == 19999);
  CHECK(default_trunc_K(ModelSpec::long_memory(), 1000) == 999);
  CHECK(default_trunc_K(ModelSpec::long_memory(), 20000) == 5000);
}

TEST_CASE("Latin hypercube stratifies every coordinate") {
  const Box b = default_box(ModelSpec::glarch(2, 1));
  const int count = 16;
  const Eigen::MatrixXd pts = latin_hypercube(b, count, 99);
  CHECK(pts.rows() == count);
  CHECK(pts.cols() == 4);
  for (Index j = 0; j < 4; ++j) {
    std::set<int> strata;
    for (int i = 0; i < count; ++i) {
      const double u = (pts(i, j) - b.lo(j)) / (b.hi(j) - b.lo(j));
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      strata.insert(static_cast<int>(u * count));
    }
    CHECK(strata.size() == static_cast<std::size_t>(count));
  }
  CHECK(latin_hypercube(b, count, 99) == pts);
  CHECK(latin_hypercube(b, count, 100) != pts);
  CHECK_THROWS_AS(latin_hypercube(b, 0, 1), std::invalid_argument);
}

TEST_CASE("fit input errors") {
  const auto spec = ModelSpec::larch(1);
  auto opts = default_fit_options(spec);
  CHECK_THROWS_AS(fit(spec, VectorXd::Zero(50), ContrastKind::lav(), opts, 1), std::domain_error);
  CHECK_THROWS_AS(fit(spec, VectorXd(0), ContrastKind::lav(), opts, 1), std::invalid_argument);
  auto bad = opts;
  bad.box.lo(0) = 0.0;
  CHECK_THROWS_AS(fit(spec, VectorXd::Ones(50), ContrastKind::lav(), bad, 1), std::invalid_argument);
  bad = opts;
  bad.starts = 0;
  CHECK_THROWS_AS(fit(spec, VectorXd::Ones(50), ContrastKind::lav(), bad, 1), std::invalid_argument);
  CHECK_THROWS_AS(fit(ModelSpec::larch(2), VectorXd::Ones(50), ContrastKind::lav(), opts, 1), std::invalid_argument);
  bad = opts;
  bad.weights = VectorXd::Ones(49);
  CHECK_THROWS_AS(fit(spec, VectorXd::Ones(50), ContrastKind::wls(), bad, 1), std::invalid_argument);
}

TEST_CASE("LAV with pinned slopes recovers the mean absolute value") {
  // With slopes fixed at zero, sum (|X_t| - a0)^2 is minimised at mean |X|.
  const auto spec = ModelSpec::larch(2);
  const VectorXd x = 1.7 * sample_noise(NoiseSpec::gaussian(), 4, 3000);
  auto opts = default_fit_options(spec);
  opts.box.lo.tail(2).setZero();
  opts.box.hi.tail(2).setZero();
  opts.tol = 1e-15;
  const auto r = fit(spec, x, ContrastKind::lav(), opts, 7);
  CHECK(r.converged);
  CHECK(r.theta_hat(1) == 0.0);
  CHECK(r.theta_hat(2) == 0.0);
  CHECK(std::abs(r.theta_hat(0) - x.cwiseAbs().mean()) < 1e-6);
}

TEST_CASE("fit is deterministic and stays in the box") {
  const auto spec = ModelSpec::glarch(1, 1);
  const VectorXd th = vec({2, 0.3, -0.6});
  const VectorXd x = simulate(spec, th, NoiseSpec::gaussian(), 800, SimConfig{}, 10).x;
  const auto opts = default_fit_options(spec);
  for (const auto& kind : {ContrastKind::lav(), ContrastKind::sqml(1), ContrastKind::wls()}) {
    CAPTURE(kind.label());
    const auto a = fit(spec, x, kind, opts, 5);
    const auto b = fit(spec, x, kind, opts, 5);
    CHECK(a.theta_hat == b.theta_hat);
    CHECK(a.contrast == b.contrast);
    CHECK(a.start_index == b.start_index);
    CHECK(opts.box.contains(a.theta_hat));
    CHECK(a.kind == kind);
    CHECK(a.trunc_K == 799);
    CHECK(a.n_evals > 0);
    CHECK(a.start_index >= 0);
    CHECK(a.start_index < opts.starts);
    if (kind.type != ContrastKind::Type::SmoothedQml) CHECK(a.contrast >= 0.0);
    // The reported contrast is the objective at theta_hat.
    CHECK(a.contrast == make_objective(spec, x, kind, 799)(a.theta_hat));
  }
}

TEST_CASE("fit beats the true parameter on its own contrast") {
  struct Case {
    ModelSpec spec;
    VectorXd theta;
  };
  const Case cases[] = {{ModelSpec::larch(2), vec({5, -0.2, 0.4})},
                        {ModelSpec::glarch(1, 1), vec({2, 0.3, -0.6})},
                        {ModelSpec::long_memory(), vec({1, 0.2, 0.1})}};
  for (const auto& c : cases) {
    for (std::uint64_t seed : {1u, 2u}) {
      const Index n = c.spec.family() == Family::LongMemory ? 400 : 1000;
      const VectorXd x = simulate(c.spec, c.theta, NoiseSpec::gaussian(), n, SimConfig{}, seed).x;
      auto opts = default_fit_options(c.spec);
      opts.starts = 4;
      for (const auto& kind : {ContrastKind::lav(), ContrastKind::sqml(1), ContrastKind::wls()}) {
        CAPTURE(c.spec.family_name());
        CAPTURE(kind.label());
        const auto r = fit(c.spec, x, kind, opts, seed);
        const auto f = make_objective(c.spec, x, kind, r.trunc_K);
        VectorXd target = c.theta;
        if (kind.targets_l2()) {
          target(0) *= kL2;
          target(1) *= kL2;
          if (c.spec.family() == Family::LarchP) target(2) *= kL2;
        }
        CHECK(r.contrast <= f(c.theta) + 1e-12);
        CHECK(r.contrast <= f(target) + 1e-12);
      }
    }
  }
}

TEST_CASE("LARCH(2) estimates are of the tabulated accuracy") {
  const auto spec = ModelSpec::larch(2);
  const VectorXd th = vec({5, -0.2, 0.4});
  const auto opts = default_fit_options(spec);
  {
    const VectorXd x = simulate(spec, th, NoiseSpec::gaussian(), 5000, SimConfig{}, 21).x;
    const auto r = fit(spec, x, ContrastKind::lav(), opts, 21);
    const VectorXd rmse = vec({0.065, 0.009, 0.013});
    CAPTURE(r.theta_hat.transpose());
    CHECK(r.converged);
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(r.theta_hat(i) - th(i)) < 4 * rmse(i));
    CHECK(r.theta2.inside);
  }
  {
    const VectorXd x = simulate(spec, th, NoiseSpec::gaussian(), 1000, SimConfig{}, 22).x;
    const auto r = fit(spec, x, ContrastKind::wls(), opts, 22);
    const VectorXd rmse = vec({0.188, 0.044, 0.047});
    // WLS estimates the L2-normalised parameter.
    const VectorXd back = r.theta_hat / kL2;
    CAPTURE(back.transpose());
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(back(i) - th(i)) < 4 * rmse(i));
  }
}

TEST_CASE("LAV error shrinks with n") {
  const auto spec = ModelSpec::larch(2);
  const VectorXd th = vec({5, -0.2, 0.4});
  const auto opts = default_fit_options(spec);
  const Index sizes[] = {500, 2000, 8000};
  Eigen::Vector3d mean_err = Eigen::Vector3d::Zero();
  int shrunk = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const VectorXd x = simulate(spec, th, NoiseSpec::gaussian(), 8000, SimConfig{}, 100 + seed).x;
    Eigen::Vector3d err;
    for (int k = 0; k < 3; ++k) err(k) = (fit(spec, x.head(sizes[k]), ContrastKind::lav(), opts, seed).theta_hat - th).norm();
    mean_err += err / 10;
    shrunk += err(2) < err(0);
  }
  CAPTURE(mean_err.transpose());
  CHECK(mean_err(1) < mean_err(0));
  CHECK(mean_err(2) < mean_err(1));
  CHECK(shrunk >= 8);
}

TEST_CASE("WLS argmin is invariant to scaling the weights") {
  const auto spec = ModelSpec::larch(2);
  const VectorXd th = vec({5, -0.2, 0.4});
  const double scales[] = {4.0, 0.25, 1024.0, 0.125, 16.0};
  for (int s = 0; s < 5; ++s) {
    const VectorXd x = simulate(spec, th, NoiseSpec::gaussian(), 1000, SimConfig{}, 300 + s).x;
    auto opts = default_fit_options(spec);
    opts.starts = 4;
    const auto base = fit(spec, x, ContrastKind::wls(), opts, s);
    opts.weights = compute_weights(spec, x);
    const auto same = fit(spec, x, ContrastKind::wls(), opts, s);
    opts.weights = scales[s] * compute_weights(spec, x);
    const auto scaled = fit(spec, x, ContrastKind::wls(), opts, s);
    CHECK(same.theta_hat == base.theta_hat);
    CHECK((scaled.theta_hat - base.theta_hat).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(scaled.contrast == doctest::Approx(scales[s] * base.contrast).epsilon(1e-12));
  }
}
