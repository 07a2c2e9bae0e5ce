#include "larch/noise.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace larch;
using Eigen::VectorXd;

namespace {

// E|T|^r for T ~ t_nu by quadrature of the density on (0, inf).
double student_abs_moment(int nu, int r) {
  boost::math::students_t_distribution<double> t(nu);
  boost::math::quadrature::exp_sinh<double> integrator;
  return 2.0 * integrator.integrate([&](double u) {
    if (!std::isfinite(u)) return 0.0;
    const double f = boost::math::pdf(t, u);
    return f == 0.0 ? 0.0 : std::pow(u, r) * f;
  });
}

double mean(const VectorXd& v) { return v.mean(); }

double corr(const VectorXd& a, const VectorXd& b) {
  const VectorXd ca = a.array() - a.mean(), cb = b.array() - b.mean();
  return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}

}  // namespace

TEST_CASE("Gaussian moments") {
  const auto m = noise_moments(NoiseSpec::gaussian());
  const double half_pi = std::numbers::pi / 2;
  CHECK(m.l1 == 1.0);
  CHECK(m.sigma_xi2 == half_pi);
  CHECK(m.mu4 == doctest::Approx(3 * std::numbers::pi * std::numbers::pi / 4).epsilon(1e-15));
  CHECK(NoiseSpec::gaussian().has_fourth_moment());
}

TEST_CASE("Student moments against quadrature") {
  for (int nu : {3, 5, 6, 9, 20}) {
    CAPTURE(nu);
    const auto spec = NoiseSpec::student(nu);
    const double abs_mean = student_abs_moment(nu, 1);
    CHECK(std::abs(spec.scale - 1.0 / abs_mean) < 1e-10);
    // E|xi| = scale * E|T| is exactly one at the closed-form scale.
    CHECK(std::abs(spec.scale * abs_mean - 1.0) < 1e-10);
    const double s2 = spec.scale * spec.scale;
    CHECK(std::abs(spec.sigma_xi2 - s2 * student_abs_moment(nu, 2)) < 1e-9);
    if (nu > 4) {
      CHECK(spec.has_fourth_moment());
      CHECK(std::abs(spec.mu4 / (s2 * s2 * student_abs_moment(nu, 4)) - 1.0) < 1e-9);
    } else {
      CHECK(std::isinf(spec.mu4));
      CHECK_FALSE(spec.has_fourth_moment());
    }
  }
}

TEST_CASE("StudentL1(6) worked values") {
  const auto spec = NoiseSpec::student(6);
  CHECK(spec.scale == doctest::Approx(8.0 / (3.0 * std::sqrt(6.0))).epsilon(1e-14));
  CHECK(spec.sigma_xi2 == doctest::Approx(1.77778).epsilon(1e-5));
  CHECK(spec.mu4 == doctest::Approx(std::pow(spec.scale, 4) * 13.5).epsilon(1e-14));
  CHECK(noise_moments(spec).l1 == 1.0);
}

TEST_CASE("Student with nu <= 2 is rejected") {
  CHECK_THROWS_AS(NoiseSpec::student(2), std::invalid_argument);
  CHECK_THROWS_AS(NoiseSpec::student(1), std::invalid_argument);
  CHECK_NOTHROW(NoiseSpec::student(3));
}

TEST_CASE("sample_noise errors and determinism") {
  CHECK_THROWS_AS(sample_noise(NoiseSpec::gaussian(), 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(sample_noise(NoiseSpec::gaussian(), 1, -3), std::invalid_argument);
  for (const auto& spec : {NoiseSpec::gaussian(), NoiseSpec::student(6)}) {
    const VectorXd a = sample_noise(spec, 12345, 1000);
    const VectorXd b = sample_noise(spec, 12345, 1000);
    CHECK(a == b);
    // A prefix of a longer draw is the shorter draw.
    CHECK(sample_noise(spec, 12345, 10) == a.head(10));
  }
}

TEST_CASE("Gaussian large-sample checks") {
  const Eigen::Index n = 1'000'000;
  const auto spec = NoiseSpec::gaussian();
  const VectorXd xi = sample_noise(spec, 20240611, n);
  const double half_pi = std::numbers::pi / 2;
  CHECK(std::abs(xi.cwiseAbs().mean() - 1.0) < 0.005);
  CHECK(std::abs(mean(xi)) < 3 * std::sqrt(half_pi / n));

  // Each moment within four standard errors of its closed form.
  const auto m = noise_moments(spec);
  const double se1 = std::sqrt((m.sigma_xi2 - 1.0) / n);
  const double se2 = std::sqrt((m.mu4 - m.sigma_xi2 * m.sigma_xi2) / n);
  const double mu8 = 105 * std::pow(half_pi, 4);
  const double se4 = std::sqrt((mu8 - m.mu4 * m.mu4) / n);
  CHECK(std::abs(xi.cwiseAbs().mean() - m.l1) < 4 * se1);
  CHECK(std::abs(xi.squaredNorm() / n - m.sigma_xi2) < 4 * se2);
  CHECK(std::abs(xi.array().pow(4).mean() - m.mu4) < 4 * se4);
}

TEST_CASE("Student large-sample checks") {
  const Eigen::Index n = 1'000'000;
  {
    const auto spec = NoiseSpec::student(6);
    const VectorXd xi = sample_noise(spec, 777, n);
    const double var = (xi.array() - xi.mean()).square().sum() / (n - 1);
    CHECK(std::abs(var - 1.7778) < 0.02);
    CHECK(std::abs(mean(xi)) < 3 * std::sqrt(spec.sigma_xi2 / n));
    const double se1 = std::sqrt((spec.sigma_xi2 - 1.0) / n);
    CHECK(std::abs(xi.cwiseAbs().mean() - 1.0) < 4 * se1);
  }
  {
    // nu = 10 has a finite eighth moment, so the fourth sample moment has a CLT.
    const int nu = 10;
    const auto spec = NoiseSpec::student(nu);
    const VectorXd xi = sample_noise(spec, 778, n);
    const double s2 = spec.scale * spec.scale;
    const double mu8 = s2 * s2 * s2 * s2 * student_abs_moment(nu, 8);
    const double se4 = std::sqrt((mu8 - spec.mu4 * spec.mu4) / n);
    const double se2 = std::sqrt((spec.mu4 - spec.sigma_xi2 * spec.sigma_xi2) / n);
    CHECK(std::abs(xi.squaredNorm() / n - spec.sigma_xi2) < 4 * se2);
    CHECK(std::abs(xi.array().pow(4).mean() - spec.mu4) < 4 * se4);
  }
}

TEST_CASE("Distinct seeds give uncorrelated streams") {
  const Eigen::Index n = 100'000;
  for (const auto& spec : {NoiseSpec::gaussian(), NoiseSpec::student(6)}) {
    const VectorXd a = sample_noise(spec, 1, n);
    const VectorXd b = sample_noise(spec, 2, n);
    const VectorXd c = sample_noise(spec, derive_seed(1, 1), n);
    CHECK(std::abs(corr(a, b)) < 0.01);
    CHECK(std::abs(corr(a, c)) < 0.01);
    CHECK(std::abs(corr(b, c)) < 0.01);
  }
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(0, 0) != derive_seed(0, 1));
  CHECK(derive_seed(0, 1) != derive_seed(1, 0));
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
}
