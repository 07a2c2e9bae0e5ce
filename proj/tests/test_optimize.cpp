#include "larch/optimize.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace larch;
using Eigen::VectorXd;

namespace {

Box box2(double lo0, double hi0, double lo1, double hi1) {
  Box b{VectorXd(2), VectorXd(2)};
  b.lo << lo0, lo1;
  b.hi << hi0, hi1;
  return b;
}

double rosenbrock(const VectorXd& x) { return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2); }

}  // namespace

TEST_CASE("box helpers") {
  const Box b = box2(0, 1, -2, 2);
  CHECK_NOTHROW(b.validate());
  CHECK(b.contains(VectorXd::Zero(2)));
  CHECK_FALSE(b.contains(VectorXd::Constant(2, 1.5)));
  CHECK_FALSE(b.contains(VectorXd::Zero(3)));
  VectorXd p(2);
  p << 3, -5;
  CHECK(b.project(p) == (VectorXd(2) << 1, -2).finished());
  CHECK_THROWS_AS(box2(1, 0, 0, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS((Box{VectorXd::Zero(2), VectorXd::Ones(3)}.validate()), std::invalid_argument);
  CHECK_NOTHROW(box2(0.5, 0.5, 0, 1).validate());
}

TEST_CASE("quadratic with interior minimum") {
  VectorXd c(3);
  c << 0.3, -1.2, 2.5;
  const Box b{VectorXd::Constant(3, -5), VectorXd::Constant(3, 5)};
  const auto f = [&](const VectorXd& x) { return (x - c).squaredNorm() + 1.0; };
  const auto r = minimize_in_box(f, VectorXd::Constant(3, 4.0), b, {1e-14, 5000, 0.1, 2});
  CHECK(r.converged);
  CHECK((r.x - c).norm() < 1e-5);
  CHECK(r.f <= r.f_start);
  CHECK(r.f == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.evals > 0);
}

TEST_CASE("Rosenbrock inside a box") {
  const Box b = box2(-2, 2, -1, 3);
  VectorXd x0(2);
  x0 << -1.5, 2.5;
  const auto r = minimize_in_box(rosenbrock, x0, b, {1e-14, 10000, 0.1, 3});
  CHECK(r.converged);
  CHECK(std::abs(r.x(0) - 1) < 1e-4);
  CHECK(std::abs(r.x(1) - 1) < 1e-4);
}

TEST_CASE("minimum outside the box lands on the boundary") {
  const Box b = box2(0, 1, 0, 1);
  const auto f = [](const VectorXd& x) { return std::pow(x(0) - 3, 2) + std::pow(x(1) - 0.4, 2); };
  const auto r = minimize_in_box(f, VectorXd::Constant(2, 0.2), b, {1e-14, 5000, 0.1, 2});
  CHECK(b.contains(r.x));
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x(1) == doctest::Approx(0.4).epsilon(1e-5));
}

TEST_CASE("start outside the box is projected and every trial stays inside") {
  const Box b = box2(-1, 1, -1, 1);
  bool all_inside = true;
  const auto f = [&](const VectorXd& x) {
    all_inside = all_inside && b.contains(x);
    return x.squaredNorm();
  };
  const auto r = minimize_in_box(f, VectorXd::Constant(2, 10.0), b);
  CHECK(all_inside);
  CHECK(r.x.norm() < 1e-4);
}

TEST_CASE("non-finite values are treated as +inf") {
  const Box b = box2(-1, 1, -1, 1);
  const auto f = [](const VectorXd& x) {
    if (x(0) > 0.5) return std::numeric_limits<double>::quiet_NaN();
    return std::pow(x(0) - 0.2, 2) + std::pow(x(1) + 0.3, 2);
  };
  const auto r = minimize_in_box(f, VectorXd::Zero(2), b, {1e-14, 5000, 0.1, 2});
  CHECK(std::isfinite(r.f));
  CHECK(std::abs(r.x(0) - 0.2) < 1e-5);
  CHECK(std::abs(r.x(1) + 0.3) < 1e-5);
}

TEST_CASE("iteration cap reports non-convergence") {
  const Box b = box2(-2, 2, -1, 3);
  VectorXd x0(2);
  x0 << -1.5, 2.5;
  const auto r = minimize_in_box(rosenbrock, x0, b, {1e-14, 5, 0.1, 2});
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 5);
}

TEST_CASE("pinned coordinates stay fixed") {
  const Box b = box2(-1, 1, 0.25, 0.25);
  int calls = 0;
  const auto f = [&](const VectorXd& x) {
    ++calls;
    CHECK(x(1) == 0.25);
    return std::pow(x(0) - 0.6, 2) + x(1);
  };
  const auto r = minimize_in_box(f, VectorXd::Zero(2), b, {1e-14, 5000, 0.1, 2});
  CHECK(r.x(1) == 0.25);
  CHECK(std::abs(r.x(0) - 0.6) < 1e-6);
  CHECK(r.evals == calls);

  const Box all = box2(0.1, 0.1, 0.2, 0.2);
  const auto fixed = minimize_in_box([](const VectorXd& x) { return x.sum(); }, VectorXd::Zero(2), all);
  CHECK(fixed.converged);
  CHECK(fixed.f == doctest::Approx(0.3));
}

TEST_CASE("deterministic") {
  const Box b = box2(-2, 2, -1, 3);
  VectorXd x0(2);
  x0 << 0.3, 0.1;
  const auto a = minimize_in_box(rosenbrock, x0, b);
  const auto c = minimize_in_box(rosenbrock, x0, b);
  CHECK(a.x == c.x);
  CHECK(a.f == c.f);
  CHECK(a.evals == c.evals);
  CHECK_THROWS_AS(minimize_in_box(rosenbrock, VectorXd::Zero(3), b), std::invalid_argument);
}
