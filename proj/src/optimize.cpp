#include "larch/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace larch {

void Box::validate() const {
  if (lo.size() != hi.size() || lo.size() == 0) throw std::invalid_argument("box bounds have mismatched size");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo(i) <= hi(i))) throw std::invalid_argument("box needs lo <= hi in every coordinate");
}

bool Box::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return x.size() == lo.size() && (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

Eigen::VectorXd Box::project(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return x.cwiseMax(lo).cwiseMin(hi);
}

namespace {

class Simplex {
 public:
  Simplex(const Objective& f, const Box& box, int& evals) : f_(f), box_(box), evals_(evals) {}

  double eval(const Eigen::VectorXd& x) {
    ++evals_;
    const double v = f_(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }

  void build(const Eigen::VectorXd& x0, double f0, double step_fraction) {
    const Eigen::Index d = x0.size();
    pts_.assign(d + 1, x0);
    vals_.assign(d + 1, f0);
    const Eigen::VectorXd width = box_.hi - box_.lo;
    for (Eigen::Index i = 0; i < d; ++i) {
      Eigen::VectorXd v = x0;
      const double step = step_fraction * width(i);
      v(i) = x0(i) + step <= box_.hi(i) ? x0(i) + step : x0(i) - step;
      v = box_.project(v);
      pts_[i + 1] = v;
      vals_[i + 1] = eval(v);
    }
    order();
  }

  void order() {
    std::vector<std::size_t> idx(pts_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return vals_[a] < vals_[b]; });
    std::vector<Eigen::VectorXd> p;
    std::vector<double> v;
    for (auto i : idx) {
      p.push_back(pts_[i]);
      v.push_back(vals_[i]);
    }
    pts_ = std::move(p);
    vals_ = std::move(v);
  }

  bool small(double tol) const {
    const double fb = vals_.front(), fw = vals_.back();
    if (std::isfinite(fw) && fw - fb <= tol * std::abs(fb)) return true;
    double diam = 0.0;
    for (std::size_t i = 1; i < pts_.size(); ++i) diam = std::max(diam, (pts_[i] - pts_[0]).lpNorm<Eigen::Infinity>());
    return diam <= tol * (1.0 + pts_[0].lpNorm<Eigen::Infinity>());
  }

  // One Nelder-Mead iteration with standard coefficients.
  void step() {
    constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
    const std::size_t w = pts_.size() - 1;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(pts_[0].size());
    for (std::size_t i = 0; i < w; ++i) centroid += pts_[i];
    centroid /= static_cast<double>(w);

    const Eigen::VectorXd xr = box_.project(centroid + kReflect * (centroid - pts_[w]));
    const double fr = eval(xr);
    if (fr < vals_[0]) {
      const Eigen::VectorXd xe = box_.project(centroid + kExpand * (xr - centroid));
      const double fe = eval(xe);
      if (fe < fr) replace_worst(xe, fe); else replace_worst(xr, fr);
    } else if (fr < vals_[w - 1]) {
      replace_worst(xr, fr);
    } else {
      const bool outside = fr < vals_[w];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(box_.project(centroid + kContract * (xr - centroid)))
                                         : Eigen::VectorXd(box_.project(centroid + kContract * (pts_[w] - centroid)));
      const double fc = eval(xc);
      if (fc < (outside ? fr : vals_[w])) {
        replace_worst(xc, fc);
      } else {
        for (std::size_t i = 1; i < pts_.size(); ++i) {
          pts_[i] = box_.project(pts_[0] + kShrink * (pts_[i] - pts_[0]));
          vals_[i] = eval(pts_[i]);
        }
      }
    }
    order();
  }

  const Eigen::VectorXd& best() const { return pts_.front(); }
  double best_value() const { return vals_.front(); }

 private:
  void replace_worst(const Eigen::VectorXd& x, double v) {
    pts_.back() = x;
    vals_.back() = v;
  }

  const Objective& f_;
  const Box& box_;
  int& evals_;
  std::vector<Eigen::VectorXd> pts_;
  std::vector<double> vals_;
};

SimplexResult search(const Objective& f, const Eigen::VectorXd& x0, const Box& box, const SimplexOptions& opts) {
  SimplexResult out;
  Simplex simplex(f, box, out.evals);
  const Eigen::VectorXd start = box.project(x0);
  out.f_start = simplex.eval(start);
  simplex.build(start, out.f_start, opts.initial_step);

  auto run = [&] {
    while (out.iterations < opts.max_iter && !simplex.small(opts.tol)) {
      simplex.step();
      ++out.iterations;
    }
    return out.iterations < opts.max_iter;
  };

  // A collapsed simplex can stall away from the minimum, so the converged
  // point is re-searched from fresh, smaller simplices until that stops paying.
  bool ok = run();
  double step = opts.initial_step;
  for (int r = 0; ok && r < opts.restarts; ++r) {
    const Eigen::VectorXd xb = simplex.best();
    const double fb = simplex.best_value();
    step *= 0.5;
    simplex.build(xb, fb, step);
    ok = run();
    if (fb - simplex.best_value() <= opts.tol * std::abs(fb)) break;
  }
  out.converged = ok;
  out.x = simplex.best();
  out.f = simplex.best_value();
  return out;
}

}  // namespace

SimplexResult minimize_in_box(const Objective& f, const Eigen::Ref<const Eigen::VectorXd>& x0, const Box& box,
                              const SimplexOptions& opts) {
  box.validate();
  if (x0.size() != box.dim()) throw std::invalid_argument("start point has wrong dimension");

  // Coordinates with lo == hi are pinned; the simplex lives on the free ones.
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < box.dim(); ++i)
    if (box.lo(i) < box.hi(i)) free.push_back(i);
  const Eigen::VectorXd base = box.project(x0);
  if (free.size() == static_cast<std::size_t>(box.dim())) return search(f, base, box, opts);

  auto embed = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd x = base;
    for (std::size_t k = 0; k < free.size(); ++k) x(free[k]) = z(k);
    return x;
  };
  if (free.empty()) {
    SimplexResult out;
    out.x = base;
    out.f = out.f_start = f(base);
    out.evals = 1;
    out.converged = true;
    return out;
  }
  const auto m = static_cast<Eigen::Index>(free.size());
  Box sub{Eigen::VectorXd(m), Eigen::VectorXd(m)};
  Eigen::VectorXd z0(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    sub.lo(k) = box.lo(free[k]);
    sub.hi(k) = box.hi(free[k]);
    z0(k) = base(free[k]);
  }
  SimplexResult out = search([&](const Eigen::VectorXd& z) { return f(embed(z)); }, z0, sub, opts);
  out.x = embed(out.x);
  return out;
}

}  // namespace larch
