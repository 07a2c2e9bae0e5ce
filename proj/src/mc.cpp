#include "larch/mc.hpp"

#include "larch/infer.hpp"
#include "larch/io.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace larch {

void ExperimentConfig::validate() const {
  validate_params(spec, theta_star);
  if (reps < 1) throw std::invalid_argument("experiment needs reps >= 1");
  if (n_list.empty()) throw std::invalid_argument("experiment needs at least one sample size");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 2) throw std::invalid_argument("sample sizes must be >= 2");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw std::invalid_argument("n_list must be strictly ascending");
  }
  if (estimators.empty()) throw std::invalid_argument("experiment needs at least one estimator");
  if (fit_opts.box.dim() != spec.dim()) throw std::invalid_argument("fit box does not match the model dimension");
}

bool operator==(const McEntry& a, const McEntry& b) {
  auto same = [](double u, double v) { return u == v || (std::isnan(u) && std::isnan(v)); };
  return a.estimator == b.estimator && a.n == b.n && a.coordinate == b.coordinate && same(a.rmse, b.rmse) &&
         same(a.mean_bias, b.mean_bias) && a.reps_used == b.reps_used && a.failures == b.failures;
}

const McEntry& McReport::at(const std::string& estimator, Index n, Index coordinate) const {
  Index seen = 0;
  for (const auto& e : entries) {
    if (e.estimator != estimator || e.n != n) continue;
    if (seen++ == coordinate) return e;
  }
  throw std::out_of_range("no report entry for " + estimator + " at n=" + std::to_string(n));
}

Eigen::VectorXd McReport::rmse_of(const std::string& estimator, Index n) const {
  std::vector<double> v;
  for (const auto& e : entries)
    if (e.estimator == estimator && e.n == n) v.push_back(e.rmse);
  if (v.empty()) throw std::out_of_range("no report entry for " + estimator + " at n=" + std::to_string(n));
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

std::uint64_t replication_seed(std::uint64_t master_seed, Index n, int r) {
  return derive_seed(derive_seed(master_seed, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(r));
}

Eigen::VectorXd rmse(const Eigen::Ref<const Eigen::MatrixXd>& errors) {
  if (errors.rows() < 1) throw std::invalid_argument("rmse needs at least one row");
  return (errors.array().square().colwise().sum() / static_cast<double>(errors.rows())).sqrt().transpose();
}

namespace {

// Outcome of one (n, replication): an error row per estimator.
struct Replication {
  Eigen::MatrixXd errors;           // estimators x d
  std::vector<bool> ok;             // per estimator
};

Replication run_replication(const ExperimentConfig& cfg, Index n, int r) {
  const Index d = cfg.spec.dim();
  const std::size_t k = cfg.estimators.size();
  Replication out{Eigen::MatrixXd::Zero(static_cast<Index>(k), d), std::vector<bool>(k, false)};
  const std::uint64_t seed = replication_seed(cfg.master_seed, n, r);
  const Trajectory traj = simulate(cfg.spec, cfg.theta_star, cfg.noise, n, cfg.sim_cfg, seed);
  const auto mask = l2_rescale_mask(cfg.spec);
  const double sigma_xi = std::sqrt(cfg.noise.sigma_xi2);
  for (std::size_t e = 0; e < k; ++e) {
    const ContrastKind& kind = cfg.estimators[e];
    try {
      const EstimateResult res = fit(cfg.spec, traj.x, kind, cfg.fit_opts, derive_seed(seed, 1 + e));
      if (!res.converged) continue;
      Eigen::VectorXd th = res.theta_hat;
      if (cfg.rescale && kind.targets_l2()) th = rescale_from_l2(th, sigma_xi, mask);
      out.errors.row(static_cast<Index>(e)) = (th - cfg.theta_star).transpose();
      out.ok[e] = true;
    } catch (const std::exception&) {
      // counted as a failure
    }
  }
  return out;
}

}  // namespace

McReport run_experiment(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  threads = std::max(1, threads);
  const Index d = cfg.spec.dim();
  const auto names = cfg.spec.coordinate_names();

  McReport report;
  report.master_seed = cfg.master_seed;
  report.config_hash = config_hash(to_json(cfg));
  report.reps = cfg.reps;

  for (Index n : cfg.n_list) {
    std::vector<Replication> reps(cfg.reps);
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int r = next++; r < cfg.reps; r = next++) reps[r] = run_replication(cfg, n, r);
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    }

    // Reduction in replication order, independent of scheduling.
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      std::vector<Index> used;
      for (int r = 0; r < cfg.reps; ++r)
        if (reps[r].ok[e]) used.push_back(r);
      Eigen::MatrixXd err(static_cast<Index>(used.size()), d);
      for (std::size_t i = 0; i < used.size(); ++i) err.row(static_cast<Index>(i)) = reps[used[i]].errors.row(e);
      const Eigen::VectorXd rm = used.empty() ? Eigen::VectorXd::Constant(d, std::nan("")) : rmse(err);
      const Eigen::VectorXd bias =
          used.empty() ? Eigen::VectorXd::Constant(d, std::nan("")) : Eigen::VectorXd(err.colwise().mean().transpose());
      for (Index j = 0; j < d; ++j) {
        McEntry entry;
        entry.estimator = cfg.estimators[e].label();
        entry.n = n;
        entry.coordinate = names[j];
        entry.rmse = rm(j);
        entry.mean_bias = bias(j);
        entry.reps_used = static_cast<int>(used.size());
        entry.failures = cfg.reps - entry.reps_used;
        report.entries.push_back(entry);
      }
    }
  }
  return report;
}

}  // namespace larch
