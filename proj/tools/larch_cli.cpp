#include "larch/io.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace larch;

namespace {

// Exit codes.
constexpr int kOk = 0, kUsage = 1, kDomain = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out;
  std::optional<std::uint64_t> seed;
  int verbosity = 0;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("LARCH_SEED")) {
    std::uint64_t v = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw UsageError("LARCH_SEED is not an unsigned integer: \"" + s + "\"");
    return v;
  }
  return fallback;
}

Eigen::VectorXd read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return read_trajectory_csv(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

json read_doc(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw UsageError("cannot open " + path);
  return read_json_file(path);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

void provenance(const std::string& cmd, const std::string& hash, std::uint64_t seed,
                std::chrono::steady_clock::time_point start) {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << wall;
  std::cerr << "larch " << cmd << ": config_hash=" << hash << " seed=" << seed << " wall=" << os.str() << "s\n";
}

ContrastKind method_from(const std::string& method, double h) {
  if (method == "lav") return ContrastKind::lav();
  if (method == "wls") return ContrastKind::wls();
  if (method == "sqml") {
    if (!(h > 0.0)) throw UsageError("--h must be positive");
    return ContrastKind::sqml(h);
  }
  throw UsageError("unknown --method \"" + method + "\" (expected lav, sqml or wls)");
}

int run_simulate(const std::string& model_path, Index n, const Common& c) {
  const auto start = std::chrono::steady_clock::now();
  const json doc = read_doc(model_path);
  const ModelSpec spec = model_from_json(doc);
  const auto theta = theta_from_json(doc, spec);
  if (!theta) throw FormatError(model_path + ": \"theta\" is required to simulate");
  const NoiseSpec noise = doc.contains("noise") ? noise_from_json(doc) : NoiseSpec::gaussian();
  const SimConfig sim = doc.contains("sim") ? sim_config_from_json(doc.at("sim")) : SimConfig{};
  if (n < 1) throw UsageError("--n must be positive");
  const std::uint64_t seed = resolve_seed(c.seed, 0);

  std::vector<std::string> warnings;
  const Trajectory traj = simulate(spec, *theta, noise, n, sim, seed, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

  std::ostringstream os;
  if (ends_with(c.out, ".json")) {
    os << to_json(traj).dump(2) << '\n';
  } else {
    write_trajectory_csv(os, traj.x);
  }
  emit(c.out, os.str());
  json key{{"model", to_json(spec, *theta)}, {"noise", to_json(noise)}, {"sim", to_json(sim)}, {"n", n}};
  provenance("simulate", config_hash(key), seed, start);
  return kOk;
}

int run_estimate(const std::string& data_path, const std::string& model_path, const std::string& method, double h,
                 const std::string& options_path, const Common& c) {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::VectorXd x = read_csv_file(data_path);
  const json doc = read_doc(model_path);
  const ModelSpec spec = model_from_json(doc);
  const ContrastKind kind = method_from(method, h);
  json fit_doc = doc.contains("fit") ? doc.at("fit") : json(nullptr);
  if (!options_path.empty()) fit_doc = read_doc(options_path);
  const FitOptions opts = fit_options_from_json(fit_doc, spec);
  const std::uint64_t seed = resolve_seed(c.seed, 0);

  const EstimateResult res = fit(spec, x, kind, opts, seed);
  emit(c.out, to_json(res, spec).dump(2) + "\n");
  json key{{"model", to_json(spec)}, {"estimator", to_json(kind)}, {"fit", to_json(opts)}, {"n", x.size()}};
  provenance("estimate", config_hash(key), seed, start);
  if (!res.converged) throw DomainFailure("optimizer did not converge within max_iter; result written anyway");
  return kOk;
}

int run_infer(const std::string& data_path, const std::string& estimate_path, const std::string& model_path,
              double level, const Common& c) {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::VectorXd x = read_csv_file(data_path);
  const json est_doc = read_doc(estimate_path);
  json model_doc;
  if (!model_path.empty()) {
    model_doc = read_doc(model_path);
  } else if (est_doc.contains("model")) {
    model_doc = est_doc.at("model");
  } else {
    throw UsageError("the estimate carries no model; pass --model");
  }
  const ModelSpec spec = model_from_json(model_doc);
  const EstimateResult est = estimate_result_from_json(est_doc, spec);
  if (est.kind.targets_l2())
    throw UsageError("the sandwich covariance applies to LAV estimates; got " + est.kind.label());
  if (!(level > 0.0 && level < 1.0)) throw UsageError("--level must lie in (0, 1)");

  const Index K = est.trunc_K > 0 ? est.trunc_K : default_trunc_K(spec, x.size());
  const GammaHats g = gamma_hats(spec, est.theta_hat, x, K);
  const SigmaXiHat s = sigma_xi_hat(spec, est.theta_hat, x, K);
  if (s.guard_hits > 0) std::cerr << "warning: " << s.guard_hits << " near-zero volatility terms were guarded\n";
  const SandwichCovariance cov = asymptotic_cov(g.gamma1, g.gamma2, s.value, x.size());
  const auto ci = confidence_intervals(est.theta_hat, cov.cov, level);
  emit(c.out, to_json(cov, est.theta_hat, ci, level, spec).dump(2) + "\n");
  json key{{"model", to_json(spec)}, {"theta_hat", est_doc.at("theta_hat")}, {"level", level}, {"n", x.size()}};
  provenance("infer", config_hash(key), 0, start);
  return kOk;
}

int run_mc(const std::string& config_path, int threads, const std::string& json_out, const Common& c) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = experiment_config_from_json(read_doc(config_path));
  cfg.master_seed = resolve_seed(c.seed, cfg.master_seed);
  if (threads < 1) throw UsageError("--threads must be positive");
  const McReport rep = run_experiment(cfg, static_cast<unsigned>(threads));

  if (ends_with(c.out, ".json")) {
    emit(c.out, to_json(rep).dump(2) + "\n");
  } else {
    std::ostringstream os;
    write_report_csv(os, rep);
    emit(c.out, os.str());
  }
  if (!json_out.empty()) write_text_file(json_out, to_json(rep).dump(2) + "\n");
  provenance("mc", rep.config_hash, cfg.master_seed, start);
  int failed = 0;
  for (const auto& e : rep.entries) failed += e.failures;
  if (failed > 0 && c.verbosity > 0) std::cerr << "note: " << failed << " failed fits (summed over coordinates)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LARCH(infinity) simulation, estimation and inference"};
  app.require_subcommand(1);
  Common common;
  std::uint64_t seed_value = 0;

  auto add_common = [&](CLI::App* sub, bool seeded) {
    sub->add_option("--out,-o", common.out, "Output file (stdout when omitted)");
    sub->add_flag("-v,--verbose", common.verbosity, "More diagnostics on stderr");
    if (seeded) sub->add_option("--seed", seed_value, "Seed (falls back to $LARCH_SEED)");
  };

  std::string model_path, data_path, method = "lav", options_path, estimate_path, config_path, json_out;
  Index n = 0;
  double h = 1.0, level = 0.95;
  int threads = 1;

  auto* sim = app.add_subcommand("simulate", "Simulate a trajectory to CSV (or JSON when --out ends in .json)");
  sim->add_option("--model", model_path, "Model JSON with theta, optional noise and sim")->required();
  sim->add_option("--n", n, "Number of observations")->required();
  add_common(sim, true);

  auto* est = app.add_subcommand("estimate", "Fit a model to a CSV trajectory");
  est->add_option("--data", data_path, "Trajectory CSV")->required();
  est->add_option("--model", model_path, "Model JSON (theta ignored, optional fit options)")->required();
  est->add_option("--method", method, "lav, sqml or wls");
  est->set_help_flag("--help", "Print this help message and exit");
  est->add_option("--h", h, "Smoothing constant for sqml");
  est->add_option("--options", options_path, "Fit options JSON");
  add_common(est, true);

  auto* inf = app.add_subcommand("infer", "Sandwich covariance and Wald intervals for a LAV estimate");
  inf->add_option("--data", data_path, "Trajectory CSV")->required();
  inf->add_option("--estimate", estimate_path, "Estimate JSON written by `estimate`")->required();
  inf->add_option("--model", model_path, "Model JSON (defaults to the one in the estimate)");
  inf->add_option("--level", level, "Confidence level");
  add_common(inf, false);

  auto* mc = app.add_subcommand("mc", "Monte Carlo RMSE table");
  mc->add_option("--config", config_path, "Experiment JSON")->required();
  mc->add_option("--threads", threads, "Worker threads; results do not depend on it");
  mc->add_option("--json", json_out, "Also write the report as JSON");
  add_common(mc, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  for (auto* sub : {sim, est, mc})
    if (sub->parsed() && sub->count("--seed") > 0) common.seed = seed_value;

  try {
    if (sim->parsed()) return run_simulate(model_path, n, common);
    if (est->parsed()) return run_estimate(data_path, model_path, method, h, options_path, common);
    if (inf->parsed()) return run_infer(data_path, estimate_path, model_path, level, common);
    if (mc->parsed()) return run_mc(config_path, threads, json_out, common);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  }
  return kUsage;
}
