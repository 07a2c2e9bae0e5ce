#include "larch/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace larch {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

json vec_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_to_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  json a = json::array();
  for (Index i = 0; i < m.rows(); ++i) a.push_back(vec_to_json(m.row(i).transpose()));
  return a;
}

Eigen::VectorXd vec_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array of numbers");
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw FormatError(std::string(what) + " must be an array of numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("member \"") + key + "\": " + e.what());
  }
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing member \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("member \"") + key + "\": " + e.what());
  }
}

void check_schema(const json& j) {
  if (j.is_object() && j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
    throw FormatError("unsupported schema_version " + j.at("schema_version").dump());
}

}  // namespace

json to_json(const ModelSpec& spec, const std::optional<Eigen::VectorXd>& theta) {
  json j{{"family", spec.family_name()}};
  if (spec.family() != Family::LongMemory) j["p"] = spec.p();
  if (spec.family() == Family::Glarch) j["q"] = spec.q();
  if (theta) j["theta"] = vec_to_json(*theta);
  return j;
}

ModelSpec model_from_json(const json& j) {
  const auto family = require<std::string>(j, "family");
  try {
    if (family == "larch") return ModelSpec::larch(require<int>(j, "p"));
    if (family == "glarch") return ModelSpec::glarch(require<int>(j, "p"), require<int>(j, "q"));
    if (family == "longmemory") return ModelSpec::long_memory();
  } catch (const FormatError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  throw FormatError("unknown model family \"" + family + "\" (expected larch, glarch or longmemory)");
}

std::optional<Eigen::VectorXd> theta_from_json(const json& j, const ModelSpec& spec) {
  if (!j.contains("theta") || j.at("theta").is_null()) return std::nullopt;
  Eigen::VectorXd theta = vec_from_json(j.at("theta"), "theta");
  try {
    validate_params(spec, theta);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return theta;
}

json to_json(const NoiseSpec& noise) {
  if (noise.kind == NoiseSpec::Kind::GaussianL1) return {{"noise", "gaussian"}};
  return {{"noise", "student"}, {"nu", noise.nu}};
}

NoiseSpec noise_from_json(const json& j) {
  const auto kind = require<std::string>(j, "noise");
  if (kind == "gaussian") return NoiseSpec::gaussian();
  if (kind == "student") {
    try {
      return NoiseSpec::student(require<int>(j, "nu"));
    } catch (const FormatError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  throw FormatError("unknown noise \"" + kind + "\" (expected gaussian or student)");
}

json to_json(const SimConfig& cfg) { return {{"burn_in", cfg.burn_in}, {"trunc_K", cfg.trunc_K}}; }

SimConfig sim_config_from_json(const json& j) {
  SimConfig cfg;
  cfg.burn_in = get_or<Index>(j, "burn_in", cfg.burn_in);
  cfg.trunc_K = get_or<Index>(j, "trunc_K", cfg.trunc_K);
  if (cfg.burn_in < 0 || cfg.trunc_K < 1) throw FormatError("sim: burn_in must be >= 0 and trunc_K >= 1");
  return cfg;
}

json to_json(const ContrastKind& kind) {
  switch (kind.type) {
    case ContrastKind::Type::Lav: return {{"kind", "lav"}};
    case ContrastKind::Type::WeightedLs: return {{"kind", "wls"}};
    case ContrastKind::Type::SmoothedQml: return {{"kind", "sqml"}, {"h", kind.h}};
  }
  return {};
}

ContrastKind contrast_kind_from_json(const json& j) {
  const auto kind = require<std::string>(j, "kind");
  if (kind == "lav") return ContrastKind::lav();
  if (kind == "wls") return ContrastKind::wls();
  if (kind == "sqml") {
    const double h = require<double>(j, "h");
    if (!(h > 0.0)) throw FormatError("sqml: h must be positive");
    return ContrastKind::sqml(h);
  }
  throw FormatError("unknown estimator kind \"" + kind + "\" (expected lav, sqml or wls)");
}

json to_json(const FitOptions& opts) {
  json j{{"box", {{"lo", vec_to_json(opts.box.lo)}, {"hi", vec_to_json(opts.box.hi)}}},
         {"starts", opts.starts},
         {"tol", opts.tol},
         {"max_iter", opts.max_iter}};
  j["trunc_K"] = opts.trunc_K ? json(*opts.trunc_K) : json(nullptr);
  return j;
}

FitOptions fit_options_from_json(const json& j, const ModelSpec& spec) {
  FitOptions o = default_fit_options(spec);
  if (j.is_null()) return o;
  if (!j.is_object()) throw FormatError("fit options must be an object");
  if (j.contains("box")) {
    o.box.lo = vec_from_json(require<json>(j.at("box"), "lo"), "box.lo");
    o.box.hi = vec_from_json(require<json>(j.at("box"), "hi"), "box.hi");
    if (o.box.dim() != spec.dim()) throw FormatError("box dimension does not match the model");
    try {
      o.box.validate();
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
    if (!(o.box.lo(0) > 0.0)) throw FormatError("box: intercept lower bound must be positive");
  }
  o.starts = get_or<int>(j, "starts", o.starts);
  o.tol = get_or<double>(j, "tol", o.tol);
  o.max_iter = get_or<int>(j, "max_iter", o.max_iter);
  if (j.contains("trunc_K") && !j.at("trunc_K").is_null()) o.trunc_K = require<Index>(j, "trunc_K");
  if (o.starts < 1 || o.max_iter < 1 || !(o.tol > 0.0)) throw FormatError("fit: starts, max_iter and tol must be positive");
  return o;
}

json to_json(const EstimateResult& res, const ModelSpec& spec) {
  return {{"schema_version", kSchemaVersion},
          {"model", to_json(spec)},
          {"estimator", to_json(res.kind)},
          {"theta_hat", vec_to_json(res.theta_hat)},
          {"coordinates", spec.coordinate_names()},
          {"contrast", res.contrast},
          {"converged", res.converged},
          {"n_evals", res.n_evals},
          {"start_index", res.start_index},
          {"trunc_K", res.trunc_K},
          {"in_theta2", {{"inside", res.theta2.inside}, {"margin", res.theta2.margin}}}};
}

EstimateResult estimate_result_from_json(const json& j, const ModelSpec& spec) {
  check_schema(j);
  EstimateResult r;
  r.theta_hat = vec_from_json(require<json>(j, "theta_hat"), "theta_hat");
  if (r.theta_hat.size() != spec.dim()) throw FormatError("theta_hat does not match the model dimension");
  r.kind = j.contains("estimator") ? contrast_kind_from_json(j.at("estimator")) : ContrastKind::lav();
  r.contrast = get_or<double>(j, "contrast", 0.0);
  r.converged = get_or<bool>(j, "converged", true);
  r.n_evals = get_or<int>(j, "n_evals", 0);
  r.start_index = get_or<int>(j, "start_index", 0);
  r.trunc_K = get_or<Index>(j, "trunc_K", 0);
  return r;
}

json to_json(const SandwichCovariance& cov, const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
             const std::vector<Interval>& intervals, double level, const ModelSpec& spec) {
  json ci = json::array();
  const auto names = spec.coordinate_names();
  for (std::size_t i = 0; i < intervals.size(); ++i)
    ci.push_back({{"coordinate", names[i]},
                  {"estimate", theta_hat(static_cast<Index>(i))},
                  {"lo", intervals[i].lo},
                  {"hi", intervals[i].hi}});
  return {{"schema_version", kSchemaVersion},
          {"model", to_json(spec)},
          {"n", cov.n},
          {"sigma_xi2_hat", cov.sigma_xi2_hat},
          {"gamma1_hat", mat_to_json(cov.gamma1_hat)},
          {"gamma2_hat", mat_to_json(cov.gamma2_hat)},
          {"condition", cov.condition},
          {"cov", mat_to_json(cov.cov)},
          {"level", level},
          {"intervals", ci}};
}

json to_json(const ExperimentConfig& cfg) {
  json est = json::array();
  for (const auto& k : cfg.estimators) est.push_back(to_json(k));
  return {{"schema_version", kSchemaVersion},
          {"model", to_json(cfg.spec, cfg.theta_star)},
          {"noise", to_json(cfg.noise)},
          {"n_list", cfg.n_list},
          {"reps", cfg.reps},
          {"estimators", est},
          {"master_seed", cfg.master_seed},
          {"sim", to_json(cfg.sim_cfg)},
          {"fit", to_json(cfg.fit_opts)},
          {"rescale", cfg.rescale}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
  check_schema(j);
  ExperimentConfig cfg;
  const json model = require<json>(j, "model");
  cfg.spec = model_from_json(model);
  auto theta = theta_from_json(model, cfg.spec);
  if (!theta) throw FormatError("model.theta (the true parameter) is required for an experiment");
  cfg.theta_star = *theta;
  cfg.noise = j.contains("noise") ? noise_from_json(j.at("noise")) : NoiseSpec::gaussian();
  cfg.n_list = require<std::vector<Index>>(j, "n_list");
  cfg.reps = require<int>(j, "reps");
  cfg.estimators.clear();
  if (j.contains("estimators")) {
    for (const auto& e : j.at("estimators")) cfg.estimators.push_back(contrast_kind_from_json(e));
  } else {
    cfg.estimators.push_back(ContrastKind::lav());
  }
  cfg.master_seed = get_or<std::uint64_t>(j, "master_seed", 0);
  cfg.sim_cfg = j.contains("sim") ? sim_config_from_json(j.at("sim")) : SimConfig{};
  cfg.fit_opts = fit_options_from_json(j.contains("fit") ? j.at("fit") : json(nullptr), cfg.spec);
  cfg.rescale = get_or<bool>(j, "rescale", true);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return cfg;
}

json to_json(const McReport& report) {
  json rows = json::array();
  for (const auto& e : report.entries) {
    auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    rows.push_back({{"estimator", e.estimator},
                    {"n", e.n},
                    {"coordinate", e.coordinate},
                    {"rmse", num(e.rmse)},
                    {"bias", num(e.mean_bias)},
                    {"reps_used", e.reps_used},
                    {"failures", e.failures}});
  }
  return {{"schema_version", kSchemaVersion},
          {"provenance", {{"master_seed", report.master_seed}, {"config_hash", report.config_hash}}},
          {"reps", report.reps},
          {"entries", rows}};
}

json to_json(const Trajectory& traj) {
  return {{"schema_version", kSchemaVersion},
          {"meta",
           {{"seed", traj.meta.seed},
            {"burn_in", traj.meta.burn_in},
            {"trunc_K", traj.meta.trunc_K},
            {"model", to_json(traj.meta.spec, traj.meta.theta)},
            {"noise", to_json(traj.meta.noise)}}},
          {"n", traj.n()},
          {"x", vec_to_json(traj.x)}};
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line/column for the diagnostic.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << source << ":" << line << ":" << col << ": malformed JSON: " << e.what();
    throw FormatError(os.str());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_trajectory_csv(std::ostream& os, const Eigen::Ref<const Eigen::VectorXd>& x) {
  os << "x\n";
  for (Index i = 0; i < x.size(); ++i) os << format_double(x(i)) << '\n';
}

Eigen::VectorXd read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x") throw FormatError("CSV header must be \"x\", got \"" + line + "\"");
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc() || res.ptr != line.data() + line.size())
      throw FormatError("CSV line " + std::to_string(lineno) + ": not a number: \"" + line + "\"");
    values.push_back(v);
  }
  if (values.empty()) throw FormatError("CSV holds no observations");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
}

void write_report_csv(std::ostream& os, const McReport& report) {
  os << "estimator,n,coordinate,rmse,bias,failures\n";
  for (const auto& e : report.entries)
    os << e.estimator << ',' << e.n << ',' << e.coordinate << ',' << format_double(e.rmse) << ','
       << format_double(e.mean_bias) << ',' << e.failures << '\n';
}

std::string config_hash(const json& j) {
  const std::string text = j.dump();  // object keys are stored sorted
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace larch
