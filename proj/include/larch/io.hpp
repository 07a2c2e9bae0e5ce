#pragma once

#include "larch/estimate.hpp"
#include "larch/infer.hpp"
#include "larch/mc.hpp"
#include "larch/model.hpp"
#include "larch/noise.hpp"
#include "larch/simulate.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace larch {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or semantically invalid input document.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

// Model: {"family":"larch|glarch|longmemory","p":int,"q":int,"theta":[...]}
json to_json(const ModelSpec& spec, const std::optional<Eigen::VectorXd>& theta = std::nullopt);
ModelSpec model_from_json(const json& j);
/// The "theta" member, validated against the spec; nullopt when absent.
std::optional<Eigen::VectorXd> theta_from_json(const json& j, const ModelSpec& spec);

// Noise: {"noise":"gaussian"} or {"noise":"student","nu":6}
json to_json(const NoiseSpec& noise);
NoiseSpec noise_from_json(const json& j);

json to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const json& j);

// Contrast kind: {"kind":"lav"} | {"kind":"sqml","h":2} | {"kind":"wls"}
json to_json(const ContrastKind& kind);
ContrastKind contrast_kind_from_json(const json& j);

json to_json(const FitOptions& opts);
/// Missing members take the defaults for `spec`.
FitOptions fit_options_from_json(const json& j, const ModelSpec& spec);

json to_json(const EstimateResult& res, const ModelSpec& spec);
EstimateResult estimate_result_from_json(const json& j, const ModelSpec& spec);

json to_json(const SandwichCovariance& cov, const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
             const std::vector<Interval>& intervals, double level, const ModelSpec& spec);

json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const json& j);

json to_json(const McReport& report);

/// Trajectory with its generation metadata.
json to_json(const Trajectory& traj);

/// Parses text, turning parser failures into FormatError with line/column.
json parse_json(const std::string& text, const std::string& source = "input");
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// One value per line under a header "x".
void write_trajectory_csv(std::ostream& os, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd read_trajectory_csv(std::istream& is);

/// Columns: estimator,n,coordinate,rmse,bias,failures
void write_report_csv(std::ostream& os, const McReport& report);

/// 64-bit FNV-1a of the canonical (compact, key-sorted) JSON dump, as hex.
std::string config_hash(const json& j);

}  // namespace larch
