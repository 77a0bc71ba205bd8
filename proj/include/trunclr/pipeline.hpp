#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trunclr/psgd.hpp"
#include "trunclr/serialization.hpp"
#include "trunclr/synthetic_model.hpp"
#include "trunclr/warm_start.hpp"

namespace trunclr {

enum class RunMode { UnknownSet, KnownSet, GenerateOnly };

std::string to_string(RunMode mode);

/// Replacements for the plug-in constants; unset fields are estimated.
struct ConstantOverrides {
  std::optional<double> alpha;
  std::optional<double> sigma;
  std::optional<double> beta;
  std::optional<double> rho;
  std::optional<double> ball_radius;
  std::optional<double> window;
  std::optional<double> kappa;
  std::optional<double> zeta_sampler;
  double c_ball = kDefaultBallConstant;
};

struct RunConfig {
  RunMode mode = RunMode::UnknownSet;
  std::uint64_t seed = 0;
  /// Generative model; data are drawn from it unless dataset_path is set.
  std::optional<TruncatedModel> model;
  std::string model_label;  // fixture name or "custom"
  std::filesystem::path dataset_path;
  std::size_t n = 100'000;
  std::optional<IntervalUnion> known_set;
  int k = 2;
  double eps = 0.05;
  double zeta_target = 0.2;
  double delta = 0.1;
  std::size_t steps = 200'000;
  std::size_t runs = 9;
  std::size_t kappa_probes = 20;
  std::size_t kappa_subsample = 20'000;
  std::size_t alpha_draws = 100'000;
  ConstantOverrides overrides;
};

/// Throws ConfigError on unknown keys, bad types or out-of-range values.
/// Relative dataset paths are resolved against base_dir.
RunConfig parse_config(const Json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
/// Normalised echo of a parsed config with every default filled in.
Json config_to_json(const RunConfig& config);

struct RunOptions {
  unsigned workers = 1;
  /// Trace every n-th PSGD step; 0 disables traces.
  std::size_t trace_every = 0;
};

struct Warning {
  std::string code;
  std::string message;
  bool assumption_violation = false;
};

struct MetricRow {
  std::string quantity;
  double value;
  std::string stage;
};

struct Diagnostics {
  std::size_t n = 0;
  std::optional<double> acceptance_rate;
  double alpha_hat = 0.0;
  std::string alpha_source;
  std::optional<double> alpha_std_error;
  double sigma_hat = 0.0;
  double beta_hat = 0.0;
  double rho_sq_hat = 0.0;
  double min_eigenvalue = 0.0;
  double ball_radius = 0.0;
  std::optional<double> window;
  std::optional<std::size_t> discard_budget;
  std::size_t set_pieces = 0;
  std::size_t singletons_dropped = 0;
  std::optional<double> implied_set_accuracy;
  std::optional<double> symdiff_mass;
  double kappa = 0.0;
  std::optional<double> kappa_raw_min;
  bool kappa_floored = false;
  double zeta_sampler = 0.0;
  std::size_t skipped_steps = 0;
  std::size_t aggregate_index = 0;
  bool low_confidence = false;
  double grad_norm_at_w_final = 0.0;
  std::size_t samples_in_set = 0;
  std::size_t samples_excluded = 0;
};

struct EstimateReport {
  RunMode mode = RunMode::UnknownSet;
  std::uint64_t seed = 0;
  Json config;
  Vector w_hat_warm;
  ProjectionBall ball;
  IntervalUnion learned_set;
  std::vector<Vector> psgd_runs;
  Vector w_final;
  Diagnostics diagnostics;
  std::vector<Warning> warnings;
  Json schedule;  // configured values next to the rule that produced them
  std::vector<std::pair<std::string, double>> timings;  // seconds per stage
  std::vector<std::vector<TraceRow>> traces;           // one per PSGD run when tracing

  bool has_assumption_violation() const;
  std::vector<MetricRow> metrics() const;
};

/// Draws config.n samples from the configured model on the "data" stream.
Dataset generate_dataset(const RunConfig& config, SampleStats* stats = nullptr);

/// Warm start, projection ball, set learning, kappa, K PSGD runs and
/// aggregation. Stage failures are rethrown as StageError.
EstimateReport run_unknown_set(const RunConfig& config, const RunOptions& options = {});
/// As run_unknown_set with the survival set given and set learning skipped.
EstimateReport run_known_set(const RunConfig& config, const IntervalUnion& s_star,
                             const RunOptions& options = {});
/// Dispatches on config.mode; GenerateOnly is rejected.
EstimateReport run_pipeline(const RunConfig& config, const RunOptions& options = {});

/// Stable key order; timings live in the last top-level field "timings".
Json report_to_json(const EstimateReport& report);
void save_report(const EstimateReport& report, const std::filesystem::path& path);
/// Rendering used for report files.
std::string dump_json(const Json& j);

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out);
void write_metrics_csv(const std::vector<MetricRow>& rows, std::ostream& out);

/// Ground truth for a generated dataset: w_star and survival_set.
Json truth_to_json(const TruncatedModel& model);
/// Error norms of a saved report against a truth file.
Json evaluate_report(const Json& report, const Json& truth);

}  // namespace trunclr
