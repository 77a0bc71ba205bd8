#include "trunclr/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "trunclr/dataset_io.hpp"
#include "trunclr/errors.hpp"
#include "trunclr/fixtures.hpp"
#include "trunclr/likelihood.hpp"
#include "trunclr/set_learner.hpp"

namespace trunclr {
namespace {

constexpr double kIdentifiabilityThreshold = 1e-6;
constexpr double kRhoSqFloor = 1e-6;


const Json& require(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  return j.at(key);
}

double get_number(const Json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number, got " + j.dump());
  return j.get<double>();
}

std::size_t get_count(const Json& j, const std::string& key, std::size_t min_value) {
  if (!j.is_number_integer() || j.get<long long>() < static_cast<long long>(min_value)) {
    throw ConfigError("'" + key + "' must be an integer >= " + std::to_string(min_value) + ", got " + j.dump());
  }
  return j.get<std::size_t>();
}

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <class F>
auto as_config_error(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(what + ": " + e.what());
  } catch (const Json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

FeatureDistSpec parse_features(const Json& j, int fallback_dim) {
  check_keys(j, "model.features", {"kind", "dimension", "mean", "covariance", "radius"});
  const auto& kind = require(j, "kind");
  if (!kind.is_string()) throw ConfigError("model.features.kind must be a string");
  const auto k = kind.get<std::string>();
  const int dim = j.contains("dimension")
                      ? static_cast<int>(get_count(j.at("dimension"), "model.features.dimension", 1))
                      : fallback_dim;
  if (k == "gaussian") {
    Vector mean = j.contains("mean") ? vector_from_json(j.at("mean")) : Vector::Zero(dim);
    Matrix cov = j.contains("covariance") ? matrix_from_json(j.at("covariance"))
                                          : Matrix::Identity(mean.size(), mean.size());
    return FeatureDistSpec::gaussian(std::move(mean), std::move(cov));
  }
  if (k == "uniform_ball") {
    return FeatureDistSpec::uniform_ball(dim, get_number(require(j, "radius"), "model.features.radius"));
  }
  if (k == "simplex_vertices") return FeatureDistSpec::simplex_vertices(dim);
  throw ConfigError("model.features.kind must be gaussian, uniform_ball or simplex_vertices, got '" + k + "'");
}

TruncatedModel parse_model(const Json& j) {
  check_keys(j, "model", {"w_star", "survival_set", "features", "rejection_cap"});
  Vector w = vector_from_json(require(j, "w_star"));
  IntervalUnion s = interval_union_from_json(require(j, "survival_set"));
  FeatureDistSpec features = j.contains("features")
                                 ? parse_features(j.at("features"), static_cast<int>(w.size()))
                                 : FeatureDistSpec::gaussian(Vector::Zero(w.size()),
                                                             Matrix::Identity(w.size(), w.size()));
  const std::size_t cap = j.contains("rejection_cap")
                              ? get_count(j.at("rejection_cap"), "model.rejection_cap", 1)
                              : TruncatedModel::kDefaultRejectionCap;
  return TruncatedModel::create(std::move(w), std::move(s), std::move(features), cap);
}

Json features_to_json(const FeatureDistSpec& f) {
  Json j;
  switch (f.kind) {
    case FeatureDistSpec::Kind::Gaussian:
      j["kind"] = "gaussian";
      j["dimension"] = f.dimension;
      j["mean"] = vector_to_json(f.mean);
      j["covariance"] = matrix_to_json(f.covariance);
      break;
    case FeatureDistSpec::Kind::UniformBall:
      j["kind"] = "uniform_ball";
      j["dimension"] = f.dimension;
      j["radius"] = f.radius;
      break;
    case FeatureDistSpec::Kind::SimplexVertices:
      j["kind"] = "simplex_vertices";
      j["dimension"] = f.dimension;
      break;
  }
  return j;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

using Clock = std::chrono::steady_clock;

class StageRunner {
 public:
  explicit StageRunner(EstimateReport& report) : report_(report) {}

  template <class F>
  auto operator()(const char* name, F&& f) {
    const auto start = Clock::now();
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        record(name, start);
      } else {
        auto result = f();
        record(name, start);
        return result;
      }
    } catch (const StageError&) {
      throw;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  }

 private:
  void record(const char* name, Clock::time_point start) {
    report_.timings.emplace_back(name, std::chrono::duration<double>(Clock::now() - start).count());
  }
  EstimateReport& report_;
};

Dataset head(const Dataset& data, std::size_t rows) {
  if (rows >= data.size()) return data;
  Dataset out;
  const auto r = static_cast<Eigen::Index>(rows);
  out.xs = data.xs.topRows(r);
  out.ys = data.ys.head(r);
  return out;
}

std::string describe(const Vector& v) {
  std::ostringstream out;
  out << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
  out << ']';
  return out.str();
}

struct Prepared {
  Dataset data;
  std::optional<double> acceptance_rate;
};

Prepared acquire_data(const RunConfig& config, StageRunner& stage) {
  return stage("data", [&] {
    Prepared p;
    if (!config.dataset_path.empty()) {
      p.data = load_dataset(config.dataset_path);
      if (config.model && p.data.dim() != config.model->dim()) {
        throw SchemaError("dataset dimension " + std::to_string(p.data.dim()) +
                          " does not match model dimension " + std::to_string(config.model->dim()));
      }
    } else {
      SampleStats stats;
      p.data = generate_dataset(config, &stats);
      p.acceptance_rate = static_cast<double>(stats.accepted) / static_cast<double>(stats.attempts);
    }
    p.data.validate();
    return p;
  });
}

Json schedule_json(const RunConfig& config, const Diagnostics& diag, RunMode mode);

EstimateReport run_core(const RunConfig& config, const std::optional<IntervalUnion>& known,
                        const RunOptions& options) {
  if (config.mode == RunMode::GenerateOnly) throw ConfigError("generate_only configs produce data, not reports");
  if (!config.model && config.dataset_path.empty()) throw ConfigError("config needs a model or a dataset");
  if (!config.model && !config.overrides.alpha) {
    throw ConfigError("dataset runs need overrides.alpha: the survival mass cannot be estimated without a model");
  }

  EstimateReport report;
  report.mode = known ? RunMode::KnownSet : RunMode::UnknownSet;
  report.seed = config.seed;
  report.config = config_to_json(config);
  auto& diag = report.diagnostics;
  StageRunner stage(report);

  const Prepared prepared = acquire_data(config, stage);
  const Dataset& data = prepared.data;
  diag.n = data.size();
  diag.acceptance_rate = prepared.acceptance_rate;
  const Dataset probe_data = head(data, config.kappa_subsample);

  stage("warm_start", [&] {
    const DesignStats stats = design_stats(data);
    diag.min_eigenvalue = stats.min_eigenvalue;
    if (stats.min_eigenvalue < kIdentifiabilityThreshold) {
      std::ostringstream msg;
      msg << "minimum eigenvalue of the empirical second moment is " << stats.min_eigenvalue
          << " (< 1e-6): the covariates do not identify w";
      report.warnings.push_back({"assumption_3_violation", msg.str(), true});
    }
    try {
      report.w_hat_warm = ols_estimate(data);
    } catch (const SingularDesign& e) {
      report.warnings.push_back({"singular_design", std::string(e.what()) + "; using minimum-norm least squares"});
      report.w_hat_warm = ols_min_norm(data);
    }

    if (config.overrides.alpha) {
      diag.alpha_hat = *config.overrides.alpha;
      diag.alpha_source = "override";
    } else {
      Rng rng(derive_seed(config.seed, "warm_start/alpha"));
      const AlphaEstimate a = estimate_alpha(*config.model, config.alpha_draws, rng);
      diag.alpha_hat = a.alpha;
      diag.alpha_std_error = a.std_error;
      diag.alpha_source = "model";
    }
    diag.sigma_hat = config.overrides.sigma.value_or(stats.sigma_hat);
    diag.beta_hat = config.overrides.beta.value_or(stats.beta_hat);
    diag.rho_sq_hat = config.overrides.rho ? *config.overrides.rho * *config.overrides.rho : stats.min_eigenvalue;
    if (config.overrides.ball_radius) {
      diag.ball_radius = *config.overrides.ball_radius;
    } else {
      double rho_sq = diag.rho_sq_hat;
      if (rho_sq < kRhoSqFloor) {
        rho_sq = kRhoSqFloor;
        report.warnings.push_back({"rho_floor", "rho^2 estimate floored at 1e-6 for the ball radius"});
      }
      diag.ball_radius =
          default_ball_radius(diag.sigma_hat, diag.beta_hat, rho_sq, diag.alpha_hat, config.overrides.c_ball);
    }
    report.ball = make_ball(report.w_hat_warm, diag.ball_radius);
  });

  if (known) {
    report.learned_set = *known;
  } else {
    stage("set_learning", [&] {
      Rng rng(derive_seed(config.seed, "set_learning/smooth"));
      const double window = config.overrides.window.value_or(default_window(data));
      const SetLearningResult learned =
          learn_survival_set_detailed(data, report.w_hat_warm, config.k, config.eps, window, rng);
      report.learned_set = learned.set;
      diag.window = window;
      diag.discard_budget = discard_budget(config.k, config.eps);
      diag.singletons_dropped = learned.raw.singletons.size();
      diag.implied_set_accuracy = implied_set_accuracy(data.size(), config.k, config.delta);
    });
  }
  diag.set_pieces = report.learned_set.size();
  if (config.model) {
    const IntervalUnion diff = symdiff(report.learned_set, config.model->survival_set());
    double mass = 0.0;
    for (Eigen::Index i = 0; i < probe_data.xs.rows(); ++i) {
      mass += gaussian_mass(diff, probe_data.xs.row(i).dot(config.model->w_star()));
    }
    diag.symdiff_mass = mass / static_cast<double>(probe_data.size());
  }

  stage("kappa", [&] {
    if (config.overrides.kappa) {
      diag.kappa = *config.overrides.kappa;
      return;
    }
    Rng rng(derive_seed(config.seed, "kappa/probes"));
    const KappaEstimate est =
        estimate_kappa(report.w_hat_warm, report.ball, report.learned_set, probe_data, config.kappa_probes, rng);
    diag.kappa = est.kappa;
    diag.kappa_raw_min = est.raw_min;
    diag.kappa_floored = est.floored;
    if (est.floored) {
      std::ostringstream msg;
      msg << "minimum Hessian eigenvalue " << est.raw_min << " over the ball is below the floor; using 1e-6";
      report.warnings.push_back({"kappa_floor", msg.str()});
    }
  });

  diag.zeta_sampler = config.overrides.zeta_sampler.value_or(std::sqrt(config.eps) / 2.0);

  stage("psgd", [&] {
    const std::size_t runs = config.runs;
    std::vector<PsgdResult> results(runs);
    std::vector<std::exception_ptr> errors(runs);
    PsgdOptions opt;
    opt.steps = config.steps;
    opt.kappa = diag.kappa;
    opt.trace_every = options.trace_every;
    auto work = [&](std::size_t i) {
      try {
        Rng rng(derive_seed(config.seed, "psgd/run/" + std::to_string(i)));
        DatasetSource source(data);
        results[i] = run_psgd_detailed(report.w_hat_warm, report.ball, report.learned_set, opt, diag.zeta_sampler,
                                       source, rng);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(runs)));
    if (workers == 1) {
      for (std::size_t i = 0; i < runs; ++i) work(i);
    } else {
      std::vector<std::thread> pool;
      std::atomic<std::size_t> next{0};
      for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < runs; i = next++) work(i);
        });
      }
      for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < runs; ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
    }
    for (auto& r : results) {
      diag.skipped_steps += r.skipped;
      report.psgd_runs.push_back(r.average);
      if (options.trace_every > 0) report.traces.push_back(std::move(r.trace));
    }
  });

  stage("aggregate", [&] {
    const AggregateResult agg = aggregate(report.psgd_runs, config.zeta_target);
    report.w_final = agg.estimate;
    diag.aggregate_index = agg.index;
    diag.low_confidence = agg.low_confidence;
    if (agg.low_confidence) {
      report.warnings.push_back(
          {"low_confidence", "no PSGD run lies within 2 zeta / 3 of a 3/5 majority of runs; returned the most central run"});
    }
    if (!report.w_final.allFinite()) throw Error("aggregated estimate is not finite: " + describe(report.w_final));
  });

  stage("diagnostics", [&] {
    const LikelihoodEval eval = evaluate_likelihood(report.w_final, report.learned_set, data, kGradient);
    diag.grad_norm_at_w_final = eval.gradient.norm();
    diag.samples_in_set = eval.used;
    diag.samples_excluded = eval.excluded;
    if (eval.excluded > 0 && !known) {
      report.warnings.push_back({"samples_outside_set", std::to_string(eval.excluded) +
                                                           " observed responses fall outside the learned set"});
    }
  });
  report.schedule = schedule_json(config, diag, report.mode);
  return report;
}

Json schedule_json(const RunConfig& config, const Diagnostics& diag, RunMode mode) {
  auto entry = [](Json value, const char* rule) {
    Json e;
    e["value"] = std::move(value);
    e["rule"] = rule;
    return e;
  };
  Json s;
  s["n"] = entry(diag.n, "configured; theory n = O((k + log(1/delta)) / eps^2) up to smoothness factors");
  if (mode == RunMode::UnknownSet) {
    s["discard_budget"] = entry(*diag.discard_budget, "ceil((k - 1) / eps)");
    s["window"] = entry(*diag.window, "1.5 * max |y| unless overridden; theory L = O(sqrt(log(1/eps)) + R)");
  }
  s["ball_radius"] = entry(diag.ball_radius, "c_ball * (sigma + beta) / (rho^2 * alpha)");
  s["kappa"] = entry(diag.kappa, "min Hessian eigenvalue over probes, floored at 1e-6; theory exp(-O(R^2))");
  s["steps"] = entry(config.steps, "configured; theory T = poly(d, 1/zeta, 1/kappa)");
  s["runs"] = entry(config.runs, "configured; theory K = O(log(1/delta))");
  s["zeta_sampler"] = entry(diag.zeta_sampler, "sqrt(eps) / 2; inert for the exact sampler");
  return s;
}

Json diagnostics_json(const Diagnostics& d) {
  Json j;
  j["n"] = d.n;
  j["acceptance_rate"] = optional_json(d.acceptance_rate);
  j["alpha_hat"] = d.alpha_hat;
  j["alpha_source"] = d.alpha_source;
  j["alpha_std_error"] = optional_json(d.alpha_std_error);
  j["sigma_hat"] = d.sigma_hat;
  j["beta_hat"] = d.beta_hat;
  j["rho_sq_hat"] = d.rho_sq_hat;
  j["min_eigenvalue_second_moment"] = d.min_eigenvalue;
  j["ball_radius"] = d.ball_radius;
  j["window"] = optional_json(d.window);
  j["discard_budget"] = d.discard_budget ? Json(*d.discard_budget) : Json(nullptr);
  j["set_pieces"] = d.set_pieces;
  j["singletons_dropped"] = d.singletons_dropped;
  j["implied_set_accuracy"] = optional_json(d.implied_set_accuracy);
  j["symdiff_mass"] = optional_json(d.symdiff_mass);
  j["kappa"] = d.kappa;
  j["kappa_raw_min"] = optional_json(d.kappa_raw_min);
  j["kappa_floored"] = d.kappa_floored;
  j["zeta_sampler"] = d.zeta_sampler;
  j["skipped_steps"] = d.skipped_steps;
  j["aggregate_index"] = d.aggregate_index;
  j["low_confidence"] = d.low_confidence;
  j["grad_norm_at_w_final"] = d.grad_norm_at_w_final;
  j["samples_in_set"] = d.samples_in_set;
  j["samples_excluded"] = d.samples_excluded;
  return j;
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::UnknownSet:
      return "unknown_set";
    case RunMode::KnownSet:
      return "known_set";
    case RunMode::GenerateOnly:
      return "generate_only";
  }
  return "unknown";
}

RunConfig parse_config(const Json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "config",
             {"mode", "seed", "model", "dataset", "n", "known_set", "k", "eps", "zeta_target", "delta", "T", "K",
              "kappa_probes", "kappa_subsample", "alpha_draws", "overrides"});
  RunConfig c;
  if (j.contains("mode")) {
    const auto& m = j.at("mode");
    const std::string s = m.is_string() ? m.get<std::string>() : "";
    if (s == "unknown_set") c.mode = RunMode::UnknownSet;
    else if (s == "known_set") c.mode = RunMode::KnownSet;
    else if (s == "generate_only") c.mode = RunMode::GenerateOnly;
    else throw ConfigError("mode must be unknown_set, known_set or generate_only, got " + m.dump());
  }
  if (j.contains("seed")) {
    const auto& seed = j.at("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
      throw ConfigError("'seed' must be a non-negative integer");
    }
    c.seed = seed.get<std::uint64_t>();
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    if (m.is_string()) {
      c.model_label = m.get<std::string>();
      c.model = fixtures::model_fixture(c.model_label);
    } else {
      c.model_label = "custom";
      c.model = as_config_error("invalid model", [&] { return parse_model(m); });
    }
  }
  if (j.contains("dataset")) {
    if (!j.at("dataset").is_string()) throw ConfigError("'dataset' must be a path string");
    std::filesystem::path p = j.at("dataset").get<std::string>();
    c.dataset_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  if (j.contains("n")) c.n = get_count(j.at("n"), "n", 1);
  if (j.contains("known_set")) {
    const auto& ks = j.at("known_set");
    if (ks.is_string() && ks.get<std::string>() == "model") {
      if (!c.model) throw ConfigError("known_set \"model\" needs a model");
      c.known_set = c.model->survival_set();
    } else {
      c.known_set = as_config_error("invalid known_set", [&] { return interval_union_from_json(ks); });
      if (c.known_set->empty()) throw ConfigError("known_set must be nonempty");
    }
  }
  if (j.contains("k")) c.k = static_cast<int>(get_count(j.at("k"), "k", 1));
  if (j.contains("eps")) c.eps = get_number(j.at("eps"), "eps");
  if (j.contains("zeta_target")) c.zeta_target = get_number(j.at("zeta_target"), "zeta_target");
  if (j.contains("delta")) c.delta = get_number(j.at("delta"), "delta");
  if (j.contains("T")) c.steps = get_count(j.at("T"), "T", 1);
  if (j.contains("K")) c.runs = get_count(j.at("K"), "K", 1);
  if (j.contains("kappa_probes")) c.kappa_probes = get_count(j.at("kappa_probes"), "kappa_probes", 1);
  if (j.contains("kappa_subsample")) c.kappa_subsample = get_count(j.at("kappa_subsample"), "kappa_subsample", 1);
  if (j.contains("alpha_draws")) c.alpha_draws = get_count(j.at("alpha_draws"), "alpha_draws", 1);
  if (j.contains("overrides")) {
    const auto& o = j.at("overrides");
    check_keys(o, "overrides",
               {"alpha", "sigma", "beta", "rho", "ball_radius", "window", "kappa", "zeta_sampler", "c_ball"});
    auto positive = [&](const char* key, std::optional<double>& slot) {
      if (!o.contains(key)) return;
      const double v = get_number(o.at(key), std::string("overrides.") + key);
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("overrides.") + key + " must be positive");
      slot = v;
    };
    positive("alpha", c.overrides.alpha);
    positive("sigma", c.overrides.sigma);
    positive("beta", c.overrides.beta);
    positive("rho", c.overrides.rho);
    positive("ball_radius", c.overrides.ball_radius);
    positive("window", c.overrides.window);
    positive("kappa", c.overrides.kappa);
    positive("zeta_sampler", c.overrides.zeta_sampler);
    std::optional<double> c_ball;
    positive("c_ball", c_ball);
    if (c_ball) c.overrides.c_ball = *c_ball;
    if (c.overrides.alpha && *c.overrides.alpha > 1.0) throw ConfigError("overrides.alpha must be in (0, 1]");
    if (c.overrides.zeta_sampler && *c.overrides.zeta_sampler >= 1.0) {
      throw ConfigError("overrides.zeta_sampler must be in (0, 1)");
    }
  }

  if (!(c.eps > 0.0 && c.eps < 0.5)) throw ConfigError("eps must lie in (0, 1/2)");
  if (!(c.delta > 0.0 && c.delta < 0.5)) throw ConfigError("delta must lie in (0, 1/2)");
  if (!(c.zeta_target > 0.0) || !std::isfinite(c.zeta_target)) throw ConfigError("zeta_target must be positive");
  switch (c.mode) {
    case RunMode::GenerateOnly:
      if (!c.model) throw ConfigError("generate_only needs a model");
      break;
    case RunMode::KnownSet:
      if (!c.known_set) {
        if (!c.model) throw ConfigError("known_set mode needs known_set or a model");
        c.known_set = c.model->survival_set();
      }
      [[fallthrough]];
    case RunMode::UnknownSet:
      if (!c.model && c.dataset_path.empty()) throw ConfigError("config needs 'model' or 'dataset'");
      if (!c.model && !c.overrides.alpha) throw ConfigError("dataset runs need overrides.alpha");
      break;
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, path.parent_path());
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["mode"] = to_string(c.mode);
  j["seed"] = c.seed;
  if (c.model) {
    Json m;
    m["label"] = c.model_label;
    m["w_star"] = vector_to_json(c.model->w_star());
    m["survival_set"] = interval_union_to_json(c.model->survival_set());
    m["features"] = features_to_json(c.model->features());
    m["rejection_cap"] = c.model->rejection_cap();
    j["model"] = std::move(m);
  } else {
    j["model"] = nullptr;
  }
  j["dataset"] = c.dataset_path.empty() ? Json(nullptr) : Json(c.dataset_path.generic_string());
  j["n"] = c.n;
  j["known_set"] = c.known_set ? interval_union_to_json(*c.known_set) : Json(nullptr);
  j["k"] = c.k;
  j["eps"] = c.eps;
  j["zeta_target"] = c.zeta_target;
  j["delta"] = c.delta;
  j["T"] = c.steps;
  j["K"] = c.runs;
  j["kappa_probes"] = c.kappa_probes;
  j["kappa_subsample"] = c.kappa_subsample;
  j["alpha_draws"] = c.alpha_draws;
  Json o;
  o["alpha"] = optional_json(c.overrides.alpha);
  o["sigma"] = optional_json(c.overrides.sigma);
  o["beta"] = optional_json(c.overrides.beta);
  o["rho"] = optional_json(c.overrides.rho);
  o["ball_radius"] = optional_json(c.overrides.ball_radius);
  o["window"] = optional_json(c.overrides.window);
  o["kappa"] = optional_json(c.overrides.kappa);
  o["zeta_sampler"] = optional_json(c.overrides.zeta_sampler);
  o["c_ball"] = c.overrides.c_ball;
  j["overrides"] = std::move(o);
  return j;
}

Dataset generate_dataset(const RunConfig& config, SampleStats* stats) {
  if (!config.model) throw ConfigError("generating data needs a model");
  Rng rng(derive_seed(config.seed, "data"));
  return sample_truncated(*config.model, config.n, rng, stats);
}

EstimateReport run_unknown_set(const RunConfig& config, const RunOptions& options) {
  return run_core(config, std::nullopt, options);
}

EstimateReport run_known_set(const RunConfig& config, const IntervalUnion& s_star, const RunOptions& options) {
  if (s_star.empty()) throw ConfigError("known survival set must be nonempty");
  return run_core(config, s_star, options);
}

EstimateReport run_pipeline(const RunConfig& config, const RunOptions& options) {
  switch (config.mode) {
    case RunMode::UnknownSet:
      return run_unknown_set(config, options);
    case RunMode::KnownSet:
      return run_known_set(config, *config.known_set, options);
    case RunMode::GenerateOnly:
      break;
  }
  throw ConfigError("generate_only configs produce data, not reports; use 'trunclr generate'");
}

bool EstimateReport::has_assumption_violation() const {
  for (const auto& w : warnings) {
    if (w.assumption_violation) return true;
  }
  return false;
}

std::vector<MetricRow> EstimateReport::metrics() const {
  const auto& d = diagnostics;
  std::vector<MetricRow> rows = {
      {"n", static_cast<double>(d.n), "data"},
      {"min_eigenvalue_second_moment", d.min_eigenvalue, "warm_start"},
      {"alpha_hat", d.alpha_hat, "warm_start"},
      {"ball_radius", d.ball_radius, "warm_start"},
      {"set_pieces", static_cast<double>(d.set_pieces), "set_learning"},
  };
  if (d.symdiff_mass) rows.push_back({"symdiff_mass", *d.symdiff_mass, "set_learning"});
  rows.push_back({"kappa", d.kappa, "kappa"});
  for (std::size_t i = 0; i < psgd_runs.size(); ++i) {
    rows.push_back({"run_" + std::to_string(i) + "_distance_to_final", (psgd_runs[i] - w_final).norm(), "psgd"});
  }
  rows.push_back({"skipped_steps", static_cast<double>(d.skipped_steps), "psgd"});
  rows.push_back({"low_confidence", d.low_confidence ? 1.0 : 0.0, "aggregate"});
  rows.push_back({"warm_to_final_distance", (w_hat_warm - w_final).norm(), "aggregate"});
  rows.push_back({"grad_norm_at_w_final", d.grad_norm_at_w_final, "diagnostics"});
  return rows;
}

Json report_to_json(const EstimateReport& r) {
  Json j;
  j["mode"] = to_string(r.mode);
  j["seed"] = r.seed;
  j["w_hat_warm"] = vector_to_json(r.w_hat_warm);
  Json ball;
  ball["center"] = vector_to_json(r.ball.center);
  ball["radius"] = r.ball.radius;
  j["ball"] = std::move(ball);
  j["learned_set"] = interval_union_to_json(r.learned_set);
  Json runs = Json::array();
  for (const auto& w : r.psgd_runs) runs.push_back(vector_to_json(w));
  j["psgd_runs"] = std::move(runs);
  j["w_final"] = vector_to_json(r.w_final);
  j["diagnostics"] = diagnostics_json(r.diagnostics);
  Json warnings = Json::array();
  for (const auto& w : r.warnings) {
    Json e;
    e["code"] = w.code;
    e["message"] = w.message;
    e["assumption_violation"] = w.assumption_violation;
    warnings.push_back(std::move(e));
  }
  j["warnings"] = std::move(warnings);
  j["schedule"] = r.schedule;
  j["config"] = r.config;
  Json timings;
  for (const auto& [name, secs] : r.timings) timings[name] = secs;
  j["timings"] = std::move(timings);
  return j;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void save_report(const EstimateReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << dump_json(report_to_json(report));
  if (!out) throw Error("failed writing " + path.string());
}

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out) {
  out << "t,eta,grad_norm,dist_to_center\n";
  for (const auto& r : rows) {
    out << r.t << ',' << format_double(r.eta) << ',' << format_double(r.grad_norm) << ','
        << format_double(r.dist_to_center) << '\n';
  }
}

void write_metrics_csv(const std::vector<MetricRow>& rows, std::ostream& out) {
  out << "quantity,value,stage\n";
  for (const auto& r : rows) out << r.quantity << ',' << format_double(r.value) << ',' << r.stage << '\n';
}

Json truth_to_json(const TruncatedModel& model) {
  Json j;
  j["w_star"] = vector_to_json(model.w_star());
  j["survival_set"] = interval_union_to_json(model.survival_set());
  return j;
}

Json evaluate_report(const Json& report, const Json& truth) {
  return as_config_error("cannot evaluate report", [&] {
    const Vector w_star = vector_from_json(require(truth, "w_star"));
    const Vector w_final = vector_from_json(require(report, "w_final"));
    const Vector w_warm = vector_from_json(require(report, "w_hat_warm"));
    if (w_final.size() != w_star.size() || w_warm.size() != w_star.size()) {
      throw ConfigError("report and truth dimensions differ");
    }
    Json out;
    out["w_final_error"] = (w_final - w_star).norm();
    out["w_hat_warm_error"] = (w_warm - w_star).norm();
    Json runs = Json::array();
    if (report.contains("psgd_runs")) {
      for (const auto& r : report.at("psgd_runs")) runs.push_back((vector_from_json(r) - w_star).norm());
    }
    out["psgd_run_errors"] = std::move(runs);
    if (truth.contains("survival_set") && report.contains("learned_set")) {
      const IntervalUnion diff =
          symdiff(interval_union_from_json(report.at("learned_set")), interval_union_from_json(truth.at("survival_set")));
      const double len = diff.length();
      out["set_symdiff_length"] = std::isfinite(len) ? Json(len) : Json("inf");
    }
    return out;
  });
}

}  // namespace trunclr
