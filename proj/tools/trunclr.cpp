#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "trunclr/dataset_io.hpp"
#include "trunclr/errors.hpp"
#include "trunclr/fixtures.hpp"
#include "trunclr/pipeline.hpp"

namespace fs = std::filesystem;
using namespace trunclr;

namespace {

enum Exit { kOk = 0, kConfigError = 2, kStageFailure = 3, kAssumptionViolation = 4 };

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  writer(out);
  if (!out) throw Error("failed writing " + path.string());
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
}

void emit_dataset(const Dataset& data, const std::string& out) {
  if (out.empty()) {
    write_dataset(data, std::cout);
  } else {
    save_dataset(data, out);
  }
}

struct RunArgs {
  std::string config;
  std::string out;
  std::string trace_dir;
  std::string metrics;
  std::string truth;
  unsigned workers = 1;
  std::size_t trace_every = 1000;
  bool strict = false;
};

int do_run(const RunArgs& a) {
  const RunConfig config = load_config(a.config);
  if (config.mode == RunMode::GenerateOnly) {
    if (a.out.empty()) throw ConfigError("generate_only configs need --out for the dataset");
    save_dataset(generate_dataset(config), a.out);
    if (!a.truth.empty()) write_text(a.truth, dump_json(truth_to_json(*config.model)));
    return kOk;
  }

  RunOptions options;
  options.workers = a.workers;
  options.trace_every = a.trace_dir.empty() ? 0 : a.trace_every;
  const EstimateReport report = run_pipeline(config, options);

  const std::string text = dump_json(report_to_json(report));
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
  if (!a.trace_dir.empty()) {
    fs::create_directories(a.trace_dir);
    for (std::size_t i = 0; i < report.traces.size(); ++i) {
      write_file(fs::path(a.trace_dir) / ("run_" + std::to_string(i) + ".csv"),
                 [&](std::ostream& out) { write_trace_csv(report.traces[i], out); });
    }
    write_file(fs::path(a.trace_dir) / "metrics.csv",
               [&](std::ostream& out) { write_metrics_csv(report.metrics(), out); });
  }
  if (!a.metrics.empty()) {
    write_file(a.metrics, [&](std::ostream& out) { write_metrics_csv(report.metrics(), out); });
  }
  for (const auto& w : report.warnings) std::cerr << "warning [" << w.code << "]: " << w.message << '\n';
  if (a.strict && report.has_assumption_violation()) return kAssumptionViolation;
  return kOk;
}

struct GenerateArgs {
  std::string config;
  std::string fixture;
  std::string out;
  std::string truth;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
};

int do_generate(const GenerateArgs& a) {
  if (a.fixture == "figure2") {
    const auto g = fixtures::figure2_instance();
    Json j;
    j["positives"] = g.positives;
    j["unlabeled"] = g.unlabeled;
    j["k"] = g.k;
    j["eps"] = g.eps;
    j["expected_discard_count"] = g.expected_discard_count;
    if (a.out.empty()) {
      std::cout << dump_json(j);
    } else {
      write_text(a.out, dump_json(j));
    }
    return kOk;
  }

  RunConfig config;
  if (!a.config.empty()) {
    config = load_config(a.config);
    if (!config.model) throw ConfigError("generate needs a config with a model");
  } else {
    config.model = fixtures::model_fixture(a.fixture);
    config.model_label = a.fixture;
  }
  if (a.n) {
    if (*a.n < 1) throw ConfigError("--n must be at least 1");
    config.n = *a.n;
  }
  if (a.seed) config.seed = *a.seed;
  if (a.config.empty() && a.out.empty() && a.truth.empty()) {
    emit_dataset(generate_dataset(config), "");
    return kOk;
  }
  if (a.out.empty()) throw ConfigError("generate needs --out");
  emit_dataset(generate_dataset(config), a.out);
  if (!a.truth.empty()) write_text(a.truth, dump_json(truth_to_json(*config.model)));
  return kOk;
}

int do_eval(const std::string& report, const std::string& truth) {
  std::cout << dump_json(evaluate_report(read_json(report), read_json(truth)));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear regression from responses truncated to an unknown union of intervals"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Estimate w from a config (model or dataset)");
  run_cmd->add_option("--config", run.config, "Run config JSON")->required();
  run_cmd->add_option("--out", run.out, "Report JSON path (stdout when omitted)");
  run_cmd->add_option("--trace-dir", run.trace_dir, "Directory for PSGD traces and metrics.csv");
  run_cmd->add_option("--trace-every", run.trace_every, "Trace every n-th PSGD step")->check(CLI::PositiveNumber);
  run_cmd->add_option("--metrics", run.metrics, "Tidy metrics CSV path");
  run_cmd->add_option("--truth", run.truth, "Truth JSON path for generate_only configs");
  run_cmd->add_option("--workers", run.workers, "Parallel PSGD runs")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--strict", run.strict, "Exit with code 4 on assumption violations");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Draw a truncated dataset from a model config or fixture");
  auto* gen_config = gen_cmd->add_option("--config", gen.config, "Config JSON with a model");
  auto* gen_fixture = gen_cmd->add_option("--fixture", gen.fixture, "Named fixture");
  gen_config->excludes(gen_fixture);
  gen_fixture->excludes(gen_config);
  gen_cmd->add_option("--out", gen.out, "Output path (stdout for fixtures when omitted)");
  gen_cmd->add_option("--truth", gen.truth, "Write w_star and survival_set JSON here");
  gen_cmd->add_option("--n", gen.n, "Sample count");
  gen_cmd->add_option("--seed", gen.seed, "Master seed");

  std::string eval_report, eval_truth;
  auto* eval_cmd = app.add_subcommand("eval", "Error norms of a report against ground truth");
  eval_cmd->add_option("--report", eval_report, "Report JSON")->required();
  eval_cmd->add_option("--truth", eval_truth, "Truth JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return do_run(run);
    if (*gen_cmd) {
      if (gen.config.empty() && gen.fixture.empty()) throw ConfigError("generate needs --config or --fixture");
      return do_generate(gen);
    }
    return do_eval(eval_report, eval_truth);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const StageError& e) {
    std::cerr << "stage '" << e.stage() << "' failed: " << e.what() << '\n';
    return kStageFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStageFailure;
  }
}
