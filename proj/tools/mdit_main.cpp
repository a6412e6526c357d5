// mdit: embedding-space task interpolation, diversity selection and toy
// fine-tuning from one JSON config.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdit/error.hpp"
#include "mdit/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonOptions {
  std::string config;
  std::vector<std::string> tasks;
  std::optional<double> alpha;
  std::optional<std::size_t> per_pair;
  std::optional<std::size_t> bucket_width;
  std::optional<std::size_t> clusters;
  std::optional<std::size_t> budget;
  bool no_selection = false;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool paper_preset = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON pipeline config");
  cmd->add_option("--task", o.tasks, "NAME=PATH task file (repeatable)");
  cmd->add_option("--alpha", o.alpha, "Beta(alpha, alpha) concentration");
  cmd->add_option("--t", o.per_pair, "generated samples per pair (T)");
  cmd->add_option("--bucket-width", o.bucket_width, "input-length bucket width in tokens");
  cmd->add_option("--clusters", o.clusters, "K-Means cluster count");
  cmd->add_option("--budget", o.budget, "number of samples to select");
  cmd->add_flag("--no-cluster-selection", o.no_selection, "train on the whole pool");
  cmd->add_option("--seed", o.seed, "global seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_flag("--paper-preset", o.paper_preset, "lr 2e-5, batch 16, 3 epochs");
}

ordered_json& section(ordered_json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) doc[key] = ordered_json::object();
  return doc[key];
}

mdit::pipeline::PipelineConfig build_config(const CommonOptions& o) {
  ordered_json doc = ordered_json::object();
  fs::path base = fs::current_path();
  if (!o.config.empty()) {
    doc = mdit::pipeline::read_config_json(o.config);
    base = fs::absolute(o.config).parent_path();
  }
  if (!doc.is_object()) throw mdit::ConfigError({"<root>: config must be a JSON object"});

  std::vector<std::string> violations;
  for (const auto& arg : o.tasks) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
      violations.push_back("--task: expected NAME=PATH, got '" + arg + "'");
      continue;
    }
    const auto name = arg.substr(0, eq);
    const auto path = fs::absolute(arg.substr(eq + 1)).string();
    auto& tasks = doc["tasks"];
    if (tasks.is_array()) {
      tasks.push_back({{"name", name}, {"path", path}});
    } else {
      if (!tasks.is_object()) tasks = ordered_json::object();
      tasks[name] = path;
    }
  }
  if (!violations.empty()) throw mdit::ConfigError(violations);

  if (o.alpha) section(doc, "interpolation")["alpha"] = *o.alpha;
  if (o.per_pair) section(doc, "interpolation")["per_pair"] = *o.per_pair;
  if (o.bucket_width) section(doc, "interpolation")["bucket_width"] = *o.bucket_width;
  if (o.clusters) section(doc, "clustering")["clusters"] = *o.clusters;
  if (o.budget) section(doc, "clustering")["budget"] = *o.budget;
  if (o.no_selection) section(doc, "clustering")["selection"] = false;
  if (o.seed) doc["seed"] = *o.seed;
  if (!o.out.empty()) doc["out"] = fs::absolute(o.out).string();
  if (o.paper_preset) {
    auto& tr = section(doc, "training");
    tr["learning_rate"] = 2e-5;
    tr["batch_size"] = 16;
    tr["epochs"] = 3;
  }
  return mdit::pipeline::parse_config(doc, base);
}

std::vector<std::string> split_values(const std::string& list) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : list) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void print_report(const mdit::pipeline::RunReport& r, const fs::path& out) {
  std::cout << "original=" << r.original << " generated=" << r.generated << " selected=" << r.selected
            << " initial_loss=" << r.training.loss.initial_loss << " final_loss=" << r.training.loss.final_loss
            << " nll=" << r.training.metrics.nll << " accuracy=" << r.training.metrics.accuracy << "\n"
            << "artifacts in " << out.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embedding-space instruction data interpolation with diversity selection"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto* generate = app.add_subcommand("generate", "tokenize, embed and interpolate the task corpora");
  auto* select = app.add_subcommand("select", "cluster the pool and select the training set");
  auto* train = app.add_subcommand("train", "train the toy model on the selection");
  auto* run = app.add_subcommand("run", "full pipeline");
  auto* sweep = app.add_subcommand("sweep", "one pipeline run per value of an axis");
  auto* project = app.add_subcommand("project", "export a 2-D PCA projection of the pool");
  for (auto* cmd : {generate, select, train, run, sweep, project}) add_common(cmd, opts);

  std::string axis;
  std::string values;
  sweep->add_option("--axis", axis, "alpha, T or budget")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto config = build_config(opts);
    if (*generate) {
      const auto s = mdit::pipeline::stage_generate(config);
      std::cout << "original=" << s.original << " generated=" << s.generated << " vocab=" << s.vocab_size << "\n";
    } else if (*select) {
      const auto s = mdit::pipeline::stage_select(config);
      std::cout << "pool=" << s.pool << " selected=" << s.selected << "\n";
    } else if (*train) {
      const auto s = mdit::pipeline::stage_train(config);
      std::cout << "trained_samples=" << s.trained_samples << " initial_loss=" << s.loss.initial_loss
                << " final_loss=" << s.loss.final_loss << " nll=" << s.metrics.nll
                << " accuracy=" << s.metrics.accuracy << "\n";
    } else if (*run) {
      print_report(mdit::pipeline::run_pipeline(config), config.out);
    } else if (*sweep) {
      const auto ax = mdit::pipeline::parse_axis(axis);
      const auto rows = mdit::pipeline::sweep(config, ax, split_values(values));
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.ok ? 0 : 1;
      std::cout << rows.size() << " runs, " << failed << " failed; table: "
                << (config.out / (std::string("sweep_") + mdit::pipeline::to_string(ax) + ".csv")).string() << "\n";
    } else if (*project) {
      mdit::pipeline::stage_project(config);
      std::cout << "wrote " << (config.out / "projection.csv").string() << "\n";
    }
  } catch (const mdit::Error& e) {
    std::cerr << "error (" << mdit::to_string(e.kind()) << "): " << e.what() << "\n";
    return mdit::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
