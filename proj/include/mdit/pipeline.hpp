#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdit/interpolator.hpp"
#include "mdit/trainer.hpp"

namespace mdit::pipeline {

struct TaskSource {
  std::string name;
  std::filesystem::path path;
};

struct PipelineConfig {
  std::vector<TaskSource> tasks;
  std::size_t min_freq = 1;
  std::size_t embedding_dim = 64;

  double alpha = 8.0;
  std::size_t per_pair = 1;
  std::size_t bucket_width = 16;
  std::vector<interpolator::TaskPair> task_pairs;  // every distinct pair when left empty in the file

  std::optional<std::size_t> clusters;
  std::optional<std::size_t> budget;
  bool selection_enabled = true;
  std::size_t kmeans_max_iter = 100;
  double kmeans_tol = 1e-9;

  std::size_t hidden_width = 128;
  double learning_rate = 0.05;
  std::size_t epochs = 3;
  std::size_t batch_size = 16;

  std::uint64_t seed = 42;
  std::filesystem::path out = "runs/default";

  nlohmann::ordered_json to_json() const;
};

// Strict schema: unknown keys, wrong types and out-of-range values are all
// reported together in one ConfigError. Relative task paths resolve against
// base_dir.
PipelineConfig parse_config(const nlohmann::ordered_json& doc, const std::filesystem::path& base_dir);

// Reads, parses and validates a JSON config file.
PipelineConfig validate_config(const std::filesystem::path& path);

// Reads a config file as raw JSON (ConfigError when missing or malformed),
// so command-line overrides can be merged before parse_config.
nlohmann::ordered_json read_config_json(const std::filesystem::path& path);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct GenerateSummary {
  std::size_t original = 0;
  std::size_t generated = 0;
  std::size_t vocab_size = 0;
  nlohmann::ordered_json details;
};

struct SelectSummary {
  std::size_t pool = 0;
  std::size_t selected = 0;
  nlohmann::ordered_json cluster;  // null when selection is disabled
};

struct TrainSummary {
  std::size_t trained_samples = 0;
  trainer::LossReport loss;
  trainer::Metrics metrics;
};

// Stage entry points. Each reads what earlier stages persisted under config.out.
GenerateSummary stage_generate(const PipelineConfig& config);
SelectSummary stage_select(const PipelineConfig& config);
TrainSummary stage_train(const PipelineConfig& config);
void stage_project(const PipelineConfig& config);

struct RunReport {
  std::size_t original = 0;
  std::size_t generated = 0;
  std::size_t selected = 0;
  GenerateSummary generation;
  SelectSummary selection;
  TrainSummary training;
  std::vector<StageTiming> timings;

  nlohmann::ordered_json to_json(const PipelineConfig& config) const;
};

// generate -> select -> train (-> evaluate) -> project, writing report.json.
// A failing stage rethrows its error prefixed with the stage name.
RunReport run_pipeline(const PipelineConfig& config);

enum class SweepAxis { Alpha, T, Budget };

SweepAxis parse_axis(const std::string& name);
const char* to_string(SweepAxis axis);

struct SweepRow {
  std::string value;
  bool ok = false;
  std::string error;
  RunReport report;
};

// One run per value under <out>/sweep_<axis>/<axis>_<value>, consolidated in
// <out>/sweep_<axis>.csv. A failing run is recorded and the sweep continues.
std::vector<SweepRow> sweep(const PipelineConfig& base, SweepAxis axis, const std::vector<std::string>& values);

}  // namespace mdit::pipeline
