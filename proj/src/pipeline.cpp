#include "mdit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "mdit/artifacts.hpp"
#include "mdit/corpus.hpp"
#include "mdit/diversity.hpp"
#include "mdit/embedder.hpp"
#include "mdit/error.hpp"
#include "mdit/format.hpp"
#include "mdit/projection.hpp"
#include "mdit/rng.hpp"

namespace mdit::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Walks a JSON document and records every schema violation by field path.
class Checker {
public:
  void fail(const std::string& path, const std::string& msg) { violations_.push_back(path + ": " + msg); }

  const ordered_json* object(const ordered_json& parent, const std::string& key, const std::string& path,
                             std::initializer_list<const char*> allowed) {
    auto it = parent.find(key);
    if (it == parent.end() || it->is_null()) return nullptr;
    if (!it->is_object()) {
      fail(path, "must be an object");
      return nullptr;
    }
    reject_unknown(*it, path, allowed);
    return &*it;
  }

  void reject_unknown(const ordered_json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
        fail(join(path, it.key()), "unknown key");
      }
    }
  }

  void count(const ordered_json* obj, const char* key, const std::string& path, std::size_t min, std::size_t& out) {
    if (!obj) return;
    auto it = obj->find(key);
    if (it == obj->end()) return;
    const auto p = join(path, key);
    if (!it->is_number_integer()) {
      fail(p, "must be an integer");
    } else if (it->is_number_unsigned() ? it->get<std::uint64_t>() < min : it->get<std::int64_t>() < static_cast<std::int64_t>(min)) {
      fail(p, "must be >= " + std::to_string(min));
    } else {
      out = static_cast<std::size_t>(it->get<std::uint64_t>());
    }
  }

  void optional_count(const ordered_json* obj, const char* key, const std::string& path, std::size_t min,
                      std::optional<std::size_t>& out) {
    if (!obj) return;
    auto it = obj->find(key);
    if (it == obj->end() || it->is_null()) return;
    std::size_t v = 0;
    const auto before = violations_.size();
    count(obj, key, path, min, v);
    if (violations_.size() == before) out = v;
  }

  // Requires value > lower (strict) or >= lower.
  void real(const ordered_json* obj, const char* key, const std::string& path, double lower, bool strict, double& out) {
    if (!obj) return;
    auto it = obj->find(key);
    if (it == obj->end()) return;
    const auto p = join(path, key);
    if (!it->is_number()) {
      fail(p, "must be a number");
      return;
    }
    const double v = it->get<double>();
    if (!std::isfinite(v) || (strict ? !(v > lower) : !(v >= lower))) {
      fail(p, std::string("must be ") + (strict ? "> " : ">= ") + format_real(lower));
      return;
    }
    out = v;
  }

  void boolean(const ordered_json* obj, const char* key, const std::string& path, bool& out) {
    if (!obj) return;
    auto it = obj->find(key);
    if (it == obj->end()) return;
    if (!it->is_boolean()) {
      fail(join(path, key), "must be true or false");
      return;
    }
    out = it->get<bool>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  void finish() const {
    if (!violations_.empty()) throw ConfigError(violations_);
  }

private:
  std::vector<std::string> violations_;
};

bool valid_task_name(const std::string& name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

fs::path resolve(const fs::path& p, const fs::path& base) { return (p.is_absolute() ? p : base / p).lexically_normal(); }

struct Layout {
  fs::path root;
  fs::path vocab() const { return root / "vocab.txt"; }
  fs::path embedding() const { return root / "embedding.mdt"; }
  fs::path originals() const { return root / "originals"; }
  fs::path generated() const { return root / "generated"; }
  fs::path manifest() const { return root / "generated" / "manifest.jsonl"; }
  fs::path generation() const { return root / "generation.json"; }
  fs::path selection() const { return root / "selection.csv"; }
  fs::path cluster_report() const { return root / "cluster_report.json"; }
  fs::path model() const { return root / "model"; }
  fs::path loss_curve() const { return root / "loss_curve.csv"; }
  fs::path metrics() const { return root / "metrics.json"; }
  fs::path projection() const { return root / "projection.csv"; }
  fs::path report() const { return root / "report.json"; }
};

std::vector<interpolator::TaskPair> effective_pairs(const PipelineConfig& c) {
  if (!c.task_pairs.empty()) return c.task_pairs;
  std::vector<interpolator::TaskPair> pairs;
  for (std::size_t a = 0; a < c.tasks.size(); ++a) {
    for (std::size_t b = a + 1; b < c.tasks.size(); ++b) pairs.push_back({c.tasks[a].name, c.tasks[b].name});
  }
  return pairs;
}

std::vector<embedder::EmbeddedSample> load_pool_samples(const Layout& layout, std::size_t& original_count) {
  auto samples = artifacts::read_sample_store(layout.originals());
  original_count = samples.size();
  auto generated = artifacts::read_sample_store(layout.generated());
  for (auto& g : generated) samples.push_back(std::move(g));
  return samples;
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

template <typename Fn>
auto timed_stage(const char* name, std::vector<StageTiming>& timings, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      timings.push_back({name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
    } else {
      auto result = fn();
      timings.push_back({name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
      return result;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage ") + name + ": " + e.what());
  }
}

}  // namespace

ordered_json PipelineConfig::to_json() const {
  ordered_json tasks_json = ordered_json::object();
  for (const auto& t : tasks) tasks_json[t.name] = t.path.string();
  ordered_json pairs = ordered_json::array();
  for (const auto& p : task_pairs) pairs.push_back({p.first, p.second});
  return {
      {"tasks", tasks_json},
      {"seed", seed},
      {"out", out.string()},
      {"corpus", {{"min_freq", min_freq}}},
      {"embedding", {{"dim", embedding_dim}}},
      {"interpolation", {{"alpha", alpha}, {"per_pair", per_pair}, {"bucket_width", bucket_width}, {"task_pairs", pairs}}},
      {"clustering",
       {{"clusters", clusters ? ordered_json(*clusters) : ordered_json(nullptr)},
        {"budget", budget ? ordered_json(*budget) : ordered_json(nullptr)},
        {"selection", selection_enabled},
        {"max_iter", kmeans_max_iter},
        {"tol", kmeans_tol}}},
      {"training",
       {{"hidden", hidden_width}, {"learning_rate", learning_rate}, {"epochs", epochs}, {"batch_size", batch_size}}},
  };
}

PipelineConfig parse_config(const ordered_json& doc, const fs::path& base_dir) {
  PipelineConfig c;
  Checker chk;
  if (!doc.is_object()) {
    chk.fail("<root>", "config must be a JSON object");
    chk.finish();
  }
  chk.reject_unknown(doc, "", {"tasks", "seed", "out", "corpus", "embedding", "interpolation", "clustering", "training"});

  // tasks: {"name": "path", ...} or [{"name": ..., "path": ...}, ...]
  auto tasks = doc.find("tasks");
  if (tasks == doc.end() || tasks->is_null()) {
    chk.fail("tasks", "at least one task is required");
  } else if (tasks->is_object()) {
    for (auto it = tasks->begin(); it != tasks->end(); ++it) {
      if (!it->is_string()) {
        chk.fail("tasks." + it.key(), "must be a file path string");
      } else {
        c.tasks.push_back({it.key(), it->get<std::string>()});
      }
    }
  } else if (tasks->is_array()) {
    for (std::size_t i = 0; i < tasks->size(); ++i) {
      const auto& t = (*tasks)[i];
      const auto p = "tasks[" + std::to_string(i) + "]";
      if (!t.is_object() || !t.contains("name") || !t.contains("path") || !t["name"].is_string() ||
          !t["path"].is_string()) {
        chk.fail(p, "must be an object with string fields name and path");
        continue;
      }
      chk.reject_unknown(t, p, {"name", "path"});
      c.tasks.push_back({t["name"].get<std::string>(), t["path"].get<std::string>()});
    }
  } else {
    chk.fail("tasks", "must be an object mapping task names to JSONL paths");
  }
  if (tasks != doc.end() && !tasks->is_null() && c.tasks.empty()) chk.fail("tasks", "at least one task is required");
  std::set<std::string> names;
  for (auto& t : c.tasks) {
    if (!valid_task_name(t.name)) chk.fail("tasks." + t.name, "task names may use letters, digits, '_', '-', '.'");
    if (!names.insert(t.name).second) chk.fail("tasks." + t.name, "duplicate task name");
    t.path = resolve(t.path, base_dir);
    if (!fs::is_regular_file(t.path)) chk.fail("tasks." + t.name, "file not found: " + t.path.string());
  }

  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned() && it->get<std::int64_t>() < 0)) {
      chk.fail("seed", "must be a non-negative integer");
    } else {
      c.seed = it->get<std::uint64_t>();
    }
  }
  if (auto it = doc.find("out"); it != doc.end()) {
    if (!it->is_string() || it->get<std::string>().empty()) {
      chk.fail("out", "must be a non-empty path string");
    } else {
      c.out = it->get<std::string>();
    }
  }

  const auto* corpus = chk.object(doc, "corpus", "corpus", {"min_freq"});
  chk.count(corpus, "min_freq", "corpus", 1, c.min_freq);

  const auto* emb = chk.object(doc, "embedding", "embedding", {"dim"});
  chk.count(emb, "dim", "embedding", 2, c.embedding_dim);

  const auto* interp = chk.object(doc, "interpolation", "interpolation", {"alpha", "per_pair", "bucket_width", "task_pairs"});
  chk.real(interp, "alpha", "interpolation", 0.0, true, c.alpha);
  chk.count(interp, "per_pair", "interpolation", 0, c.per_pair);
  chk.count(interp, "bucket_width", "interpolation", 1, c.bucket_width);
  if (interp) {
    if (auto it = interp->find("task_pairs"); it != interp->end() && !it->is_null()) {
      if (!it->is_array()) {
        chk.fail("interpolation.task_pairs", "must be a list of [task, task] pairs");
      } else {
        for (std::size_t i = 0; i < it->size(); ++i) {
          const auto& p = (*it)[i];
          const auto path = "interpolation.task_pairs[" + std::to_string(i) + "]";
          if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string()) {
            chk.fail(path, "must be a [task, task] pair");
            continue;
          }
          interpolator::TaskPair pair{p[0].get<std::string>(), p[1].get<std::string>()};
          if (pair.first == pair.second) chk.fail(path, "pair must name two distinct tasks");
          if (!names.count(pair.first)) chk.fail(path, "unknown task " + pair.first);
          if (!names.count(pair.second)) chk.fail(path, "unknown task " + pair.second);
          c.task_pairs.push_back(std::move(pair));
        }
      }
    }
  }

  const auto* clus = chk.object(doc, "clustering", "clustering", {"clusters", "budget", "selection", "max_iter", "tol"});
  chk.optional_count(clus, "clusters", "clustering", 1, c.clusters);
  chk.optional_count(clus, "budget", "clustering", 1, c.budget);
  chk.boolean(clus, "selection", "clustering", c.selection_enabled);
  chk.count(clus, "max_iter", "clustering", 1, c.kmeans_max_iter);
  chk.real(clus, "tol", "clustering", 0.0, false, c.kmeans_tol);

  const auto* tr = chk.object(doc, "training", "training", {"hidden", "learning_rate", "epochs", "batch_size"});
  chk.count(tr, "hidden", "training", 1, c.hidden_width);
  chk.real(tr, "learning_rate", "training", 0.0, true, c.learning_rate);
  chk.count(tr, "epochs", "training", 1, c.epochs);
  chk.count(tr, "batch_size", "training", 1, c.batch_size);

  chk.finish();
  if (c.task_pairs.empty()) c.task_pairs = effective_pairs(c);
  return c;
}

ordered_json read_config_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot read config file"});
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError({path.string() + ": malformed JSON: " + e.what()});
  }
}

PipelineConfig validate_config(const fs::path& path) {
  return parse_config(read_config_json(path), path.parent_path());
}

GenerateSummary stage_generate(const PipelineConfig& config) {
  const Layout layout{config.out};
  fs::create_directories(layout.root);

  std::vector<corpus::TaskDataset> datasets;
  ordered_json malformed = ordered_json::object();
  for (const auto& t : config.tasks) {
    auto loaded = corpus::load_jsonl(t.path, t.name);
    malformed[t.name] = loaded.malformed_count;
    datasets.push_back(std::move(loaded.dataset));
  }
  const auto vocab = corpus::build_vocab(datasets, config.min_freq);
  vocab.save(layout.vocab());

  std::vector<corpus::TokenizedSample> tokenized;
  for (const auto& ds : datasets) {
    for (const auto& s : ds.samples) tokenized.push_back(corpus::tokenize(s, vocab));
  }
  const auto table =
      embedder::init_embedding_table(vocab.size(), config.embedding_dim, derive_seed(config.seed, Stage::Embedding));
  write_tensor(layout.embedding(), to_tensor(table.weights()));

  std::vector<embedder::EmbeddedSample> originals;
  originals.reserve(tokenized.size());
  for (const auto& t : tokenized) originals.push_back(embedder::embed(t, table));

  const auto buckets = corpus::build_length_buckets(tokenized, config.bucket_width);
  interpolator::InterpolationConfig icfg;
  icfg.alpha = config.alpha;
  icfg.per_pair = config.per_pair;
  icfg.bucket_width = config.bucket_width;
  icfg.seed = derive_seed(config.seed, Stage::Interpolation);
  icfg.task_pairs = effective_pairs(config);
  const auto generated = interpolator::generate_all(originals, buckets, icfg);

  std::vector<embedder::EmbeddedSample> gen_samples;
  gen_samples.reserve(generated.size());
  for (const auto& g : generated.samples) gen_samples.push_back(g.embedded);

  artifacts::write_sample_store(layout.originals(), originals, config.embedding_dim, vocab.size());
  artifacts::write_sample_store(layout.generated(), gen_samples, config.embedding_dim, vocab.size());
  artifacts::write_manifest(layout.manifest(), generated.samples);

  GenerateSummary summary;
  summary.original = originals.size();
  summary.generated = generated.size();
  summary.vocab_size = vocab.size();
  ordered_json pairs = ordered_json::array();
  for (const auto& s : generated.stats) {
    pairs.push_back({{"tasks", {s.tasks.first, s.tasks.second}},
                     {"shared_buckets", s.shared_buckets},
                     {"pairs_formed", s.pairs_formed},
                     {"generated", s.generated}});
    if (s.shared_buckets == 0) {
      std::cerr << "warning: tasks " << s.tasks.first << " and " << s.tasks.second
                << " share no length bucket; nothing generated for this pair\n";
    }
  }
  ordered_json task_sizes = ordered_json::object();
  for (const auto& ds : datasets) task_sizes[ds.task_id] = ds.size();
  summary.details = {{"original", summary.original},
                     {"generated", summary.generated},
                     {"vocab_size", summary.vocab_size},
                     {"task_sizes", task_sizes},
                     {"malformed_lines", malformed},
                     {"length_buckets", buckets.buckets.size()},
                     {"pairs", pairs}};
  artifacts::write_text(layout.generation(), summary.details.dump(2) + "\n");
  return summary;
}

SelectSummary stage_select(const PipelineConfig& config) {
  const Layout layout{config.out};
  std::size_t original_count = 0;
  const auto samples = load_pool_samples(layout, original_count);
  const auto pool = diversity::build_candidate_pool(samples);
  const std::size_t generated_count = samples.size() - original_count;

  SelectSummary summary;
  summary.pool = pool.size();
  if (!config.selection_enabled) {
    const auto sel = diversity::select_all(pool.size());
    artifacts::write_selection_csv(layout.selection(), sel, pool);
    summary.selected = sel.size();
    summary.cluster = nullptr;
    artifacts::write_text(layout.cluster_report(),
                          ordered_json({{"selection_enabled", false}, {"pool", pool.size()}}).dump(2) + "\n");
    return summary;
  }

  const std::size_t m = config.clusters.value_or(diversity::default_cluster_count(pool.size()));
  const std::size_t budget = config.budget.value_or(original_count + generated_count / 2);
  if (budget > pool.size()) {
    throw InvalidParameter("budget " + std::to_string(budget) + " exceeds the pool size " + std::to_string(pool.size()));
  }
  const auto model =
      diversity::kmeans(pool, m, config.kmeans_max_iter, config.kmeans_tol, derive_seed(config.seed, Stage::Clustering));
  const auto sel = diversity::select_diverse(model, pool, budget);
  artifacts::write_selection_csv(layout.selection(), sel, pool);

  std::size_t selected_generated = 0;
  for (auto i : sel.indices) selected_generated += i >= original_count ? 1 : 0;
  summary.selected = sel.size();
  summary.cluster = {{"selection_enabled", true},
                     {"pool", pool.size()},
                     {"m", model.cluster_count()},
                     {"iterations_run", model.iterations_run},
                     {"converged", model.converged},
                     {"objective", model.objective},
                     {"budget", budget},
                     {"selected_original", sel.size() - selected_generated},
                     {"selected_generated", selected_generated},
                     {"sizes", model.cluster_sizes()},
                     {"quotas", sel.quotas}};
  artifacts::write_text(layout.cluster_report(), summary.cluster.dump(2) + "\n");
  return summary;
}

TrainSummary stage_train(const PipelineConfig& config) {
  const Layout layout{config.out};
  std::size_t original_count = 0;
  const auto samples = load_pool_samples(layout, original_count);
  const auto indices = artifacts::read_selection_indices(layout.selection());
  diversity::SelectedSet sel;
  sel.indices = indices;
  const auto data = diversity::assemble_training_set(samples, sel);
  if (data.empty()) throw EmptyDatasetError("no samples selected for training");

  std::size_t max_label = 1;
  for (const auto& s : samples) max_label = std::max(max_label, s.label_len());
  trainer::ModelShape shape{config.embedding_dim, config.hidden_width, data.front().labels.vocab_size(), max_label};
  trainer::ToyModel model(shape, derive_seed(config.seed, Stage::ModelInit));

  trainer::TrainConfig tcfg;
  tcfg.learning_rate = config.learning_rate;
  tcfg.epochs = config.epochs;
  tcfg.batch_size = config.batch_size;
  tcfg.seed = derive_seed(config.seed, Stage::Training);

  TrainSummary summary;
  summary.trained_samples = data.size();
  summary.loss = trainer::train(model, data, tcfg);
  trainer::save_checkpoint(layout.model(), model, summary.loss.steps);

  std::ostringstream curve;
  curve << "step,loss\n";
  for (std::size_t k = 0; k < summary.loss.step_losses.size(); ++k) {
    curve << (k + 1) << ',' << format_real(summary.loss.step_losses[k]) << '\n';
  }
  artifacts::write_text(layout.loss_curve(), curve.str());

  const std::span<const embedder::EmbeddedSample> originals(samples.data(), original_count);
  summary.metrics = trainer::evaluate(model, originals);
  artifacts::write_text(layout.metrics(),
                        ordered_json({{"nll", summary.metrics.nll}, {"accuracy", summary.metrics.accuracy}}).dump(2) + "\n");
  return summary;
}

void stage_project(const PipelineConfig& config) {
  const Layout layout{config.out};
  std::size_t original_count = 0;
  const auto samples = load_pool_samples(layout, original_count);
  projection::export_projection(diversity::build_candidate_pool(samples), layout.projection());
}

ordered_json RunReport::to_json(const PipelineConfig& config) const {
  ordered_json timing = ordered_json::object();
  for (const auto& t : timings) timing[t.stage] = t.seconds;
  ordered_json epochs = training.loss.epoch_means;
  return {
      {"counts", {{"original", original}, {"generated", generated}, {"pool", original + generated}, {"selected", selected}}},
      {"generation", generation.details},
      {"cluster", selection.cluster},
      {"training",
       {{"trained_samples", training.trained_samples},
        {"steps", training.loss.steps},
        {"initial_loss", training.loss.initial_loss},
        {"final_loss", training.loss.final_loss},
        {"epoch_means", epochs},
        {"loss_curve", "loss_curve.csv"}}},
      {"metrics", {{"nll", training.metrics.nll}, {"accuracy", training.metrics.accuracy}}},
      {"config", config.to_json()},
      {"wall_clock_seconds", timing},
  };
}

RunReport run_pipeline(const PipelineConfig& config) {
  RunReport report;
  report.generation = timed_stage("generate", report.timings, [&] { return stage_generate(config); });
  report.original = report.generation.original;
  report.generated = report.generation.generated;
  report.selection = timed_stage("select", report.timings, [&] { return stage_select(config); });
  report.selected = report.selection.selected;
  report.training = timed_stage("train", report.timings, [&] { return stage_train(config); });
  timed_stage("project", report.timings, [&] { stage_project(config); });
  if (report.selected > report.original + report.generated) {
    throw ConsistencyError("selected more samples than the pool holds");
  }
  artifacts::write_text(Layout{config.out}.report(), report.to_json(config).dump(2) + "\n");
  return report;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "alpha") return SweepAxis::Alpha;
  if (name == "T" || name == "t") return SweepAxis::T;
  if (name == "budget") return SweepAxis::Budget;
  throw ConfigError({"sweep axis: must be one of alpha, T, budget (got '" + name + "')"});
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Alpha: return "alpha";
    case SweepAxis::T: return "T";
    case SweepAxis::Budget: return "budget";
  }
  return "?";
}

std::vector<SweepRow> sweep(const PipelineConfig& base, SweepAxis axis, const std::vector<std::string>& values) {
  if (values.empty()) throw ConfigError({"sweep values: at least one value is required"});

  std::vector<PipelineConfig> configs;
  std::vector<std::string> violations;
  for (const auto& v : values) {
    PipelineConfig c = base;
    try {
      std::size_t used = 0;
      if (axis == SweepAxis::Alpha) {
        c.alpha = std::stod(v, &used);
        if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw std::invalid_argument(v);
      } else {
        if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
        const auto n = static_cast<std::size_t>(std::stoull(v, &used));
        if (axis == SweepAxis::T) {
          c.per_pair = n;
        } else {
          if (n == 0) throw std::invalid_argument(v);
          c.budget = n;
        }
      }
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      violations.push_back(std::string("sweep values: '") + v + "' is not valid for axis " + to_string(axis));
    }
    c.out = base.out / (std::string("sweep_") + to_string(axis)) / (std::string(to_string(axis)) + "_" + v);
    configs.push_back(std::move(c));
  }
  if (!violations.empty()) throw ConfigError(violations);

  std::vector<SweepRow> rows;
  std::ostringstream csv;
  csv << "axis,value,status,original,generated,selected,initial_loss,final_loss,nll,accuracy,error\n";
  for (std::size_t k = 0; k < configs.size(); ++k) {
    SweepRow row;
    row.value = values[k];
    try {
      row.report = run_pipeline(configs[k]);
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
      std::cerr << "sweep " << to_string(axis) << "=" << values[k] << " failed: " << e.what() << "\n";
    }
    const auto& r = row.report;
    csv << to_string(axis) << ',' << row.value << ',' << (row.ok ? "ok" : "error") << ',';
    if (row.ok) {
      csv << r.original << ',' << r.generated << ',' << r.selected << ',' << format_real(r.training.loss.initial_loss)
          << ',' << format_real(r.training.loss.final_loss) << ',' << format_real(r.training.metrics.nll) << ','
          << format_real(r.training.metrics.accuracy) << ",\n";
    } else {
      csv << ",,,,,,," << csv_safe(row.error) << '\n';
    }
    rows.push_back(std::move(row));
  }
  fs::create_directories(base.out);
  artifacts::write_text(base.out / (std::string("sweep_") + to_string(axis) + ".csv"), csv.str());
  return rows;
}

}  // namespace mdit::pipeline
