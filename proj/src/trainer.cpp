#include "mdit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "mdit/error.hpp"
#include "mdit/rng.hpp"

namespace mdit::trainer {

namespace {

void check_shape(const ModelShape& s) {
  if (s.dim < 1 || s.hidden < 1 || s.vocab < 2 || s.max_positions < 1) {
    throw InvalidParameter("model shape needs d, h, max_positions >= 1 and V >= 2");
  }
}

void fill_uniform(MatrixD& m, double bound, Rng& rng) {
  for (auto& v : m.data()) v = rng.uniform(-bound, bound);
}

std::vector<double> context_of(const MatrixF& hidden, std::span<const float> row_mass, std::size_t dim) {
  if (hidden.cols() != dim) throw InvalidParameter("hidden width does not match model dimension");
  if (row_mass.size() != hidden.rows()) throw InvalidParameter("row mass does not match hidden rows");
  double mass = 0.0;
  std::vector<double> ctx(dim, 0.0);
  for (std::size_t t = 0; t < hidden.rows(); ++t) {
    if (row_mass[t] == 0.0f) continue;
    mass += row_mass[t];
    auto row = hidden.row(t);
    for (std::size_t k = 0; k < dim; ++k) ctx[k] += row[k];
  }
  if (mass <= 0.0) throw DegenerateInputError("input has no non-PAD rows");
  for (auto& v : ctx) v /= mass;
  return ctx;
}

// Per-position activations kept for the backward pass.
struct Trace {
  MatrixD input;  // n x d, context + positional bias
  MatrixD pre;    // n x h
  MatrixD act;    // n x h
  MatrixD logits; // n x V
};

Trace run_forward(const ToyModel& model, const MatrixF& hidden, std::span<const float> row_mass, std::size_t n) {
  const auto& s = model.shape();
  const auto& p = model.params();
  if (n > s.max_positions) throw InvalidParameter("label length exceeds the model's positional range");
  const auto ctx = context_of(hidden, row_mass, s.dim);

  Trace tr{MatrixD(n, s.dim), MatrixD(n, s.hidden), MatrixD(n, s.hidden), MatrixD(n, s.vocab)};
  for (std::size_t t = 0; t < n; ++t) {
    auto in = tr.input.row(t);
    auto pos = p.positions.row(t);
    for (std::size_t k = 0; k < s.dim; ++k) in[k] = ctx[k] + pos[k];

    auto pre = tr.pre.row(t);
    auto act = tr.act.row(t);
    for (std::size_t j = 0; j < s.hidden; ++j) {
      auto w = p.w1.row(j);
      double a = p.b1(0, j);
      for (std::size_t k = 0; k < s.dim; ++k) a += w[k] * in[k];
      pre[j] = a;
      act[j] = a > 0.0 ? a : 0.0;
    }
    auto z = tr.logits.row(t);
    for (std::size_t r = 0; r < s.vocab; ++r) {
      auto w = p.w2.row(r);
      double v = p.b2(0, r);
      for (std::size_t j = 0; j < s.hidden; ++j) v += w[j] * act[j];
      z[r] = v;
    }
  }
  return tr;
}

double log_sum_exp(std::span<const double> z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - mx);
  return mx + std::log(s);
}

void check_label_rows(const MatrixD& logits, const LabelMatrix& labels) {
  if (labels.rows() != logits.rows() || labels.vocab_size() != logits.cols()) {
    throw InvalidParameter("labels and logits differ in shape");
  }
  for (std::size_t t = 0; t < labels.rows(); ++t) {
    for (const auto& e : labels.row(t)) {
      if (e.weight < 0.0) throw InvalidParameter("label weights must be non-negative");
    }
    if (std::abs(labels.row_sum(t) - 1.0) > 1e-4) {
      throw InvalidParameter("label row " + std::to_string(t) + " is not a probability vector");
    }
  }
}

// Summed (not averaged) token loss.
double summed_loss(const MatrixD& logits, const LabelMatrix& labels) {
  double total = 0.0;
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    auto z = logits.row(t);
    const double lse = log_sum_exp(z);
    for (const auto& e : labels.row(t)) total -= e.weight * (z[e.id] - lse);
  }
  return total;
}

bool all_finite(const Parameters& p) {
  for (auto [name, m] : p.named()) {
    for (double v : m->data()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

void add_scaled(Parameters& dst, const Parameters& src, double scale) {
  auto d = dst.named();
  auto s = src.named();
  for (std::size_t k = 0; k < d.size(); ++k) {
    auto dv = d[k].second->data();
    auto sv = s[k].second->data();
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += scale * sv[i];
  }
}

}  // namespace

Parameters Parameters::zeros(const ModelShape& s) {
  return {MatrixD(s.max_positions, s.dim), MatrixD(s.hidden, s.dim), MatrixD(1, s.hidden),
          MatrixD(s.vocab, s.hidden), MatrixD(1, s.vocab)};
}

std::vector<std::pair<const char*, MatrixD*>> Parameters::named() {
  return {{"positions", &positions}, {"w1", &w1}, {"b1", &b1}, {"w2", &w2}, {"b2", &b2}};
}

std::vector<std::pair<const char*, const MatrixD*>> Parameters::named() const {
  return {{"positions", &positions}, {"w1", &w1}, {"b1", &b1}, {"w2", &w2}, {"b2", &b2}};
}

ToyModel::ToyModel(const ModelShape& shape, std::uint64_t seed) : shape_(shape), seed_(seed) {
  check_shape(shape);
  params_ = Parameters::zeros(shape);
  Rng rng(seed);
  fill_uniform(params_.positions, 1.0, rng);
  fill_uniform(params_.w1, std::sqrt(6.0 / static_cast<double>(shape.dim + shape.hidden)), rng);
  fill_uniform(params_.w2, std::sqrt(6.0 / static_cast<double>(shape.hidden + shape.vocab)), rng);
}

ToyModel::ToyModel(const ModelShape& shape, std::uint64_t seed, Parameters params)
    : shape_(shape), seed_(seed), params_(std::move(params)) {
  check_shape(shape);
  const auto expected = Parameters::zeros(shape);
  auto a = params_.named();
  auto b = expected.named();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].second->rows() != b[k].second->rows() || a[k].second->cols() != b[k].second->cols()) {
      throw InvalidParameter(std::string("parameter ") + a[k].first + " has the wrong shape");
    }
  }
}

MatrixD forward(const ToyModel& model, const MatrixF& hidden, std::span<const float> row_mass, std::size_t n) {
  return run_forward(model, hidden, row_mass, n).logits;
}

MatrixD forward(const ToyModel& model, const MatrixF& hidden, std::size_t n) {
  const std::vector<float> mass(hidden.rows(), 1.0f);
  return forward(model, hidden, mass, n);
}

MatrixD forward(const ToyModel& model, const EmbeddedSample& sample) {
  return forward(model, sample.hidden, sample.row_mass, sample.label_len());
}

double soft_ce_loss(const MatrixD& logits, const LabelMatrix& labels) {
  check_label_rows(logits, labels);
  if (logits.rows() == 0) throw InvalidParameter("soft_ce_loss: no label rows");
  return summed_loss(logits, labels) / static_cast<double>(logits.rows());
}

double soft_ce_loss(const MatrixD& logits, const MatrixD& labels) {
  for (double v : labels.data()) {
    if (v < 0.0) throw InvalidParameter("label weights must be non-negative");
  }
  return soft_ce_loss(logits, LabelMatrix::from_dense(labels));
}

MatrixD logit_gradient(const MatrixD& logits, const LabelMatrix& labels, double scale) {
  check_label_rows(logits, labels);
  MatrixD g(logits.rows(), logits.cols());
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    auto z = logits.row(t);
    const double lse = log_sum_exp(z);
    // d/dz of -sum_r Y_r log p_r is p * sum(Y) - Y; sum(Y) is one for valid rows.
    const double mass = labels.row_sum(t);
    auto out = g.row(t);
    for (std::size_t r = 0; r < z.size(); ++r) out[r] = std::exp(z[r] - lse) * mass;
    for (const auto& e : labels.row(t)) out[e.id] -= e.weight;
    for (auto& v : out) v *= scale;
  }
  return g;
}

double accumulate_gradients(const ToyModel& model, const EmbeddedSample& sample, double scale, Parameters& grads) {
  const auto& s = model.shape();
  const auto& p = model.params();
  const Trace tr = run_forward(model, sample.hidden, sample.row_mass, sample.label_len());
  const MatrixD dz = logit_gradient(tr.logits, sample.labels, scale);

  std::vector<double> da(s.hidden);
  for (std::size_t t = 0; t < tr.logits.rows(); ++t) {
    auto g = dz.row(t);
    auto act = tr.act.row(t);
    auto pre = tr.pre.row(t);
    auto in = tr.input.row(t);

    std::fill(da.begin(), da.end(), 0.0);
    for (std::size_t r = 0; r < s.vocab; ++r) {
      const double gr = g[r];
      grads.b2(0, r) += gr;
      auto dw2 = grads.w2.row(r);
      auto w2 = p.w2.row(r);
      for (std::size_t j = 0; j < s.hidden; ++j) {
        dw2[j] += gr * act[j];
        da[j] += gr * w2[j];
      }
    }
    auto dpos = grads.positions.row(t);
    for (std::size_t j = 0; j < s.hidden; ++j) {
      if (pre[j] <= 0.0) continue;
      const double dj = da[j];
      grads.b1(0, j) += dj;
      auto dw1 = grads.w1.row(j);
      auto w1 = p.w1.row(j);
      for (std::size_t k = 0; k < s.dim; ++k) {
        dw1[k] += dj * in[k];
        dpos[k] += dj * w1[k];
      }
    }
  }
  return summed_loss(tr.logits, sample.labels);
}

Parameters backward(const ToyModel& model, const EmbeddedSample& sample) {
  if (sample.label_len() == 0) throw InvalidParameter("backward: sample has no labels");
  Parameters grads = Parameters::zeros(model.shape());
  accumulate_gradients(model, sample, 1.0 / static_cast<double>(sample.label_len()), grads);
  return grads;
}

void sgd_step(ToyModel& model, const Parameters& grads, double learning_rate) {
  if (!all_finite(grads)) throw DivergenceError("non-finite gradient encountered");
  add_scaled(model.params(), grads, -learning_rate);
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InvalidParameter("learning rate must be > 0");
  if (epochs < 1) throw InvalidParameter("epochs must be >= 1");
  if (batch_size < 1) throw InvalidParameter("batch size must be >= 1");
}

TrainConfig TrainConfig::paper_preset() {
  TrainConfig c;
  c.learning_rate = 2e-5;
  c.batch_size = 16;
  c.epochs = 3;
  return c;
}

double dataset_loss(const ToyModel& model, std::span<const EmbeddedSample> data) {
  double total = 0.0;
  std::size_t tokens = 0;
  for (const auto& s : data) {
    const MatrixD logits = forward(model, s);
    check_label_rows(logits, s.labels);
    total += summed_loss(logits, s.labels);
    tokens += s.label_len();
  }
  if (tokens == 0) throw InvalidParameter("dataset_loss: no label tokens");
  return total / static_cast<double>(tokens);
}

LossReport train(ToyModel& model, std::span<const EmbeddedSample> data, const TrainConfig& config) {
  config.validate();
  if (data.empty()) throw EmptyDatasetError("training set is empty");

  LossReport report;
  report.initial_loss = dataset_loss(model, data);
  if (!std::isfinite(report.initial_loss)) throw DivergenceError("initial loss is not finite");

  Rng rng(config.seed);
  std::vector<std::size_t> order(data.size());
  Parameters grads = Parameters::zeros(model.shape());

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span(order));
    double epoch_sum = 0.0;
    std::size_t epoch_steps = 0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::size_t tokens = 0;
      for (std::size_t k = start; k < end; ++k) tokens += data[order[k]].label_len();
      if (tokens == 0) continue;

      for (auto [name, m] : grads.named()) std::fill(m->data().begin(), m->data().end(), 0.0);
      const double scale = 1.0 / static_cast<double>(tokens);
      double loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        loss += accumulate_gradients(model, data[order[k]], scale, grads);
      }
      loss *= scale;
      if (!std::isfinite(loss)) {
        throw DivergenceError("loss became non-finite at step " + std::to_string(report.steps));
      }
      sgd_step(model, grads, config.learning_rate);
      report.step_losses.push_back(loss);
      ++report.steps;
      epoch_sum += loss;
      ++epoch_steps;
    }
    report.epoch_means.push_back(epoch_steps ? epoch_sum / static_cast<double>(epoch_steps) : 0.0);
  }
  report.final_loss = dataset_loss(model, data);
  if (!std::isfinite(report.final_loss)) throw DivergenceError("final loss is not finite");
  return report;
}

Metrics evaluate(const ToyModel& model, std::span<const EmbeddedSample> data) {
  if (data.empty()) throw EmptyDatasetError("evaluation set is empty");
  Metrics m;
  double nll = 0.0;
  std::size_t correct = 0;
  for (const auto& s : data) {
    if (!s.labels.is_one_hot()) throw InvalidParameter("evaluation needs one-hot labels");
    const MatrixD logits = forward(model, s);
    for (std::size_t t = 0; t < logits.rows(); ++t) {
      auto z = logits.row(t);
      const auto target = s.labels.row(t)[0].id;
      nll -= z[target] - log_sum_exp(z);
      const auto best = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
      if (best == target) ++correct;
      ++m.tokens;
    }
  }
  m.nll = nll / static_cast<double>(m.tokens);
  m.accuracy = static_cast<double>(correct) / static_cast<double>(m.tokens);
  return m;
}

void save_checkpoint(const std::filesystem::path& dir, const ToyModel& model, std::size_t step) {
  std::filesystem::create_directories(dir);
  const auto& s = model.shape();
  nlohmann::ordered_json header = {{"d", s.dim},   {"h", s.hidden},        {"V", s.vocab},
                                   {"max_positions", s.max_positions}, {"seed", model.seed()},
                                   {"step", step}};
  std::ofstream out(dir / "header.json", std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint header in " + dir.string());
  out << header.dump(2) << '\n';
  for (auto [name, m] : model.params().named()) {
    write_tensor(dir / (std::string(name) + ".mdt"), to_tensor(*m));
  }
}

ToyModel load_checkpoint(const std::filesystem::path& dir) {
  std::ifstream in(dir / "header.json");
  if (!in) throw IoError("missing checkpoint header in " + dir.string());
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptInputError("checkpoint header: " + std::string(e.what()));
  }
  ModelShape shape;
  std::uint64_t seed = 0;
  try {
    shape.dim = header.at("d").get<std::size_t>();
    shape.hidden = header.at("h").get<std::size_t>();
    shape.vocab = header.at("V").get<std::size_t>();
    shape.max_positions = header.at("max_positions").get<std::size_t>();
    seed = header.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptInputError("checkpoint header: " + std::string(e.what()));
  }
  Parameters params = Parameters::zeros(shape);
  for (auto [name, m] : params.named()) {
    *m = to_matrix<double>(read_tensor(dir / (std::string(name) + ".mdt")));
  }
  return ToyModel(shape, seed, std::move(params));
}

}  // namespace mdit::trainer
