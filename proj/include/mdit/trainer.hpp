#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mdit/embedder.hpp"
#include "mdit/tensor.hpp"

namespace mdit::trainer {

using embedder::EmbeddedSample;
using embedder::LabelMatrix;

struct ModelShape {
  std::size_t dim = 64;            // d
  std::size_t hidden = 128;        // h
  std::size_t vocab = 0;           // V
  std::size_t max_positions = 64;  // label positions with a learned bias

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

// Parameter tensors, and gradients of the same shapes. Biases are 1-row matrices.
struct Parameters {
  MatrixD positions;  // max_positions x d
  MatrixD w1;         // h x d
  MatrixD b1;         // 1 x h
  MatrixD w2;         // V x h
  MatrixD b2;         // 1 x V

  static Parameters zeros(const ModelShape& shape);

  // Stable iteration order, also used for checkpoint file names.
  std::vector<std::pair<const char*, MatrixD*>> named();
  std::vector<std::pair<const char*, const MatrixD*>> named() const;

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

// Label position t is predicted from the mass-weighted mean of the hidden
// rows plus a positional bias, through a ReLU layer:
//   logits[t] = W2 relu(W1 (mean(H) + pos[t]) + b1) + b2
class ToyModel {
public:
  ToyModel(const ModelShape& shape, std::uint64_t seed);
  ToyModel(const ModelShape& shape, std::uint64_t seed, Parameters params);

  const ModelShape& shape() const noexcept { return shape_; }
  std::uint64_t seed() const noexcept { return seed_; }
  Parameters& params() noexcept { return params_; }
  const Parameters& params() const noexcept { return params_; }

  friend bool operator==(const ToyModel&, const ToyModel&) = default;

private:
  ModelShape shape_;
  std::uint64_t seed_;
  Parameters params_;
};

MatrixD forward(const ToyModel& model, const MatrixF& hidden, std::span<const float> row_mass, std::size_t n);
// Every hidden row counts as a token.
MatrixD forward(const ToyModel& model, const MatrixF& hidden, std::size_t n);
MatrixD forward(const ToyModel& model, const EmbeddedSample& sample);

// Mean over label rows of -sum_r Y[t,r] log softmax(logits[t])[r]. Rows of Y
// must sum to one within 1e-4.
double soft_ce_loss(const MatrixD& logits, const LabelMatrix& labels);
double soft_ce_loss(const MatrixD& logits, const MatrixD& labels);

// (softmax(logits[t]) - Y[t]) * scale for every row.
MatrixD logit_gradient(const MatrixD& logits, const LabelMatrix& labels, double scale);

// Adds the gradient of scale * (summed token loss of one sample) into grads
// and returns the summed token loss.
double accumulate_gradients(const ToyModel& model, const EmbeddedSample& sample, double scale, Parameters& grads);

// Gradient of soft_ce_loss(forward(model, sample), sample.labels).
Parameters backward(const ToyModel& model, const EmbeddedSample& sample);

// theta <- theta - lr * grads. Throws DivergenceError (leaving the model
// untouched) when any gradient is not finite.
void sgd_step(ToyModel& model, const Parameters& grads, double learning_rate);

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 3;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;

  void validate() const;
  static TrainConfig paper_preset();
};

struct LossReport {
  std::vector<double> step_losses;  // per-token mean loss of each mini-batch
  std::vector<double> epoch_means;
  double initial_loss = 0.0;  // per-token loss over the whole set before training
  double final_loss = 0.0;    // and after
  std::size_t steps = 0;
};

// Per-token mean loss over a data set without updating the model.
double dataset_loss(const ToyModel& model, std::span<const EmbeddedSample> data);

LossReport train(ToyModel& model, std::span<const EmbeddedSample> data, const TrainConfig& config);

struct Metrics {
  double nll = 0.0;
  double accuracy = 0.0;
  std::size_t tokens = 0;
};

// Requires one-hot labels.
Metrics evaluate(const ToyModel& model, std::span<const EmbeddedSample> data);

void save_checkpoint(const std::filesystem::path& dir, const ToyModel& model, std::size_t step);
ToyModel load_checkpoint(const std::filesystem::path& dir);

}  // namespace mdit::trainer
