#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mdit/corpus.hpp"
#include "mdit/embedder.hpp"
#include "mdit/rng.hpp"

namespace mdit::interpolator {

using embedder::EmbeddedSample;

struct TaskPair {
  std::string first;
  std::string second;

  friend bool operator==(const TaskPair&, const TaskPair&) = default;
};

struct InterpolationConfig {
  double alpha = 8.0;
  std::size_t per_pair = 1;  // T: samples generated per formed pair
  std::size_t bucket_width = 16;
  std::uint64_t seed = 0;
  std::vector<TaskPair> task_pairs;

  // Throws InvalidParameter on alpha <= 0, bucket_width == 0 or a same-task pair.
  void validate() const;
};

struct GeneratedSample {
  EmbeddedSample embedded;
  double lambda = 0.0;
  std::size_t parent_i = 0;  // indices into the original sample list
  std::size_t parent_j = 0;
  TaskPair parent_tasks;
};

struct PairStats {
  TaskPair tasks;
  std::size_t shared_buckets = 0;
  std::size_t pairs_formed = 0;
  std::size_t generated = 0;
};

struct GeneratedSet {
  std::vector<GeneratedSample> samples;
  std::vector<PairStats> stats;

  std::size_t size() const noexcept { return samples.size(); }
};

// Draw from Gamma(shape, 1) with the Marsaglia-Tsang squeeze method; shapes
// below one use the boost Gamma(shape + 1) * U^(1/shape). Returned as a
// natural log so that tiny shapes do not underflow.
double sample_log_gamma(double shape, Rng& rng);

// lambda ~ Beta(alpha, alpha) as G1 / (G1 + G2), strictly inside (0, 1).
double sample_lambda(double alpha, Rng& rng);

// Pads the shorter hidden matrix with zero rows (zero mass) and the shorter
// label matrix with one-hot PAD rows, so both reach the pairwise maxima.
std::pair<EmbeddedSample, EmbeddedSample> align_lengths(const EmbeddedSample& a, const EmbeddedSample& b);

// lambda * a + (1 - lambda) * b on hidden rows, row mass and labels. The
// pair must already be aligned.
GeneratedSample interpolate_pair(const EmbeddedSample& a, const EmbeddedSample& b, double lambda);

std::string cross_task_id(const std::string& first, const std::string& second);

// One task pair: random disjoint pairing inside each length
// bucket, T draws of lambda per pair. `originals` is the list the bucket
// index refers to.
GeneratedSet generate_cross_task(std::span<const EmbeddedSample> originals,
                                 const corpus::LengthBucketIndex& buckets, const TaskPair& tasks,
                                 const InterpolationConfig& config, Rng& rng);

// Runs generate_cross_task for every configured pair, in order, sharing one
// generator seeded from config.seed.
GeneratedSet generate_all(std::span<const EmbeddedSample> originals, const corpus::LengthBucketIndex& buckets,
                          const InterpolationConfig& config);

}  // namespace mdit::interpolator
