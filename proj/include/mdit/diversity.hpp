#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mdit/embedder.hpp"
#include "mdit/interpolator.hpp"
#include "mdit/tensor.hpp"

namespace mdit::diversity {

using embedder::Provenance;

// D_total: one pooled vector per sample, originals first, then generated.
struct CandidatePool {
  MatrixD vectors;  // N x d
  std::vector<Provenance> provenance;

  std::size_t size() const noexcept { return vectors.rows(); }
  std::size_t dim() const noexcept { return vectors.cols(); }
};

CandidatePool build_candidate_pool(std::span<const embedder::EmbeddedSample> originals,
                                   std::span<const interpolator::GeneratedSample> generated);

// Same pool built from an already concatenated sample list.
CandidatePool build_candidate_pool(std::span<const embedder::EmbeddedSample> samples);

struct ClusterModel {
  MatrixD centers;  // m x d
  std::vector<std::size_t> assignments;
  double objective = 0.0;
  std::size_t iterations_run = 0;
  bool converged = false;
  // Objective after the seeding assignment and after every Lloyd iteration.
  std::vector<double> objective_history;

  std::size_t cluster_count() const noexcept { return centers.rows(); }
  std::vector<std::size_t> cluster_sizes() const;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

inline constexpr std::size_t kDefaultRestarts = 10;
inline constexpr std::size_t kExhaustiveSeedLimit = 256;

// Lloyd iterations from k-means++ seeding. Stops once no assignment changes,
// the objective improves by less than tol, or max_iter iterations ran. The
// whole procedure runs `restarts` times from successive seedings of one
// generator and the lowest objective wins (earliest on ties). Pools with at
// most kExhaustiveSeedLimit m-subsets are instead started from every m-subset
// of points, and the seed is unused.
ClusterModel kmeans(const CandidatePool& pool, std::size_t m, std::size_t max_iter, double tol,
                    std::uint64_t seed, std::size_t restarts = kDefaultRestarts);

// Sum of squared distances from each point to its assigned center.
double objective(const ClusterModel& model, const CandidatePool& pool);

// Default cluster count: max(2, floor(sqrt(N / 2))), never above N.
std::size_t default_cluster_count(std::size_t pool_size);

struct SelectedSet {
  std::vector<std::size_t> indices;  // ascending pool indices
  std::vector<std::size_t> clusters;  // cluster of each selected index
  std::vector<double> distances;     // center distance of each selected index
  std::vector<std::size_t> quotas;   // per cluster

  std::size_t size() const noexcept { return indices.size(); }
};

// Quotas proportional to cluster size with largest-remainder rounding (ties
// to the larger cluster, then the lower cluster index).
std::vector<std::size_t> proportional_quotas(std::span<const std::size_t> sizes, std::size_t budget);

// Picks, per cluster, the quota points nearest to the center.
SelectedSet select_diverse(const ClusterModel& model, const CandidatePool& pool, std::size_t budget);

// Selection covering every pool entry, used when cluster selection is off.
SelectedSet select_all(std::size_t pool_size);

std::vector<embedder::EmbeddedSample> assemble_training_set(std::span<const embedder::EmbeddedSample> samples,
                                                            const SelectedSet& selection);

}  // namespace mdit::diversity
