#include "mdit/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdit/error.hpp"
#include "mdit/rng.hpp"

namespace mdit::diversity {

namespace {

void append_vector(MatrixD& m, std::size_t row, const std::vector<double>& v) {
  std::copy(v.begin(), v.end(), m.row(row).begin());
}

// Nearest center for every point, ties to the lowest center index. Returns
// whether any assignment changed.
bool assign(const CandidatePool& pool, const MatrixD& centers, std::vector<std::size_t>& assignments) {
  bool changed = false;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    std::size_t best = 0;
    double best_d = squared_distance(pool.vectors.row(i), centers.row(0));
    for (std::size_t c = 1; c < centers.rows(); ++c) {
      const double d = squared_distance(pool.vectors.row(i), centers.row(c));
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    if (assignments[i] != best) {
      assignments[i] = best;
      changed = true;
    }
  }
  return changed;
}

MatrixD kmeanspp_seed(const CandidatePool& pool, std::size_t m, Rng& rng) {
  const std::size_t n = pool.size();
  MatrixD centers(m, pool.dim());
  std::vector<double> nearest(n, 0.0);

  std::size_t first = static_cast<std::size_t>(rng.index(n));
  std::ranges::copy(pool.vectors.row(first), centers.row(0).begin());
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(pool.vectors.row(i), centers.row(0));

  for (std::size_t c = 1; c < m; ++c) {
    double total = 0.0;
    for (double d : nearest) total += d;
    std::size_t pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform_open() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (nearest[i] == 0.0) continue;
        cum += nearest[i];
        pick = i;
        if (cum > target) break;
      }
    } else {
      pick = static_cast<std::size_t>(rng.index(n));
    }
    std::ranges::copy(pool.vectors.row(pick), centers.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(pool.vectors.row(i), centers.row(c)));
    }
  }
  return centers;
}

// Centers become the means of their members, accumulated in ascending point
// order. Empty clusters move onto the point farthest from its own center.
void update_centers(const CandidatePool& pool, const std::vector<std::size_t>& assignments, MatrixD& centers) {
  const std::size_t m = centers.rows();
  const std::size_t d = centers.cols();
  MatrixD sums(m, d);
  std::vector<std::size_t> counts(m, 0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    auto row = pool.vectors.row(i);
    auto acc = sums.row(assignments[i]);
    for (std::size_t k = 0; k < d; ++k) acc[k] += row[k];
    ++counts[assignments[i]];
  }
  for (std::size_t c = 0; c < m; ++c) {
    if (counts[c] == 0) continue;
    auto dst = centers.row(c);
    auto src = sums.row(c);
    for (std::size_t k = 0; k < d; ++k) dst[k] = src[k] / static_cast<double>(counts[c]);
  }

  std::vector<bool> taken(pool.size(), false);
  for (std::size_t c = 0; c < m; ++c) {
    if (counts[c] != 0) continue;
    std::size_t far = pool.size();
    double far_d = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i]) continue;
      const double dist = squared_distance(pool.vectors.row(i), centers.row(assignments[i]));
      if (dist > far_d) {
        far_d = dist;
        far = i;
      }
    }
    if (far == pool.size()) break;  // every point already sits on its center
    taken[far] = true;
    std::ranges::copy(pool.vectors.row(far), centers.row(c).begin());
  }
}

// C(n, k), or limit + 1 once it exceeds limit.
std::size_t capped_binomial(std::size_t n, std::size_t k, std::size_t limit) {
  k = std::min(k, n - k);
  std::size_t c = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > limit) return limit + 1;
  }
  return c;
}

// Every m-subset of the points as initial centers, lexicographic order.
std::vector<MatrixD> exhaustive_seeds(const CandidatePool& pool, std::size_t m) {
  std::vector<MatrixD> out;
  std::vector<std::size_t> pick(m);
  std::iota(pick.begin(), pick.end(), 0);
  const std::size_t n = pool.size();
  while (true) {
    MatrixD centers(m, pool.dim());
    for (std::size_t c = 0; c < m; ++c) std::ranges::copy(pool.vectors.row(pick[c]), centers.row(c).begin());
    out.push_back(std::move(centers));
    std::size_t i = m;
    while (i > 0 && pick[i - 1] == n - m + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

ClusterModel lloyd(const CandidatePool& pool, MatrixD centers, std::size_t max_iter, double tol) {
  ClusterModel model;
  model.centers = std::move(centers);
  model.assignments.assign(pool.size(), 0);
  assign(pool, model.centers, model.assignments);
  model.objective = objective(model, pool);
  model.objective_history.push_back(model.objective);

  for (std::size_t it = 1; it <= max_iter; ++it) {
    update_centers(pool, model.assignments, model.centers);
    const bool changed = assign(pool, model.centers, model.assignments);
    const double next = objective(model, pool);
    const double improvement = model.objective - next;
    model.objective = next;
    model.objective_history.push_back(next);
    model.iterations_run = it;
    if (!changed) {
      model.converged = true;
      break;
    }
    if (improvement < tol) break;
  }
  return model;
}

}  // namespace

CandidatePool build_candidate_pool(std::span<const embedder::EmbeddedSample> originals,
                                   std::span<const interpolator::GeneratedSample> generated) {
  const std::size_t n = originals.size() + generated.size();
  if (n == 0) throw EmptyDatasetError("candidate pool is empty");
  const std::size_t d = originals.empty() ? generated.front().embedded.hidden.cols() : originals.front().hidden.cols();
  CandidatePool pool{MatrixD(n, d), {}};
  pool.provenance.reserve(n);
  std::size_t row = 0;
  for (const auto& s : originals) {
    append_vector(pool.vectors, row++, embedder::pool(s));
    pool.provenance.push_back(s.provenance);
  }
  for (const auto& g : generated) {
    append_vector(pool.vectors, row++, embedder::pool(g.embedded));
    pool.provenance.push_back(g.embedded.provenance);
  }
  return pool;
}

CandidatePool build_candidate_pool(std::span<const embedder::EmbeddedSample> samples) {
  return build_candidate_pool(samples, {});
}

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
  std::vector<std::size_t> sizes(cluster_count(), 0);
  for (auto a : assignments) ++sizes.at(a);
  return sizes;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

ClusterModel kmeans(const CandidatePool& pool, std::size_t m, std::size_t max_iter, double tol,
                    std::uint64_t seed, std::size_t restarts) {
  if (m == 0) throw InvalidParameter("kmeans: cluster count must be >= 1");
  if (m > pool.size()) throw InvalidParameter("kmeans: cluster count exceeds pool size");
  if (max_iter == 0) throw InvalidParameter("kmeans: max_iter must be >= 1");
  if (!(tol >= 0.0)) throw InvalidParameter("kmeans: tol must be >= 0");
  if (restarts == 0) throw InvalidParameter("kmeans: restarts must be >= 1");

  ClusterModel best;
  bool have = false;
  auto keep = [&](ClusterModel model) {
    if (!have || model.objective < best.objective) best = std::move(model);
    have = true;
  };
  if (capped_binomial(pool.size(), m, kExhaustiveSeedLimit) <= kExhaustiveSeedLimit) {
    for (auto& centers : exhaustive_seeds(pool, m)) keep(lloyd(pool, std::move(centers), max_iter, tol));
  } else {
    Rng rng(seed);
    for (std::size_t r = 0; r < restarts; ++r) keep(lloyd(pool, kmeanspp_seed(pool, m, rng), max_iter, tol));
  }
  return best;
}

double objective(const ClusterModel& model, const CandidatePool& pool) {
  if (model.centers.cols() != pool.dim() || model.assignments.size() != pool.size()) {
    throw InvalidParameter("objective: model does not fit the pool");
  }
  double f = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    f += squared_distance(pool.vectors.row(i), model.centers.row(model.assignments[i]));
  }
  return f;
}

std::size_t default_cluster_count(std::size_t pool_size) {
  const auto root = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(pool_size) / 2.0)));
  return std::min(std::max<std::size_t>(2, root), pool_size);
}

std::vector<std::size_t> proportional_quotas(std::span<const std::size_t> sizes, std::size_t budget) {
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (budget > total) throw InvalidParameter("selection budget exceeds pool size");
  std::vector<std::size_t> quotas(sizes.size(), 0);
  std::vector<std::size_t> remainders(sizes.size(), 0);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    const auto scaled = static_cast<unsigned __int128>(budget) * sizes[c];
    quotas[c] = static_cast<std::size_t>(scaled / total);
    remainders[c] = static_cast<std::size_t>(scaled % total);
    assigned += quotas[c];
  }
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
    if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
    return a < b;
  });
  for (std::size_t k = 0; assigned < budget; ++k) {
    ++quotas[order[k]];
    ++assigned;
  }
  return quotas;
}

SelectedSet select_diverse(const ClusterModel& model, const CandidatePool& pool, std::size_t budget) {
  if (budget == 0) throw InvalidParameter("selection budget must be >= 1");
  if (budget > pool.size()) throw InvalidParameter("selection budget exceeds pool size");
  if (model.assignments.size() != pool.size()) throw InvalidParameter("model does not fit the pool");

  const std::size_t m = model.cluster_count();
  std::vector<std::vector<std::size_t>> members(m);
  std::vector<double> dist(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    members.at(model.assignments[i]).push_back(i);
    dist[i] = std::sqrt(squared_distance(pool.vectors.row(i), model.centers.row(model.assignments[i])));
  }
  std::vector<std::size_t> sizes(m);
  for (std::size_t c = 0; c < m; ++c) sizes[c] = members[c].size();

  SelectedSet sel;
  sel.quotas = proportional_quotas(sizes, budget);
  std::vector<std::size_t> chosen;
  chosen.reserve(budget);
  for (std::size_t c = 0; c < m; ++c) {
    auto& group = members[c];
    std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
      return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
    });
    chosen.insert(chosen.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(sel.quotas[c]));
  }
  std::sort(chosen.begin(), chosen.end());
  for (auto i : chosen) {
    sel.indices.push_back(i);
    sel.clusters.push_back(model.assignments[i]);
    sel.distances.push_back(dist[i]);
  }
  return sel;
}

SelectedSet select_all(std::size_t pool_size) {
  SelectedSet sel;
  sel.indices.resize(pool_size);
  std::iota(sel.indices.begin(), sel.indices.end(), 0);
  sel.clusters.assign(pool_size, 0);
  sel.distances.assign(pool_size, 0.0);
  sel.quotas = {pool_size};
  return sel;
}

std::vector<embedder::EmbeddedSample> assemble_training_set(std::span<const embedder::EmbeddedSample> samples,
                                                            const SelectedSet& selection) {
  std::vector<embedder::EmbeddedSample> out;
  out.reserve(selection.size());
  for (std::size_t k = 0; k < selection.indices.size(); ++k) {
    const auto i = selection.indices[k];
    if (i >= samples.size()) throw ConsistencyError("selection refers to a sample outside the pool");
    if (k > 0 && i <= selection.indices[k - 1]) throw ConsistencyError("selection indices are not strictly ascending");
    out.push_back(samples[i]);
  }
  return out;
}

}  // namespace mdit::diversity
