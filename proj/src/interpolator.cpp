#include "mdit/interpolator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdit/error.hpp"

namespace mdit::interpolator {

void InterpolationConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidParameter("alpha must be a positive finite number");
  if (bucket_width == 0) throw InvalidParameter("bucket_width must be >= 1");
  for (const auto& p : task_pairs) {
    if (p.first == p.second) throw InvalidParameter("task pair must name two distinct tasks: " + p.first);
  }
}

double sample_log_gamma(double shape, Rng& rng) {
  if (!(shape > 0.0)) throw InvalidParameter("gamma shape must be positive");
  if (shape < 1.0) {
    return sample_log_gamma(shape + 1.0, rng) + std::log(rng.uniform_open()) / shape;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

double sample_lambda(double alpha, Rng& rng) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidParameter("alpha must be positive");
  const double log_g1 = sample_log_gamma(alpha, rng);
  const double log_g2 = sample_log_gamma(alpha, rng);
  // G1 / (G1 + G2) = 1 / (1 + exp(log G2 - log G1))
  const double lambda = 1.0 / (1.0 + std::exp(log_g2 - log_g1));
  constexpr double lo = 0x1.0p-53;
  constexpr double hi = 1.0 - 0x1.0p-53;
  return std::clamp(lambda, lo, hi);
}

std::pair<EmbeddedSample, EmbeddedSample> align_lengths(const EmbeddedSample& a, const EmbeddedSample& b) {
  std::pair<EmbeddedSample, EmbeddedSample> out{a, b};
  const std::size_t rows = std::max(a.input_len(), b.input_len());
  const std::size_t label_rows = std::max(a.label_len(), b.label_len());
  for (auto* s : {&out.first, &out.second}) {
    s->hidden.pad_rows(rows);
    s->row_mass.resize(rows, 0.0f);
    while (s->labels.rows() < label_rows) s->labels.push_row({{corpus::kPad, 1.0}});
  }
  return out;
}

std::string cross_task_id(const std::string& first, const std::string& second) {
  return "cross:" + first + "+" + second;
}

GeneratedSample interpolate_pair(const EmbeddedSample& a, const EmbeddedSample& b, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidParameter("lambda must lie in [0, 1]");
  if (a.hidden.rows() != b.hidden.rows() || a.hidden.cols() != b.hidden.cols() ||
      a.labels.rows() != b.labels.rows() || a.labels.vocab_size() != b.labels.vocab_size() ||
      a.row_mass.size() != b.row_mass.size()) {
    throw InvalidParameter("interpolate_pair: samples are not length-aligned");
  }

  // The weight pair is formed so that one weight is exactly 1 minus the other
  // in floating point. Then interpolate(a, b, l) and interpolate(b, a, 1 - l)
  // use identical weights and agree bit for bit.
  double wa, wb;
  if (lambda >= 0.5) {
    wa = lambda;
    wb = 1.0 - lambda;
  } else {
    wb = 1.0 - lambda;
    wa = 1.0 - wb;
  }

  GeneratedSample g;
  g.lambda = lambda;
  auto& e = g.embedded;
  e.hidden = MatrixF(a.hidden.rows(), a.hidden.cols());
  const auto ha = a.hidden.data(), hb = b.hidden.data();
  auto out = e.hidden.data();
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<float>(wa * ha[k] + wb * hb[k]);
  }
  e.row_mass.resize(a.row_mass.size());
  for (std::size_t t = 0; t < e.row_mass.size(); ++t) {
    e.row_mass[t] = static_cast<float>(wa * a.row_mass[t] + wb * b.row_mass[t]);
  }
  e.labels = embedder::LabelMatrix::combine(a.labels, wa, b.labels, wb);
  e.task_id = cross_task_id(a.task_id, b.task_id);
  e.provenance = embedder::Provenance::Generated;
  g.parent_tasks = {a.task_id, b.task_id};
  return g;
}

GeneratedSet generate_cross_task(std::span<const EmbeddedSample> originals,
                                 const corpus::LengthBucketIndex& buckets, const TaskPair& tasks,
                                 const InterpolationConfig& config, Rng& rng) {
  if (!(config.alpha > 0.0)) throw InvalidParameter("alpha must be positive");
  GeneratedSet out;
  PairStats stats{tasks, 0, 0, 0};

  for (const auto& [bucket, members] : buckets.buckets) {
    auto it_i = members.find(tasks.first);
    auto it_j = members.find(tasks.second);
    if (it_i == members.end() || it_j == members.end()) continue;

    std::vector<std::size_t> side_i = it_i->second;
    std::vector<std::size_t> side_j = it_j->second;
    for (auto idx : side_i) {
      if (idx >= originals.size()) throw ConsistencyError("bucket index refers past the sample list");
    }
    for (auto idx : side_j) {
      if (idx >= originals.size()) throw ConsistencyError("bucket index refers past the sample list");
    }
    ++stats.shared_buckets;
    rng.shuffle(std::span(side_i));
    rng.shuffle(std::span(side_j));

    const std::size_t pairs = std::min(side_i.size(), side_j.size());
    for (std::size_t p = 0; p < pairs; ++p) {
      ++stats.pairs_formed;
      if (config.per_pair == 0) continue;
      const auto [a, b] = align_lengths(originals[side_i[p]], originals[side_j[p]]);
      for (std::size_t t = 0; t < config.per_pair; ++t) {
        auto g = interpolate_pair(a, b, sample_lambda(config.alpha, rng));
        g.parent_i = side_i[p];
        g.parent_j = side_j[p];
        g.parent_tasks = tasks;
        out.samples.push_back(std::move(g));
      }
    }
  }
  stats.generated = out.samples.size();
  out.stats.push_back(std::move(stats));
  return out;
}

GeneratedSet generate_all(std::span<const EmbeddedSample> originals, const corpus::LengthBucketIndex& buckets,
                          const InterpolationConfig& config) {
  config.validate();
  Rng rng(config.seed);
  GeneratedSet all;
  for (const auto& pair : config.task_pairs) {
    auto part = generate_cross_task(originals, buckets, pair, config, rng);
    for (auto& s : part.samples) all.samples.push_back(std::move(s));
    for (auto& s : part.stats) all.stats.push_back(std::move(s));
  }
  return all;
}

}  // namespace mdit::interpolator
