#include "mdit/embedder.hpp"

#include <algorithm>

#include "mdit/error.hpp"
#include "mdit/rng.hpp"

namespace mdit::embedder {

EmbeddingTable::EmbeddingTable(std::size_t vocab_size, std::size_t dim, std::uint64_t seed)
    : weights_(vocab_size, dim), seed_(seed) {
  if (vocab_size < 5 || dim < 2) {
    throw InvalidParameter("embedding table needs V >= 5 and d >= 2");
  }
  Rng rng(seed);
  for (auto& w : weights_.data()) w = static_cast<float>(rng.uniform(-0.1, 0.1));
  for (auto& w : weights_.row(corpus::kPad)) w = 0.0f;
}

EmbeddingTable::EmbeddingTable(MatrixF weights, std::uint64_t seed)
    : weights_(std::move(weights)), seed_(seed) {
  if (weights_.rows() < 5 || weights_.cols() < 2) {
    throw InvalidParameter("embedding table needs V >= 5 and d >= 2");
  }
}

EmbeddingTable init_embedding_table(std::size_t vocab_size, std::size_t dim, std::uint64_t seed) {
  return EmbeddingTable(vocab_size, dim, seed);
}

LabelMatrix LabelMatrix::from_ids(std::span<const TokenId> ids, std::size_t vocab_size) {
  LabelMatrix m(vocab_size);
  for (TokenId id : ids) {
    if (id >= vocab_size) throw CorruptInputError("label id out of vocabulary range");
    m.rows_.push_back({{id, 1.0}});
  }
  return m;
}

LabelMatrix LabelMatrix::from_dense(const MatrixD& dense) {
  LabelMatrix m(dense.cols());
  for (std::size_t r = 0; r < dense.rows(); ++r) {
    std::vector<LabelEntry> row;
    for (std::size_t c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) row.push_back({static_cast<TokenId>(c), dense(r, c)});
    }
    m.rows_.push_back(std::move(row));
  }
  return m;
}

void LabelMatrix::push_row(std::vector<LabelEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<LabelEntry> merged;
  for (const auto& e : entries) {
    if (e.id >= vocab_size_) throw InvalidParameter("label id out of vocabulary range");
    if (!merged.empty() && merged.back().id == e.id) {
      merged.back().weight += e.weight;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const LabelEntry& e) { return e.weight == 0.0; });
  rows_.push_back(std::move(merged));
}

double LabelMatrix::at(std::size_t r, TokenId id) const {
  for (const auto& e : rows_.at(r)) {
    if (e.id == id) return e.weight;
  }
  return 0.0;
}

double LabelMatrix::row_sum(std::size_t r) const {
  double s = 0.0;
  for (const auto& e : rows_.at(r)) s += e.weight;
  return s;
}

bool LabelMatrix::is_one_hot() const {
  return std::all_of(rows_.begin(), rows_.end(),
                     [](const auto& row) { return row.size() == 1 && row[0].weight == 1.0; });
}

LabelMatrix LabelMatrix::combine(const LabelMatrix& a, double wa, const LabelMatrix& b, double wb) {
  if (a.rows() != b.rows() || a.vocab_size() != b.vocab_size()) {
    throw InvalidParameter("label matrices differ in shape");
  }
  LabelMatrix out(a.vocab_size());
  out.rows_.reserve(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::vector<LabelEntry> row;
    row.reserve(a.rows_[r].size() + b.rows_[r].size());
    // Two-way merge by id. Each product is formed independently so that
    // combine(a, wa, b, wb) and combine(b, wb, a, wa) agree exactly.
    auto ia = a.rows_[r].begin(), ea = a.rows_[r].end();
    auto ib = b.rows_[r].begin(), eb = b.rows_[r].end();
    while (ia != ea || ib != eb) {
      if (ib == eb || (ia != ea && ia->id < ib->id)) {
        row.push_back({ia->id, wa * ia->weight});
        ++ia;
      } else if (ia == ea || ib->id < ia->id) {
        row.push_back({ib->id, wb * ib->weight});
        ++ib;
      } else {
        row.push_back({ia->id, wa * ia->weight + wb * ib->weight});
        ++ia;
        ++ib;
      }
    }
    std::erase_if(row, [](const LabelEntry& e) { return e.weight == 0.0; });
    out.rows_.push_back(std::move(row));
  }
  return out;
}

MatrixD LabelMatrix::dense() const {
  MatrixD m(rows(), vocab_size_);
  for (std::size_t r = 0; r < rows(); ++r) {
    for (const auto& e : rows_[r]) m(r, e.id) = e.weight;
  }
  return m;
}

const char* to_string(Provenance p) { return p == Provenance::Original ? "original" : "generated"; }

EmbeddedSample embed(const corpus::TokenizedSample& sample, const EmbeddingTable& table) {
  const std::size_t vocab = table.vocab_size();
  EmbeddedSample out;
  out.hidden = MatrixF(sample.input_ids.size(), table.dim());
  out.row_mass.resize(sample.input_ids.size());
  for (std::size_t t = 0; t < sample.input_ids.size(); ++t) {
    const TokenId id = sample.input_ids[t];
    if (id >= vocab) throw CorruptInputError("input token id out of embedding table range");
    std::ranges::copy(table.row(id), out.hidden.row(t).begin());
    out.row_mass[t] = id == corpus::kPad ? 0.0f : 1.0f;
  }
  out.labels = LabelMatrix::from_ids(sample.label_ids, vocab);
  out.task_id = sample.task_id;
  out.provenance = Provenance::Original;
  return out;
}

std::vector<double> one_hot(TokenId id, std::size_t vocab_size) {
  if (id >= vocab_size) throw InvalidParameter("one_hot: id must be < V");
  std::vector<double> v(vocab_size, 0.0);
  v[id] = 1.0;
  return v;
}

std::vector<double> pool(const EmbeddedSample& sample) {
  const auto& h = sample.hidden;
  if (sample.row_mass.size() != h.rows()) throw ConsistencyError("row mass does not match hidden rows");
  double mass = 0.0;
  std::vector<double> acc(h.cols(), 0.0);
  for (std::size_t t = 0; t < h.rows(); ++t) {
    if (sample.row_mass[t] == 0.0f) continue;
    mass += sample.row_mass[t];
    auto row = h.row(t);
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += row[c];
  }
  if (mass <= 0.0) throw DegenerateInputError("pool: sample has no non-PAD rows");
  for (auto& v : acc) v /= mass;
  return acc;
}

}  // namespace mdit::embedder
