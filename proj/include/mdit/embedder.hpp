#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdit/corpus.hpp"
#include "mdit/tensor.hpp"

namespace mdit::embedder {

using corpus::TokenId;

// V x d token embeddings, uniform on [-0.1, 0.1] with the PAD row zeroed.
class EmbeddingTable {
public:
  EmbeddingTable(std::size_t vocab_size, std::size_t dim, std::uint64_t seed);
  EmbeddingTable(MatrixF weights, std::uint64_t seed);

  std::size_t vocab_size() const noexcept { return weights_.rows(); }
  std::size_t dim() const noexcept { return weights_.cols(); }
  std::uint64_t seed() const noexcept { return seed_; }
  const MatrixF& weights() const noexcept { return weights_; }
  std::span<const float> row(TokenId id) const { return weights_.row(id); }

private:
  MatrixF weights_;
  std::uint64_t seed_;
};

EmbeddingTable init_embedding_table(std::size_t vocab_size, std::size_t dim, std::uint64_t seed);

struct LabelEntry {
  TokenId id;
  double weight;

  friend bool operator==(const LabelEntry&, const LabelEntry&) = default;
};

// n x V label distributions stored as sparse rows (entries sorted by id, no
// zero weights). Original samples have one entry per row; interpolated ones
// at most two.
class LabelMatrix {
public:
  LabelMatrix() = default;
  explicit LabelMatrix(std::size_t vocab_size) : vocab_size_(vocab_size) {}

  static LabelMatrix from_ids(std::span<const TokenId> ids, std::size_t vocab_size);
  static LabelMatrix from_dense(const MatrixD& dense);

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::span<const LabelEntry> row(std::size_t r) const { return rows_[r]; }

  // Adds a row; entries are normalised into id order and zero weights dropped.
  void push_row(std::vector<LabelEntry> entries);

  double at(std::size_t r, TokenId id) const;
  double row_sum(std::size_t r) const;
  bool is_one_hot() const;

  // Weighted combination wa * a + wb * b, row by row. Shapes must match.
  static LabelMatrix combine(const LabelMatrix& a, double wa, const LabelMatrix& b, double wb);

  MatrixD dense() const;

  friend bool operator==(const LabelMatrix&, const LabelMatrix&) = default;

private:
  std::size_t vocab_size_ = 0;
  std::vector<std::vector<LabelEntry>> rows_;
};

enum class Provenance { Original, Generated };

const char* to_string(Provenance p);

struct EmbeddedSample {
  MatrixF hidden;               // L_in x d
  std::vector<float> row_mass;  // per hidden row: 1 for tokens, 0 for PAD, mixed when interpolated
  LabelMatrix labels;           // n x V
  std::string task_id;
  Provenance provenance = Provenance::Original;

  std::size_t input_len() const noexcept { return hidden.rows(); }
  std::size_t label_len() const noexcept { return labels.rows(); }

  friend bool operator==(const EmbeddedSample&, const EmbeddedSample&) = default;
};

// Throws CorruptInputError for ids outside the table.
EmbeddedSample embed(const corpus::TokenizedSample& sample, const EmbeddingTable& table);

std::vector<double> one_hot(TokenId id, std::size_t vocab_size);

// Mass-weighted mean of the hidden rows. PAD rows carry zero mass and zero
// embedding, so for original samples this is the mean of the non-PAD rows.
std::vector<double> pool(const EmbeddedSample& sample);

}  // namespace mdit::embedder
