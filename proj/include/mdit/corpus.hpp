#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mdit::corpus {

using TokenId = std::uint32_t;

inline constexpr TokenId kPad = 0;
inline constexpr TokenId kUnk = 1;
inline constexpr TokenId kBos = 2;
inline constexpr TokenId kEos = 3;
inline constexpr std::size_t kReservedCount = 4;

struct InstructionSample {
  std::string instruction;
  std::optional<std::string> input;
  std::string output;
  std::string task_id;
};

struct TaskDataset {
  std::string task_id;
  std::vector<InstructionSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
};

struct LoadResult {
  TaskDataset dataset;
  std::size_t malformed_count = 0;
};

// Reads one Alpaca-style object per line. Malformed lines are counted and
// skipped; a file with no valid line throws EmptyDatasetError.
LoadResult load_jsonl(const std::filesystem::path& path, const std::string& task_id);

// Parses a single line; nullopt when the line is malformed.
std::optional<InstructionSample> parse_sample_line(std::string_view line, const std::string& task_id);

// Lowercase, split on whitespace, every ASCII punctuation character is its own token.
std::vector<std::string> split_tokens(std::string_view text);

class Vocabulary {
public:
  Vocabulary();
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& token(TokenId id) const { return tokens_.at(id); }

  // kUnk for unknown strings.
  TokenId id(std::string_view token) const;

  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// Reserved tokens followed by every token with frequency >= min_freq, ordered
// by descending frequency then lexicographically.
Vocabulary build_vocab(std::span<const TaskDataset> datasets, std::size_t min_freq);

struct TokenizedSample {
  std::vector<TokenId> input_ids;
  std::vector<TokenId> label_ids;
  std::string task_id;

  std::size_t input_len() const noexcept { return input_ids.size(); }
  std::size_t label_len() const noexcept { return label_ids.size(); }
};

TokenizedSample tokenize(const InstructionSample& sample, const Vocabulary& vocab);

// Samples grouped by floor(input_len / bucket_width), then by task. Members
// are indices into the sample list the index was built from.
struct LengthBucketIndex {
  std::size_t bucket_width = 16;
  std::map<std::size_t, std::map<std::string, std::vector<std::size_t>>> buckets;

  std::size_t member_count() const;
};

LengthBucketIndex build_length_buckets(std::span<const TokenizedSample> samples, std::size_t bucket_width);

}  // namespace mdit::corpus
