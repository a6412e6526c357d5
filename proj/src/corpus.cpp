#include "mdit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "mdit/error.hpp"

namespace mdit::corpus {

namespace {

const std::vector<std::string>& reserved_tokens() {
  static const std::vector<std::string> r = {"<pad>", "<unk>", "<bos>", "<eos>"};
  return r;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

void append_ids(std::string_view text, const Vocabulary& vocab, std::vector<TokenId>& out) {
  for (const auto& tok : split_tokens(text)) out.push_back(vocab.id(tok));
}

}  // namespace

std::optional<InstructionSample> parse_sample_line(std::string_view line, const std::string& task_id) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  if (!obj.is_object()) return std::nullopt;

  auto instruction = obj.find("instruction");
  auto output = obj.find("output");
  if (instruction == obj.end() || !instruction->is_string()) return std::nullopt;
  if (output == obj.end() || !output->is_string()) return std::nullopt;

  InstructionSample s;
  s.instruction = instruction->get<std::string>();
  s.output = output->get<std::string>();
  s.task_id = task_id;
  if (is_blank(s.instruction) || s.output.empty()) return std::nullopt;

  if (auto input = obj.find("input"); input != obj.end() && !input->is_null()) {
    if (!input->is_string()) return std::nullopt;
    auto text = input->get<std::string>();
    if (!text.empty()) s.input = std::move(text);
  }
  return s;
}

LoadResult load_jsonl(const std::filesystem::path& path, const std::string& task_id) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());

  LoadResult result;
  result.dataset.task_id = task_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (auto sample = parse_sample_line(line, task_id)) {
      result.dataset.samples.push_back(std::move(*sample));
    } else {
      ++result.malformed_count;
    }
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  if (result.malformed_count > 0) {
    std::cerr << "warning: " << path.string() << ": skipped " << result.malformed_count
              << " malformed line(s) of " << line_no << "\n";
  }
  if (result.dataset.samples.empty()) {
    throw EmptyDatasetError(path.string() + " contains no valid samples");
  }
  return result;
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      flush();
      tokens.emplace_back(1, static_cast<char>(c));
    } else {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
  }
  flush();
  return tokens;
}

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  tokens_ = reserved_tokens();
  for (auto& t : tokens) tokens_.push_back(std::move(t));
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw InvalidParameter("duplicate vocabulary token: " + tokens_[i]);
    }
  }
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  const auto& reserved = reserved_tokens();
  if (lines.size() < reserved.size() || !std::equal(reserved.begin(), reserved.end(), lines.begin())) {
    throw CorruptInputError(path.string() + ": vocabulary must start with <pad> <unk> <bos> <eos>");
  }
  return Vocabulary(std::vector<std::string>(lines.begin() + reserved.size(), lines.end()));
}

Vocabulary build_vocab(std::span<const TaskDataset> datasets, std::size_t min_freq) {
  if (min_freq == 0) throw InvalidParameter("min_freq must be >= 1");
  std::unordered_map<std::string, std::size_t> freq;
  std::size_t samples = 0;
  auto count = [&](std::string_view text) {
    for (auto& tok : split_tokens(text)) ++freq[tok];
  };
  for (const auto& ds : datasets) {
    for (const auto& s : ds.samples) {
      ++samples;
      count(s.instruction);
      if (s.input) count(*s.input);
      count(s.output);
    }
  }
  if (samples == 0) throw EmptyDatasetError("cannot build a vocabulary from an empty corpus");

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : freq) {
    if (n >= min_freq) kept.emplace_back(tok, n);
  }
  if (kept.empty()) throw EmptyDatasetError("no token reaches min_freq");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [tok, n] : kept) tokens.push_back(std::move(tok));
  return Vocabulary(std::move(tokens));
}

TokenizedSample tokenize(const InstructionSample& sample, const Vocabulary& vocab) {
  TokenizedSample t;
  t.task_id = sample.task_id;
  t.input_ids.push_back(kBos);
  append_ids(sample.instruction, vocab, t.input_ids);
  if (sample.input) append_ids(*sample.input, vocab, t.input_ids);
  append_ids(sample.output, vocab, t.label_ids);
  t.label_ids.push_back(kEos);
  return t;
}

std::size_t LengthBucketIndex::member_count() const {
  std::size_t n = 0;
  for (const auto& [b, tasks] : buckets) {
    for (const auto& [task, members] : tasks) n += members.size();
  }
  return n;
}

LengthBucketIndex build_length_buckets(std::span<const TokenizedSample> samples, std::size_t bucket_width) {
  if (bucket_width == 0) throw InvalidParameter("bucket_width must be >= 1");
  LengthBucketIndex index;
  index.bucket_width = bucket_width;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    index.buckets[samples[i].input_len() / bucket_width][samples[i].task_id].push_back(i);
  }
  return index;
}

}  // namespace mdit::corpus
