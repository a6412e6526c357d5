#include <doctest.h>

#include <algorithm>
#include <vector>

#include "mdit/corpus.hpp"
#include "mdit/error.hpp"
#include "test_util.hpp"

using namespace mdit;
using namespace mdit::corpus;

namespace {

TaskDataset dataset_of(std::initializer_list<const char*> instructions) {
  TaskDataset ds{"t", {}};
  for (const char* text : instructions) ds.samples.push_back({text, std::nullopt, "", "t"});
  return ds;
}

std::vector<std::string> non_reserved(const Vocabulary& v) {
  return {v.tokens().begin() + kReservedCount, v.tokens().end()};
}

TokenizedSample with_len(std::size_t len, const std::string& task) {
  TokenizedSample s;
  s.input_ids.assign(len, kUnk);
  s.label_ids = {kEos};
  s.task_id = task;
  return s;
}

}  // namespace

TEST_CASE("parse_sample_line maps fields and stamps the task") {
  const auto s = parse_sample_line(R"({"instruction":"Add 2+2","output":"4"})", "math");
  REQUIRE(s.has_value());
  CHECK(s->instruction == "Add 2+2");
  CHECK(s->output == "4");
  CHECK_FALSE(s->input.has_value());
  CHECK(s->task_id == "math");
}

TEST_CASE("parse_sample_line rejects malformed records") {
  CHECK_FALSE(parse_sample_line(R"({"instruction":"","output":"x"})", "t").has_value());
  CHECK_FALSE(parse_sample_line(R"({"instruction":"   ","output":"x"})", "t").has_value());
  CHECK_FALSE(parse_sample_line(R"({"instruction":"a"})", "t").has_value());
  CHECK_FALSE(parse_sample_line(R"({"instruction":"a","output":""})", "t").has_value());
  CHECK_FALSE(parse_sample_line(R"({"instruction":1,"output":"x"})", "t").has_value());
  CHECK_FALSE(parse_sample_line(R"({"instruction":"a","output":"x","input":3})", "t").has_value());
  CHECK_FALSE(parse_sample_line(R"(["instruction","output"])", "t").has_value());
  CHECK_FALSE(parse_sample_line("not json", "t").has_value());
  CHECK(parse_sample_line(R"({"instruction":"a","output":"x","input":null})", "t").has_value());
}

TEST_CASE("load_jsonl counts malformed lines and keeps file order") {
  testutil::TempDir dir("corpus_load");
  testutil::write_file(dir / "t.jsonl",
                       "{\"instruction\":\"one\",\"output\":\"1\"}\n"
                       "{\"instruction\":\"two\",\"input\":\"x\",\"output\":\"2\"}\n"
                       "{broken\n"
                       "{\"instruction\":\"three\",\"output\":\"3\"}\n");
  const auto r = load_jsonl(dir / "t.jsonl", "math");
  CHECK(r.dataset.size() == 3);
  CHECK(r.malformed_count == 1);
  CHECK(r.dataset.task_id == "math");
  CHECK(r.dataset.samples[0].instruction == "one");
  CHECK(r.dataset.samples[1].input.value() == "x");
  CHECK(r.dataset.samples[2].instruction == "three");
}

TEST_CASE("load_jsonl error cases") {
  testutil::TempDir dir("corpus_errors");
  CHECK_THROWS_AS(load_jsonl(dir / "missing.jsonl", "t"), IoError);
  testutil::write_file(dir / "bad.jsonl", "{\"instruction\":\"\",\"output\":\"x\"}\nnope\n");
  CHECK_THROWS_AS(load_jsonl(dir / "bad.jsonl", "t"), EmptyDatasetError);
  testutil::write_file(dir / "empty.jsonl", "");
  CHECK_THROWS_AS(load_jsonl(dir / "empty.jsonl", "t"), EmptyDatasetError);
}

TEST_CASE("split_tokens lowercases and isolates punctuation") {
  CHECK(split_tokens("Add 2+2, NOW!") == std::vector<std::string>{"add", "2", "+", "2", ",", "now", "!"});
  CHECK(split_tokens("  \t ").empty());
  CHECK(split_tokens("def f(x):") == std::vector<std::string>{"def", "f", "(", "x", ")", ":"});
}

TEST_CASE("build_vocab orders by frequency then lexicographically") {
  const std::vector<TaskDataset> aba{dataset_of({"a b a"})};
  const auto v1 = build_vocab(aba, 1);
  CHECK(non_reserved(v1) == std::vector<std::string>{"a", "b"});
  CHECK(v1.size() == 6);
  const auto v2 = build_vocab(aba, 2);
  CHECK(non_reserved(v2) == std::vector<std::string>{"a"});
  CHECK(v2.size() == 5);

  const std::vector<TaskDataset> xyz{dataset_of({"x y", "y z"})};
  const auto v3 = build_vocab(xyz, 1);
  CHECK(non_reserved(v3) == std::vector<std::string>{"y", "x", "z"});
  CHECK(v3.size() == 7);

  CHECK(v1.token(kPad) == "<pad>");
  CHECK(v1.token(kUnk) == "<unk>");
  CHECK(v1.token(kBos) == "<bos>");
  CHECK(v1.token(kEos) == "<eos>");
}

TEST_CASE("build_vocab counts inputs and outputs too") {
  TaskDataset ds{"t", {{"q", std::string("w"), "w e", "t"}}};
  const auto v = build_vocab(std::vector<TaskDataset>{ds}, 1);
  CHECK(non_reserved(v) == std::vector<std::string>{"w", "e", "q"});
}

TEST_CASE("build_vocab rejects empty corpora and a zero threshold") {
  CHECK_THROWS_AS(build_vocab(std::vector<TaskDataset>{}, 1), EmptyDatasetError);
  CHECK_THROWS_AS(build_vocab(std::vector<TaskDataset>{TaskDataset{"t", {}}}, 1), EmptyDatasetError);
  CHECK_THROWS_AS(build_vocab(std::vector<TaskDataset>{dataset_of({"a"})}, 0), InvalidParameter);
}

TEST_CASE("vocabulary file round trip") {
  testutil::TempDir dir("corpus_vocab");
  const auto v = build_vocab(std::vector<TaskDataset>{dataset_of({"x y", "y z"})}, 1);
  v.save(dir / "vocab.txt");
  CHECK(testutil::read_file(dir / "vocab.txt") == "<pad>\n<unk>\n<bos>\n<eos>\ny\nx\nz\n");
  CHECK(Vocabulary::load(dir / "vocab.txt") == v);
}

TEST_CASE("tokenize builds BOS-prefixed inputs and EOS-terminated labels") {
  const auto v = build_vocab(std::vector<TaskDataset>{dataset_of({"a b a"})}, 1);
  const auto a = v.id("a");
  const auto b = v.id("b");

  const auto s1 = tokenize({"a b", std::nullopt, "a", "t"}, v);
  CHECK(s1.input_ids == std::vector<TokenId>{kBos, a, b});
  CHECK(s1.label_ids == std::vector<TokenId>{a, kEos});
  CHECK(s1.task_id == "t");

  const auto s2 = tokenize({"zzz", std::nullopt, "a", "t"}, v);
  CHECK(s2.input_ids == std::vector<TokenId>{kBos, kUnk});
  CHECK(s2.label_ids == std::vector<TokenId>{a, kEos});

  const auto s3 = tokenize({"a", std::string(""), "b", "t"}, v);
  CHECK(s3.input_ids == std::vector<TokenId>{kBos, a});

  const auto s4 = tokenize({"a", std::string("b b"), "b", "t"}, v);
  CHECK(s4.input_ids == std::vector<TokenId>{kBos, a, b, b});
}

TEST_CASE("build_length_buckets uses floor division per task") {
  const std::vector<TokenizedSample> s{with_len(3, "x"), with_len(5, "x"), with_len(17, "x")};
  const auto idx = build_length_buckets(s, 16);
  REQUIRE(idx.buckets.size() == 2);
  CHECK(idx.buckets.at(0).at("x") == std::vector<std::size_t>{0, 1});
  CHECK(idx.buckets.at(1).at("x") == std::vector<std::size_t>{2});

  const auto boundary = build_length_buckets(std::vector<TokenizedSample>{with_len(15, "x"), with_len(16, "x")}, 16);
  CHECK(boundary.buckets.size() == 2);

  const auto unit = build_length_buckets(s, 1);
  CHECK(unit.buckets.size() == 3);

  CHECK_THROWS_AS(build_length_buckets(s, 0), InvalidParameter);
}

TEST_CASE("length buckets partition the samples and bound length spread") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TokenizedSample> s;
    const auto n = 1 + rng.index(60);
    for (std::size_t i = 0; i < n; ++i) s.push_back(with_len(1 + rng.index(70), rng.index(2) ? "p" : "q"));
    const std::size_t width = 1 + rng.index(20);
    const auto idx = build_length_buckets(s, width);

    std::vector<std::size_t> seen;
    for (const auto& [bucket, tasks] : idx.buckets) {
      std::vector<std::size_t> members;
      for (const auto& [task, list] : tasks) {
        for (auto i : list) {
          CHECK(s[i].task_id == task);
          CHECK(s[i].input_len() / width == bucket);
          members.push_back(i);
        }
      }
      for (auto i : members)
        for (auto j : members) CHECK(std::max(s[i].input_len(), s[j].input_len()) - std::min(s[i].input_len(), s[j].input_len()) < width);
      seen.insert(seen.end(), members.begin(), members.end());
    }
    std::sort(seen.begin(), seen.end());
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    CHECK(seen == all);
    CHECK(idx.member_count() == n);
  }
}

TEST_CASE("load, vocab and tokenize are deterministic") {
  const auto path = std::filesystem::path(MDIT_SOURCE_DIR) / "data/synthetic/qa.jsonl";
  auto run = [&] {
    const std::vector<TaskDataset> ds{load_jsonl(path, "qa").dataset};
    const auto v = build_vocab(ds, 1);
    std::vector<TokenizedSample> out;
    for (const auto& s : ds[0].samples) out.push_back(tokenize(s, v));
    return out;
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].input_ids == b[i].input_ids);
    CHECK(a[i].label_ids == b[i].label_ids);
  }
}
