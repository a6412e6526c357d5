#include <doctest.h>

#include <cmath>

#include "mdit/embedder.hpp"
#include "mdit/error.hpp"
#include "test_util.hpp"

using namespace mdit;
using namespace mdit::embedder;
using corpus::TokenizedSample;

TEST_CASE("embedding table is seeded, bounded and has a zero PAD row") {
  const auto a = init_embedding_table(5, 4, 7);
  const auto b = init_embedding_table(5, 4, 7);
  const auto c = init_embedding_table(5, 4, 8);
  CHECK(a.weights() == b.weights());
  CHECK_FALSE(a.weights() == c.weights());
  for (float v : a.row(corpus::kPad)) CHECK(v == 0.0f);
  for (float v : a.weights().data()) {
    CHECK(v >= -0.1f);
    CHECK(v <= 0.1f);
  }
  CHECK_THROWS_AS(init_embedding_table(4, 4, 1), InvalidParameter);
  CHECK_THROWS_AS(init_embedding_table(5, 1, 1), InvalidParameter);
}

TEST_CASE("embed looks up rows and one-hot encodes labels") {
  const auto table = init_embedding_table(5, 4, 3);
  TokenizedSample t{{corpus::kBos}, {corpus::kEos}, "math"};
  const auto e = embed(t, table);
  REQUIRE(e.hidden.rows() == 1);
  for (std::size_t k = 0; k < 4; ++k) CHECK(e.hidden(0, k) == table.row(corpus::kBos)[k]);
  CHECK(e.labels.dense().row(0)[0] == 0.0);
  const auto dense = e.labels.dense();
  CHECK(std::vector<double>(dense.row(0).begin(), dense.row(0).end()) == std::vector<double>{0, 0, 0, 1, 0});
  CHECK(e.provenance == Provenance::Original);
  CHECK(e.task_id == "math");
  CHECK(e.row_mass == std::vector<float>{1.0f});
  CHECK(embed(t, table) == e);

  TokenizedSample bad{{7}, {corpus::kEos}, "x"};
  CHECK_THROWS_AS(embed(bad, table), CorruptInputError);
  TokenizedSample bad_label{{corpus::kBos}, {9}, "x"};
  CHECK_THROWS_AS(embed(bad_label, table), CorruptInputError);
}

TEST_CASE("one_hot") {
  CHECK(one_hot(2, 4) == std::vector<double>{0, 0, 1, 0});
  CHECK(one_hot(0, 4) == std::vector<double>{1, 0, 0, 0});
  CHECK_THROWS_AS(one_hot(4, 4), InvalidParameter);
}

TEST_CASE("pool averages the non-PAD rows") {
  EmbeddedSample s;
  s.hidden = MatrixF(2, 2);
  s.hidden(0, 0) = 1; s.hidden(0, 1) = 0;
  s.hidden(1, 0) = 3; s.hidden(1, 1) = 2;
  s.row_mass = {1, 1};
  CHECK(pool(s) == std::vector<double>{2, 1});

  EmbeddedSample single;
  single.hidden = MatrixF(1, 3);
  single.hidden(0, 0) = 0.5f; single.hidden(0, 1) = -1; single.hidden(0, 2) = 4;
  single.row_mass = {1};
  CHECK(pool(single) == std::vector<double>{0.5, -1, 4});

  EmbeddedSample padded = single;
  padded.hidden.pad_rows(2);
  padded.row_mass.push_back(0.0f);
  CHECK(pool(padded) == pool(single));

  EmbeddedSample all_pad;
  all_pad.hidden = MatrixF(2, 3);
  all_pad.row_mass = {0, 0};
  CHECK_THROWS_AS(pool(all_pad), DegenerateInputError);
}

TEST_CASE("pool is linear for a shared PAD mask") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t len = 1 + rng.index(6), d = 1 + rng.index(5);
    auto a = testutil::random_sample(rng, len, 1, d, 5);
    auto b = testutil::random_sample(rng, len, 1, d, 5);
    const double lambda = rng.uniform_open();
    EmbeddedSample mix = a;
    for (std::size_t i = 0; i < a.hidden.data().size(); ++i) {
      mix.hidden.data()[i] = static_cast<float>(lambda * a.hidden.data()[i] + (1 - lambda) * b.hidden.data()[i]);
    }
    const auto pa = pool(a), pb = pool(b), pm = pool(mix);
    for (std::size_t k = 0; k < d; ++k) CHECK(pm[k] == doctest::Approx(lambda * pa[k] + (1 - lambda) * pb[k]).epsilon(1e-6));
  }
}

TEST_CASE("label matrix rows, combination and density") {
  const std::vector<corpus::TokenId> ids{0, 2};
  const auto a = LabelMatrix::from_ids(ids, 4);
  const auto b = LabelMatrix::from_ids(std::vector<corpus::TokenId>{2, 2}, 4);
  CHECK(a.is_one_hot());
  const auto c = LabelMatrix::combine(a, 0.3, b, 0.7);
  CHECK(c.at(0, 0) == doctest::Approx(0.3));
  CHECK(c.at(0, 2) == doctest::Approx(0.7));
  CHECK(c.row(0).size() == 2);
  CHECK(c.row(1).size() == 1);
  CHECK(c.at(1, 2) == doctest::Approx(1.0));
  CHECK(c.row_sum(0) == doctest::Approx(1.0));
  CHECK_FALSE(c.is_one_hot());
  CHECK(LabelMatrix::from_dense(c.dense()) == c);
  CHECK_THROWS_AS(LabelMatrix::from_ids(std::vector<corpus::TokenId>{4}, 4), CorruptInputError);
  CHECK_THROWS(LabelMatrix::combine(a, 0.5, LabelMatrix::from_ids(std::vector<corpus::TokenId>{1}, 4), 0.5));
}
