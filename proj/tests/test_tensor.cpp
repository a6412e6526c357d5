#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "mdit/error.hpp"
#include "mdit/format.hpp"
#include "mdit/rng.hpp"
#include "mdit/tensor.hpp"
#include "test_util.hpp"

using namespace mdit;

TEST_CASE("MDT1 byte layout") {
  const Tensor t{{2, 1}, {1.0f, -2.5f}};
  const auto bytes = encode_tensor(t);
  REQUIRE(bytes.size() == 8 + 4 + 8 + 8);
  CHECK(std::memcmp(bytes.data(), "MDITTEN1", 8) == 0);
  CHECK(bytes[8] == 2);
  CHECK(bytes[9] == 0);
  CHECK(bytes[12] == 2);
  CHECK(bytes[16] == 1);
  // 1.0f little endian is 00 00 80 3f
  CHECK(bytes[20] == 0x00);
  CHECK(bytes[22] == 0x80);
  CHECK(bytes[23] == 0x3f);
}

TEST_CASE("MDT1 round trip property") {
  Rng rng(1);
  testutil::TempDir dir("tensor_rt");
  for (int trial = 0; trial < 200; ++trial) {
    Tensor t;
    const auto rank = rng.index(4);
    std::size_t count = 1;
    for (std::size_t k = 0; k < rank; ++k) {
      t.dims.push_back(static_cast<std::uint32_t>(rng.index(5)));
      count *= t.dims.back();
    }
    for (std::size_t i = 0; i < count; ++i) t.values.push_back(static_cast<float>(rng.normal() * 1e3));
    const auto back = decode_tensor(encode_tensor(t));
    CHECK(back.dims == t.dims);
    CHECK(back.values == t.values);
    if (trial % 20 == 0) {
      write_tensor(dir / "t.mdt", t);
      const auto disk = read_tensor(dir / "t.mdt");
      CHECK(disk.values == t.values);
    }
  }
  const Tensor special{{3}, {std::numeric_limits<float>::infinity(), -0.0f, std::numeric_limits<float>::denorm_min()}};
  const auto back = decode_tensor(encode_tensor(special));
  CHECK(std::isinf(back.values[0]));
  CHECK(std::signbit(back.values[1]));
  CHECK(back.values[2] == std::numeric_limits<float>::denorm_min());
}

TEST_CASE("MDT1 rejects corrupt input") {
  auto bytes = encode_tensor(Tensor{{2}, {1.0f, 2.0f}});
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_tensor(bad_magic), CorruptInputError);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_tensor(truncated), CorruptInputError);
  CHECK_THROWS_AS(decode_tensor(std::vector<std::uint8_t>(10, 0)), CorruptInputError);
  CHECK_THROWS_AS(encode_tensor(Tensor{{3}, {1.0f}}), InvalidParameter);
  CHECK_THROWS_AS(read_tensor("/nonexistent/x.mdt"), IoError);
}

TEST_CASE("matrix conversion") {
  MatrixD m(2, 3);
  m(1, 2) = 0.25;
  const auto t = to_tensor(m);
  CHECK(t.dims == std::vector<std::uint32_t>{2, 3});
  CHECK(to_matrix<double>(t) == m);
  CHECK_THROWS_AS(to_matrix<float>(Tensor{{2}, {1, 2}}), CorruptInputError);
}

TEST_CASE("rng streams are reproducible and stage seeds are distinct") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  std::vector<std::uint64_t> seeds;
  for (auto s : {Stage::Embedding, Stage::Interpolation, Stage::Clustering, Stage::ModelInit, Stage::Training})
    seeds.push_back(derive_seed(42, s));
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  CHECK(derive_seed(42, Stage::Training) == mix64(42 + 5 * 0x9E3779B97F4A7C15ull));
  CHECK(mix64(0) == 0xe220a8397b1dcdafull);
}

TEST_CASE("rng distributions") {
  Rng rng(9);
  const int n = 100000;
  double sum = 0.0, sq = 0.0, umin = 1.0, umax = 0.0;
  std::vector<int> counts(7, 0);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    const double z = rng.normal();
    sum += z;
    sq += z * z;
    ++counts[rng.index(7)];
  }
  CHECK(umin > 0.0);
  CHECK(umax < 1.0);
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
  for (int c : counts) CHECK(std::abs(c - n / 7.0) < 0.03 * n / 7.0);
  CHECK_THROWS_AS(rng.index(0), InvalidParameter);

  std::vector<int> items{1, 2, 3, 4, 5};
  rng.shuffle(std::span<int>(items));
  std::sort(items.begin(), items.end());
  CHECK(items == std::vector<int>{1, 2, 3, 4, 5});
}

TEST_CASE("format_real is shortest round trip") {
  CHECK(format_real(0.5) == "0.5");
  CHECK(format_real(1.0) == "1");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_real(v)) == v);
}
