#include "mdit/tensor.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

namespace mdit {

namespace {

constexpr std::string_view kMagic = "MDITTEN1";

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
  return v;
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor) {
  if (tensor.values.size() != tensor.element_count()) {
    throw InvalidParameter("tensor value count does not match its dims");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kMagic.size() + 4 * (1 + tensor.dims.size() + tensor.values.size()));
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  put_u32(out, static_cast<std::uint32_t>(tensor.dims.size()));
  for (auto d : tensor.dims) put_u32(out, d);
  for (float f : tensor.values) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() + 4 ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw CorruptInputError("not an MDT1 tensor (bad magic)");
  }
  std::size_t at = kMagic.size();
  const std::uint32_t rank = get_u32(bytes, at);
  at += 4;
  if (bytes.size() < at + 4ull * rank) throw CorruptInputError("MDT1 header truncated");
  Tensor t;
  t.dims.resize(rank);
  for (auto& d : t.dims) {
    d = get_u32(bytes, at);
    at += 4;
  }
  const std::size_t count = t.element_count();
  if (bytes.size() - at != 4 * count) {
    throw CorruptInputError("MDT1 payload size does not match header dims");
  }
  t.values.resize(count);
  for (auto& f : t.values) {
    f = std::bit_cast<float>(get_u32(bytes, at));
    at += 4;
  }
  return t;
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  const auto bytes = encode_tensor(tensor);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tensor file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_tensor(bytes);
}

}  // namespace mdit
