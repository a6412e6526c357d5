#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mdit/error.hpp"

namespace mdit {

// Dense row-major matrix.
template <typename T>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  // Appends zero rows until rows() == new_rows. Never shrinks.
  void pad_rows(std::size_t new_rows) {
    if (new_rows > rows_) {
      data_.resize(new_rows * cols_, T{});
      rows_ = new_rows;
    }
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using MatrixF = Matrix<float>;
using MatrixD = Matrix<double>;

// In-memory image of an MDT1 tensor file.
struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const;
};

// MDT1 layout: magic "MDITTEN1", u32 LE rank, rank x u32 LE dims, then
// row-major float32 LE values.
void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_tensor(const std::filesystem::path& path);

// Encoding into / decoding from a byte buffer; the file functions wrap these.
std::vector<std::uint8_t> encode_tensor(const Tensor& tensor);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

template <typename T>
Tensor to_tensor(const Matrix<T>& m) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
  t.values.reserve(m.data().size());
  for (T v : m.data()) t.values.push_back(static_cast<float>(v));
  return t;
}

template <typename T>
Matrix<T> to_matrix(const Tensor& t) {
  if (t.dims.size() != 2) throw CorruptInputError("expected a rank-2 tensor");
  Matrix<T> m(t.dims[0], t.dims[1]);
  auto out = m.data();
  for (std::size_t i = 0; i < t.values.size(); ++i) out[i] = static_cast<T>(t.values[i]);
  return m;
}

}  // namespace mdit
