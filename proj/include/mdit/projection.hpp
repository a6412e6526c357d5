#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "mdit/diversity.hpp"
#include "mdit/tensor.hpp"

namespace mdit::projection {

struct PowerIterationOptions {
  std::size_t max_iterations = 100;
  double tolerance = 1e-9;  // on the change of the unit eigenvector
  // The iteration runs on the covariance raised to the power 2^squarings, so
  // one step advances as far as 2^squarings plain steps.
  std::size_t squarings = 24;
};

struct Projection {
  std::vector<double> mean;
  MatrixD components;                // 2 x d, orthonormal rows
  std::array<double, 2> eigenvalues; // of the sample covariance, descending
  MatrixD coordinates;               // N x 2
};

// Top-two principal directions of the rows of `points` by power iteration
// with deflation. Covariance is normalised by N - 1. Throws
// DegenerateInputError when every point is identical.
Projection pca_2d(const MatrixD& points, const PowerIterationOptions& options = {});

// Writes "x,y,provenance" for every pool entry.
Projection export_projection(const diversity::CandidatePool& pool, const std::filesystem::path& out,
                             const PowerIterationOptions& options = {});

}  // namespace mdit::projection
