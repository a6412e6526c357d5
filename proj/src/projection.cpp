#include "mdit/projection.hpp"

#include <cmath>
#include <fstream>
#include <tuple>

#include "mdit/error.hpp"
#include "mdit/format.hpp"
#include "mdit/rng.hpp"

namespace mdit::projection {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

std::vector<double> multiply(const MatrixD& m, const std::vector<double>& v) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s += row[k] * v[k];
    out[i] = s;
  }
  return out;
}

void remove_component(std::vector<double>& v, const std::vector<double>& u) {
  const double c = dot(v, u);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * u[k];
}

bool normalize(std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  if (n == 0.0 || !std::isfinite(n)) return false;
  for (auto& x : v) x /= n;
  return true;
}

// Dominant eigenpair of a symmetric PSD matrix, restricted to the complement
// of `exclude` (orthonormal vectors). A remaining spectrum below 1e-12 of the
// trace counts as null and yields eigenvalue 0.
std::pair<double, std::vector<double>> dominant(const MatrixD& cov, const std::vector<std::vector<double>>& exclude,
                                                const PowerIterationOptions& options, Rng& rng) {
  const std::size_t d = cov.rows();
  double trace = 0.0;
  for (std::size_t k = 0; k < d; ++k) trace += cov(k, k);
  const double null_level = 1e-12 * trace;

  auto project_out = [&](std::vector<double>& v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : exclude) remove_component(v, u);
  };

  // a = P cov P with P the projector onto the complement of `exclude`.
  MatrixD a(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> e(d, 0.0);
    e[j] = 1.0;
    project_out(e);
    auto col = multiply(cov, e);
    project_out(col);
    for (std::size_t i = 0; i < d; ++i) a(i, j) = col[i];
  }
  double rest = 0.0;
  for (std::size_t k = 0; k < d; ++k) rest += a(k, k);
  std::vector<double> v(d);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  project_out(v);
  normalize(v);
  if (rest <= null_level) return {0.0, v};

  for (std::size_t s = 0; s < options.squarings; ++s) {
    MatrixD sq(d, d);
    double tr = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) acc += a(i, k) * a(k, j);
        sq(i, j) = sq(j, i) = acc;
      }
      tr += sq(i, i);
    }
    if (!(tr > 0.0) || !std::isfinite(tr)) break;
    for (auto& x : sq.data()) x /= tr;
    a = std::move(sq);
  }

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    auto w = multiply(a, v);
    project_out(w);
    if (!normalize(w)) break;
    if (dot(w, v) < 0.0) {
      for (auto& x : w) x = -x;
    }
    double change = 0.0;
    for (std::size_t k = 0; k < d; ++k) change += (w[k] - v[k]) * (w[k] - v[k]);
    v = std::move(w);
    if (std::sqrt(change) < options.tolerance) break;
  }
  const double value = dot(v, multiply(cov, v));
  return {value <= null_level ? 0.0 : value, v};
}

}  // namespace

Projection pca_2d(const MatrixD& points, const PowerIterationOptions& options) {
  const std::size_t n = points.rows();
  const std::size_t d = points.cols();
  if (n < 2) throw InvalidParameter("projection needs at least two points");
  if (d < 1) throw InvalidParameter("projection needs at least one dimension");

  Projection proj;
  proj.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = points.row(i);
    for (std::size_t k = 0; k < d; ++k) proj.mean[k] += row[k];
  }
  for (auto& m : proj.mean) m /= static_cast<double>(n);

  MatrixD centered(n, d);
  bool any_spread = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      centered(i, k) = points(i, k) - proj.mean[k];
      if (points(i, k) != points(0, k)) any_spread = true;
    }
  }
  if (!any_spread) throw DegenerateInputError("projection: all points are identical");

  MatrixD cov(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = centered.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) cov(a, b) += row[a] * row[b];
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      cov(a, b) /= static_cast<double>(n - 1);
      cov(b, a) = cov(a, b);
    }
  }

  Rng rng(0x5043412d32440001ULL);
  proj.components = MatrixD(2, d);
  std::vector<std::vector<double>> found;
  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<double> vec;
    double value = 0.0;
    if (c < d) {
      std::tie(value, vec) = dominant(cov, found, options, rng);
    } else {
      vec.assign(d, 0.0);  // one-dimensional data has no second direction
    }
    proj.eigenvalues[c] = value;
    std::copy(vec.begin(), vec.end(), proj.components.row(c).begin());
    found.push_back(std::move(vec));
  }

  proj.coordinates = MatrixD(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = centered.row(i);
    for (std::size_t c = 0; c < 2; ++c) {
      auto comp = proj.components.row(c);
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += row[k] * comp[k];
      proj.coordinates(i, c) = s;
    }
  }
  return proj;
}

Projection export_projection(const diversity::CandidatePool& pool, const std::filesystem::path& out,
                             const PowerIterationOptions& options) {
  auto proj = pca_2d(pool.vectors, options);
  std::ofstream csv(out, std::ios::trunc);
  if (!csv) throw IoError("cannot write " + out.string());
  csv << "x,y,provenance\n";
  for (std::size_t i = 0; i < pool.size(); ++i) {
    csv << format_real(proj.coordinates(i, 0)) << ',' << format_real(proj.coordinates(i, 1)) << ','
        << embedder::to_string(pool.provenance[i]) << '\n';
  }
  if (!csv) throw IoError("write failed: " + out.string());
  return proj;
}

}  // namespace mdit::projection
