#pragma once

// Shared helpers for the test suite. The linear-algebra oracle here is kept
// deliberately independent of Eigen (plain loops + Gauss-Jordan) so library
// results can be checked against a second implementation.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cre/dataset.hpp"

namespace test_support {

using Mat = std::vector<std::vector<double>>;

inline Mat matmul(const Mat& a, const Mat& b) {
  const std::size_t n = a.size(), k = b.size(), m = b[0].size();
  Mat c(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
  return c;
}

inline Mat transpose(const Mat& a) {
  Mat t(a[0].size(), std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

// Gauss-Jordan inverse with partial pivoting.
inline Mat invert(Mat a) {
  const std::size_t n = a.size();
  Mat inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-14) throw std::runtime_error("oracle: singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// OLS coefficients via the normal equations, solved by the oracle inverse.
inline std::vector<double> ols_oracle(const Mat& x, const std::vector<double>& y) {
  const Mat xt = transpose(x);
  const Mat xtx_inv = invert(matmul(xt, x));
  const std::size_t p = x[0].size(), n = x.size();
  std::vector<double> xty(p, 0.0);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < n; ++i) xty[j] += x[i][j] * y[i];
  std::vector<double> beta(p, 0.0);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t l = 0; l < p; ++l) beta[j] += xtx_inv[j][l] * xty[l];
  return beta;
}

// Brute-force sandwich: bread * (sum w_i^2 x_i x_i') * bread, with w_i the
// residual, optionally HC3-scaled by the caller.
inline Mat sandwich_oracle(const Mat& x, const std::vector<double>& resid_scaled) {
  const Mat bread = invert(matmul(transpose(x), x));
  const std::size_t n = x.size(), p = x[0].size();
  Mat meat(p, std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double w2 = resid_scaled[i] * resid_scaled[i];
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t l = 0; l < p; ++l) meat[j][l] += w2 * x[i][j] * x[i][l];
  }
  return matmul(matmul(bread, meat), bread);
}

inline std::vector<double> leverages_oracle(const Mat& x) {
  const Mat bread = invert(matmul(transpose(x), x));
  const std::size_t n = x.size(), p = x[0].size();
  std::vector<double> h(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t l = 0; l < p; ++l) h[i] += x[i][j] * bread[j][l] * x[i][l];
  return h;
}

inline Mat to_oracle(const Eigen::MatrixXd& m) {
  Mat out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

inline std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// A scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 eng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(eng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline cre::Dataset make_dataset(const std::vector<double>& y, const std::vector<int>& z, const Eigen::MatrixXd& x,
                                 std::vector<std::string> names = {}) {
  cre::Dataset d;
  d.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  d.z.resize(static_cast<Eigen::Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) d.z(static_cast<Eigen::Index>(i)) = z[i];
  d.x = x;
  if (names.empty())
    for (Eigen::Index j = 0; j < x.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  d.column_names = std::move(names);
  return d;
}

}  // namespace test_support
