#ifndef CDKP_LINALG_HPP
#define CDKP_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace cdkp {

/// Dense square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Determinant by LU elimination with partial pivoting. The empty matrix has determinant 1.
inline double determinant(Matrix m) {
  const std::size_t n = m.size();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (m(piv, col) == 0.0) return 0.0;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(piv, c), m(col, c));
      det = -det;
    }
    const double p = m(col, col);
    det *= p;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m(r, col) / p;
      if (f == 0.0) continue;
      for (std::size_t c = col + 1; c < n; ++c) m(r, c) -= f * m(col, c);
    }
  }
  return det;
}

/// Largest |product| over the terms of the Leibniz expansion. Brute force up to 8x8,
/// otherwise the product of column max-norms (an upper bound).
inline double max_leibniz_term(const Matrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1.0;
  if (n > 8) {
    double bound = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
      double mx = 0.0;
      for (std::size_t r = 0; r < n; ++r) mx = std::max(mx, std::abs(m(r, c)));
      bound *= mx;
    }
    return bound;
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double p = 1.0;
    for (std::size_t r = 0; r < n; ++r) p *= std::abs(m(r, perm[r]));
    best = std::max(best, p);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Generalized binomial coefficient C(s, l) for any integer s and l >= 0.
inline double binomial(int s, int l) {
  double c = 1.0;
  for (int i = 0; i < l; ++i) c = c * static_cast<double>(s - i) / static_cast<double>(i + 1);
  return c;
}

/// Vandermonde product prod_{i<j} (z_j - z_i).
inline double vandermonde(const std::vector<double>& zs) {
  double v = 1.0;
  for (std::size_t j = 0; j < zs.size(); ++j)
    for (std::size_t i = 0; i < j; ++i) v *= zs[j] - zs[i];
  return v;
}

}  // namespace cdkp

#endif  // CDKP_LINALG_HPP
