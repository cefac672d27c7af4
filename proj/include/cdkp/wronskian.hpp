#ifndef CDKP_WRONSKIAN_HPP
#define CDKP_WRONSKIAN_HPP

// Delta-Wronskians W_m(f_1, ..., f_m) = det[Delta^{i-1} f_j] and the
// reduction criterion built from them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "cdkp/error.hpp"
#include "cdkp/expsum.hpp"
#include "cdkp/grid.hpp"
#include "cdkp/linalg.hpp"

namespace cdkp {

/// A Wronskian counts as zero below this fraction of its largest Leibniz term.
inline constexpr double kWronskianZero = 1e-9;
/// Relative size below which merged symbolic terms count as cancelled.
inline constexpr double kCancelRel = 1e-12;

struct WronskianSpec {
  std::vector<ExpSum> entries;

  std::size_t m() const { return entries.size(); }
  WronskianSpec with(const ExpSum& g) const {
    WronskianSpec s = *this;
    s.entries.push_back(g);
    return s;
  }
};

struct DetEval {
  double value;
  double scale;  // largest single Leibniz term, never below tiny
};

namespace detail {

/// rows[i][j] = Delta^i f_j.
inline std::vector<std::vector<ExpSum>> wronskian_rows(const WronskianSpec& s) {
  const std::size_t m = s.m();
  std::vector<std::vector<ExpSum>> rows(m, std::vector<ExpSum>(m));
  for (std::size_t j = 0; j < m; ++j) {
    ExpSum f = s.entries[j];
    for (std::size_t i = 0; i < m; ++i) {
      rows[i][j] = f;
      if (i + 1 < m) f = delta(f);
    }
  }
  return rows;
}

inline DetEval det_eval(const Matrix& a) {
  return {determinant(a), std::max(max_leibniz_term(a), 1e-300)};
}

}  // namespace detail

inline Matrix wronskian_matrix(const WronskianSpec& s, double n, const Times& t) {
  const auto rows = detail::wronskian_rows(s);
  Matrix a(s.m());
  for (std::size_t i = 0; i < s.m(); ++i)
    for (std::size_t j = 0; j < s.m(); ++j) a(i, j) = rows[i][j](n, t);
  return a;
}

inline DetEval wronskian_eval(const WronskianSpec& s, double n, const Times& t) {
  return detail::det_eval(wronskian_matrix(s, n, t));
}

inline double wronskian_value(const WronskianSpec& s, double n, const Times& t) {
  return wronskian_eval(s, n, t).value;
}

inline bool is_zero_wronskian(const DetEval& e) { return std::abs(e.value) <= kWronskianZero * e.scale; }

/// Exact determinant of a square ExpSum matrix by Leibniz expansion (size <= 4).
inline ExpSum determinant_fn(const std::vector<std::vector<ExpSum>>& a) {
  const std::size_t m = a.size();
  if (m > 4) throw SizeError("symbolic determinants support at most 4x4");
  if (m == 0) return ExpSum::constant(1.0);
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<ExpAtom> terms;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (perm[i] > perm[j]) ++inversions;
    ExpSum p = ExpSum::constant(inversions % 2 == 0 ? 1.0 : -1.0);
    for (std::size_t i = 0; i < m && !p.is_zero(); ++i) p *= a[i][perm[i]];
    terms.insert(terms.end(), p.atoms().begin(), p.atoms().end());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return ExpSum::from_atoms_cancelling(std::move(terms), kCancelRel);
}

/// Exact ExpSum of the Wronskian (m <= 4).
inline ExpSum wronskian_fn(const WronskianSpec& s) {
  if (s.m() > 4) throw SizeError("wronskian_fn supports at most 4 entries");
  return determinant_fn(detail::wronskian_rows(s));
}

/// W_{m+1}(entries, g) / W_m(entries), for m <= 3.
inline RationalFn nested_quotient(const WronskianSpec& s, const ExpSum& g) {
  if (s.m() > 3) throw SizeError("nested_quotient supports at most 3 entries");
  const ExpSum den = wronskian_fn(s);
  if (den.is_zero()) throw DegenerateError("nested_quotient: W_m vanishes identically");
  return RationalFn(wronskian_fn(s.with(g)), den);
}

/// All subsets of {0..m-1} of the given size, in lexicographic order.
inline std::vector<std::vector<std::size_t>> index_subsets(std::size_t m, std::size_t size) {
  std::vector<std::vector<std::size_t>> out;
  if (size > m) return out;
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    std::size_t i = size;
    while (i > 0 && idx[i - 1] == m - size + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

/// W_{m+M+1}(f_1..f_m, Delta^k f_{i_1}, ..., Delta^k f_{i_{M+1}}) at one point.
inline DetEval criterion_flat_eval(const std::vector<ExpSum>& fs, int k, const std::vector<std::size_t>& subset,
                                   double n, const Times& t) {
  WronskianSpec s{fs};
  for (auto i : subset) s.entries.push_back(delta_pow(fs.at(i), k));
  return wronskian_eval(s, n, t);
}

/// W_{M+1}(g_{i_1}, ..., g_{i_{M+1}}) * W_m(f) with g_i = W_{m+1}(f; Delta^k f_i) / W_m(f),
/// the nested form of the same quantity. Differences of the quotients are
/// taken numerically from shifted evaluations.
inline DetEval criterion_nested_eval(const std::vector<ExpSum>& fs, int k, const std::vector<std::size_t>& subset,
                                     double n, const Times& t) {
  const WronskianSpec base{fs};
  const std::size_t size = subset.size();
  std::vector<WronskianSpec> gspec;
  for (auto i : subset) gspec.push_back(base.with(delta_pow(fs.at(i), k)));
  // samples[j][s] = g_j(n + s)
  std::vector<std::vector<double>> samples(size, std::vector<double>(size));
  for (std::size_t s = 0; s < size; ++s) {
    const double nn = n + static_cast<double>(s);
    const auto wm = wronskian_eval(base, nn, t);
    if (is_zero_wronskian(wm)) throw PoleError("criterion_nested: W_m vanishes at n = " + std::to_string(nn));
    for (std::size_t j = 0; j < size; ++j) samples[j][s] = wronskian_value(gspec[j], nn, t) / wm.value;
  }
  Matrix a(size);
  for (std::size_t r = 0; r < size; ++r)
    for (std::size_t j = 0; j < size; ++j) {
      double d = 0.0;
      for (std::size_t s = 0; s <= r; ++s)
        d += binomial(static_cast<int>(r), static_cast<int>(s)) * (((r - s) % 2 == 0) ? 1.0 : -1.0) * samples[j][s];
      a(r, j) = d;
    }
  const double wm = wronskian_value(base, n, t);
  auto e = detail::det_eval(a);
  return {e.value * wm, e.scale * std::abs(wm)};
}

namespace detail {

template <class Eval>
double criterion_sweep(const std::vector<ExpSum>& fs, int k, int big_m, const Grid& grid, Eval&& eval) {
  if (big_m < 0 || fs.size() < static_cast<std::size_t>(big_m + 1))
    throw DomainError("criterion needs m >= M + 1");
  if (k < 1) throw DomainError("criterion needs k >= 1");
  double worst = 0.0;
  for (const auto& subset : index_subsets(fs.size(), static_cast<std::size_t>(big_m + 1)))
    grid.for_each([&](int n, const Times& t) {
      const DetEval e = eval(fs, k, subset, n, t);
      worst = std::max(worst, std::abs(e.value) / e.scale);
    });
  return worst;
}

}  // namespace detail

/// Largest scale-relative |W_{m+M+1}| over index subsets and grid points; at
/// most kWronskianZero certifies the reduction condition.
inline double criterion_flat(const std::vector<ExpSum>& fs, int k, int big_m, const Grid& grid = criterion_grid()) {
  return detail::criterion_sweep(fs, k, big_m, grid, criterion_flat_eval);
}

inline double criterion_nested(const std::vector<ExpSum>& fs, int k, int big_m, const Grid& grid = criterion_grid()) {
  return detail::criterion_sweep(fs, k, big_m, grid, criterion_nested_eval);
}

}  // namespace cdkp

#endif  // CDKP_WRONSKIAN_HPP
