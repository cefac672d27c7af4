#ifndef CDKP_GAUGE_HPP
#define CDKP_GAUGE_HPP

// Determinant gauge transformation T_m generated by q_1..q_m:
//
//   T_m(f) = W_{m+1}(q_1, ..., q_m, f) / W_m(q_1, ..., q_m),
//   T_m^{-1} = sum_i q_i o Delta^{-1} o b_i,
//   b_i = (-1)^{m+i} Lambda(W_{m-1}(q without q_i) / W_m(q)).

#include <cstddef>
#include <utility>
#include <vector>

#include "cdkp/error.hpp"
#include "cdkp/expsum.hpp"
#include "cdkp/grid.hpp"
#include "cdkp/pdo.hpp"
#include "cdkp/wronskian.hpp"

namespace cdkp {

class GaugeChannel {
 public:
  /// Rejects channels whose Wronskian vanishes on the whole criterion grid.
  explicit GaugeChannel(std::vector<ExpSum> generators) : spec_{std::move(generators)} {
    if (spec_.m() == 0) throw DomainError("gauge channel needs at least one generator");
    if (spec_.m() > 3) throw SizeError("gauge channels support at most 3 generators");
    w_ = wronskian_fn(spec_);
    bool nonzero = false;
    if (!w_.is_zero()) {
      criterion_grid().for_each([&](int n, const Times& t) {
        if (!is_zero_wronskian(wronskian_eval(spec_, n, t))) nonzero = true;
      });
    }
    if (!nonzero) throw DegenerateError("gauge channel: W_m of the generators vanishes");
  }

  std::size_t m() const { return spec_.m(); }
  const std::vector<ExpSum>& generators() const { return spec_.entries; }
  const WronskianSpec& spec() const { return spec_; }
  /// W_m of the generators (the transformed tau function).
  const ExpSum& wronskian() const { return w_; }

 private:
  WronskianSpec spec_;
  ExpSum w_;
};

inline RationalFn transform_eigen(const GaugeChannel& ch, const ExpSum& f) {
  return RationalFn(wronskian_fn(ch.spec().with(f)), ch.wronskian());
}

/// b_i with i counted from 1.
inline RationalFn transform_adjoint(const GaugeChannel& ch, std::size_t i) {
  const std::size_t m = ch.m();
  if (i < 1 || i > m) throw DomainError("transform_adjoint: channel index out of range");
  WronskianSpec minor;
  for (std::size_t j = 0; j < m; ++j)
    if (j + 1 != i) minor.entries.push_back(ch.generators()[j]);
  const double sign = ((m + i) % 2 == 0) ? 1.0 : -1.0;
  return shift(RationalFn(sign * wronskian_fn(minor), ch.wronskian()), 1);
}

/// One elementary step T(q)(h) = Delta h - (Delta q / q) h = (q Lambda h - h Lambda q) / q.
inline RationalFn elementary_step(const RationalFn& q, const RationalFn& h) {
  if (q.is_zero()) throw DegenerateError("gauge chain: generator annihilated by an earlier step");
  return (q * shift(h, 1) - h * shift(q, 1)) / q;
}

/// families[j] holds seeds followed by targets after j elementary steps; step j
/// is generated by families[j][j].
inline std::vector<std::vector<RationalFn>> chain(const std::vector<ExpSum>& seeds,
                                                  const std::vector<ExpSum>& targets = {}) {
  std::vector<std::vector<RationalFn>> families(1);
  for (const auto& s : seeds) families[0].emplace_back(s);
  for (const auto& t : targets) families[0].emplace_back(t);
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    const auto& prev = families.back();
    const RationalFn q = prev[j];
    if (q.is_zero()) throw DegenerateError("gauge chain: generator " + std::to_string(j + 1) + " became zero");
    std::vector<RationalFn> next(prev.size());
    for (std::size_t i = j + 1; i < prev.size(); ++i) next[i] = elementary_step(q, prev[i]);
    families.push_back(std::move(next));
  }
  return families;
}

/// T_m(g) through m successive elementary steps.
inline RationalFn chain_apply(const std::vector<ExpSum>& seeds, const ExpSum& g) {
  return chain(seeds, {g}).back().back();
}

/// T_m as a difference operator: coefficient of Delta^i is the cofactor of the
/// last-column entry in row i, divided by W_m.
inline PDOperator as_operator(const GaugeChannel& ch) {
  const std::size_t m = ch.m();
  std::vector<std::vector<ExpSum>> rows(m + 1, std::vector<ExpSum>(m));
  for (std::size_t j = 0; j < m; ++j) {
    ExpSum f = ch.generators()[j];
    for (std::size_t i = 0; i <= m; ++i) {
      rows[i][j] = f;
      f = delta(f);
    }
  }
  PDOperator t;
  for (std::size_t i = 0; i <= m; ++i) {
    std::vector<std::vector<ExpSum>> minor;
    for (std::size_t r = 0; r <= m; ++r)
      if (r != i) minor.push_back(rows[r]);
    const double sign = ((i + m) % 2 == 0) ? 1.0 : -1.0;
    const ExpSum c = determinant_fn(minor);
    if (!c.is_zero()) t.set(static_cast<int>(i), RationalFn(sign * c, ch.wronskian()));
  }
  return t;
}

/// T_m^{-1} = sum_i q_i o Delta^{-1} o b_i, truncated at depth.
inline PDOperator inverse_operator(const GaugeChannel& ch, int depth = kDefaultDepth) {
  PDOperator inv;
  for (std::size_t i = 0; i < ch.m(); ++i)
    inv = inv + integral_term(RationalFn(ch.generators()[i]), transform_adjoint(ch, i + 1), depth);
  return inv;
}

}  // namespace cdkp

#endif  // CDKP_GAUGE_HPP
