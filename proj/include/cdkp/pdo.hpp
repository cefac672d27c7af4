#ifndef CDKP_PDO_HPP
#define CDKP_PDO_HPP

// Truncated pseudo-difference operators sum_j c_j D^j, coefficients standing
// left of D^j.
//
// D is Delta in the Forward basis and Delta* = Lambda^{-1} - I in the Adjoint
// basis. Both obey the same discrete Leibniz rule
//
//   D^s o b = sum_{l >= 0} C(s, l) Lambda^{sigma (s - l)}(D^l b) D^{s - l}
//
// with sigma = +1 (Forward) or -1 (Adjoint), for every integer s. The adjoint
// of a Forward operator is naturally a series in Delta*, which is not a
// convergent series in Delta^{-1}, so adjoint() switches basis instead of
// re-expanding.

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "cdkp/error.hpp"
#include "cdkp/expsum.hpp"
#include "cdkp/linalg.hpp"

namespace cdkp {

inline constexpr int kDefaultDepth = 8;

enum class Basis { Forward, Adjoint };

inline Basis opposite(Basis b) { return b == Basis::Forward ? Basis::Adjoint : Basis::Forward; }
inline int shift_sign(Basis b) { return b == Basis::Forward ? 1 : -1; }

inline RationalFn basis_diff(const RationalFn& f, Basis b) {
  return b == Basis::Forward ? delta(f) : delta_star(f);
}

class PDOperator {
 public:
  /// valid_from() value of an operator with no truncation loss.
  static constexpr int kExact = INT_MIN;

  PDOperator() = default;
  explicit PDOperator(Basis b) : basis_(b) {}

  static PDOperator monomial(const RationalFn& f, int order, Basis b = Basis::Forward) {
    PDOperator p(b);
    p.set(order, f);
    return p;
  }
  static PDOperator identity(Basis b = Basis::Forward) { return monomial(RationalFn::constant(1.0), 0, b); }
  static PDOperator multiplication(const RationalFn& f, Basis b = Basis::Forward) { return monomial(f, 0, b); }
  static PDOperator power(int order, Basis b = Basis::Forward) { return monomial(RationalFn::constant(1.0), order, b); }

  Basis basis() const { return basis_; }
  const std::map<int, RationalFn>& coeffs() const { return c_; }

  RationalFn coeff(int order) const {
    auto it = c_.find(order);
    return it == c_.end() ? RationalFn{} : it->second;
  }

  void set(int order, RationalFn f) {
    if (f.is_zero())
      c_.erase(order);
    else
      c_[order] = std::move(f);
  }

  void add_to(int order, const RationalFn& f) {
    if (f.is_zero()) return;
    auto it = c_.find(order);
    if (it == c_.end()) {
      c_.emplace(order, f);
    } else {
      it->second += f;
      if (it->second.is_zero()) c_.erase(it);
    }
  }

  bool is_zero() const { return c_.empty(); }
  std::optional<int> top() const { return c_.empty() ? std::nullopt : std::optional<int>(c_.rbegin()->first); }
  std::optional<int> bottom() const { return c_.empty() ? std::nullopt : std::optional<int>(c_.begin()->first); }

  /// Coefficients at orders >= valid_from() are exact; lower ones were lost.
  int valid_from() const { return valid_; }
  bool exact() const { return valid_ == kExact; }
  /// True when truncation discarded a nonzero contribution.
  bool truncated() const { return truncated_; }

  void limit_validity(int order, bool lost) {
    if (order > valid_) valid_ = order;
    truncated_ = truncated_ || lost;
    std::erase_if(c_, [&](const auto& kv) { return kv.first < valid_; });
  }

  PDOperator operator-() const {
    PDOperator r = *this;
    for (auto& [j, f] : r.c_) f = -f;
    return r;
  }

  friend PDOperator operator+(const PDOperator& a, const PDOperator& b) {
    check_same_basis(a, b);
    PDOperator r = a;
    for (const auto& [j, f] : b.c_) r.add_to(j, f);
    r.limit_validity(b.valid_, b.truncated_);
    return r;
  }
  friend PDOperator operator-(const PDOperator& a, const PDOperator& b) { return a + (-b); }

  friend PDOperator operator*(double s, const PDOperator& a) {
    PDOperator r = a;
    for (auto& [j, f] : r.c_) f = s * f;
    std::erase_if(r.c_, [](const auto& kv) { return kv.second.is_zero(); });
    return r;
  }

  static void check_same_basis(const PDOperator& a, const PDOperator& b) {
    if (a.basis_ != b.basis_) throw DomainError("pseudo-difference operators in different bases");
  }

 private:
  Basis basis_ = Basis::Forward;
  std::map<int, RationalFn> c_;
  int valid_ = kExact;
  bool truncated_ = false;
};

namespace detail {

inline int validity_bound(const PDOperator& a, const PDOperator& b) {
  int v = PDOperator::kExact;
  if (!a.exact() && b.top()) v = std::max(v, a.valid_from() + *b.top());
  if (!b.exact() && a.top()) v = std::max(v, b.valid_from() + *a.top());
  return v;
}

}  // namespace detail

/// A o B, keeping orders >= -depth.
inline PDOperator compose(const PDOperator& a, const PDOperator& b, int depth = kDefaultDepth) {
  if (depth < 0) throw DomainError("compose: negative depth");
  PDOperator::check_same_basis(a, b);
  const Basis basis = a.basis();
  const int sigma = shift_sign(basis);
  const int floor = std::max(-depth, detail::validity_bound(a, b));
  PDOperator r(basis);
  bool lost = false;

  // Lambda^s D^l b is reused across all A-orders; cache per (B-order, l, s).
  std::map<int, std::vector<RationalFn>> diffs;
  auto diff_of = [&](int j, const RationalFn& bj, int l) -> const RationalFn& {
    auto& v = diffs[j];
    if (v.empty()) v.push_back(bj);
    while (static_cast<int>(v.size()) <= l) v.push_back(basis_diff(v.back(), basis));
    return v[static_cast<std::size_t>(l)];
  };

  for (const auto& [i, ai] : a.coeffs()) {
    for (const auto& [j, bj] : b.coeffs()) {
      for (int l = 0;; ++l) {
        if (i >= 0 && l > i) break;
        const RationalFn& dl = diff_of(j, bj, l);
        if (dl.is_zero()) break;
        const int order = i - l + j;
        if (order < floor) {
          lost = true;
          break;
        }
        const double cf = binomial(i, l);
        r.add_to(order, cf * (ai * shift(dl, sigma * (i - l))));
      }
    }
  }
  const bool bounded = floor > -depth || lost;
  if (bounded || !a.exact() || !b.exact()) r.limit_validity(floor, lost || a.truncated() || b.truncated());
  return r;
}

/// Formal adjoint: (sum a_j D^j)* = sum (D*)^j o a_j, expressed in the other basis.
inline PDOperator adjoint(const PDOperator& a, int depth = kDefaultDepth) {
  const Basis ob = opposite(a.basis());
  PDOperator r(ob);
  for (const auto& [j, f] : a.coeffs())
    r = r + compose(PDOperator::power(j, ob), PDOperator::multiplication(f, ob), depth);
  if (!a.exact()) r.limit_validity(a.valid_from(), a.truncated());
  return r;
}

inline PDOperator project_plus(const PDOperator& a) {
  PDOperator r(a.basis());
  for (const auto& [j, f] : a.coeffs())
    if (j >= 0) r.set(j, f);
  if (!a.exact() && a.valid_from() > 0) r.limit_validity(a.valid_from(), a.truncated());
  return r;
}

inline PDOperator project_minus(const PDOperator& a) {
  PDOperator r(a.basis());
  for (const auto& [j, f] : a.coeffs())
    if (j < 0) r.set(j, f);
  if (!a.exact()) r.limit_validity(a.valid_from(), a.truncated());
  return r;
}

inline PDOperator operator_power(const PDOperator& a, int e, int depth = kDefaultDepth) {
  PDOperator r = PDOperator::identity(a.basis());
  for (int i = 0; i < e; ++i) r = compose(r, a, depth);
  return r;
}

/// Sum c_j D^j(f). Negative orders need f to be a single exponential atom,
/// on which D^{-1} is division by its eigenvalue.
inline RationalFn apply(const PDOperator& a, const RationalFn& f) {
  RationalFn out;
  const Basis b = a.basis();
  for (const auto& [j, c] : a.coeffs()) {
    if (j >= 0) {
      RationalFn g = f;
      for (int s = 0; s < j; ++s) g = basis_diff(g, b);
      out += c * g;
      continue;
    }
    if (!f.is_polynomial() || f.numerator().size() != 1)
      throw DomainError("apply: negative orders act only on single exponential atoms");
    const ExpAtom& atom = f.numerator().atoms().front();
    const double eig = b == Basis::Forward ? atom.growth() - 1.0 : 1.0 / atom.growth() - 1.0;
    if (eig == 0.0) throw DomainError("apply: inverse difference of an atom with eigenvalue 0");
    out += c * (std::pow(eig, j) * f);
  }
  return out;
}

inline PDOperator time_derivative(const PDOperator& a, int i) {
  PDOperator r(a.basis());
  for (const auto& [j, f] : a.coeffs()) r.set(j, ddt(f, i));
  if (!a.exact()) r.limit_validity(a.valid_from(), a.truncated());
  return r;
}

/// q o D^{-1} o r in the Forward basis.
inline PDOperator integral_term(const RationalFn& q, const RationalFn& r, int depth = kDefaultDepth) {
  return compose(PDOperator::multiplication(q),
                 compose(PDOperator::power(-1), PDOperator::multiplication(r), depth), depth);
}

/// plus_part + sum_i q_i D^{-1} r_i.
struct ConstrainedLax {
  PDOperator plus_part = PDOperator::power(1);
  std::vector<std::pair<RationalFn, RationalFn>> pairs;

  PDOperator to_operator(int depth = kDefaultDepth) const {
    PDOperator l = plus_part;
    for (const auto& [q, r] : pairs) l = l + integral_term(q, r, depth);
    return l;
  }
};

/// Both sides of the l-th flow equations; callers evaluate them on a grid.
struct LaxResiduals {
  std::map<int, std::pair<RationalFn, RationalFn>> lax;  // order -> (dL/dt_l, [B_l, L])
  std::vector<std::pair<RationalFn, RationalFn>> q_flow;  // (q_{t_l}, B_l q)
  std::vector<std::pair<RationalFn, RationalFn>> r_flow;  // (r_{t_l}, -B_l* r)
  int valid_from = PDOperator::kExact;
  bool truncated = false;
};

/// Flow l of the constrained hierarchy with B_l = (L^l)_+. The plus part is
/// exact only when the depth covers the pseudo part of L^l.
inline LaxResiduals lax_pair_residuals(const ConstrainedLax& lc, int l, int depth = kDefaultDepth) {
  check_time_index(l);
  const PDOperator lop = lc.to_operator(depth);
  const PDOperator bl = project_plus(operator_power(lop, l, depth));
  const PDOperator comm = compose(bl, lop, depth) - compose(lop, bl, depth);
  const PDOperator lt = time_derivative(lop, l);

  LaxResiduals res;
  res.valid_from = std::max(comm.valid_from(), lt.valid_from());
  res.truncated = comm.truncated();
  std::vector<int> orders;
  for (const auto& [j, f] : comm.coeffs()) orders.push_back(j);
  for (const auto& [j, f] : lt.coeffs()) orders.push_back(j);
  for (int j : orders)
    if (j >= res.valid_from) res.lax[j] = {lt.coeff(j), comm.coeff(j)};

  const PDOperator bstar = adjoint(bl, depth);
  for (const auto& [q, r] : lc.pairs) {
    res.q_flow.emplace_back(ddt(q, l), apply(bl, q));
    res.r_flow.emplace_back(ddt(r, l), -apply(bstar, r));
  }
  return res;
}

}  // namespace cdkp

#endif  // CDKP_PDO_HPP
