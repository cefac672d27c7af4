#ifndef CDKP_EXPSUM_HPP
#define CDKP_EXPSUM_HPP

// Exact algebra of exponential grid functions
//
//   f(n, t) = sum_k c_k g_k^n exp(a_k . t)
//
// on which the shift Lambda, the differences Delta = Lambda - I and
// Delta* = Lambda^{-1} - I, and the time derivatives act diagonally.
//
// An atom is a coefficient times a Laurent monomial in "modes"; a mode is a
// pair (growth, rates) such as (1+z, (z, z^2, z^3)) for Exp(n; t, z). Products
// of atoms are formed on the monomial, so (e1*e2)*e3 and e1*(e2*e3) are the
// same key and merge exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdkp/error.hpp"

namespace cdkp {

inline constexpr std::size_t kMaxTimes = 6;
inline constexpr std::size_t kDefaultTimes = 3;

/// Values of (t_1, ..., t_kMaxTimes); unused times stay at 0.
using Times = std::array<double, kMaxTimes>;

inline Times make_times(double x, double y = 0.0, double t3 = 0.0) {
  Times t{};
  t[0] = x;
  t[1] = y;
  t[2] = t3;
  return t;
}

/// Scale-relative threshold below which a denominator counts as a pole.
inline constexpr double kPoleThreshold = 1e-12;

struct Mode {
  double growth = 1.0;
  Times rates{};

  bool is_unit() const {
    return growth == 1.0 && std::all_of(rates.begin(), rates.end(), [](double a) { return a == 0.0; });
  }

  friend bool operator==(const Mode&, const Mode&) = default;
  friend bool operator<(const Mode& a, const Mode& b) {
    if (a.growth != b.growth) return a.growth < b.growth;
    return a.rates < b.rates;
  }
};

/// Laurent monomial prod_i mode_i^{p_i}; powers are nonzero and modes sorted.
class Monomial {
 public:
  using Power = std::pair<Mode, int>;

  Monomial() = default;
  explicit Monomial(const Mode& m) {
    if (!m.is_unit()) powers_.emplace_back(m, 1);
    refresh();
  }

  const std::vector<Power>& powers() const { return powers_; }
  bool is_one() const { return powers_.empty(); }
  double growth() const { return growth_; }
  const Times& rates() const { return rates_; }

  int power_of(const Mode& m) const {
    for (const auto& [mode, p] : powers_)
      if (mode == m) return p;
    return 0;
  }

  Monomial pow(int e) const {
    Monomial r;
    if (e == 0) return r;
    r.powers_ = powers_;
    for (auto& pw : r.powers_) pw.second *= e;
    r.refresh();
    return r;
  }

  Monomial inverse() const { return pow(-1); }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.powers_.reserve(a.powers_.size() + b.powers_.size());
    auto i = a.powers_.begin();
    auto j = b.powers_.begin();
    while (i != a.powers_.end() || j != b.powers_.end()) {
      if (j == b.powers_.end() || (i != a.powers_.end() && i->first < j->first)) {
        r.powers_.push_back(*i++);
      } else if (i == a.powers_.end() || j->first < i->first) {
        r.powers_.push_back(*j++);
      } else {
        const int p = i->second + j->second;
        if (p != 0) r.powers_.emplace_back(i->first, p);
        ++i;
        ++j;
      }
    }
    r.refresh();
    return r;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.powers_ == b.powers_; }
  friend bool operator<(const Monomial& a, const Monomial& b) {
    return std::lexicographical_compare(
        a.powers_.begin(), a.powers_.end(), b.powers_.begin(), b.powers_.end(),
        [](const Power& x, const Power& y) {
          if (x.first < y.first) return true;
          if (y.first < x.first) return false;
          return x.second < y.second;
        });
  }

 private:
  void refresh() {
    growth_ = 1.0;
    rates_ = Times{};
    for (const auto& [m, p] : powers_) {
      growth_ *= std::pow(m.growth, p);
      for (std::size_t i = 0; i < kMaxTimes; ++i) rates_[i] += p * m.rates[i];
    }
  }

  std::vector<Power> powers_;
  double growth_ = 1.0;
  Times rates_{};
};

inline double growth_power(double growth, double n) {
  if (std::floor(n) != n && growth <= 0.0)
    throw DomainError("non-integer n requires positive growth, got growth " + std::to_string(growth));
  return std::pow(growth, n);
}

class ExpAtom {
 public:
  ExpAtom(double coeff, Monomial key) : coeff_(coeff), key_(std::move(key)) {}

  /// General atom coeff * growth^n * exp(sum_i exps_i t_i).
  static ExpAtom make(double coeff, double growth, std::span<const double> exps) {
    if (growth == 0.0) throw DomainError("atom growth must be nonzero");
    if (exps.size() > kMaxTimes) throw DomainError("too many times for an atom");
    Mode m;
    m.growth = growth;
    std::copy(exps.begin(), exps.end(), m.rates.begin());
    return ExpAtom(coeff, Monomial(m));
  }

  static ExpAtom constant(double c) { return ExpAtom(c, Monomial{}); }

  double coeff() const { return coeff_; }
  const Monomial& key() const { return key_; }
  double growth() const { return key_.growth(); }
  const Times& rates() const { return key_.rates(); }

  std::vector<double> exps(std::size_t times = kDefaultTimes) const {
    return {key_.rates().begin(), key_.rates().begin() + static_cast<std::ptrdiff_t>(std::min(times, kMaxTimes))};
  }

  double exponent(const Times& t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < kMaxTimes; ++i) s += key_.rates()[i] * t[i];
    return s;
  }

  double value(double n, const Times& t) const {
    return coeff_ * growth_power(key_.growth(), n) * std::exp(exponent(t));
  }

  ExpAtom scaled(double s) const { return ExpAtom(coeff_ * s, key_); }

  friend ExpAtom operator*(const ExpAtom& a, const ExpAtom& b) {
    return ExpAtom(a.coeff_ * b.coeff_, a.key_ * b.key_);
  }

 private:
  double coeff_;
  Monomial key_;
};

/// The exponential function (1+z)^n exp(c + sum_{i<=T} z^i t_i).
inline ExpAtom make_exp(double z, double c = 0.0, std::size_t times = kDefaultTimes) {
  if (1.0 + z == 0.0) throw DegenerateError("make_exp: z = -1 gives zero growth");
  if (times < 1 || times > kMaxTimes) throw DomainError("make_exp: times must be in [1, kMaxTimes]");
  Mode m;
  m.growth = 1.0 + z;
  double zp = 1.0;
  for (std::size_t i = 0; i < times; ++i) {
    zp *= z;
    m.rates[i] = zp;
  }
  return ExpAtom(std::exp(c), Monomial(m));
}

class ExpSum {
 public:
  struct Eval {
    double value;
    double scale;  // largest |atom value|
  };

  ExpSum() = default;
  ExpSum(const ExpAtom& a) {  // NOLINT(google-explicit-constructor)
    if (a.coeff() != 0.0) atoms_.push_back(a);
  }

  static ExpSum constant(double c) { return ExpSum(ExpAtom::constant(c)); }

  /// Canonical form: sorted by key, equal keys merged, exact zeros dropped.
  static ExpSum from_atoms(std::vector<ExpAtom> atoms) {
    ExpSum r;
    std::sort(atoms.begin(), atoms.end(), [](const ExpAtom& a, const ExpAtom& b) { return a.key() < b.key(); });
    for (auto& a : atoms) {
      if (!r.atoms_.empty() && r.atoms_.back().key() == a.key()) {
        r.atoms_.back() = ExpAtom(r.atoms_.back().coeff() + a.coeff(), a.key());
      } else {
        r.atoms_.push_back(std::move(a));
      }
    }
    std::erase_if(r.atoms_, [](const ExpAtom& a) { return a.coeff() == 0.0; });
    return r;
  }

  /// As from_atoms, but merged coefficients with |sum| <= rel * sum|parts| are
  /// treated as cancelled.
  static ExpSum from_atoms_cancelling(std::vector<ExpAtom> atoms, double rel) {
    std::sort(atoms.begin(), atoms.end(), [](const ExpAtom& a, const ExpAtom& b) { return a.key() < b.key(); });
    ExpSum r;
    std::size_t i = 0;
    while (i < atoms.size()) {
      double sum = 0.0;
      double mag = 0.0;
      std::size_t j = i;
      for (; j < atoms.size() && atoms[j].key() == atoms[i].key(); ++j) {
        sum += atoms[j].coeff();
        mag += std::abs(atoms[j].coeff());
      }
      if (std::abs(sum) > rel * mag) r.atoms_.emplace_back(sum, atoms[i].key());
      i = j;
    }
    return r;
  }

  const std::vector<ExpAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool is_zero() const { return atoms_.empty(); }

  Eval evaluate(double n, const Times& t) const {
    Eval e{0.0, 0.0};
    for (const auto& a : atoms_) {
      const double v = a.value(n, t);
      e.value += v;
      e.scale = std::max(e.scale, std::abs(v));
    }
    return e;
  }

  double operator()(double n, const Times& t) const { return evaluate(n, t).value; }

  ExpSum operator-() const {
    ExpSum r = *this;
    for (auto& a : r.atoms_) a = a.scaled(-1.0);
    return r;
  }

  friend ExpSum operator+(const ExpSum& a, const ExpSum& b) {
    ExpSum r;
    r.atoms_.reserve(a.size() + b.size());
    auto i = a.atoms_.begin();
    auto j = b.atoms_.begin();
    while (i != a.atoms_.end() || j != b.atoms_.end()) {
      if (j == b.atoms_.end() || (i != a.atoms_.end() && i->key() < j->key())) {
        r.atoms_.push_back(*i++);
      } else if (i == a.atoms_.end() || j->key() < i->key()) {
        r.atoms_.push_back(*j++);
      } else {
        const double c = i->coeff() + j->coeff();
        if (c != 0.0) r.atoms_.emplace_back(c, i->key());
        ++i;
        ++j;
      }
    }
    return r;
  }

  friend ExpSum operator-(const ExpSum& a, const ExpSum& b) { return a + (-b); }

  friend ExpSum operator*(const ExpSum& a, const ExpSum& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<ExpAtom> prod;
    prod.reserve(a.size() * b.size());
    for (const auto& x : a.atoms_)
      for (const auto& y : b.atoms_) prod.push_back(x * y);
    return from_atoms(std::move(prod));
  }

  friend ExpSum operator*(double s, const ExpSum& a) {
    if (s == 0.0) return {};
    ExpSum r = a;
    for (auto& x : r.atoms_) x = x.scaled(s);
    return r;
  }
  friend ExpSum operator*(const ExpSum& a, double s) { return s * a; }

  ExpSum& operator+=(const ExpSum& b) { return *this = *this + b; }
  ExpSum& operator-=(const ExpSum& b) { return *this = *this - b; }
  ExpSum& operator*=(const ExpSum& b) { return *this = *this * b; }

  /// Exact representation equality (keys and coefficients).
  friend bool operator==(const ExpSum& a, const ExpSum& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!(a.atoms_[i].key() == b.atoms_[i].key()) || a.atoms_[i].coeff() != b.atoms_[i].coeff()) return false;
    return true;
  }

 private:
  std::vector<ExpAtom> atoms_;
};

/// Lambda^s: every atom picks up growth^s.
inline ExpSum shift(const ExpSum& f, int s) {
  if (s == 0) return f;
  std::vector<ExpAtom> out;
  out.reserve(f.size());
  for (const auto& a : f.atoms()) out.push_back(a.scaled(std::pow(a.growth(), s)));
  return ExpSum::from_atoms(std::move(out));
}

inline ExpSum delta(const ExpSum& f) { return shift(f, 1) - f; }
inline ExpSum delta_star(const ExpSum& f) { return shift(f, -1) - f; }

inline ExpSum delta_pow(ExpSum f, int k) {
  for (int i = 0; i < k; ++i) f = delta(f);
  return f;
}

inline ExpSum delta_star_pow(ExpSum f, int k) {
  for (int i = 0; i < k; ++i) f = delta_star(f);
  return f;
}

inline void check_time_index(int i) {
  if (i < 1 || i > static_cast<int>(kMaxTimes)) throw DomainError("time index out of range: " + std::to_string(i));
}

/// d/dt_i, with i counted from 1.
inline ExpSum ddt(const ExpSum& f, int i) {
  check_time_index(i);
  std::vector<ExpAtom> out;
  out.reserve(f.size());
  for (const auto& a : f.atoms()) out.push_back(a.scaled(a.rates()[static_cast<std::size_t>(i - 1)]));
  return ExpSum::from_atoms(std::move(out));
}

/// gcd monomial: per mode, the smallest power across atoms (absent = 0).
inline Monomial monomial_content(const ExpSum& f) {
  std::map<Mode, int> low;
  for (const auto& a : f.atoms())
    for (const auto& [m, p] : a.key().powers()) low.emplace(m, 0);
  for (auto& [m, p] : low) {
    int mn = f.atoms().front().key().power_of(m);
    for (const auto& a : f.atoms()) mn = std::min(mn, a.key().power_of(m));
    p = mn;
  }
  Monomial g;
  for (const auto& [m, p] : low)
    if (p != 0) g = g * Monomial(m).pow(p);
  return g;
}

inline bool nearly_same(const ExpSum& a, const ExpSum& b, double rel) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.atoms()[i];
    const auto& y = b.atoms()[i];
    if (!(x.key() == y.key())) return false;
    if (std::abs(x.coeff() - y.coeff()) > rel * std::max(std::abs(x.coeff()), std::abs(y.coeff()))) return false;
  }
  return true;
}

inline ExpSum power(const ExpSum& f, int p) {
  ExpSum r = ExpSum::constant(1.0);
  for (int i = 0; i < p; ++i) r *= f;
  return r;
}

/// Quotient num / prod_j F_j^{p_j}. Each F_j is a primitive multi-atom ExpSum
/// whose first atom has coefficient 1; monomial content and scalars live in num.
class RationalFn {
 public:
  struct Factor {
    ExpSum poly;
    int power;
  };

  RationalFn() = default;
  RationalFn(ExpSum num) : num_(std::move(num)) {}  // NOLINT(google-explicit-constructor)
  RationalFn(const ExpAtom& a) : num_(a) {}         // NOLINT(google-explicit-constructor)
  RationalFn(ExpSum num, const ExpSum& den) : num_(std::move(num)) {
    if (den.is_zero()) throw DomainError("RationalFn: zero denominator");
    divide_by(den, 1);
  }

  static RationalFn constant(double c) { return RationalFn(ExpSum::constant(c)); }

  const ExpSum& numerator() const { return num_; }
  const std::vector<Factor>& factors() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.empty(); }

  ExpSum denominator() const {
    ExpSum d = ExpSum::constant(1.0);
    for (const auto& f : den_) d *= power(f.poly, f.power);
    return d;
  }

  /// Number of atoms in numerator plus factors; a size measure for tests and limits.
  std::size_t complexity() const {
    std::size_t c = num_.size();
    for (const auto& f : den_) c += f.poly.size();
    return c;
  }

  /// Value together with its cancellation-free magnitude (largest numerator
  /// atom over |denominator|).
  ExpSum::Eval evaluate(double n, const Times& t) const {
    ExpSum::Eval v = num_.evaluate(n, t);
    for (const auto& f : den_) {
      const auto e = f.poly.evaluate(n, t);
      if (std::abs(e.value) < kPoleThreshold * e.scale || e.value == 0.0)
        throw PoleError("denominator vanishes at n = " + std::to_string(n));
      const double d = std::pow(e.value, f.power);
      v.value /= d;
      v.scale /= std::abs(d);
    }
    return v;
  }

  double operator()(double n, const Times& t) const { return evaluate(n, t).value; }

  RationalFn operator-() const {
    RationalFn r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend RationalFn operator*(const RationalFn& a, const RationalFn& b) {
    RationalFn r;
    r.num_ = a.num_ * b.num_;
    if (r.num_.is_zero()) return r;
    r.den_ = a.den_;
    for (const auto& f : b.den_) r.merge_factor(f.poly, f.power);
    return r;
  }

  friend RationalFn operator*(double s, const RationalFn& a) {
    RationalFn r = a;
    r.num_ = s * r.num_;
    if (r.num_.is_zero()) r.den_.clear();
    return r;
  }
  friend RationalFn operator*(const RationalFn& a, double s) { return s * a; }

  friend RationalFn operator+(const RationalFn& a, const RationalFn& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    // least common multiple of the two factor lists
    std::vector<Factor> lcm = a.den_;
    for (const auto& f : b.den_) {
      auto it = std::find_if(lcm.begin(), lcm.end(), [&](const Factor& g) { return same_factor(g.poly, f.poly); });
      if (it == lcm.end())
        lcm.push_back(f);
      else
        it->power = std::max(it->power, f.power);
    }
    auto cofactor = [&](const std::vector<Factor>& own) {
      ExpSum m = ExpSum::constant(1.0);
      for (const auto& f : lcm) {
        int have = 0;
        for (const auto& g : own)
          if (same_factor(g.poly, f.poly)) have = g.power;
        if (f.power > have) m *= power(f.poly, f.power - have);
      }
      return m;
    };
    RationalFn r;
    r.num_ = a.num_ * cofactor(a.den_) + b.num_ * cofactor(b.den_);
    if (!r.num_.is_zero()) r.den_ = std::move(lcm);
    return r;
  }

  friend RationalFn operator-(const RationalFn& a, const RationalFn& b) { return a + (-b); }

  RationalFn& operator+=(const RationalFn& b) { return *this = *this + b; }
  RationalFn& operator-=(const RationalFn& b) { return *this = *this - b; }
  RationalFn& operator*=(const RationalFn& b) { return *this = *this * b; }

  RationalFn reciprocal() const {
    if (is_zero()) throw DomainError("RationalFn: reciprocal of zero");
    RationalFn r(denominator());
    r.divide_by(num_, 1);
    return r;
  }

  friend RationalFn operator/(const RationalFn& a, const RationalFn& b) { return a * b.reciprocal(); }

  friend RationalFn shift(const RationalFn& f, int s) {
    if (s == 0) return f;
    RationalFn r(shift(f.num_, s));
    for (const auto& g : f.den_) r.divide_by(shift(g.poly, s), g.power);
    return r;
  }

  friend RationalFn ddt(const RationalFn& f, int i) {
    check_time_index(i);
    if (f.den_.empty()) return RationalFn(ddt(f.num_, i));
    // (N / prod F^p)' = (N' prod F - N sum_j p_j F_j' prod_{l != j} F_l) / prod F^{p+1}
    ExpSum all = ExpSum::constant(1.0);
    for (const auto& g : f.den_) all *= g.poly;
    ExpSum logd;
    for (std::size_t j = 0; j < f.den_.size(); ++j) {
      ExpSum others = ExpSum::constant(1.0);
      for (std::size_t l = 0; l < f.den_.size(); ++l)
        if (l != j) others *= f.den_[l].poly;
      logd += static_cast<double>(f.den_[j].power) * ddt(f.den_[j].poly, i) * others;
    }
    RationalFn r;
    r.num_ = ddt(f.num_, i) * all - f.num_ * logd;
    if (r.num_.is_zero()) return r;
    r.den_ = f.den_;
    for (auto& g : r.den_) ++g.power;
    return r;
  }

 private:
  static bool same_factor(const ExpSum& a, const ExpSum& b) { return nearly_same(a, b, 1e-13); }

  void merge_factor(const ExpSum& normalized, int p) {
    for (auto& g : den_) {
      if (same_factor(g.poly, normalized)) {
        g.power += p;
        return;
      }
    }
    den_.push_back({normalized, p});
  }

  void divide_by(ExpSum f, int p) {
    if (f.is_zero()) throw DomainError("RationalFn: zero denominator");
    const Monomial content = monomial_content(f);
    if (!content.is_one()) f = f * ExpSum(ExpAtom(1.0, content.inverse()));
    const double lead = f.atoms().front().coeff();
    f = (1.0 / lead) * f;
    num_ = num_ * ExpSum(ExpAtom(std::pow(lead, -p), content.pow(-p)));
    if (f.size() == 1) return;  // f is now the constant 1
    if (num_.is_zero()) {
      den_.clear();
      return;
    }
    merge_factor(f, p);
  }

  ExpSum num_;
  std::vector<Factor> den_;
};

inline RationalFn delta(const RationalFn& f) { return shift(f, 1) - f; }
inline RationalFn delta_star(const RationalFn& f) { return shift(f, -1) - f; }

inline RationalFn delta_pow(RationalFn f, int k) {
  for (int i = 0; i < k; ++i) f = delta(f);
  return f;
}

}  // namespace cdkp

#endif  // CDKP_EXPSUM_HPP
