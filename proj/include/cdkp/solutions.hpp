#ifndef CDKP_SOLUTIONS_HPP
#define CDKP_SOLUTIONS_HPP

// The one-component reduction of the two-channel Wronskian solution.
//
// Seeds f1 = e1 + e(z, d), f2 = e2 + e3 with e_i = make_exp(z_i, c_i). The
// reduction condition holds for z = z2, d = c2 (f1 = e1 + e2); z = z1 and
// z = z3 are the other roots of the Vandermonde factor.
//
// With K = (z3^k - z2^k)(z1^k - z2^k), V = V(z1, z2, z3), E = e1 e2 e3 and
// N = (z3^k - z2^k) e1 + (z3^k - z1^k) e2 + (z2^k - z1^k) e3:
//
//   q1 = K V E / tau,  r1 = Lambda(N / (K tau)),  u1 = q1 Lambda^{-1}(r1) = V E N / tau^2.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cdkp/error.hpp"
#include "cdkp/expsum.hpp"
#include "cdkp/gauge.hpp"
#include "cdkp/linalg.hpp"
#include "cdkp/wronskian.hpp"

namespace cdkp {

/// Which root of the reduction condition is used.
enum class Choice { ZEqZ2, ZEqZ1, ZEqZ3 };

inline const char* choice_name(Choice c) {
  switch (c) {
    case Choice::ZEqZ1: return "z=z1";
    case Choice::ZEqZ3: return "z=z3";
    default: return "z=z2";
  }
}

/// Seed data before any reduction: f1 = e(z1,c1) + e(z,d), f2 = e(z2,c2) + e(z3,c3).
struct SeedParams {
  double z1 = 0.5, z2 = 0.0, z3 = -0.5, z = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, d = 0.0;
};

inline ExpSum seed_f1(const SeedParams& s) { return ExpSum(make_exp(s.z1, s.c1)) + ExpSum(make_exp(s.z, s.d)); }
inline ExpSum seed_f2(const SeedParams& s) { return ExpSum(make_exp(s.z2, s.c2)) + ExpSum(make_exp(s.z3, s.c3)); }

/// Four-term expansion of W_2(f1, f2), written out directly.
inline ExpSum tau_delta2(const SeedParams& s) {
  const ExpSum e1{make_exp(s.z1, s.c1)}, e{make_exp(s.z, s.d)}, e2{make_exp(s.z2, s.c2)}, e3{make_exp(s.z3, s.c3)};
  return (s.z2 - s.z1) * (e1 * e2) + (s.z2 - s.z) * (e * e2) + (s.z3 - s.z1) * (e1 * e3) + (s.z3 - s.z) * (e * e3);
}

/// W_4(f1, f2, Delta^k f1, Delta^k f2), brute force at one point.
inline DetEval w4_flat(const SeedParams& s, int k, double n, const Times& t) {
  const ExpSum f1 = seed_f1(s), f2 = seed_f2(s);
  return wronskian_eval(WronskianSpec{{f1, f2, delta_pow(f1, k), delta_pow(f2, k)}}, n, t);
}

/// (z^k - z1^k)(z2^k - z3^k) V(z1, z2, z3, z) F(n; z_i, t).
inline double w4_factorized(const SeedParams& s, int k, double n, const Times& t) {
  const ExpSum f = ExpSum(make_exp(s.z1, s.c1)) * ExpSum(make_exp(s.z2, s.c2)) * ExpSum(make_exp(s.z3, s.c3)) *
                   ExpSum(make_exp(s.z, s.d));
  return (std::pow(s.z, k) - std::pow(s.z1, k)) * (std::pow(s.z2, k) - std::pow(s.z3, k)) *
         vandermonde({s.z1, s.z2, s.z3, s.z}) * f(n, t);
}

class SolitonParams {
 public:
  /// z1 = z, z2 = 0, z3 = -z, c1 = c, c2 = 0, c3 = -c.
  static SolitonParams specialized(double z, double c, int k, double t3 = 0.0) {
    if (!(std::abs(z) < 1.0) || z == 0.0) throw DomainError("specialized parameters need 0 < |z| < 1");
    SolitonParams p(z, 0.0, -z, c, 0.0, -c, k, Choice::ZEqZ2);
    p.specialized_ = true;
    p.t3_ = t3;
    return p;
  }

  static SolitonParams general(double z1, double z2, double z3, double c1, double c2, double c3, int k,
                               Choice choice = Choice::ZEqZ2) {
    return SolitonParams(z1, z2, z3, c1, c2, c3, k, choice);
  }

  double z1() const { return z1_; }
  double z2() const { return z2_; }
  double z3() const { return z3_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double c3() const { return c3_; }
  int k() const { return k_; }
  Choice choice() const { return choice_; }
  bool is_specialized() const { return specialized_; }
  /// z of the specialized family (= z1).
  double z() const { return z1_; }
  double c() const { return c1_; }
  double t3() const { return t3_; }

  /// Seed data with z, d fixed by the chosen root.
  SeedParams seeds() const {
    SeedParams s{z1_, z2_, z3_, 0.0, c1_, c2_, c3_, 0.0};
    switch (choice_) {
      case Choice::ZEqZ1: s.z = z1_; s.d = c1_; break;
      case Choice::ZEqZ3: s.z = z3_; s.d = c3_; break;
      default: s.z = z2_; s.d = c2_; break;
    }
    return s;
  }

  ExpSum e1() const { return ExpSum(make_exp(z1_, c1_)); }
  ExpSum e2() const { return ExpSum(make_exp(z2_, c2_)); }
  ExpSum e3() const { return ExpSum(make_exp(z3_, c3_)); }

  double kz(double zi) const { return std::pow(zi, k_); }

 private:
  SolitonParams(double z1, double z2, double z3, double c1, double c2, double c3, int k, Choice choice)
      : z1_(z1), z2_(z2), z3_(z3), c1_(c1), c2_(c2), c3_(c3), k_(k), choice_(choice) {
    if (k < 1) throw DomainError("k must be a positive integer");
    if (z1 == z2 || z1 == z3 || z2 == z3) throw DomainError("z1, z2, z3 must be pairwise distinct");
    for (double zi : {z1, z2, z3})
      if (1.0 + zi == 0.0) throw DomainError("1 + z_i must be nonzero");
  }

  double z1_, z2_, z3_, c1_, c2_, c3_;
  int k_;
  Choice choice_;
  bool specialized_ = false;
  double t3_ = 0.0;
};

/// Three-term tau function of the z = z2 reduction, written out directly.
inline ExpSum tau_cdkp(const SolitonParams& p) {
  const ExpSum e1 = p.e1(), e2 = p.e2(), e3 = p.e3();
  return (p.z2() - p.z1()) * (e1 * e2) + (p.z3() - p.z1()) * (e1 * e3) + (p.z3() - p.z2()) * (e2 * e3);
}

namespace detail {

inline double k_factor(const SolitonParams& p) {
  return (p.kz(p.z3()) - p.kz(p.z2())) * (p.kz(p.z1()) - p.kz(p.z2()));
}

inline double v3(const SolitonParams& p) { return vandermonde({p.z1(), p.z2(), p.z3()}); }

inline ExpSum n_sum(const SolitonParams& p) {
  return (p.kz(p.z3()) - p.kz(p.z2())) * p.e1() + (p.kz(p.z3()) - p.kz(p.z1())) * p.e2() +
         (p.kz(p.z2()) - p.kz(p.z1())) * p.e3();
}

/// Atoms for the specialized closed forms, built on their own modes so that
/// they share nothing with the canonical e_i.
struct SpecializedAtoms {
  ExpSum ep;     // (1+z)^n e^eta
  ExpSum em;     // (1-z)^n e^-eta
  ExpSum ep_d;   // e^eta / (1-z)^n
  ExpSum em_d;   // e^-eta / (1+z)^n
  ExpSum p;      // (1-z^2)^n
  ExpSum y;      // e^{z^2 y}
  ExpSum y_inv;  // e^{-z^2 y}
};

inline ExpAtom mode_atom(double coeff, double growth, double a1, double a2, double a3) {
  const double a[] = {a1, a2, a3};
  return ExpAtom::make(coeff, growth, a);
}

inline SpecializedAtoms specialized_atoms(const SolitonParams& p) {
  const double z = p.z(), c = p.c(), z3 = z * z * z;
  return {ExpSum(mode_atom(std::exp(c), 1 + z, z, 0, z3)),
          ExpSum(mode_atom(std::exp(-c), 1 - z, -z, 0, -z3)),
          ExpSum(mode_atom(std::exp(c), 1 / (1 - z), z, 0, z3)),
          ExpSum(mode_atom(std::exp(-c), 1 / (1 + z), -z, 0, -z3)),
          ExpSum(mode_atom(1, 1 - z * z, 0, 0, 0)),
          ExpSum(mode_atom(1, 1, 0, z * z, 0)),
          ExpSum(mode_atom(1, 1, 0, -z * z, 0))};
}

inline void require_reduced(const SolitonParams& p, const char* what) {
  if (p.choice() != Choice::ZEqZ2)
    throw DomainError(std::string(what) + ": closed forms exist only for the z = z2 reduction");
}

inline double sign_pow(int k) { return k % 2 == 0 ? 1.0 : -1.0; }

}  // namespace detail

/// q1. Specialized: (-1)^k z^{2k+2} P Y^2 / (P Y^2 + (E+ + E-) Y / 2); general: K V E / tau.
inline RationalFn q1_closed(const SolitonParams& p) {
  detail::require_reduced(p, "q1_closed");
  if (p.is_specialized()) {
    const auto a = detail::specialized_atoms(p);
    const double z = p.z();
    const ExpSum num = detail::sign_pow(p.k()) * std::pow(z, 2 * p.k() + 2) * (a.p * a.y * a.y);
    return RationalFn(num, a.p * a.y * a.y + 0.5 * ((a.ep + a.em) * a.y));
  }
  const ExpSum e = p.e1() * p.e2() * p.e3();
  return RationalFn(detail::k_factor(p) * detail::v3(p) * e, tau_cdkp(p));
}

/// q1 exactly as the printed specialized formula, whose denominator carries
/// (1+z)^n (1-z)^n without the e^{2 z^2 y} factor.
inline RationalFn q1_printed(const SolitonParams& p) {
  if (!p.is_specialized()) throw DomainError("q1_printed needs specialized parameters");
  const auto a = detail::specialized_atoms(p);
  const double z = p.z();
  const ExpSum num = detail::sign_pow(p.k()) * std::pow(z, 2 * p.k() + 2) * (a.p * a.y * a.y);
  return RationalFn(num, a.p + 0.5 * ((a.ep + a.em) * a.y));
}

/// r1 including its outer Lambda. Specialized: the odd/even-k quotients.
inline RationalFn r1_closed(const SolitonParams& p) {
  detail::require_reduced(p, "r1_closed");
  if (p.is_specialized()) {
    const auto a = detail::specialized_atoms(p);
    const double pre = -1.0 / std::pow(p.z(), p.k() + 1);
    const ExpSum den = 0.5 * (a.ep + a.em) + a.p * a.y;
    const ExpSum num = p.k() % 2 == 1 ? 0.5 * (a.ep + a.em) + a.y_inv : 0.5 * (a.ep - a.em);
    return shift(pre * RationalFn(num, den), 1);
  }
  const double kf = detail::k_factor(p);
  if (kf == 0.0) throw DegenerateError("r1: (z3^k - z2^k)(z1^k - z2^k) vanishes");
  return shift(RationalFn(detail::n_sum(p), kf * tau_cdkp(p)), 1);
}

/// u1. Specialized: the printed closed form; general: V E N / tau^2.
inline RationalFn u1_closed(const SolitonParams& p) {
  detail::require_reduced(p, "u1_closed");
  if (p.is_specialized()) {
    const auto a = detail::specialized_atoms(p);
    const int k = p.k();
    const double sk = detail::sign_pow(k);
    const ExpSum num = ExpSum::constant(1.0 - sk) + a.em * a.y - sk * (a.ep * a.y);
    const ExpSum q = a.ep_d + 2.0 * a.y + a.em_d;
    return 2.0 * std::pow(p.z(), k + 1) * RationalFn(num, a.p * q * q);
  }
  const ExpSum tau = tau_cdkp(p);
  return RationalFn(detail::v3(p) * (p.e1() * p.e2() * p.e3()) * detail::n_sum(p), tau * tau);
}

struct SolutionSet {
  ExpSum tau;
  RationalFn q1;
  RationalFn r1;
  RationalFn u1;
  /// Channel carrying q1: 0 when both transformed eigenfunctions are proportional.
  int surviving_channel = 0;
};

/// (L^k)_- = f1' D^{-1} g1 + f2' D^{-1} g2 with f_i' = T_2(Delta^k f_i), g_i = b_i,
/// collapsed to one pair q1 D^{-1} r1.
inline SolutionSet build_via_pipeline(const SolitonParams& p) {
  const SeedParams s = p.seeds();
  const ExpSum f1 = seed_f1(s), f2 = seed_f2(s);
  const GaugeChannel ch({f1, f2});
  const RationalFn fd1 = transform_eigen(ch, delta_pow(f1, p.k()));
  const RationalFn fd2 = transform_eigen(ch, delta_pow(f2, p.k()));
  const RationalFn g1 = transform_adjoint(ch, 1);
  const RationalFn g2 = transform_adjoint(ch, 2);

  SolutionSet out;
  out.tau = ch.wronskian();
  if (fd1.is_zero() && fd2.is_zero()) throw DegenerateError("pipeline: both transformed eigenfunctions vanish");
  if (fd1.is_zero()) {
    out.q1 = fd2;
    out.r1 = g2;
    out.surviving_channel = 2;
  } else if (fd2.is_zero()) {
    out.q1 = fd1;
    out.r1 = g1;
    out.surviving_channel = 1;
  } else {
    // fd2 = lambda fd1 when the reduction condition holds; both share the denominator W_2.
    const ExpSum& n1 = fd1.numerator();
    const ExpSum& n2 = fd2.numerator();
    const double lambda = n2.atoms().front().coeff() / n1.atoms().front().coeff();
    if (!nearly_same(n2, lambda * n1, 1e-10))
      throw DegenerateError("pipeline: transformed eigenfunctions are not proportional; no one-component reduction");
    double scale = p.kz(p.z3()) - p.kz(p.z2());
    if (scale == 0.0) scale = 1.0;
    out.q1 = scale * fd1;
    out.r1 = (1.0 / scale) * (g1 + lambda * g2);
  }
  out.u1 = out.q1 * shift(out.r1, -1);
  return out;
}

/// u1(n) - u1(0) at the same (x, y, t3).
inline double delta_u1(const RationalFn& u1, int n, const Times& t) { return u1(n, t) - u1(0, t); }

}  // namespace cdkp

#endif  // CDKP_SOLUTIONS_HPP
