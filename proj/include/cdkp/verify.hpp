#ifndef CDKP_VERIFY_HPP
#define CDKP_VERIFY_HPP

// Conformance harness. Every acceptance criterion produces exactly one entry
// named "C<i>.<topic>"; supporting tables and informational findings are
// reported as "al.*" and "extra.*" entries and never affect the exit code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cdkp/error.hpp"
#include "cdkp/expsum.hpp"
#include "cdkp/gauge.hpp"
#include "cdkp/grid.hpp"
#include "cdkp/pdo.hpp"
#include "cdkp/solutions.hpp"
#include "cdkp/wronskian.hpp"

namespace cdkp {

/// Sign conventions for the r-equation of the t2 flow.
///   AS_PRINTED:      r_t2 = r(n) - 2 r(n-1) + r(n-2) + 2 q r^2
///   FORMAL_ADJOINT:  r_t2 = -Delta*^2 r + 2 q r^2
///   SHIFTED_VARIANT: the printed equation for Lambda^{-1} r instead of r
enum class ConventionId { AS_PRINTED, FORMAL_ADJOINT, SHIFTED_VARIANT };

inline const std::vector<ConventionId>& all_conventions() {
  static const std::vector<ConventionId> all{ConventionId::AS_PRINTED, ConventionId::FORMAL_ADJOINT,
                                             ConventionId::SHIFTED_VARIANT};
  return all;
}

inline std::string convention_name(ConventionId c) {
  switch (c) {
    case ConventionId::FORMAL_ADJOINT: return "FORMAL_ADJOINT";
    case ConventionId::SHIFTED_VARIANT: return "SHIFTED_VARIANT";
    default: return "AS_PRINTED";
  }
}

inline std::optional<ConventionId> parse_convention(const std::string& s) {
  for (auto c : all_conventions())
    if (convention_name(c) == s) return c;
  return std::nullopt;
}

enum class Status { Pass, Fail, Indeterminate, Info };

inline std::string status_name(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Indeterminate: return "INDETERMINATE";
    default: return "INFO";
  }
}

struct CheckEntry {
  std::string name;
  std::string convention;  // empty when not applicable
  std::string grid;
  double max_residual = 0.0;
  Status status = Status::Info;
  std::string notes;

  bool is_criterion() const { return name.size() > 1 && name[0] == 'C' && std::isdigit(name[1]); }
};

struct ConformanceReport {
  std::vector<CheckEntry> checks;
  /// Recorded AL outcome: a convention name, "INDETERMINATE", or empty when not run.
  std::string al_convention;

  const CheckEntry* find(const std::string& prefix) const {
    for (const auto& c : checks)
      if (c.name.rfind(prefix, 0) == 0) return &c;
    return nullptr;
  }

  /// Criteria pass, or are INDETERMINATE with their tables recorded.
  bool all_criteria_ok() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckEntry& c) { return c.is_criterion() && c.status == Status::Fail; });
  }

  int exit_code() const { return all_criteria_ok() ? 0 : 1; }
};

inline Status pass_if(bool ok) { return ok ? Status::Pass : Status::Fail; }

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

/// Tolerances of the acceptance criteria.
namespace tol {
inline constexpr double kTriangle = 1e-10;
inline constexpr double kPipeline = 1e-10;
inline constexpr double kProportional = 1e-12;
inline constexpr double kW4 = 1e-10;
inline constexpr double kNested = 1e-8;
inline constexpr double kOperator = 1e-10;
inline constexpr double kChain = 1e-10;
inline constexpr double kAL = 1e-8;
inline constexpr double kDerivative = 1e-7;
}  // namespace tol

// ---------------------------------------------------------------------------
// Residuals

struct AlResidual {
  double q = 0.0;
  double r = 0.0;
};

/// Scale-relative residuals |R| / (1 + max |term|) of the t2 lattice flow.
inline AlResidual al_residual(const RationalFn& q, const RationalFn& r, ConventionId conv, const Grid& grid) {
  AlResidual out;
  if (q.is_zero() && r.is_zero()) return out;
  const RationalFn rr = conv == ConventionId::SHIFTED_VARIANT ? shift(r, -1) : r;
  const RationalFn qt = ddt(q, 2);
  const RationalFn rt = ddt(rr, 2);
  auto rel = [](double lhs, std::initializer_list<double> terms) {
    double rhs = 0.0, big = std::abs(lhs);
    for (double x : terms) {
      rhs += x;
      big = std::max(big, std::abs(x));
    }
    return std::abs(lhs - rhs) / (1.0 + big);
  };
  grid.for_each([&](int n, const Times& t) {
    const double q0 = q(n, t), q1 = q(n + 1, t), q2 = q(n + 2, t);
    const double r0 = rr(n, t), rm1 = rr(n - 1, t), rm2 = rr(n - 2, t);
    out.q = std::max(out.q, rel(qt(n, t), {q2, -2 * q1, q0, 2 * q0 * q0 * r0}));
    const double sgn = conv == ConventionId::FORMAL_ADJOINT ? -1.0 : 1.0;
    out.r = std::max(out.r, rel(rt(n, t), {sgn * r0, -2 * sgn * rm1, sgn * rm2, 2 * q0 * r0 * r0}));
  });
  return out;
}

/// (T Delta^m T^{-1})_+ for the gauge channel, i.e. B_m of the dressed hierarchy.
inline PDOperator dressed_flow_generator(const GaugeChannel& ch, int m, int depth = kDefaultDepth) {
  const PDOperator t = as_operator(ch);
  const PDOperator tinv = inverse_operator(ch, depth);
  const PDOperator l = compose(t, compose(PDOperator::power(m), tinv, depth), depth);
  if (!l.exact() && l.valid_from() > 0) throw DomainError("dressed_flow_generator: depth too small");
  return project_plus(l);
}

/// Scale-relative residuals of q_{t_m} = B q and r_{t_m} = -B* r.
inline AlResidual eigen_flow_residual(const PDOperator& b, const std::vector<std::pair<RationalFn, RationalFn>>& pairs,
                                      int m, const Grid& grid) {
  AlResidual out;
  const PDOperator bstar = adjoint(b);
  for (const auto& [q, r] : pairs) {
    out.q = std::max(out.q, max_relative_error(grid, ddt(q, m), apply(b, q)));
    out.r = std::max(out.r, max_relative_error(grid, ddt(r, m), -apply(bstar, r)));
  }
  return out;
}

/// Same, with B_m = (L^m)_+ of a constrained Lax operator.
inline AlResidual eigen_flow_residual(const ConstrainedLax& lc, int m, const Grid& grid, int depth = kDefaultDepth) {
  const PDOperator b = project_plus(operator_power(lc.to_operator(depth), m, depth));
  return eigen_flow_residual(b, lc.pairs, m, grid);
}

/// Largest scale-relative coefficient difference on orders both operators resolve.
inline double coefficient_residual(const PDOperator& a, const PDOperator& b, const Grid& grid) {
  const int from = std::max(a.valid_from(), b.valid_from());
  std::set<int> orders;
  for (const auto& [j, f] : a.coeffs()) orders.insert(j);
  for (const auto& [j, f] : b.coeffs()) orders.insert(j);
  double worst = 0.0;
  for (int j : orders)
    if (j >= from) worst = std::max(worst, max_relative_error(grid, a.coeff(j), b.coeff(j)));
  return worst;
}

/// Largest |a - b| / (1 + max(|a|, |b|)) over coefficients; for identities whose
/// sides are exactly zero at some orders.
inline double coefficient_residual_abs(const PDOperator& a, const PDOperator& b, const Grid& grid) {
  const int from = std::max(a.valid_from(), b.valid_from());
  std::set<int> orders;
  for (const auto& [j, f] : a.coeffs()) orders.insert(j);
  for (const auto& [j, f] : b.coeffs()) orders.insert(j);
  double worst = 0.0;
  for (int j : orders) {
    if (j < from) continue;
    const RationalFn x = a.coeff(j), y = b.coeff(j);
    grid.for_each([&](int n, const Times& t) {
      const double u = x(n, t), v = y(n, t);
      worst = std::max(worst, std::abs(u - v) / (1.0 + std::max(std::abs(u), std::abs(v))));
    });
  }
  return worst;
}

/// Small grid for operator coefficient comparisons.
inline Grid operator_grid() { return {int_range(-1, 2), linspace_step(-1, 1, 1), linspace_step(-1, 1, 1), 0.1}; }

// ---------------------------------------------------------------------------
// Random data

class RandomAtoms {
 public:
  explicit RandomAtoms(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  ExpAtom atom() { return make_exp(uniform(-0.8, 0.8), uniform(-0.5, 0.5)); }

  ExpSum sum(int atoms) {
    ExpSum s;
    for (int i = 0; i < atoms; ++i) s += ExpSum(atom().scaled(uniform(0.5, 1.5) * (i % 2 == 0 ? 1.0 : -1.0)));
    return s;
  }

  /// Seed parameters with pairwise separated z's; nearly coincident z's make
  /// the W4 determinant a catastrophic cancellation rather than a generic case.
  SeedParams generic_seeds(double min_gap = 0.15) {
    while (true) {
      const std::vector<double> z{uniform(-0.8, 0.8), uniform(-0.8, 0.8), uniform(-0.8, 0.8), uniform(-0.8, 0.8)};
      bool ok = true;
      for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j) ok = ok && std::abs(z[i] - z[j]) >= min_gap;
      if (!ok) continue;
      return {z[0], z[1], z[2], z[3], uniform(-0.5, 0.5), uniform(-0.5, 0.5), uniform(-0.5, 0.5), uniform(-0.5, 0.5)};
    }
  }

  /// Quotient with a strictly positive denominator.
  RationalFn rational() {
    ExpSum den;
    for (int i = 0; i < 2 + static_cast<int>(rng_() % 2); ++i) den += ExpSum(atom().scaled(uniform(0.5, 1.5)));
    return RationalFn(sum(2 + static_cast<int>(rng_() % 2)), den);
  }

 private:
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Suites

struct Sweep {
  std::vector<double> zs{0.3, 0.5, 0.7};
  std::vector<int> ks{1, 2, 3};
  std::vector<double> cs{0.0, 0.7};
  std::vector<double> t3s{0.0, 0.2};
  std::vector<int> al_ks{1, 2};

  bool empty() const { return zs.empty() || ks.empty(); }
};

struct VerifyOptions {
  Sweep sweep;
  /// Suites to run; empty means all of them.
  std::set<std::string> suites;
  std::optional<ConventionId> convention;
  int depth = kDefaultDepth;
  std::uint64_t seed = 20240611;

  bool wants(const std::string& s) const { return suites.empty() || suites.count(s) > 0; }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"triangle", "pipeline", "wronskian", "operator",
                                              "gauge",    "al",       "figures",   "derivative"};
  return names;
}

namespace detail {

template <class F>
void for_sweep(const Sweep& s, F&& f) {
  for (double z : s.zs)
    for (int k : s.ks)
      for (double c : s.cs)
        for (double t3 : s.t3s) f(SolitonParams::specialized(z, c, k, t3));
}

inline std::string sweep_desc(const Sweep& s) {
  std::ostringstream os;
  os << "z in {";
  for (std::size_t i = 0; i < s.zs.size(); ++i) os << (i ? "," : "") << s.zs[i];
  os << "} k in {";
  for (std::size_t i = 0; i < s.ks.size(); ++i) os << (i ? "," : "") << s.ks[i];
  os << "} c in {";
  for (std::size_t i = 0; i < s.cs.size(); ++i) os << (i ? "," : "") << s.cs[i];
  os << "} t3 in {";
  for (std::size_t i = 0; i < s.t3s.size(); ++i) os << (i ? "," : "") << s.t3s[i];
  os << "}";
  return os.str();
}

inline Sample product_sample(const RationalFn& a, int na, const RationalFn& b, int nb, const Times& t) {
  const auto x = a.evaluate(na, t), y = b.evaluate(nb, t);
  return {x.value * y.value, x.scale * y.scale};
}

}  // namespace detail

/// C1: q1 Lambda^{-1}(r1) = u1 on the sweep, plus the hand-derived anchor point.
inline CheckEntry check_triangle(const Sweep& sweep) {
  double worst = 0.0;
  detail::for_sweep(sweep, [&](const SolitonParams& p) {
    const RationalFn q = q1_closed(p), r = r1_closed(p), u = u1_closed(p);
    const double e = max_relative_error(
        acceptance_grid(p.t3()), [&](int n, const Times& t) { return detail::product_sample(q, n, r, n - 1, t); },
        u);
    worst = std::max(worst, e);
  });
  const auto p = SolitonParams::specialized(0.5, 0.0, 1);
  const Times t0 = make_times(0, 0, 0);
  const double q0 = q1_closed(p)(0, t0), r0 = r1_closed(p)(-1, t0), u0 = u1_closed(p)(0, t0);
  const bool anchor = std::abs(q0 + 0.03125) < 1e-15 && std::abs(r0 + 4.0) < 1e-13 && std::abs(u0 - 0.125) < 1e-15;
  return {"C1.consistency_triangle", "", acceptance_grid().describe() + "; " + detail::sweep_desc(sweep), worst,
          pass_if(worst <= tol::kTriangle && anchor),
          "anchor z=0.5,k=1 at (0,0,0): q1=" + fmt(q0) + " Linv r1=" + fmt(r0) + " u1=" + fmt(u0)};
}

/// C2: gauge-built (q1, r1, u1) equal the closed forms; proportionality of the transformed eigenfunctions.
inline CheckEntry check_pipeline(const Sweep& sweep) {
  double worst = 0.0, prop = 0.0;
  detail::for_sweep(sweep, [&](const SolitonParams& p) {
    const Grid g = acceptance_grid(p.t3());
    const SolutionSet s = build_via_pipeline(p);
    worst = std::max({worst, max_relative_error(g, s.q1, q1_closed(p)), max_relative_error(g, s.r1, r1_closed(p)),
                      max_relative_error(g, s.u1, u1_closed(p))});
    const SeedParams sd = p.seeds();
    const ExpSum f1 = seed_f1(sd), f2 = seed_f2(sd);
    const GaugeChannel ch({f1, f2});
    const RationalFn a = (p.kz(p.z3()) - p.kz(p.z2())) * transform_eigen(ch, delta_pow(f1, p.k()));
    const RationalFn b = (p.kz(p.z1()) - p.kz(p.z2())) * transform_eigen(ch, delta_pow(f2, p.k()));
    prop = std::max(prop, max_relative_error(g, a, b));
  });
  return {"C2.pipeline_equivalence", "", acceptance_grid().describe() + "; " + detail::sweep_desc(sweep), worst,
          pass_if(worst <= tol::kPipeline && prop <= tol::kProportional),
          "max proportionality residual " + fmt(prop) + " (tolerance 1e-12)"};
}

/// C3: W4 factorization, vanishing at z = z2, and flat/nested agreement.
inline CheckEntry check_wronskian(std::uint64_t seed) {
  RandomAtoms rnd(seed);
  const Grid g = criterion_grid();
  double fact = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const SeedParams s = rnd.generic_seeds();
    const ExpSum f1 = seed_f1(s), f2 = seed_f2(s);
    for (int k = 1; k <= 3; ++k) {
      // Brute force by full Leibniz expansion over exponential atoms.
      const ExpSum w4 = wronskian_fn(WronskianSpec{{f1, f2, delta_pow(f1, k), delta_pow(f2, k)}});
      fact = std::max(fact, max_relative_error(
                                g, [&](int n, const Times& t) { return Sample{w4(n, t), 0.0}; },
                                [&](int n, const Times& t) { return w4_factorized(s, k, n, t); }));
    }
  }

  double vanish = 0.0;
  for (double z : {0.3, 0.5, 0.7})
    for (int k = 1; k <= 3; ++k) {
      const SeedParams s = SolitonParams::specialized(z, 0.4, k).seeds();
      vanish = std::max(vanish, criterion_flat({seed_f1(s), seed_f2(s)}, k, 1, g));
    }

  // Flat vs nested on 5 x 5 x 3 points in (x, y, n).
  const Grid ng{int_range(0, 2), linspace_step(-2, 2, 1), linspace_step(-2, 2, 1), 0.0};
  double nested = 0.0;
  for (int m = 1; m <= 3; ++m)
    for (int big_m = 0; big_m <= std::min(2, m - 1); ++big_m)
      for (int k = 1; k <= 3; ++k) {
        std::vector<ExpSum> fs;
        for (int i = 0; i < m; ++i) fs.push_back(rnd.sum(2));
        for (const auto& subset : index_subsets(fs.size(), static_cast<std::size_t>(big_m + 1)))
          ng.for_each([&](int n, const Times& t) {
            const DetEval a = criterion_flat_eval(fs, k, subset, n, t);
            const DetEval b = criterion_nested_eval(fs, k, subset, n, t);
            const double den = std::max({std::abs(a.value), std::abs(b.value), kWronskianZero * a.scale, 1e-300});
            nested = std::max(nested, std::abs(a.value - b.value) / den);
          });
      }
  return {"C3.wronskian_criterion", "", g.describe(), std::max(fact, nested),
          pass_if(fact <= tol::kW4 && vanish <= kWronskianZero && nested <= tol::kNested),
          "W4 factorization " + fmt(fact) + "; reduced W4 scale-relative max " + fmt(vanish) +
              " (zero threshold 1e-9); flat vs nested " + fmt(nested)};
}

struct OperatorIdentityResult {
  double first = 0.0;          // (K q D^-1 r)_- = K(q) D^-1 r
  double second = 0.0;         // (q D^-1 r K)_- = +q D^-1 K*(r)
  double second_printed = 0.0; // same with the printed minus sign
  double stability = 0.0;      // depth-1 vs depth agreement
};

inline std::vector<std::pair<std::string, PDOperator>> identity_family(const RationalFn& f, int depth) {
  const PDOperator d2 = PDOperator::power(2);
  return {{"Delta", PDOperator::power(1)},
          {"Delta^2", d2},
          {"Delta^3", PDOperator::power(3)},
          {"Delta^2+f Delta", d2 + compose(PDOperator::multiplication(f), PDOperator::power(1), depth)}};
}

inline OperatorIdentityResult operator_identities(int depth, std::uint64_t seed) {
  if (depth < 4) throw DomainError("operator identities need depth >= 4");
  RandomAtoms rnd(seed);
  const RationalFn q(rnd.sum(2)), r(rnd.sum(2)), f(rnd.sum(1));
  const Grid g = operator_grid();
  OperatorIdentityResult res;
  auto sides = [&](const PDOperator& k, int n) {
    const PDOperator qr = integral_term(q, r, n);
    struct {
      PDOperator l1, r1, l2, r2;
    } s{project_minus(compose(k, qr, n)), integral_term(apply(k, q), r, n), project_minus(compose(qr, k, n)),
        integral_term(q, apply(adjoint(k, n), r), n)};
    return s;
  };
  const auto fam_hi = identity_family(f, depth);
  const auto fam_lo = identity_family(f, depth - 1);
  for (std::size_t i = 0; i < fam_hi.size(); ++i) {
    const auto hi = sides(fam_hi[i].second, depth);
    const auto lo = sides(fam_lo[i].second, depth - 1);
    res.first = std::max(res.first, coefficient_residual(hi.l1, hi.r1, g));
    res.second = std::max(res.second, coefficient_residual(hi.l2, hi.r2, g));
    res.second_printed = std::max(res.second_printed, coefficient_residual(hi.l2, -hi.r2, g));
    res.stability = std::max({res.stability, coefficient_residual(hi.l1, lo.l1, g), coefficient_residual(hi.l2, lo.l2, g)});
  }
  return res;
}

/// C4: both operator identities coefficient-wise, stable between depth-1 and depth.
inline CheckEntry check_operator(int depth, std::uint64_t seed, const OperatorIdentityResult& r) {
  (void)seed;
  const double worst = std::max({r.first, r.second, r.stability});
  return {"C4.operator_identities", "", operator_grid().describe() + "; depth " + std::to_string(depth), worst,
          pass_if(worst <= tol::kOperator),
          "K in {Delta, Delta^2, Delta^3, Delta^2+f Delta}; first " + fmt(r.first) + ", second (+ sign) " +
              fmt(r.second) + ", depth stability " + fmt(r.stability)};
}

/// C5: generator annihilation and chain = determinant for m <= 3.
inline CheckEntry check_gauge(std::uint64_t seed) {
  RandomAtoms rnd(seed);
  const Grid g = criterion_grid();
  double annihilation = 0.0, chain_err = 0.0, inverse = 0.0;
  for (int m = 1; m <= 3; ++m) {
    std::vector<ExpSum> gens;
    for (int i = 0; i < m; ++i) gens.push_back(rnd.sum(2));
    const GaugeChannel ch(gens);
    ExpSum combo;
    for (const auto& q : gens) combo += rnd.uniform(-2, 2) * q;
    const WronskianSpec with_combo = ch.spec().with(combo);
    g.for_each([&](int n, const Times& t) {
      const DetEval e = wronskian_eval(with_combo, n, t);
      annihilation = std::max(annihilation, std::abs(e.value) / e.scale);
    });
    const ExpSum target = rnd.sum(2);
    chain_err = std::max(chain_err, max_relative_error(g, transform_eigen(ch, target), chain_apply(gens, target)));
    const int depth = 6;
    const PDOperator id = compose(inverse_operator(ch, depth), as_operator(ch), depth);
    inverse = std::max(inverse, coefficient_residual_abs(id, PDOperator::identity(), operator_grid()));
  }
  return {"C5.gauge_algebra", "", g.describe(), std::max(annihilation, chain_err),
          pass_if(annihilation <= kWronskianZero && chain_err <= tol::kChain),
          "annihilation scale-relative " + fmt(annihilation) + "; chain vs determinant " + fmt(chain_err) +
              "; T^-1 T - I coefficients (depth 6) " + fmt(inverse)};
}

struct AlTableRow {
  ConventionId convention;
  double z;
  int k;
  AlResidual residual;
};

inline std::vector<AlTableRow> al_table(const Sweep& sweep, const std::vector<ConventionId>& conventions) {
  std::vector<AlTableRow> rows;
  for (auto conv : conventions)
    for (double z : sweep.zs)
      for (int k : sweep.al_ks) {
        const auto p = SolitonParams::specialized(z, 0.0, k);
        rows.push_back({conv, z, k, al_residual(q1_closed(p), r1_closed(p), conv, acceptance_grid())});
      }
  return rows;
}

/// C6 plus one table entry per (convention, z, k). Sets report.al_convention.
inline void check_al(const Sweep& sweep, std::optional<ConventionId> pinned, ConformanceReport& report) {
  const std::vector<ConventionId> convs = pinned ? std::vector<ConventionId>{*pinned} : all_conventions();
  const auto rows = al_table(sweep, convs);
  const std::string grid = acceptance_grid().describe();
  std::vector<std::string> passing;
  double best_q = 1e300;
  for (auto conv : convs) {
    double q = 0.0, r = 0.0;
    for (const auto& row : rows)
      if (row.convention == conv) {
        q = std::max(q, row.residual.q);
        r = std::max(r, row.residual.r);
      }
    best_q = std::min(best_q, q);
    if (q < tol::kAL && r < tol::kAL) passing.push_back(convention_name(conv));
  }
  for (const auto& row : rows) {
    std::ostringstream name;
    name << "al." << convention_name(row.convention) << ".z=" << row.z << ".k=" << row.k;
    report.checks.push_back({name.str(), convention_name(row.convention), grid,
                             std::max(row.residual.q, row.residual.r), Status::Info,
                             "q-equation " + fmt(row.residual.q) + ", r-equation " + fmt(row.residual.r)});
  }
  CheckEntry e{"C6.ablowitz_ladik_conformance", "", grid, best_q, Status::Indeterminate, ""};
  if (passing.size() == 1) {
    e.status = Status::Pass;
    e.convention = passing.front();
    report.al_convention = passing.front();
    e.notes = "unique passing convention " + passing.front();
  } else if (pinned) {
    // A requested convention that does not fit is a failure, not an open question.
    e.status = Status::Fail;
    e.convention = convention_name(*pinned);
    report.al_convention = "INDETERMINATE";
    e.notes = "pinned convention " + convention_name(*pinned) + " misses 1e-8: q-equation " + fmt(best_q);
  } else {
    report.al_convention = "INDETERMINATE";
    e.notes = passing.empty()
                  ? "no convention reaches 1e-8; smallest q-equation residual " + fmt(best_q) +
                        ". The q-equation is convention independent, so no sign choice can pass; see al.* tables"
                  : std::to_string(passing.size()) + " conventions pass; see al.* tables";
  }
  report.checks.push_back(e);
}

/// True when every row has exactly one strict local maximum in x and u keeps one sign.
inline bool single_ridge(const RationalFn& u, int n, const Grid& g) {
  bool pos = true, neg = true;
  for (double y : g.ys) {
    std::vector<double> row;
    for (double x : g.xs) {
      const double v = u(n, make_times(x, y, g.t3));
      row.push_back(v);
      pos = pos && v > 0;
      neg = neg && v < 0;
    }
    if (neg)
      for (double& v : row) v = -v;
    int peaks = 0;
    for (std::size_t i = 1; i + 1 < row.size(); ++i)
      if (row[i] > row[i - 1] && row[i] > row[i + 1]) ++peaks;
    if (peaks != 1) return false;
  }
  return pos || neg;
}

/// C7: qualitative figure properties on the figure grid.
inline CheckEntry check_figures() {
  const Grid g = figure_grid({0, 1, 2});
  const auto p1 = SolitonParams::specialized(0.5, 0.0, 1);
  const auto p2 = SolitonParams::specialized(0.5, 0.0, 2);
  const RationalFn u1 = u1_closed(p1), u2 = u1_closed(p2);
  bool positive = true, has_pos = false, has_neg = false;
  double min_k1 = 1e300;
  g.for_each([&](int n, const Times& t) {
    const double a = u1(n, t), b = u2(n, t);
    positive = positive && a > 0;
    min_k1 = std::min(min_k1, a);
    has_pos = has_pos || b > 0;
    has_neg = has_neg || b < 0;
  });
  double zero = 0.0, sup1 = 0.0, sup3 = 0.0;
  const Grid g0 = figure_grid({0});
  g0.for_each([&](int, const Times& t) {
    zero = std::max(zero, std::abs(delta_u1(u1, 0, t)));
    sup1 = std::max(sup1, std::abs(delta_u1(u1, 1, t)));
    sup3 = std::max(sup3, std::abs(delta_u1(u1, 3, t)));
  });
  const auto pd = SolitonParams::general(0.5, 0.0, -0.5, 0.0, 0.0, 0.0, 1, Choice::ZEqZ1);
  const SolutionSet deg = build_via_pipeline(pd);
  const bool ridge = deg.surviving_channel == 2 && single_ridge(deg.u1, 0, g0);
  const bool ok = positive && has_pos && has_neg && zero == 0.0 && sup1 < sup3 && ridge;
  std::ostringstream notes;
  notes << "k=1 min u1 " << fmt(min_k1) << "; k=2 both signs " << (has_pos && has_neg ? "yes" : "no")
        << "; sup|du1(0)| " << zero << ", sup|du1(1)| " << fmt(sup1) << " < sup|du1(3)| " << fmt(sup3)
        << "; z=z1 single ridge " << (ridge ? "yes" : "no");
  return {"C7.figure_properties", "", g.describe(), zero, pass_if(ok), notes.str()};
}

/// C8: analytic d/dt2 against Richardson-extrapolated central differences.
inline CheckEntry check_derivative(std::uint64_t seed) {
  RandomAtoms rnd(seed);
  const double h = 1e-5;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const RationalFn f = rnd.rational();
    const RationalFn df = ddt(f, 2);
    const int n = static_cast<int>(std::lround(rnd.uniform(-2, 2)));
    const Times t = make_times(rnd.uniform(-1, 1), rnd.uniform(-1, 1), rnd.uniform(-0.5, 0.5));
    auto central = [&](double step) {
      Times a = t, b = t;
      a[1] += step;
      b[1] -= step;
      return (f(n, a) - f(n, b)) / (2 * step);
    };
    const double rich = (4 * central(h / 2) - central(h)) / 3;
    const auto exact = df.evaluate(n, t);
    worst = std::max(worst, std::abs(exact.value - rich) / std::max({std::abs(exact.value), exact.scale, 1e-300}));
  }
  return {"C8.derivative_self_test", "", "100 random points, h=1e-5", worst, pass_if(worst <= tol::kDerivative),
          "Richardson (4 D(h/2) - D(h)) / 3 against ddt"};
}

// ---------------------------------------------------------------------------
// Informational findings

inline std::vector<CheckEntry> extra_checks(int depth, const OperatorIdentityResult& ops) {
  std::vector<CheckEntry> out;
  const Grid g = acceptance_grid();

  double printed = 0.0, printed_y0 = 0.0;
  for (double z : {0.3, 0.5, 0.7})
    for (int k = 1; k <= 2; ++k) {
      const auto p = SolitonParams::specialized(z, 0.0, k);
      printed = std::max(printed, max_relative_error(g, q1_printed(p), q1_closed(p)));
      Grid g0 = g;
      g0.ys = {0.0};
      printed_y0 = std::max(printed_y0, max_relative_error(g0, q1_printed(p), q1_closed(p)));
    }
  out.push_back({"extra.q1_printed_denominator", "", g.describe(), printed, Status::Info,
                 "printed q1 agrees only on y=0 (" + fmt(printed_y0) +
                     "); its denominator lacks the e^{2 z^2 y} factor on (1-z^2)^n"});

  out.push_back({"extra.operator_identity_printed_sign", "", operator_grid().describe(), ops.second_printed,
                 Status::Info, "(q D^-1 r K)_- with -q D^-1 K*(r) as printed; the + sign holds"});

  // Flows of the dressed hierarchy, B_m = (T Delta^m T^{-1})_+, for z = 0.5.
  double flow = 0.0, constraint = 0.0;
  for (int k = 1; k <= 2; ++k) {
    const auto p = SolitonParams::specialized(0.5, 0.0, k);
    const SeedParams s = p.seeds();
    const GaugeChannel ch({seed_f1(s), seed_f2(s)});
    const SolutionSet sol = build_via_pipeline(p);
    const Grid og = operator_grid();
    for (int m = 1; m <= 2; ++m) {
      const auto res = eigen_flow_residual(dressed_flow_generator(ch, m, depth), {{sol.q1, sol.r1}}, m, og);
      flow = std::max({flow, res.q, res.r});
    }
    const PDOperator t = as_operator(ch);
    const PDOperator lk = compose(t, compose(PDOperator::power(k), inverse_operator(ch, depth), depth), depth);
    constraint = std::max(constraint, coefficient_residual(project_minus(lk), integral_term(sol.q1, sol.r1, depth), og));
  }
  out.push_back({"extra.dressed_eigen_flows", "", operator_grid().describe(), flow, pass_if(flow <= 1e-10),
                 "q_tm = B_m q and r_tm = -B_m* r with B_m = (T Delta^m T^-1)_+, m=1,2, z=0.5, k=1,2"});
  out.push_back({"extra.constraint", "", operator_grid().describe(), constraint, pass_if(constraint <= 1e-10),
                 "(T Delta^k T^-1)_- = q1 D^-1 r1 coefficient-wise, z=0.5, k=1,2"});

  {
    const auto p = SolitonParams::specialized(0.5, 0.0, 1);
    const SeedParams s = p.seeds();
    const GaugeChannel ch({seed_f1(s), seed_f2(s)});
    const PDOperator b1 = dressed_flow_generator(ch, 1, depth);
    const RationalFn u0 = b1.coeff(0);
    double u0max = 0.0;
    g.for_each([&](int n, const Times& t) { u0max = std::max(u0max, std::abs(u0(n, t))); });
    out.push_back({"extra.gauge_zero_order_term", "", g.describe(), u0max, Status::Info,
                   "(T Delta T^-1)_+ = Delta + u0 with u0 != 0, so t1 is not the bare Delta flow and the t2 flow "
                   "is not the lattice as printed"});
  }

  {
    // Near-degenerate parameters: report the conditioning rather than fail.
    const auto p = SolitonParams::specialized(0.99, 0.0, 1);
    const RationalFn q = q1_closed(p), r = r1_closed(p), u = u1_closed(p);
    double tri = 0.0, cond = 0.0;
    std::string note;
    try {
      tri = max_relative_error(
          g, [&](int n, const Times& t) { return detail::product_sample(q, n, r, n - 1, t); }, u);
      const ExpSum tau = tau_cdkp(p);
      g.for_each([&](int n, const Times& t) {
        const auto e = tau.evaluate(n, t);
        cond = std::max(cond, e.scale / std::abs(e.value));
      });
      note = "triangle residual " + fmt(tri) + ", tau condition (max atom / |tau|) " + fmt(cond);
    } catch (const std::exception& ex) {
      note = std::string("evaluation failed: ") + ex.what();
    }
    out.push_back({"extra.conditioning_z0.99", "", g.describe(), tri, Status::Info, note});
  }
  return out;
}

/// Runs the selected suites; never stops at the first failure.
inline ConformanceReport run_all(const VerifyOptions& opt) {
  ConformanceReport rep;
  if (opt.sweep.empty()) return rep;
  auto guarded = [&](const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      rep.checks.push_back({name, "", "", 0.0, Status::Fail, std::string("exception: ") + e.what()});
    }
  };
  std::optional<OperatorIdentityResult> ops;
  if (opt.wants("triangle")) guarded("C1.consistency_triangle", [&] { rep.checks.push_back(check_triangle(opt.sweep)); });
  if (opt.wants("pipeline")) guarded("C2.pipeline_equivalence", [&] { rep.checks.push_back(check_pipeline(opt.sweep)); });
  if (opt.wants("wronskian")) guarded("C3.wronskian_criterion", [&] { rep.checks.push_back(check_wronskian(opt.seed)); });
  if (opt.wants("operator"))
    guarded("C4.operator_identities", [&] {
      ops = operator_identities(opt.depth, opt.seed);
      rep.checks.push_back(check_operator(opt.depth, opt.seed, *ops));
    });
  if (opt.wants("gauge")) guarded("C5.gauge_algebra", [&] { rep.checks.push_back(check_gauge(opt.seed)); });
  if (opt.wants("al")) guarded("C6.ablowitz_ladik_conformance", [&] { check_al(opt.sweep, opt.convention, rep); });
  if (opt.wants("figures")) guarded("C7.figure_properties", [&] { rep.checks.push_back(check_figures()); });
  if (opt.wants("derivative")) guarded("C8.derivative_self_test", [&] { rep.checks.push_back(check_derivative(opt.seed)); });
  if (opt.suites.empty() || opt.suites.count("extra"))
    guarded("extra", [&] {
      if (!ops) ops = operator_identities(opt.depth, opt.seed);
      for (auto& e : extra_checks(opt.depth, *ops)) rep.checks.push_back(std::move(e));
    });
  return rep;
}

}  // namespace cdkp

#endif  // CDKP_VERIFY_HPP
