#ifndef CDKP_GRID_HPP
#define CDKP_GRID_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "cdkp/error.hpp"
#include "cdkp/expsum.hpp"

namespace cdkp {

/// Sample points (n, x, y) at fixed t3; all later times are 0.
struct Grid {
  std::vector<int> ns;
  std::vector<double> xs;
  std::vector<double> ys;
  double t3 = 0.0;

  std::size_t size() const { return ns.size() * xs.size() * ys.size(); }

  template <class F>
  void for_each(F&& f) const {
    for (int n : ns)
      for (double y : ys)
        for (double x : xs) f(n, make_times(x, y, t3));
  }

  std::string describe() const {
    std::ostringstream os;
    os << "n=" << ns.front() << ".." << ns.back() << " x=" << xs.front() << ".." << xs.back() << " (" << xs.size()
       << ") y=" << ys.front() << ".." << ys.back() << " (" << ys.size() << ") t3=" << t3;
    return os.str();
  }
};

/// lo, lo+step, ..., up to hi inclusive (with a half-step tolerance on hi).
inline std::vector<double> linspace_step(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw DomainError("range needs lo <= hi and step > 0");
  std::vector<double> v;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  v.reserve(count);
  for (std::size_t i = 0; i < count; ++i) v.push_back(lo + static_cast<double>(i) * step);
  return v;
}

inline std::vector<int> int_range(int lo, int hi) {
  std::vector<int> v;
  for (int n = lo; n <= hi; ++n) v.push_back(n);
  return v;
}

/// n in -2..3, x and y in -2..2.
inline Grid criterion_grid() { return {int_range(-2, 3), linspace_step(-2, 2, 1), linspace_step(-2, 2, 1), 0.0}; }

/// n in -1..2, x and y in -2..2.
inline Grid acceptance_grid(double t3 = 0.0) {
  return {int_range(-1, 2), linspace_step(-2, 2, 1), linspace_step(-2, 2, 1), t3};
}

/// x and y in [-30, 30] with step 0.5.
inline Grid figure_grid(std::vector<int> ns) {
  return {std::move(ns), linspace_step(-30, 30, 0.5), linspace_step(-30, 30, 0.5), 0.0};
}

/// |a - b| relative to the larger magnitude, floored at `floor`.
inline double relative_error(double a, double b, double floor = 1e-300) {
  const double d = std::abs(a - b);
  if (d == 0.0) return 0.0;
  return d / std::max({std::abs(a), std::abs(b), floor});
}

/// A sample and the magnitude it would have without cancellation.
struct Sample {
  double value;
  double scale;
};

template <class F>
Sample sample(F&& f, int n, const Times& t) {
  if constexpr (requires { f.evaluate(n, t); }) {
    const auto e = f.evaluate(n, t);
    return {e.value, e.scale};
  } else if constexpr (std::is_same_v<decltype(f(n, t)), Sample>) {
    return f(n, t);
  } else {
    const double v = f(n, t);
    return {v, std::abs(v)};
  }
}

/// Largest pointwise |a - b| / max(|a|, |b|, scale_a, scale_b) over a grid.
/// Fields that cross zero are thereby compared at their working magnitude.
template <class A, class B>
double max_relative_error(const Grid& grid, A&& a, B&& b) {
  double worst = 0.0;
  grid.for_each([&](int n, const Times& t) {
    const Sample x = sample(a, n, t), y = sample(b, n, t);
    const double d = std::abs(x.value - y.value);
    if (d == 0.0) return;
    worst = std::max(worst, d / std::max({std::abs(x.value), std::abs(y.value), x.scale, y.scale, 1e-300}));
  });
  return worst;
}

}  // namespace cdkp

#endif  // CDKP_GRID_HPP
