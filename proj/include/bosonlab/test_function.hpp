#ifndef BOSONLAB_TEST_FUNCTION_HPP
#define BOSONLAB_TEST_FUNCTION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bosonlab/errors.hpp"
#include "bosonlab/grid.hpp"

namespace bosonlab {

// Nonnegative bounded profile with compact support on the grid. Compactness
// is encoded as: no occupied cell touches the periodic seam (index 0 or N-1)
// on any axis, so translates never wrap.
struct TestFunction {
  Grid grid;
  std::vector<double> values;         // one per cell
  std::vector<std::size_t> support;   // indices with value > 0
  double sup_norm = 0.0;
  double integral = 0.0;              // h^d * sum of values

  double inner(const std::vector<double>& other_cellwise) const {
    double s = 0.0;
    for (std::size_t i : support) s += values[i] * other_cellwise[i];
    return s * grid.cell_volume();
  }
};

inline TestFunction make_test_function(const Grid& g,
                                       std::vector<double> values,
                                       bool check_seam = true) {
  if (values.size() != g.cell_count())
    throw Error("make_test_function: value count does not match grid");
  TestFunction f;
  f.grid = g;
  f.values = std::move(values);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double v = f.values[i];
    if (!(v >= 0.0))
      throw NegativeWeight("make_test_function: negative or NaN value");
    if (v > 0.0) {
      f.support.push_back(i);
      f.sup_norm = std::max(f.sup_norm, v);
      sum += v;
    }
  }
  f.integral = sum * g.cell_volume();
  if (check_seam && !f.support.empty()) {
    const int N = g.cells_per_side;
    std::vector<int> c(g.dim);
    for (std::size_t i : f.support) {
      g.coords(i, c.data());
      for (int a = 0; a < g.dim; ++a)
        if (c[a] == 0 || c[a] == N - 1)
          throw SupportNotCompact(
              "make_test_function: support touches the periodic seam");
    }
  }
  return f;
}

namespace detail {
template <class Member>
inline TestFunction profile_from_predicate(const Grid& g,
                                           const std::vector<double>& center,
                                           Member member) {
  if (static_cast<int>(center.size()) != g.dim)
    throw Error("profile: center dimension mismatch");
  std::vector<double> vals(g.cell_count(), 0.0);
  std::vector<int> c(g.dim);
  std::vector<double> dx(g.dim);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    g.coords(i, c.data());
    for (int a = 0; a < g.dim; ++a) dx[a] = g.cell_center(c[a]) - center[a];
    vals[i] = member(dx);
  }
  return make_test_function(g, std::move(vals));
}
}  // namespace detail

inline TestFunction make_box_profile(const Grid& g,
                                     const std::vector<double>& center,
                                     double halfwidth, double height) {
  if (!(halfwidth > 0.0) || !(height > 0.0))
    throw Error("box profile: halfwidth and height must be positive");
  return detail::profile_from_predicate(
      g, center, [&](const std::vector<double>& dx) {
        for (double v : dx)
          if (!(std::abs(v) < halfwidth)) return 0.0;
        return height;
      });
}

inline TestFunction make_ball_profile(const Grid& g,
                                      const std::vector<double>& center,
                                      double radius, double height) {
  if (!(radius > 0.0) || !(height > 0.0))
    throw Error("ball profile: radius and height must be positive");
  return detail::profile_from_predicate(
      g, center, [&](const std::vector<double>& dx) {
        double r2 = 0.0;
        for (double v : dx) r2 += v * v;
        return r2 < radius * radius ? height : 0.0;
      });
}

// smooth compactly supported bump h*exp(1 - 1/(1 - (r/R)^2))
inline TestFunction make_bump_profile(const Grid& g,
                                      const std::vector<double>& center,
                                      double radius, double height) {
  if (!(radius > 0.0) || !(height > 0.0))
    throw Error("bump profile: radius and height must be positive");
  return detail::profile_from_predicate(
      g, center, [&](const std::vector<double>& dx) {
        double r2 = 0.0;
        for (double v : dx) r2 += v * v;
        const double u = r2 / (radius * radius);
        if (u >= 1.0) return 0.0;
        return height * std::exp(1.0 - 1.0 / (1.0 - u));
      });
}

// pointwise map on the support; fn must satisfy fn(0) = 0 and fn >= 0
template <class Fn>
inline TestFunction transform_support(const TestFunction& f, Fn fn) {
  TestFunction out;
  out.grid = f.grid;
  out.values.assign(f.values.size(), 0.0);
  out.support = f.support;
  double sum = 0.0;
  for (std::size_t i : f.support) {
    const double v = fn(f.values[i]);
    if (!(v >= 0.0)) throw NegativeWeight("transform_support: negative value");
    out.values[i] = v;
    out.sup_norm = std::max(out.sup_norm, v);
    sum += v;
  }
  out.integral = sum * f.grid.cell_volume();
  return out;
}

// f_kappa^{(+/-)}(x) = +/- kappa^2 (e^{+/- f(x)/kappa^2} - 1); support is
// preserved exactly because expm1(0) = 0.
inline TestFunction scaled_test_function(const TestFunction& f, double kappa,
                                         int sign) {
  if (!(kappa > 0.0)) throw Error("scaled_test_function: kappa > 0 required");
  if (sign != 1 && sign != -1)
    throw Error("scaled_test_function: sign must be +1 or -1");
  const double k2 = kappa * kappa;
  return transform_support(
      f, [k2, sign](double v) { return sign * k2 * std::expm1(sign * v / k2); });
}

}  // namespace bosonlab

#endif
