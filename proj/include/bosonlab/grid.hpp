#ifndef BOSONLAB_GRID_HPP
#define BOSONLAB_GRID_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "bosonlab/errors.hpp"

namespace bosonlab {

// Periodic box [0,L)^d with N cells per side. Cell centers sit at
// x = (k + 1/2) h; the dual momentum lattice is p = 2*pi*k/L with the signed
// index k in [-N/2, N/2)^d, one mode per cell (row-major, last axis fastest,
// matching FFT layout).
struct Grid {
  int dim = 0;
  double length = 0.0;
  int cells_per_side = 0;
  double spacing = 0.0;

  std::size_t cell_count() const {
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(cells_per_side);
    return n;
  }
  double cell_volume() const { return std::pow(spacing, dim); }

  void coords(std::size_t idx, int* out) const {
    for (int a = dim - 1; a >= 0; --a) {
      out[a] = static_cast<int>(idx % cells_per_side);
      idx /= cells_per_side;
    }
  }
  std::size_t index(const int* c) const {
    std::size_t idx = 0;
    for (int a = 0; a < dim; ++a)
      idx = idx * cells_per_side + static_cast<std::size_t>(c[a]);
    return idx;
  }
  double cell_center(int k) const { return (k + 0.5) * spacing; }

  // signed momentum index for axis coordinate k in [0,N)
  int signed_mode(int k) const {
    return k < cells_per_side / 2 ? k : k - cells_per_side;
  }
  double momentum_component(int k) const {
    return 2.0 * M_PI * signed_mode(k) / length;
  }
  // |p|^2 of the mode with linear index idx
  double momentum_sq(std::size_t idx) const {
    double s = 0.0;
    for (int a = dim - 1; a >= 0; --a) {
      int k = static_cast<int>(idx % cells_per_side);
      idx /= cells_per_side;
      double p = momentum_component(k);
      s += p * p;
    }
    return s;
  }
};

inline Grid make_grid(int d, double L, int N) {
  if (d < 3) throw DimensionTooLow("make_grid: d must be >= 3");
  if (N < 4 || N % 2 != 0)
    throw BadResolution("make_grid: N must be even and >= 4");
  if (!(L > 0.0)) throw BadResolution("make_grid: L must be positive");
  Grid g;
  g.dim = d;
  g.length = L;
  g.cells_per_side = N;
  g.spacing = L / N;
  return g;
}

inline bool same_grid(const Grid& a, const Grid& b) {
  return a.dim == b.dim && a.length == b.length &&
         a.cells_per_side == b.cells_per_side;
}

}  // namespace bosonlab

#endif
