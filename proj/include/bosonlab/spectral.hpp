#ifndef BOSONLAB_SPECTRAL_HPP
#define BOSONLAB_SPECTRAL_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "bosonlab/errors.hpp"
#include "bosonlab/fft.hpp"
#include "bosonlab/grid.hpp"
#include "bosonlab/zeta.hpp"

namespace bosonlab {

// Spectral weight of a translation-invariant kernel on the momentum lattice.
// include_zero controls whether the p = 0 mode participates; for the heat
// kernel family and the inverse Laplacian it must not (the weight diverges
// there and the condensate is carried by the explicit shift instead).
struct SpectralWeight {
  std::function<double(double)> w;  // weight as a function of |p|^2 > 0
  bool include_zero = false;
  double zero_value = 0.0;

  double at(double p2) const {
    if (p2 <= 0.0) return include_zero ? zero_value : 0.0;
    return w(p2);
  }
};

inline SpectralWeight boson_spectral(double beta) {
  return {[beta](double p2) { return 1.0 / std::expm1(beta * p2); }, false,
          0.0};
}
inline SpectralWeight green_spectral(double beta) {
  return {[beta](double p2) { return 1.0 / (beta * p2); }, false, 0.0};
}
inline SpectralWeight normal_spectral(double beta, double z) {
  if (!(z > 0.0 && z < 1.0))
    throw BadFugacity("normal_spectral: z must lie in (0,1)");
  return {[beta, z](double p2) {
            double e = z * std::exp(-beta * p2);
            return e / (1.0 - e);
          },
          true, z / (1.0 - z)};
}

inline double critical_density_continuum(double beta, int d) {
  if (d < 3) throw DimensionTooLow("critical_density_continuum: d >= 3");
  if (!(beta > 0.0)) throw Error("critical_density_continuum: beta > 0");
  return riemann_zeta(0.5 * d) / std::pow(4.0 * M_PI * beta, 0.5 * d);
}

// (1/L^d) sum over lattice modes of the weight.
inline double mode_sum_density(const Grid& g, const SpectralWeight& sw) {
  double sum = 0.0;
  const std::size_t n = g.cell_count();
  for (std::size_t i = 0; i < n; ++i) sum += sw.at(g.momentum_sq(i));
  return sum / std::pow(g.length, g.dim);
}

inline double critical_density_grid(const Grid& g, double beta) {
  if (!(beta > 0.0)) throw Error("critical_density_grid: beta > 0");
  return mode_sum_density(g, boson_spectral(beta));
}

// grid density of the normal-phase kernel K_z (zero mode included)
inline double normal_density_grid(const Grid& g, double beta, double z) {
  return mode_sum_density(g, normal_spectral(beta, z));
}

// Real-space kernel table over displacements:
//   tab[r] = (1/L^d) sum_p w(p) e^{i p . (r h)},  r in (Z/N)^d row-major.
// Real by the +/- p symmetry of the weights.
inline std::vector<double> kernel_table(const Grid& g,
                                        const SpectralWeight& sw) {
  Fft fft(g);
  auto& buf = fft.buffer();
  const std::size_t n = g.cell_count();
  for (std::size_t i = 0; i < n; ++i)
    buf[i] = std::complex<double>(sw.at(g.momentum_sq(i)), 0.0);
  fft.backward();
  const double scale = 1.0 / std::pow(g.length, g.dim);
  std::vector<double> tab(n);
  for (std::size_t i = 0; i < n; ++i) tab[i] = buf[i].real() * scale;
  return tab;
}

// <u, K v> = (1/L^d) sum_p w(p) conj(u_hat) v_hat with u_hat = h^d DFT(u);
// specialized to u = v (all uses here are real quadratic forms).
inline double quad_form(const Grid& g, const std::vector<double>& f,
                        const SpectralWeight& sw) {
  Fft fft(g);
  auto& buf = fft.buffer();
  const std::size_t n = g.cell_count();
  for (std::size_t i = 0; i < n; ++i) buf[i] = f[i];
  fft.forward();
  const double hd = g.cell_volume();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    sum += sw.at(g.momentum_sq(i)) * std::norm(buf[i]);
  return sum * hd * hd / std::pow(g.length, g.dim);
}

// circular autocorrelation C_r = sum_j u_j u_{j+r}
inline std::vector<double> autocorrelation(const Grid& g,
                                           const std::vector<double>& u) {
  Fft fft(g);
  auto& buf = fft.buffer();
  const std::size_t n = g.cell_count();
  for (std::size_t i = 0; i < n; ++i) buf[i] = u[i];
  fft.forward();
  for (std::size_t i = 0; i < n; ++i) buf[i] = std::norm(buf[i]);
  fft.backward();
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = buf[i].real() / double(n);
  return c;
}

// Tr[uK uK] = sum_{ij} u_i u_j (tab[i-j] h^d)^2, via the autocorrelation of u.
inline double trace_pair(const Grid& g, const std::vector<double>& u,
                         const SpectralWeight& sw) {
  auto tab = kernel_table(g, sw);
  auto c = autocorrelation(g, u);
  const double hd = g.cell_volume();
  double sum = 0.0;
  for (std::size_t i = 0; i < tab.size(); ++i) sum += tab[i] * tab[i] * c[i];
  return sum * hd * hd;
}

// ||K restricted to the cells flagged in chi||_HS^2
inline double hs_norm_sq(const Grid& g, const std::vector<double>& chi,
                         const SpectralWeight& sw) {
  return trace_pair(g, chi, sw);
}

// spectral Laplacian action: (Q v)_j with Q = -beta*Laplace, zero mode -> 0
inline void laplacian_apply(const Grid& g, double beta, Fft& fft,
                            const std::vector<double>& v,
                            std::vector<double>& out) {
  auto& buf = fft.buffer();
  const std::size_t n = g.cell_count();
  for (std::size_t i = 0; i < n; ++i) buf[i] = v[i];
  fft.forward();
  for (std::size_t i = 0; i < n; ++i) buf[i] *= beta * g.momentum_sq(i);
  fft.backward();
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real() / double(n);
}

// Conjugate-gradient solve of (Q + diag(pot)) x = b with Q applied
// spectrally. The operator is PD whenever pot is nonnegative and not
// identically zero (Q annihilates only constants).
inline std::vector<double> cg_laplacian_plus_potential(
    const Grid& g, double beta, const std::vector<double>& pot,
    const std::vector<double>& b, double tol = 1e-13, int max_iter = 2000) {
  const std::size_t n = g.cell_count();
  Fft fft(g);
  std::vector<double> x(n, 0.0), r = b, p = b, ap(n);
  double rs = 0.0, bs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rs += r[i] * r[i];
    bs += b[i] * b[i];
  }
  const double stop = tol * tol * bs;
  for (int it = 0; it < max_iter && rs > stop; ++it) {
    laplacian_apply(g, beta, fft, p, ap);
    for (std::size_t i = 0; i < n; ++i) ap[i] += pot[i] * p[i];
    double pap = 0.0;
    for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
    const double alpha = rs / pap;
    double rs_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rs_new += r[i] * r[i];
    }
    const double bgrad = rs_new / rs;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + bgrad * p[i];
    rs = rs_new;
  }
  return x;
}

}  // namespace bosonlab

#endif
