#ifndef BOSONLAB_FUNCTIONALS_HPP
#define BOSONLAB_FUNCTIONALS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <utility>

#include "bosonlab/model.hpp"
#include "bosonlab/operator_matrix.hpp"
#include "bosonlab/spectral.hpp"
#include "bosonlab/test_function.hpp"

namespace bosonlab {

// log of a generating-functional value; +inf is an explicit marker (finite =
// false), never the result of overflowing arithmetic.
struct FunctionalValue {
  std::complex<double> log_value{0.0, 0.0};
  bool finite = true;

  double real_log() const { return finite ? log_value.real() : kInf; }
  static FunctionalValue infinite() { return {{kInf, 0.0}, false}; }
};

namespace detail {

inline SpectralWeight measure_weight(MeasureId m, const ModelParams& p) {
  if (m == MeasureId::NormalDet) return normal_spectral(p.beta, p.z);
  return boson_spectral(p.beta);
}

inline double measure_rho_eff(MeasureId m, const ModelParams& p) {
  return (m == MeasureId::Shifted || m == MeasureId::Bec) ? p.rho_eff() : 0.0;
}

inline Eigen::VectorXd sqrt_on_basis(const TestFunction& w,
                                     const std::vector<std::size_t>& basis) {
  Eigen::VectorXd v(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k)
    v(static_cast<Eigen::Index>(k)) = std::sqrt(w.values[basis[k]]);
  return v;
}

}  // namespace detail

// E[e^{-<f, xi>}]: Det branch -log Det[1 + K_f] with K_f the (1-e^{-f})
// sandwich; Shifted branch -rho_eff <w, (1+K_f)^{-1} w>, w = sqrt(1-e^{-f});
// BEC is their exact sum.
inline FunctionalValue laplace_functional(MeasureId m, const Grid& g,
                                          const ModelParams& p,
                                          const TestFunction& f) {
  if (f.support.empty()) return {};
  const TestFunction w =
      transform_support(f, [](double v) { return -std::expm1(-v); });
  const OperatorMatrix K =
      build_kernel_matrix(g, detail::measure_weight(m, p), w.support);
  const OperatorMatrix S = sandwich(w, K);
  const Eigen::VectorXd sq = detail::sqrt_on_basis(w, S.basis);
  const EigenSystem es = eigendecompose(S, &sq);
  double det_log = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k)
    det_log -= std::log1p(es.eigenvalues(k));
  double out = 0.0;
  if (m == MeasureId::Det || m == MeasureId::Bec || m == MeasureId::NormalDet)
    out += det_log;
  const double re = detail::measure_rho_eff(m, p);
  if (re != 0.0) out -= re * resolvent_form(sq, es, -1.0, S.cell_volume);
  return {{out, 0.0}, true};
}

// E[e^{+<f, xi>}], divergent past the Thm-2.1 threshold: with
// S = sandwich(e^f - 1, K), finite iff lambda_1(S) < 1.
inline FunctionalValue exp_functional(MeasureId m, const Grid& g,
                                      const ModelParams& p,
                                      const TestFunction& f) {
  if (f.support.empty()) return {};
  const TestFunction w =
      transform_support(f, [](double v) { return std::expm1(v); });
  const OperatorMatrix K =
      build_kernel_matrix(g, detail::measure_weight(m, p), w.support);
  const OperatorMatrix S = sandwich(w, K);
  const Eigen::VectorXd sq = detail::sqrt_on_basis(w, S.basis);
  const EigenSystem es = eigendecompose(S, &sq);
  if (es.eigenvalues.size() > 0 && es.eigenvalues(0) >= 1.0 - 1e-9)
    return FunctionalValue::infinite();
  double det_log = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k)
    det_log -= std::log1p(-es.eigenvalues(k));
  double out = 0.0;
  if (m == MeasureId::Det || m == MeasureId::Bec || m == MeasureId::NormalDet)
    out += det_log;
  const double re = detail::measure_rho_eff(m, p);
  if (re != 0.0) {
    const double form = resolvent_form(sq, es, 1.0, S.cell_volume);
    if (form == kInf) return FunctionalValue::infinite();
    out += re * form;
  }
  return {{out, 0.0}, true};
}

// E[e^{i lambda <f, xi>}] via a complex LU on the support block: with
// g = 1 - e^{i lambda f}, Det branch -log det(I + A diag(g)) and Shifted
// branch -rho_eff h^d g^T (I + A diag(g))^{-1} 1 (the bilinear continuation
// of the sandwiched resolvent form).
inline FunctionalValue char_functional(MeasureId m, const Grid& g,
                                       const ModelParams& p,
                                       const TestFunction& f, double lambda) {
  using cd = std::complex<double>;
  if (f.support.empty() || lambda == 0.0) return {};
  const OperatorMatrix A =
      build_kernel_matrix(g, detail::measure_weight(m, p), f.support);
  const Eigen::Index n = A.entries.rows();
  Eigen::VectorXcd gv(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double fl = lambda * f.values[A.basis[k]];
    gv(k) = cd(1.0 - std::cos(fl), -std::sin(fl));
  }
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(n, n);
  M.noalias() += A.entries.cast<cd>() * gv.asDiagonal();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
  cd logdet(0.0, 0.0);
  const double scale = M.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < n; ++k) {
    const cd d = lu.matrixLU()(k, k);
    if (std::abs(d) < 1e-14 * scale)
      throw DeterminantSingular(
          "char_functional: support-block determinant is singular");
    logdet += std::log(d);
  }
  if (lu.permutationP().determinant() < 0) logdet += cd(0.0, M_PI);
  cd out(0.0, 0.0);
  if (m == MeasureId::Det || m == MeasureId::Bec || m == MeasureId::NormalDet)
    out -= logdet;
  const double re = detail::measure_rho_eff(m, p);
  if (re != 0.0) {
    const Eigen::VectorXcd u = lu.solve(Eigen::VectorXcd::Ones(n));
    out -= re * A.cell_volume * gv.cwiseProduct(u).sum();  // bilinear g^T u
  }
  return {out, true};
}

// Exact first and second moments of <f, xi>, with grid densities so the
// sampler means match exactly.
inline std::pair<double, double> mean_variance(MeasureId m, const Grid& g,
                                               const ModelParams& p,
                                               const TestFunction& f) {
  if (f.support.empty()) return {0.0, 0.0};
  double I2 = 0.0;
  for (std::size_t i : f.support) I2 += f.values[i] * f.values[i];
  I2 *= g.cell_volume();
  const SpectralWeight sw = detail::measure_weight(m, p);
  const double tr = trace_pair(g, f.values, sw);
  const double det_density = m == MeasureId::NormalDet
                                 ? normal_density_grid(g, p.beta, p.z)
                                 : p.rho_c_grid;
  double mean = 0.0, var = 0.0;
  if (m == MeasureId::Det || m == MeasureId::Bec ||
      m == MeasureId::NormalDet) {
    mean += det_density * f.integral;
    var += det_density * I2 + tr;
  }
  const double re = detail::measure_rho_eff(m, p);
  if (re != 0.0) {
    mean += re * f.integral;
    var += re * I2 + 2.0 * re * quad_form(g, f.values, sw);
  }
  return {mean, var};
}

// Leading-order CLT variance 2 kappa^{d+2} rho_eff <f, G f> against the full
// variance of the kappa-scaled system (fixed grid, beta -> beta/kappa^2,
// shift^2 -> kappa^d rho_eff).
inline std::pair<double, double> scaled_variance(const Grid& g,
                                                 const ModelParams& p,
                                                 const TestFunction& f,
                                                 double kappa) {
  if (p.phase != Phase::Bec) throw NotCondensed("scaled_variance: BEC only");
  if (!(kappa >= 1.0)) throw Error("scaled_variance: kappa >= 1 required");
  if (f.support.empty()) return {0.0, 0.0};
  const int d = g.dim;
  const double leading = 2.0 * std::pow(kappa, d + 2) * p.rho_eff() *
                         quad_form(g, f.values, green_spectral(p.beta));
  const double beta_s = p.beta / (kappa * kappa);
  double I2 = 0.0;
  for (std::size_t i : f.support) I2 += f.values[i] * f.values[i];
  I2 *= g.cell_volume();
  const SpectralWeight sw = boson_spectral(beta_s);
  const double shift2 = std::pow(kappa, d) * p.rho_eff();
  const double full = critical_density_grid(g, beta_s) * I2 +
                      trace_pair(g, f.values, sw) + shift2 * I2 +
                      2.0 * shift2 * quad_form(g, f.values, sw);
  return {leading, full};
}

}  // namespace bosonlab

#endif
