#ifndef BOSONLAB_ASYMPTOTICS_HPP
#define BOSONLAB_ASYMPTOTICS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "bosonlab/functionals.hpp"
#include "bosonlab/model.hpp"
#include "bosonlab/operator_matrix.hpp"
#include "bosonlab/sampler.hpp"
#include "bosonlab/spectral.hpp"
#include "bosonlab/test_function.hpp"

namespace bosonlab {

// ---------------------------------------------------------------- CGF curves

struct CGFCurve {
  double kappa = 0.0;  // 0 marks the limit curve
  bool is_limit = false;
  std::vector<double> t_values;
  std::vector<double> values;      // kInf marks divergence
  std::vector<double> det_part;    // same layout
  std::vector<double> shift_part;  // same layout
  double pole = kInf;              // divergence boundary in t
};

namespace detail {

inline void check_resolution(const Grid& g, double beta, double kappa) {
  if (std::sqrt(beta) / kappa < g.spacing * (1.0 - 1e-12))
    throw UnderResolved(
        "thermal length sqrt(beta)/kappa is below the grid spacing");
}

// least-squares slope of log(y) against log(x)
inline double log_log_slope(const std::vector<double>& x,
                            const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

// Closed-form limiting scaled CGF: eigen-series of sqrt(f) G sqrt(f) with
// G the inverse-Laplacian kernel. The Det component is exactly linear in t
// with the continuum critical density as slope (the kappa -> infinity limit
// of the grid det densities); the Shifted component keeps the grid-consistent
// rho_eff used by the sampler.
struct LimitCgf {
  double det_density = 0.0;
  double rho_eff = 0.0;
  double integral_f = 0.0;
  Eigen::VectorXd lambda;  // descending, >= 0
  Eigen::VectorXd coeff;   // c_n = <sqrt f, phi_n>^2 h^d

  double pole() const {
    return lambda.size() > 0 && lambda(0) > 0.0 ? 1.0 / lambda(0) : kInf;
  }
  bool finite_at(double t) const {
    return lambda.size() == 0 || t * lambda(0) < 1.0 - 1e-9;
  }
  double det_at(double t) const {
    return finite_at(t) ? det_density * t * integral_f : kInf;
  }
  double shift_at(double t) const {
    if (!finite_at(t)) return kInf;
    double s = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k)
      s += coeff(k) / (1.0 - t * lambda(k));
    return rho_eff * t * s;
  }
  double at(double t) const {
    return finite_at(t) ? det_at(t) + shift_at(t) : kInf;
  }
  // strictly increasing closed-form derivative
  double prime(double t) const {
    double s = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      const double r = 1.0 - t * lambda(k);
      s += coeff(k) / (r * r);
    }
    return det_density * integral_f + rho_eff * s;
  }
};

inline LimitCgf make_limit_cgf(const Grid& g, const ModelParams& p,
                               const TestFunction& f) {
  if (p.phase != Phase::Bec) throw NotCondensed("make_limit_cgf: BEC only");
  LimitCgf lc;
  lc.det_density = p.rho_c_continuum;
  lc.rho_eff = p.rho_eff();
  lc.integral_f = f.integral;
  if (f.support.empty()) return lc;
  const OperatorMatrix G = build_green_kernel(g, p.beta, f.support);
  const OperatorMatrix S = sandwich(f, G);
  const Eigen::VectorXd sq = detail::sqrt_on_basis(f, S.basis);
  const EigenSystem es = eigendecompose(S, &sq);
  lc.lambda = es.eigenvalues;
  lc.coeff.resize(es.eigenvalues.size());
  for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
    const double c = sq.dot(es.eigenvectors.col(k));
    lc.coeff(k) = c * c * S.cell_volume;
  }
  return lc;
}

inline std::tuple<double, double, double> limit_cgf(const Grid& g,
                                                    const ModelParams& p,
                                                    const TestFunction& f,
                                                    double t) {
  const LimitCgf lc = make_limit_cgf(g, p, f);
  return {lc.at(t), lc.det_at(t), lc.shift_at(t)};
}

namespace detail {

// finite-kappa scaled system evaluated on the support block of f
struct FiniteCgf {
  const Grid* grid;
  const TestFunction* f;
  double kappa;
  int d;
  double shift2;        // kappa^d * rho_eff (0 in normal phase)
  double speed;         // kappa^{d-2} (BEC) or kappa^d (normal)
  OperatorMatrix K;     // scaled kernel on the support

  // log E[...] / speed at damping: weight exp(arg*f)-1 sandwiched, where
  // arg = t/kappa^2 for the BEC pipeline and t for the normal one.
  double value(double arg, double* det_out = nullptr,
               double* shift_out = nullptr) const {
    if (arg == 0.0) {
      if (det_out) *det_out = 0.0;
      if (shift_out) *shift_out = 0.0;
      return 0.0;
    }
    if (arg > 0.0 && arg * f->sup_norm > 700.0) {
      // the exponential weight overflows; certainly past the divergence pole
      if (det_out) *det_out = kInf;
      if (shift_out) *shift_out = kInf;
      return kInf;
    }
    const TestFunction w = transform_support(
        *f, [arg](double v) { return std::abs(std::expm1(arg * v)); });
    const OperatorMatrix S = sandwich(w, K);
    const Eigen::VectorXd sq = sqrt_on_basis(w, S.basis);
    const EigenSystem es = eigendecompose(S, &sq);
    double det_log = 0.0, shift_log = 0.0;
    if (arg > 0.0) {
      if (es.eigenvalues.size() > 0 && es.eigenvalues(0) >= 1.0 - 1e-9) {
        if (det_out) *det_out = kInf;
        if (shift_out) *shift_out = kInf;
        return kInf;
      }
      for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k)
        det_log -= std::log1p(-es.eigenvalues(k));
      if (shift2 != 0.0)
        shift_log = shift2 * resolvent_form(sq, es, 1.0, S.cell_volume);
    } else {
      for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k)
        det_log -= std::log1p(es.eigenvalues(k));
      if (shift2 != 0.0)
        shift_log = -shift2 * resolvent_form(sq, es, -1.0, S.cell_volume);
    }
    if (det_out) *det_out = det_log / speed;
    if (shift_out) *shift_out = shift_log / speed;
    return (det_log + shift_log) / speed;
  }

  double top_eigenvalue(double arg) const {
    if (arg > 0.0 && arg * f->sup_norm > 700.0) return kInf;
    const TestFunction w = transform_support(
        *f, [arg](double v) { return std::abs(std::expm1(arg * v)); });
    const OperatorMatrix S = sandwich(w, K);
    const Eigen::VectorXd lam = symmetric_eigenvalues(S.entries);
    return lam.size() > 0 ? lam(0) : 0.0;
  }

  // t* > 0 where the top sandwich eigenvalue hits 1 (the finite-kappa pole);
  // arg_of_t maps the panel variable to the weight exponent.
  double find_pole(double t_to_arg) const {
    double hi = 1.0;
    int guard = 0;
    while (top_eigenvalue(hi * t_to_arg) < 1.0) {
      hi *= 2.0;
      if (++guard > 60) return kInf;
    }
    double lo = hi * 0.5 < 1.0 ? 0.0 : hi * 0.5;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (top_eigenvalue(mid * t_to_arg) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

inline FiniteCgf make_finite_bec(const Grid& g, const ModelParams& p,
                                 const TestFunction& f, double kappa) {
  if (p.phase != Phase::Bec) throw NotCondensed("scaled CGF: BEC only");
  if (!(kappa >= 1.0)) throw Error("scaled CGF: kappa >= 1 required");
  check_resolution(g, p.beta, kappa);
  const double beta_s = p.beta / (kappa * kappa);
  FiniteCgf fc{&g, &f, kappa, g.dim,
               std::pow(kappa, g.dim) * p.rho_eff(),
               std::pow(kappa, g.dim - 2),
               build_kernel_matrix(g, boson_spectral(beta_s), f.support)};
  return fc;
}

inline FiniteCgf make_finite_normal(const Grid& g, const ModelParams& p,
                                    const TestFunction& f, double kappa) {
  if (p.phase != Phase::Normal)
    throw BadFugacity("normal-phase CGF requires a normal-phase model");
  if (!(kappa >= 1.0)) throw Error("scaled CGF: kappa >= 1 required");
  const double beta_s = p.beta / (kappa * kappa);
  FiniteCgf fc{&g, &f, kappa, g.dim, 0.0, std::pow(kappa, g.dim),
               build_kernel_matrix(g, normal_spectral(beta_s, p.z), f.support)};
  return fc;
}

}  // namespace detail

// P_kappa(t) = kappa^{-(d-2)} log E[exp(t kappa^{-2} <f(./kappa), xi>)],
// evaluated through the fixed-grid reduction (beta -> beta/kappa^2,
// shift^2 -> kappa^d rho_eff, weight exp(t f / kappa^2) - 1).
inline double scaled_cgf_finite(const Grid& g, const ModelParams& p,
                                const TestFunction& f, double kappa,
                                double t) {
  const auto fc = detail::make_finite_bec(g, p, f, kappa);
  return fc.value(t / (kappa * kappa));
}

inline CGFCurve finite_cgf_curve(const Grid& g, const ModelParams& p,
                                 const TestFunction& f, double kappa,
                                 const std::vector<double>& t_values) {
  const auto fc = detail::make_finite_bec(g, p, f, kappa);
  const double k2 = kappa * kappa;
  CGFCurve c;
  c.kappa = kappa;
  c.t_values = t_values;
  c.pole = fc.find_pole(1.0 / k2);
  for (double t : t_values) {
    double det = 0.0, shift = 0.0;
    c.values.push_back(fc.value(t / k2, &det, &shift));
    c.det_part.push_back(det);
    c.shift_part.push_back(shift);
  }
  return c;
}

inline CGFCurve limit_cgf_curve(const Grid& g, const ModelParams& p,
                                const TestFunction& f,
                                const std::vector<double>& t_values) {
  const LimitCgf lc = make_limit_cgf(g, p, f);
  CGFCurve c;
  c.is_limit = true;
  c.t_values = t_values;
  c.pole = lc.pole();
  for (double t : t_values) {
    c.values.push_back(lc.at(t));
    c.det_part.push_back(lc.det_at(t));
    c.shift_part.push_back(lc.shift_at(t));
  }
  return c;
}

struct CgfConvergenceRow {
  double kappa, t, p_kappa, p_limit, abs_err;
};

struct CgfConvergenceStudy {
  std::vector<CgfConvergenceRow> rows;
  std::vector<double> t_panel;
  std::vector<double> fitted_order;  // per t, decay order of |P_k - P|
};

inline CgfConvergenceStudy cgf_convergence_study(
    const Grid& g, const ModelParams& p, const TestFunction& f,
    const std::vector<double>& kappas, const std::vector<double>& t_panel) {
  const LimitCgf lc = make_limit_cgf(g, p, f);
  CgfConvergenceStudy st;
  st.t_panel = t_panel;
  std::vector<std::vector<double>> errs(t_panel.size());
  for (double kappa : kappas) {
    const auto fc = detail::make_finite_bec(g, p, f, kappa);
    for (std::size_t i = 0; i < t_panel.size(); ++i) {
      const double t = t_panel[i];
      const double pk = fc.value(t / (kappa * kappa));
      const double pl = lc.at(t);
      const double err = std::abs(pk - pl);
      st.rows.push_back({kappa, t, pk, pl, err});
      errs[i].push_back(err);
    }
  }
  for (std::size_t i = 0; i < t_panel.size(); ++i) {
    if (t_panel[i] == 0.0) {
      st.fitted_order.push_back(kInf);  // identically zero row
      continue;
    }
    bool pos = true;
    for (double e : errs[i]) pos = pos && e > 0.0 && std::isfinite(e);
    st.fitted_order.push_back(
        pos ? -detail::log_log_slope(kappas, errs[i]) : kInf);
  }
  return st;
}

// ---------------------------------------------------------------- rate I(s)

struct RateFunctionTable {
  std::vector<double> s_values;
  std::vector<double> I_values;  // kInf marks the forbidden region
  double s_star = 0.0;           // minimizer, P'(0)
  double pole = kInf;            // 1/lambda_1
  double left_boundary = 0.0;    // I = +inf strictly below this
};

inline RateFunctionTable rate_function(const Grid& g, const ModelParams& p,
                                       const TestFunction& f,
                                       const std::vector<double>& s_values) {
  const LimitCgf lc = make_limit_cgf(g, p, f);
  RateFunctionTable tab;
  tab.s_values = s_values;
  tab.s_star = lc.prime(0.0);
  tab.pole = lc.pole();
  tab.left_boundary = lc.det_density * lc.integral_f;
  for (double s : s_values) {
    if (s < tab.left_boundary - 1e-12) {
      tab.I_values.push_back(kInf);
      continue;
    }
    // bracket P'(t) = s on (t_lo, t_hi)
    double t_hi;
    if (std::isfinite(tab.pole)) {
      double delta = 1e-3 * tab.pole;
      t_hi = tab.pole - delta;
      while (lc.prime(t_hi) <= s) {
        delta *= 0.5;
        t_hi = tab.pole - delta;
        if (delta < 1e-15 * tab.pole)
          throw InternalFault("rate_function: cannot bracket near the pole");
      }
    } else {
      t_hi = 1.0;
      while (lc.prime(t_hi) <= s) t_hi *= 2.0;
    }
    double t_lo = std::min(-1.0, t_hi - 1.0);
    bool bracketed = false;
    while (t_lo > -1e12) {
      if (lc.prime(t_lo) < s) {
        bracketed = true;
        break;
      }
      t_lo *= 2.0;
    }
    if (!bracketed) {
      // s is at (or numerically below) the infimum of P'; treat as forbidden
      tab.I_values.push_back(kInf);
      continue;
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (t_lo + t_hi);
      (lc.prime(mid) < s ? t_lo : t_hi) = mid;
      if (t_hi - t_lo < 1e-12 * std::max(1.0, std::abs(t_hi))) break;
    }
    const double t = 0.5 * (t_lo + t_hi);
    tab.I_values.push_back(s * t - lc.at(t));
  }
  return tab;
}

// ------------------------------------------------------------- CLT and LLN

inline double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

// Kolmogorov-Smirnov distance to the standard normal
inline double ks_statistic(std::vector<double> z) {
  if (z.empty()) throw NoSamples("ks_statistic: no values");
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double c = standard_normal_cdf(z[i]);
    d = std::max(d, std::abs((i + 1) / n - c));
    d = std::max(d, std::abs(c - i / n));
  }
  return d;
}

struct MomentSummary {
  double mean = 0.0, variance = 0.0, skewness = 0.0, excess_kurtosis = 0.0;
};

inline MomentSummary summarize_moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  MomentSummary m;
  for (double v : x) m.mean += v;
  m.mean /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = m2 * n / (n - 1.0);
  m.skewness = m3 / std::pow(m2, 1.5);
  m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  return m;
}

struct CLTReport {
  double kappa = 0.0;
  std::size_t n_samples = 0;
  MomentSummary z;
  double ks = 0.0;
  double normalizer = 0.0;
  double theory_mean = 0.0;
};

// Z_kappa = (<f, xi_kappa> - m_kappa) / normalizer with the phase-appropriate
// normalizer; xi_kappa drawn from the fixed-grid reduction at scale kappa.
inline CLTReport clt_experiment(const Grid& g, const ModelParams& p,
                                const TestFunction& f, double kappa,
                                std::size_t n_samples, const RngSpec& spec) {
  if (n_samples < 1000) throw Error("clt_experiment: n_samples >= 1000");
  detail::check_resolution(g, p.beta, kappa);
  const int d = g.dim;
  const double beta_s = p.beta / (kappa * kappa);
  SpectralWeight sw;
  double shift = 0.0, theory_mean = 0.0, normalizer = 0.0;
  if (p.phase == Phase::Bec) {
    if (!(p.rho > p.rho_c_grid)) throw NotCondensed("clt_experiment");
    sw = boson_spectral(beta_s);
    shift = std::sqrt(std::pow(kappa, d) * p.rho_eff());
    theory_mean = (critical_density_grid(g, beta_s) +
                   std::pow(kappa, d) * p.rho_eff()) *
                  f.integral;
    normalizer = std::sqrt(2.0 * p.rho_eff() *
                           quad_form(g, f.values, green_spectral(p.beta))) *
                 std::pow(kappa, 0.5 * (d + 2));
  } else {
    sw = normal_spectral(beta_s, p.z);
    theory_mean = normal_density_grid(g, beta_s, p.z) * f.integral;
    double k00 = normal_density_grid(g, p.beta, p.z);
    SpectralWeight sq_w = normal_spectral(p.beta, p.z);
    SpectralWeight sw2{[sq_w](double p2) {
                         const double w = sq_w.at(p2);
                         return w * w;
                       },
                       true, sq_w.zero_value * sq_w.zero_value};
    const double k2_00 = mode_sum_density(g, sw2);
    double I2 = 0.0;
    for (std::size_t i : f.support) I2 += f.values[i] * f.values[i];
    I2 *= g.cell_volume();
    normalizer = std::sqrt((k00 + k2_00) * I2) * std::pow(kappa, 0.5 * d);
  }
  auto rng = make_rng(spec);
  Fft fft(g);
  std::vector<double> zs(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k)
    zs[k] = (draw_pair_statistic(g, sw, shift, f, rng, fft) - theory_mean) /
            normalizer;
  CLTReport rep;
  rep.kappa = kappa;
  rep.n_samples = n_samples;
  rep.z = summarize_moments(zs);
  rep.ks = ks_statistic(zs);
  rep.normalizer = normalizer;
  rep.theory_mean = theory_mean;
  return rep;
}

struct LLNRow {
  double kappa = 0.0;
  std::size_t n_samples = 0;
  double mean = 0.0;        // empirical mean of D_kappa
  double mean_se = 0.0;     // its standard error
  double theory_mean = 0.0; // grid-exact scaled mean / kappa^d
  double l2_error = 0.0;    // E[(D_kappa - theory)^2]^{1/2}
};

inline std::vector<LLNRow> lln_experiment(const Grid& g, const ModelParams& p,
                                          const TestFunction& f,
                                          const std::vector<double>& kappas,
                                          std::size_t n_samples,
                                          const RngSpec& spec) {
  if (p.phase != Phase::Bec) throw NotCondensed("lln_experiment: BEC only");
  std::vector<LLNRow> rows;
  std::uint64_t stream = spec.stream;
  for (double kappa : kappas) {
    detail::check_resolution(g, p.beta, kappa);
    const double kd = std::pow(kappa, g.dim);
    const double beta_s = p.beta / (kappa * kappa);
    const SpectralWeight sw = boson_spectral(beta_s);
    const double shift = std::sqrt(kd * p.rho_eff());
    const double theory =
        (critical_density_grid(g, beta_s) + kd * p.rho_eff()) * f.integral /
        kd;
    auto rng = make_rng({spec.seed, stream++});
    Fft fft(g);
    double sum = 0.0, sq_dev = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
      const double dstat =
          draw_pair_statistic(g, sw, shift, f, rng, fft) / kd;
      sum += dstat;
      sum_sq += dstat * dstat;
      const double dev = dstat - theory;
      sq_dev += dev * dev;
    }
    LLNRow row;
    row.kappa = kappa;
    row.n_samples = n_samples;
    row.mean = sum / n_samples;
    const double var =
        (sum_sq - sum * sum / n_samples) / (n_samples - 1.0);
    row.mean_se = std::sqrt(std::max(var, 0.0) / n_samples);
    row.theory_mean = theory;
    row.l2_error = std::sqrt(sq_dev / n_samples);
    rows.push_back(row);
  }
  return rows;
}

// ------------------------------------------------------------- lemma audit

struct LemmaAuditReport {
  std::vector<double> kappas;
  // per-mode spectrum of G - kappa^{-2} K^{beta/kappa^2}, range per kappa
  std::vector<double> k2l_eig_min, k2l_eig_max;
  std::vector<bool> k2l_ok;
  double trace_residual = 0.0;
  bool trace_ok = false;
  double lf_identity_residual = 0.0;
  bool lf_ok = false;
  std::vector<double> k2lf_norm_distances;
  double k2lf_fitted_order = 0.0;
  bool k2lf_ok = false;
  std::vector<double> khs_values;
  double khs_fitted_exponent = 0.0;
  bool khs_ok = false;
  std::vector<bool> fmp_sup_bounds;

  bool all_ok() const {
    bool ok = trace_ok && lf_ok && k2lf_ok && khs_ok;
    for (bool b : k2l_ok) ok = ok && b;
    for (bool b : fmp_sup_bounds) ok = ok && b;
    return ok;
  }
};

inline LemmaAuditReport lemma_audit(const Grid& g, const ModelParams& p,
                                    const TestFunction& f,
                                    const std::vector<double>& kappas) {
  LemmaAuditReport rep;
  rep.kappas = kappas;
  const double beta = p.beta;
  const std::size_t n_modes = g.cell_count();

  double worst_trace = 0.0;
  std::vector<double> fit_kappas;
  for (double kappa : kappas) {
    const double k2 = kappa * kappa;
    const double beta_s = beta / k2;

    // per-momentum-mode difference spectrum (both kernels are diagonal there)
    double lo = kInf, hi = -kInf;
    for (std::size_t i = 0; i < n_modes; ++i) {
      const double p2 = g.momentum_sq(i);
      if (p2 <= 0.0) continue;
      const double diff = 1.0 / (beta * p2) - 1.0 / (k2 * std::expm1(beta_s * p2));
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    rep.k2l_eig_min.push_back(lo);
    rep.k2l_eig_max.push_back(hi);
    rep.k2l_ok.push_back(lo >= -1e-10 && hi <= 0.5 / k2 + 1e-10);

    // trace identity on the support block
    const OperatorMatrix K =
        build_kernel_matrix(g, boson_spectral(beta_s), f.support);
    const OperatorMatrix Sf = sandwich(f, K);
    const double tr = Sf.entries.trace();
    const double expected = critical_density_grid(g, beta_s) * f.integral;
    worst_trace = std::max(worst_trace,
                           std::abs(tr - expected) / std::abs(expected));

    // sandwich-norm distance to sqrt(f) G sqrt(f), worst sign
    const OperatorMatrix G = build_green_kernel(g, beta, f.support);
    const Eigen::MatrixXd Gs = sandwich(f, G).entries;
    double dist = 0.0;
    for (int sign : {+1, -1}) {
      const TestFunction fk = scaled_test_function(f, kappa, sign);
      const Eigen::MatrixXd D =
          Gs - sandwich(fk, K).entries / k2;
      const Eigen::VectorXd lam = symmetric_eigenvalues(D);
      const double nrm = std::max(std::abs(lam(0)),
                                  std::abs(lam(lam.size() - 1)));
      dist = std::max(dist, nrm);

      const double bound = (f.sup_norm * f.sup_norm) / (2.0 * k2) *
                           std::exp(f.sup_norm / k2);
      double sup_dev = 0.0;
      for (std::size_t i : f.support)
        sup_dev = std::max(sup_dev, std::abs(f.values[i] - fk.values[i]));
      rep.fmp_sup_bounds.push_back(sup_dev <= bound * (1.0 + 1e-12));
    }
    rep.k2lf_norm_distances.push_back(dist);

    // Hilbert-Schmidt growth over the support region
    std::vector<double> chi(g.cell_count(), 0.0);
    for (std::size_t i : f.support) chi[i] = 1.0;
    rep.khs_values.push_back(hs_norm_sq(g, chi, boson_spectral(beta_s)));
    fit_kappas.push_back(kappa);
  }
  rep.trace_residual = worst_trace;
  rep.trace_ok = worst_trace <= 1e-10;

  rep.k2lf_fitted_order =
      -detail::log_log_slope(fit_kappas, rep.k2lf_norm_distances);
  rep.k2lf_ok = rep.k2lf_fitted_order >= 1.8;

  std::vector<double> k2s;
  for (double kappa : fit_kappas) k2s.push_back(kappa * kappa);
  rep.khs_fitted_exponent = detail::log_log_slope(k2s, rep.khs_values);
  rep.khs_ok = rep.khs_fitted_exponent <= 2.2;

  // resolvent identity (zero-mode projected form), independent of kappa
  {
    const OperatorMatrix G = build_green_kernel(g, p.beta, f.support);
    const OperatorMatrix S = sandwich(f, G);
    const Eigen::VectorXd sq = detail::sqrt_on_basis(f, S.basis);
    const EigenSystem es = eigendecompose(S, &sq);
    const double lhs = resolvent_form(sq, es, -1.0, S.cell_volume);

    const std::size_t n = g.cell_count();
    std::vector<double> b(n, 0.0);
    for (std::size_t i : f.support) b[i] = f.values[i];
    const auto u = cg_laplacian_plus_potential(g, p.beta, f.values, b);
    const std::vector<double> ones(n, 1.0);
    const auto v = cg_laplacian_plus_potential(g, p.beta, f.values, ones);
    double fu = 0.0, fv = 0.0, zu = 0.0, zv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      fu += b[i] * u[i];
      fv += b[i] * v[i];
      zu += u[i];
      zv += v[i];
    }
    const double form = (fu - fv * zu / zv) * g.cell_volume();
    const double rhs = f.integral - form;
    rep.lf_identity_residual = std::abs(lhs - rhs) / std::abs(lhs);
    rep.lf_ok = rep.lf_identity_residual <= 1e-8;
  }
  return rep;
}

// ------------------------------------------------------- normal-phase curve

// kappa^{-d} log E[e^{t <f(./kappa), xi>}] for the normal-phase determinantal
// measure (no damping of f); finite-kappa only.
inline CGFCurve normal_phase_cgf(const Grid& g, const ModelParams& p,
                                 const TestFunction& f, double kappa,
                                 const std::vector<double>& t_values) {
  const auto fc = detail::make_finite_normal(g, p, f, kappa);
  CGFCurve c;
  c.kappa = kappa;
  c.t_values = t_values;
  c.pole = fc.find_pole(1.0);
  for (double t : t_values) {
    double det = 0.0, shift = 0.0;
    c.values.push_back(fc.value(t, &det, &shift));
    c.det_part.push_back(det);
    c.shift_part.push_back(shift);
  }
  return c;
}

// numeric Legendre transform of a tabulated curve (rate-function proxy)
inline std::vector<double> numeric_legendre(const CGFCurve& curve,
                                            const std::vector<double>& s_values) {
  std::vector<double> out;
  for (double s : s_values) {
    double best = -kInf;
    for (std::size_t i = 0; i < curve.t_values.size(); ++i) {
      if (!std::isfinite(curve.values[i])) continue;
      best = std::max(best, s * curve.t_values[i] - curve.values[i]);
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace bosonlab

#endif
