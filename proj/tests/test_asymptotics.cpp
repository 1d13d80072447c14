#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bosonlab/bosonlab.hpp"

using namespace bosonlab;

namespace {

struct Setup {
  Grid g;
  ModelParams p;
  TestFunction f;
};

// coarse BEC workspace fast enough for unit tests (resolution guard allows
// kappa <= 4 at h = 0.25)
Setup bec_setup() {
  Grid g = make_grid(3, 4.0, 16);
  ModelParams p = make_bec_params(g, 1.0, 0.117287);
  TestFunction f = make_box_profile(g, {2.0, 2.0, 2.0}, 0.5, 1.0);
  return {g, p, f};
}

}  // namespace

TEST_CASE("limit CGF: trivia, derivative, components, pole") {
  const auto [g, p, f] = bec_setup();
  const LimitCgf lc = make_limit_cgf(g, p, f);
  SECTION("value and components vanish at t = 0") {
    const auto [P, Pd, Ps] = limit_cgf(g, p, f, 0.0);
    CHECK(P == 0.0);
    CHECK(Pd == 0.0);
    CHECK(Ps == 0.0);
  }
  SECTION("P'(0) equals the limiting density times the integral") {
    // sum of c_n telescopes to integral(f) by completeness of the eigenbasis
    const double expected = (lc.det_density + p.rho_eff()) * f.integral;
    CHECK(lc.prime(0.0) == Catch::Approx(expected).epsilon(1e-10));
  }
  SECTION("components add up exactly and the curve is convex") {
    double prev = 0.0, prev2 = 0.0;
    int k = 0;
    for (double t = -6.0; t <= 0.9 * lc.pole(); t += 0.5) {
      const double v = lc.at(t);
      CHECK(std::abs(v - lc.det_at(t) - lc.shift_at(t)) <=
            1e-12 * std::max(1.0, std::abs(v)));
      if (k >= 2) CHECK(v - 2.0 * prev + prev2 >= -1e-8);
      prev2 = prev;
      prev = v;
      ++k;
    }
  }
  SECTION("divergence at the pole") {
    const double pole = lc.pole();
    REQUIRE(std::isfinite(pole));
    CHECK(lc.at(pole) == kInf);
    CHECK(lc.at(2.0 * pole) == kInf);
    CHECK(lc.at(0.999 * pole) > lc.at(0.99 * pole));
    CHECK(std::isfinite(lc.at((1.0 - 1e-6) * pole)));
  }
  SECTION("normal phase is rejected") {
    const Grid g8 = make_grid(3, 8.0, 16);
    const ModelParams np = make_normal_params(g8, 1.0, 0.5);
    const TestFunction f8 = make_box_profile(g8, {4, 4, 4}, 1.0, 1.0);
    CHECK_THROWS_AS(make_limit_cgf(g8, np, f8), NotCondensed);
  }
}

TEST_CASE("finite-kappa scaled CGF") {
  const auto [g, p, f] = bec_setup();
  SECTION("t = 0 gives 0") {
    CHECK(scaled_cgf_finite(g, p, f, 2.0, 0.0) == 0.0);
  }
  SECTION("convex in t on the finite region") {
    const CGFCurve c = finite_cgf_curve(g, p, f, 2.0,
                                        {-4.0, -2.0, -1.0, 0.0, 1.0, 2.0});
    // chord slopes nondecreasing (the panel is not equally spaced)
    double prev_slope = -kInf;
    for (std::size_t i = 1; i < c.values.size(); ++i) {
      const double slope = (c.values[i] - c.values[i - 1]) /
                           (c.t_values[i] - c.t_values[i - 1]);
      CHECK(slope >= prev_slope - 1e-8);
      prev_slope = slope;
    }
    CHECK(c.values[3] == 0.0);
  }
  SECTION("divergence dichotomy against the top eigenvalue") {
    const CGFCurve c = finite_cgf_curve(g, p, f, 2.0, {});
    REQUIRE(std::isfinite(c.pole));
    CHECK(scaled_cgf_finite(g, p, f, 2.0, 1.05 * c.pole) == kInf);
    CHECK(std::isfinite(scaled_cgf_finite(g, p, f, 2.0, 0.95 * c.pole)));
  }
  SECTION("resolution guard") {
    CHECK_THROWS_AS(scaled_cgf_finite(g, p, f, 64.0, 1.0), UnderResolved);
  }
}

TEST_CASE("CGF convergence study basics") {
  const auto [g, p, f] = bec_setup();
  const std::vector<double> kappas = {2.0, 4.0};
  const auto st = cgf_convergence_study(g, p, f, kappas, {-1.0, 0.0, 0.5});
  REQUIRE(st.rows.size() == 6);
  for (const auto& r : st.rows) {
    if (r.t == 0.0) CHECK(r.abs_err == 0.0);
  }
  // per-t errors shrink from kappa=2 to kappa=4
  for (std::size_t i = 0; i < 3; ++i) {
    if (st.t_panel[i] == 0.0) continue;
    CHECK(st.rows[3 + i].abs_err < st.rows[i].abs_err);
  }
}

TEST_CASE("rate function: minimum, convexity, forbidden region, sup check") {
  const auto [g, p, f] = bec_setup();
  const LimitCgf lc = make_limit_cgf(g, p, f);
  const double s_star = lc.prime(0.0);
  const double left = lc.det_density * f.integral;
  std::vector<double> s_values = {0.5 * left,         0.5 * (left + s_star),
                                  s_star,             1.2 * s_star,
                                  1.5 * s_star,       2.0 * s_star};
  const RateFunctionTable tab = rate_function(g, p, f, s_values);
  CHECK(tab.s_star == Catch::Approx(s_star));
  CHECK(tab.left_boundary == Catch::Approx(left));
  CHECK(tab.I_values[0] == kInf);
  CHECK(std::abs(tab.I_values[2]) <= 1e-8);
  for (std::size_t i = 1; i < tab.I_values.size(); ++i) {
    if (!std::isfinite(tab.I_values[i])) continue;
    CHECK(tab.I_values[i] >= -1e-14);
  }
  // convexity on the equally spaced finite tail
  const double a = tab.I_values[2], b = tab.I_values[3], c = tab.I_values[4];
  CHECK(c - 2.0 * b + a >= -1e-8);
  SECTION("bisection value matches a dense-grid supremum") {
    const double s = 1.3 * s_star;
    const double I = rate_function(g, p, f, {s}).I_values[0];
    double best = -kInf;
    const double hi = 0.999999 * lc.pole();
    for (int k = 0; k <= 2000000; ++k) {
      const double t = -10.0 + (hi + 10.0) * k / 2000000.0;
      best = std::max(best, s * t - lc.at(t));
    }
    CHECK(I == Catch::Approx(best).margin(1e-6));
  }
}

TEST_CASE("KS harness self-test and moment summary") {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> nd;
  std::vector<double> z(2000);
  for (double& v : z) v = nd(rng);
  CHECK(ks_statistic(z) < 1.63 / std::sqrt(2000.0));
  const MomentSummary m = summarize_moments(z);
  CHECK(std::abs(m.mean) < 4.0 / std::sqrt(2000.0));
  CHECK(m.variance == Catch::Approx(1.0).margin(0.15));
  CHECK(std::abs(m.skewness) < 0.25);
  CHECK(std::abs(m.excess_kurtosis) < 0.5);
  CHECK_THROWS_AS(ks_statistic({}), NoSamples);
}

TEST_CASE("CLT experiment runs and reports sane statistics") {
  const auto [g, p, f] = bec_setup();
  const CLTReport rep = clt_experiment(g, p, f, 4.0, 1000, {7, 0});
  CHECK(rep.kappa == 4.0);
  CHECK(rep.n_samples == 1000);
  CHECK(rep.normalizer > 0.0);
  CHECK(rep.z.variance > 0.3);
  CHECK(rep.z.variance < 3.0);
  CHECK(std::abs(rep.z.mean) < 0.5);
  CHECK(rep.ks < 0.25);
  CHECK_THROWS_AS(clt_experiment(g, p, f, 4.0, 10, {7, 0}), Error);
}

TEST_CASE("LLN experiment: zeros for f == 0, decay for a box profile") {
  const auto [g, p, f] = bec_setup();
  SECTION("f == 0 gives exact zeros") {
    std::vector<double> zv(g.cell_count(), 0.0);
    const TestFunction zf = make_test_function(g, std::move(zv));
    const auto rows = lln_experiment(g, p, zf, {2.0, 4.0}, 50, {7, 0});
    for (const auto& r : rows) {
      CHECK(r.mean == 0.0);
      CHECK(r.l2_error == 0.0);
    }
  }
  SECTION("empirical mean near theory, error decreasing in kappa") {
    const auto rows = lln_experiment(g, p, f, {2.0, 4.0}, 400, {7, 0});
    for (const auto& r : rows)
      CHECK(std::abs(r.mean - r.theory_mean) < 4.0 * r.mean_se);
    CHECK(rows[1].l2_error < rows[0].l2_error);
  }
}

TEST_CASE("lemma audit passes on the reference workspace") {
  const Grid g = make_grid(3, 8.0, 32);
  const ModelParams p = make_bec_params(g, 1.0, 0.117287);
  const TestFunction f = make_box_profile(g, {4, 4, 4}, 1.0, 1.0);
  const LemmaAuditReport rep = lemma_audit(g, p, f, {4.0, 8.0, 16.0});
  CHECK(rep.trace_residual <= 1e-10);
  CHECK(rep.lf_identity_residual <= 1e-8);
  for (std::size_t i = 0; i < rep.kappas.size(); ++i) {
    CHECK(rep.k2l_eig_min[i] >= -1e-10);
    CHECK(rep.k2l_eig_max[i] <=
          0.5 / (rep.kappas[i] * rep.kappas[i]) + 1e-10);
  }
  CHECK(rep.k2lf_fitted_order >= 1.8);
  CHECK(rep.khs_fitted_exponent <= 2.2);
  CHECK(rep.all_ok());
}

TEST_CASE("normal-phase CGF: slope, convexity, divergence marker") {
  const Grid g = make_grid(3, 8.0, 16);
  const ModelParams p = make_normal_params(g, 1.0, 0.5);
  const TestFunction f = make_box_profile(g, {4, 4, 4}, 1.0, 1.0);
  const double kappa = 2.0;
  const CGFCurve c =
      normal_phase_cgf(g, p, f, kappa, {-0.5, -0.25, 0.25, 0.5});
  CHECK(c.kappa == kappa);
  SECTION("slope at 0 is the scaled-system mean density times integral(f)") {
    const double eps = 1e-4;
    const CGFCurve fd = normal_phase_cgf(g, p, f, kappa, {-eps, eps});
    const double slope = (fd.values[1] - fd.values[0]) / (2.0 * eps);
    // d/dt at 0 of the speed-normalized log moment: trace of f K_z^{beta_s}
    // over kappa^d
    const double expected =
        normal_density_grid(g, 1.0 / (kappa * kappa), p.z) * f.integral /
        std::pow(kappa, g.dim);
    CHECK(slope == Catch::Approx(expected).epsilon(1e-4));
  }
  SECTION("convex where finite") {
    std::vector<double> ft, fv;
    for (std::size_t i = 0; i < c.values.size(); ++i)
      if (std::isfinite(c.values[i])) {
        ft.push_back(c.t_values[i]);
        fv.push_back(c.values[i]);
      }
    double prev_slope = -kInf;
    for (std::size_t i = 1; i < fv.size(); ++i) {
      const double slope = (fv[i] - fv[i - 1]) / (ft[i] - ft[i - 1]);
      CHECK(slope >= prev_slope - 1e-8);
      prev_slope = slope;
    }
  }
  SECTION("numeric Legendre proxy is nonnegative at tabulated s") {
    const auto proxy = numeric_legendre(c, {0.01, 0.02});
    for (double v : proxy) CHECK(v >= -1e-9);
  }
  SECTION("BEC CGF at speed kappa^d tends to 0 at fixed t") {
    const auto [gb, pb, fb] = bec_setup();
    double prev = kInf;
    for (double kap : {2.0, 4.0}) {
      const double at_speed_d =
          scaled_cgf_finite(gb, pb, fb, kap, 0.5) / (kap * kap);
      CHECK(at_speed_d < prev);
      prev = at_speed_d;
    }
  }
}
