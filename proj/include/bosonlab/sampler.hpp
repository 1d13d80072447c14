#ifndef BOSONLAB_SAMPLER_HPP
#define BOSONLAB_SAMPLER_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "bosonlab/errors.hpp"
#include "bosonlab/fft.hpp"
#include "bosonlab/functionals.hpp"
#include "bosonlab/grid.hpp"
#include "bosonlab/model.hpp"
#include "bosonlab/spectral.hpp"
#include "bosonlab/test_function.hpp"

namespace bosonlab {

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t x = (state += 0x9e3779b97f4a7c15ULL);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Distinct (seed, stream) pairs map to well-separated mt19937_64 states.
inline std::mt19937_64 make_rng(const RngSpec& spec) {
  std::uint64_t s = spec.seed ^ 0x6a09e667f3bcc909ULL;
  std::uint64_t a = detail::splitmix64(s);
  s ^= spec.stream + 0x243f6a8885a308d3ULL;
  std::uint64_t b = detail::splitmix64(s);
  std::uint64_t c = detail::splitmix64(s);
  std::uint64_t d = detail::splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                    static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
  return std::mt19937_64(seq);
}

struct ComplexField {
  Grid grid;
  std::vector<std::complex<double>> values;
};

struct IntensityField {
  Grid grid;
  std::vector<double> values;
};

struct PointConfiguration {
  Grid grid;
  std::vector<int> counts;
  // optional in-cell uniform coordinates, flattened per point (dim doubles
  // per point, cells in index order)
  std::vector<double> positions;

  long long total() const {
    long long t = 0;
    for (int c : counts) t += c;
    return t;
  }
  double pair_with(const TestFunction& f) const {
    double s = 0.0;
    for (std::size_t i : f.support) s += f.values[i] * counts[i];
    return s;
  }
};

namespace detail {

// eta(x) = L^{-d/2} sum_p sqrt(w(p)) zeta_p e^{ipx}, zeta_p iid standard
// complex normal. Modes are visited in linear index order so the draw is a
// deterministic function of the generator state.
inline void synthesize_field(const Grid& g, const SpectralWeight& sw,
                             std::mt19937_64& rng, Fft& fft) {
  std::normal_distribution<double> nd(0.0, 1.0);
  auto& buf = fft.buffer();
  const std::size_t n = g.cell_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double re = nd(rng), im = nd(rng);
    const double amp = std::sqrt(0.5 * sw.at(g.momentum_sq(i)));
    buf[i] = std::complex<double>(amp * re, amp * im);
  }
  fft.backward();
  const double scale = std::pow(g.length, -0.5 * g.dim);
  for (std::size_t i = 0; i < n; ++i) buf[i] *= scale;
}

inline int poisson_draw(std::mt19937_64& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw BadIntensity("poisson_draw: non-finite or negative mean");
  if (mean == 0.0) return 0;
  std::poisson_distribution<int> pd(mean);
  return pd(rng);
}

}  // namespace detail

inline ComplexField sample_gaussian_field(const Grid& g, double beta,
                                          const RngSpec& spec) {
  if (!(beta > 0.0)) throw Error("sample_gaussian_field: beta > 0");
  auto rng = make_rng(spec);
  Fft fft(g);
  detail::synthesize_field(g, boson_spectral(beta), rng, fft);
  return {g, fft.buffer()};
}

inline IntensityField make_intensity(const ComplexField& field, double shift) {
  if (!(shift >= 0.0)) throw BadShift("make_intensity: shift must be >= 0");
  IntensityField out;
  out.grid = field.grid;
  out.values.resize(field.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = std::norm(field.values[i] + shift);
  return out;
}

inline PointConfiguration sample_cox(const IntensityField& intensity,
                                     const RngSpec& spec,
                                     bool with_positions = false) {
  auto rng = make_rng(spec);
  PointConfiguration out;
  out.grid = intensity.grid;
  const double hd = intensity.grid.cell_volume();
  out.counts.resize(intensity.values.size());
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const Grid& g = intensity.grid;
  std::vector<int> c(g.dim);
  for (std::size_t i = 0; i < out.counts.size(); ++i) {
    out.counts[i] = detail::poisson_draw(rng, intensity.values[i] * hd);
    if (with_positions && out.counts[i] > 0) {
      g.coords(i, c.data());
      for (int k = 0; k < out.counts[i]; ++k)
        for (int a = 0; a < g.dim; ++a)
          out.positions.push_back((c[a] + ud(rng)) * g.spacing);
    }
  }
  return out;
}

enum class SampleVariant { ShiftedField, Superposition };

// One realization of the requested measure via the Cox representation. For
// the BEC convolution the superposition variant splits eta = a + ib into two
// independent real fields of covariance K/2 and superposes Cox((c+a)^2) with
// Cox(b^2); both variants have the same law.
inline PointConfiguration sample_measure(
    MeasureId m, const ModelParams& p, const Grid& g, const RngSpec& spec,
    SampleVariant variant = SampleVariant::ShiftedField) {
  auto rng = make_rng(spec);
  Fft fft(g);
  const double hd = g.cell_volume();
  PointConfiguration out;
  out.grid = g;
  out.counts.assign(g.cell_count(), 0);
  switch (m) {
    case MeasureId::Det:
    case MeasureId::NormalDet: {
      const SpectralWeight sw = m == MeasureId::Det
                                    ? boson_spectral(p.beta)
                                    : normal_spectral(p.beta, p.z);
      detail::synthesize_field(g, sw, rng, fft);
      for (std::size_t i = 0; i < out.counts.size(); ++i)
        out.counts[i] =
            detail::poisson_draw(rng, std::norm(fft.buffer()[i]) * hd);
      return out;
    }
    case MeasureId::Bec: {
      if (!(p.rho > p.rho_c_grid))
        throw NotCondensed("sample_measure: rho <= grid critical density");
      const double c = std::sqrt(p.rho_eff());
      if (variant == SampleVariant::ShiftedField) {
        detail::synthesize_field(g, boson_spectral(p.beta), rng, fft);
        for (std::size_t i = 0; i < out.counts.size(); ++i)
          out.counts[i] = detail::poisson_draw(
              rng, std::norm(fft.buffer()[i] + c) * hd);
      } else {
        detail::synthesize_field(g, boson_spectral(p.beta), rng, fft);
        std::vector<double> a(g.cell_count());
        for (std::size_t i = 0; i < a.size(); ++i)
          a[i] = fft.buffer()[i].real();
        detail::synthesize_field(g, boson_spectral(p.beta), rng, fft);
        for (std::size_t i = 0; i < out.counts.size(); ++i) {
          const double da = c + a[i];
          const double db = fft.buffer()[i].real();
          out.counts[i] = detail::poisson_draw(rng, da * da * hd) +
                          detail::poisson_draw(rng, db * db * hd);
        }
      }
      return out;
    }
    case MeasureId::Shifted:
      throw Error(
          "sample_measure: no Cox driver exists for the shifted component in "
          "isolation");
  }
  throw InternalFault("sample_measure: unreachable");
}

struct MCReport {
  std::complex<double> estimate{0.0, 0.0};
  double stderror = 0.0;
  std::size_t n = 0;
  bool heavy_tail = false;
};

enum class EstimatorKind { Laplace, Char, Exp };

inline MCReport estimate_functional(const std::vector<PointConfiguration>& samples,
                                    const TestFunction& f, EstimatorKind kind,
                                    double lambda = 0.0) {
  if (samples.empty()) throw NoSamples("estimate_functional: no samples");
  const std::size_t n = samples.size();
  std::vector<std::complex<double>> terms(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = samples[k].pair_with(f);
    switch (kind) {
      case EstimatorKind::Laplace:
        terms[k] = std::exp(-s);
        break;
      case EstimatorKind::Char:
        terms[k] = std::exp(std::complex<double>(0.0, lambda * s));
        break;
      case EstimatorKind::Exp:
        terms[k] = std::exp(s);
        break;
    }
  }
  std::complex<double> mean(0.0, 0.0);
  for (const auto& t : terms) mean += t;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const auto& t : terms) var += std::norm(t - mean);
  var /= n > 1 ? static_cast<double>(n - 1) : 1.0;
  MCReport rep;
  rep.estimate = mean;
  rep.stderror = std::sqrt(var / static_cast<double>(n));
  rep.n = n;
  if (kind == EstimatorKind::Exp && n >= 2) {
    std::vector<double> mags(n);
    for (std::size_t k = 0; k < n; ++k) mags[k] = terms[k].real();
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    const std::size_t top = std::max<std::size_t>(1, n / 100);
    double top_sum = 0.0, total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      total += mags[k];
      if (k < top) top_sum += mags[k];
    }
    rep.heavy_tail = top_sum > 0.5 * total;
  }
  return rep;
}

// One draw of <f, xi> for a Cox system with the given spectral weight and
// deterministic shift; Poisson noise is instantiated only on the support of
// f, which leaves the law of the statistic unchanged.
inline double draw_pair_statistic(const Grid& g, const SpectralWeight& sw,
                                  double shift, const TestFunction& f,
                                  std::mt19937_64& rng, Fft& fft) {
  detail::synthesize_field(g, sw, rng, fft);
  const double hd = g.cell_volume();
  double acc = 0.0;
  for (std::size_t i : f.support) {
    const double lam = std::norm(fft.buffer()[i] + shift) * hd;
    acc += f.values[i] * detail::poisson_draw(rng, lam);
  }
  return acc;
}

}  // namespace bosonlab

#endif
