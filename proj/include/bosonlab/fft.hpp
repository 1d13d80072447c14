#ifndef BOSONLAB_FFT_HPP
#define BOSONLAB_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <vector>

#include "bosonlab/grid.hpp"

namespace bosonlab {

// Thin RAII wrapper around an in-place c2c FFTW transform on the grid's cell
// lattice. FFTW_ESTIMATE keeps planning deterministic and cheap; plans are
// reused across calls for sampling loops.
class Fft {
 public:
  explicit Fft(const Grid& g) : n_(g.cell_count()), buf_(n_) {
    dims_.assign(static_cast<std::size_t>(g.dim), g.cells_per_side);
    auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
    fwd_ = fftw_plan_dft(g.dim, dims_.data(), p, p, FFTW_FORWARD,
                         FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft(g.dim, dims_.data(), p, p, FFTW_BACKWARD,
                         FFTW_ESTIMATE);
  }
  ~Fft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const { return n_; }
  std::vector<std::complex<double>>& buffer() { return buf_; }

  // unnormalized: X_k = sum_j x_j e^{-2*pi*i*k*j/N}
  void forward() { fftw_execute(fwd_); }
  // unnormalized: x_j = sum_k X_k e^{+2*pi*i*k*j/N}
  void backward() { fftw_execute(bwd_); }

 private:
  std::size_t n_;
  std::vector<std::complex<double>> buf_;
  std::vector<int> dims_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

}  // namespace bosonlab

#endif
