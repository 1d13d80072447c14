#ifndef BOSONLAB_OPERATOR_MATRIX_HPP
#define BOSONLAB_OPERATOR_MATRIX_HPP

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "bosonlab/errors.hpp"
#include "bosonlab/grid.hpp"
#include "bosonlab/spectral.hpp"
#include "bosonlab/test_function.hpp"

namespace bosonlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense positional representation of a kernel restricted to a cell subset.
// Convention: entries(i,j) = kernel(x_i, x_j) * h^d, so matrix products,
// traces and eigenvalues line up with their operator counterparts.
struct OperatorMatrix {
  std::vector<std::size_t> basis;  // cell indices, ascending
  Eigen::MatrixXd entries;
  double cell_volume = 1.0;

  Eigen::Index rank_bound() const { return entries.rows(); }
};

inline std::vector<std::size_t> full_basis(const Grid& g) {
  std::vector<std::size_t> b(g.cell_count());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = i;
  return b;
}

inline OperatorMatrix build_kernel_matrix(const Grid& g,
                                          const SpectralWeight& sw,
                                          const std::vector<std::size_t>& basis) {
  const auto tab = kernel_table(g, sw);
  const double hd = g.cell_volume();
  const int n = static_cast<int>(basis.size());
  const int N = g.cells_per_side;
  std::vector<std::vector<int>> coords(n, std::vector<int>(g.dim));
  for (int i = 0; i < n; ++i) g.coords(basis[i], coords[i].data());
  OperatorMatrix M;
  M.basis = basis;
  M.cell_volume = hd;
  M.entries.resize(n, n);
  std::vector<int> disp(g.dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      for (int a = 0; a < g.dim; ++a)
        disp[a] = ((coords[i][a] - coords[j][a]) % N + N) % N;
      const double v = tab[g.index(disp.data())] * hd;
      M.entries(i, j) = v;
      M.entries(j, i) = v;
    }
  return M;
}

inline OperatorMatrix build_boson_kernel(const Grid& g, double beta,
                                         const std::vector<std::size_t>& basis) {
  if (!(beta > 0.0)) throw Error("build_boson_kernel: beta > 0");
  return build_kernel_matrix(g, boson_spectral(beta), basis);
}
inline OperatorMatrix build_green_kernel(const Grid& g, double beta,
                                         const std::vector<std::size_t>& basis) {
  if (!(beta > 0.0)) throw Error("build_green_kernel: beta > 0");
  return build_kernel_matrix(g, green_spectral(beta), basis);
}
inline OperatorMatrix build_normal_kernel(const Grid& g, double beta, double z,
                                          const std::vector<std::size_t>& basis) {
  return build_kernel_matrix(g, normal_spectral(beta, z), basis);
}

// sqrt(a_i) M_ij sqrt(a_j) restricted to {i : a_i > 0}; the weight's support
// must be contained in M's basis.
inline OperatorMatrix sandwich(const std::vector<double>& weights,
                               const OperatorMatrix& M) {
  for (double w : weights)
    if (!(w >= 0.0)) throw NegativeWeight("sandwich: negative weight entry");
  std::unordered_map<std::size_t, int> pos;
  pos.reserve(M.basis.size());
  for (std::size_t k = 0; k < M.basis.size(); ++k)
    pos.emplace(M.basis[k], static_cast<int>(k));
  std::vector<std::size_t> sub;
  std::vector<int> src;
  std::vector<double> sq;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) {
      auto it = pos.find(i);
      if (it == pos.end())
        throw Error("sandwich: weight support not contained in matrix basis");
      sub.push_back(i);
      src.push_back(it->second);
      sq.push_back(std::sqrt(weights[i]));
    }
  }
  OperatorMatrix S;
  S.basis = sub;
  S.cell_volume = M.cell_volume;
  const int n = static_cast<int>(sub.size());
  S.entries.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      S.entries(i, j) = sq[i] * M.entries(src[i], src[j]) * sq[j];
  return S;
}

inline OperatorMatrix sandwich(const TestFunction& weight,
                               const OperatorMatrix& M) {
  return sandwich(weight.values, M);
}

struct EigenSystem {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, matching order
};

namespace detail {
// dsyevd (divide and conquer): robust on the heavily degenerate spectra that
// translation-invariant blocks produce. Eigenvalues come back ascending; A is
// overwritten with eigenvectors when requested.
inline Eigen::VectorXd dsyevd(Eigen::MatrixXd& A, bool vectors) {
  const int n = static_cast<int>(A.rows());
  Eigen::VectorXd lam(n);
  if (n == 0) return lam;
  const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L',
                                  n, A.data(), n, lam.data());
  if (info != 0)
    throw EigenFailure("symmetric eigensolver failed (dsyevd info != 0)");
  return lam;
}
}  // namespace detail

// raw symmetric spectrum (descending), no clipping — for difference matrices
inline Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& A) {
  Eigen::MatrixXd S = 0.5 * (A + A.transpose());
  return detail::dsyevd(S, false).reverse();
}

// Full eigensystem, descending, with tiny negative round-off clipped to 0.
// If sign_context is given (vector over the basis), eigenvectors are flipped
// so <context, phi_n> >= 0; otherwise the first nonzero component is positive.
inline EigenSystem eigendecompose(const OperatorMatrix& M,
                                  const Eigen::VectorXd* sign_context = nullptr) {
  Eigen::MatrixXd S = 0.5 * (M.entries + M.entries.transpose());
  const Eigen::VectorXd raw = detail::dsyevd(S, true);  // S now holds vectors
  const Eigen::Index n = raw.size();
  EigenSystem out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  const double norm =
      n > 0 ? std::max(std::abs(raw(0)), std::abs(raw(n - 1))) : 0.0;
  const double clip = 1e-10 * norm;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = n - 1 - k;  // LAPACK returns ascending
    double lam = raw(src);
    if (lam < 0.0 && lam > -clip) lam = 0.0;
    out.eigenvalues(k) = lam;
    Eigen::VectorXd v = S.col(src);
    double s = 0.0;
    if (sign_context) {
      s = sign_context->dot(v);
    } else {
      for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(v(i)) > 1e-12 * (1.0 + std::abs(lam))) {
          s = v(i);
          break;
        }
    }
    if (s < 0.0) v = -v;
    out.eigenvectors.col(k) = v;
  }
  return out;
}

inline double log_det_1p(const OperatorMatrix& M) {
  const Eigen::VectorXd lam = symmetric_eigenvalues(M.entries);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (lam(k) <= -1.0 + 1e-12)
      throw DeterminantSingular("log_det_1p: eigenvalue at or below -1");
    sum += std::log1p(lam(k));
  }
  return sum;
}

inline double log_det2(const OperatorMatrix& M) {
  const Eigen::VectorXd lam = symmetric_eigenvalues(M.entries);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (lam(k) <= -1.0 + 1e-12)
      throw DeterminantSingular("log_det2: eigenvalue at or below -1");
    sum += std::log1p(lam(k)) - lam(k);
  }
  return sum;
}

// sum_n <v, phi_n>^2 / (1 - t lambda_n) * h^d, or +inf past the pole
inline double resolvent_form(const Eigen::VectorXd& v, const EigenSystem& es,
                             double t, double cell_volume) {
  const Eigen::Index n = es.eigenvalues.size();
  if (n > 0 && t * es.eigenvalues(0) >= 1.0 - 1e-9) return kInf;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double c = v.dot(es.eigenvectors.col(k));
    sum += c * c / (1.0 - t * es.eigenvalues(k));
  }
  return sum * cell_volume;
}

// debugging dump: header i,j,value
inline void dump_csv(const OperatorMatrix& M, std::ostream& os) {
  os << "i,j,value\n";
  for (Eigen::Index i = 0; i < M.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < M.entries.cols(); ++j)
      os << M.basis[i] << ',' << M.basis[j] << ',' << M.entries(i, j) << '\n';
}

}  // namespace bosonlab

#endif
