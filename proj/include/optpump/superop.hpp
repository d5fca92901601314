#ifndef OPTPUMP_SUPEROP_HPP
#define OPTPUMP_SUPEROP_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "optpump/error.hpp"
#include "optpump/model.hpp"
#include "optpump/operators.hpp"
#include "optpump/types.hpp"

namespace optpump {

// vec(rho)[i*N + j] = rho(i, j), so vec(A rho B) = (A kron B^T) vec(rho).
enum class Vectorization { RowMajor, ColumnMajor };

/// Dense N^2 x N^2 generator. Only RowMajor matrices are produced by this
/// library; the tag exists so consumers can refuse mislabelled input.
struct SuperOperatorMatrix {
  ComplexMatrix data;
  int n = 0;  // Hilbert dimension N
  Vectorization vectorization = Vectorization::RowMajor;

  int dim() const noexcept { return n * n; }
};

inline void require_row_major(const SuperOperatorMatrix& m) {
  if (m.vectorization != Vectorization::RowMajor)
    throw Error(Errc::VectorizationMismatch, "expected a row-major vectorized generator");
  if (m.data.rows() != m.dim() || m.data.cols() != m.dim())
    throw Error(Errc::DimensionMismatch, "generator dimension is not N^2");
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kPsdTol = 1e-10;

  static DensityMatrix from_matrix(ComplexMatrix rho, double hermitian_tol = kHermitianTol,
                                   double trace_tol = kTraceTol, double psd_tol = kPsdTol) {
    if (rho.rows() != rho.cols() || rho.rows() == 0)
      throw Error(Errc::DimensionMismatch, "density matrix must be square and non-empty");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > hermitian_tol)
      throw Error(Errc::InvalidArgument, "density matrix is not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0)) > trace_tol)
      throw Error(Errc::InvalidArgument, "density matrix trace differs from 1");
    const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -psd_tol)
      throw Error(Errc::InvalidArgument, "density matrix has a negative eigenvalue");
    DensityMatrix d;
    d.rho_ = std::move(rho);
    return d;
  }

  /// |n><n| for a zero-based basis index.
  static DensityMatrix pure(int index, int dim) {
    if (index < 0 || index >= dim) throw Error(Errc::OutOfRange, "basis index outside 0..N-1");
    DensityMatrix d;
    d.rho_ = ComplexMatrix::Zero(dim, dim);
    d.rho_(index, index) = 1.0;
    return d;
  }

  /// |s,l><s,l| of the ladder.
  static DensityMatrix basis_state(const LadderModel& model, int l, Sector s) {
    return pure(state_index(l, s, model.l_max()) - 1, model.dim());
  }

  const ComplexMatrix& matrix() const noexcept { return rho_; }
  int dim() const noexcept { return static_cast<int>(rho_.rows()); }

 private:
  DensityMatrix() = default;
  ComplexMatrix rho_;
};

inline ComplexVector vectorize(const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols()) throw Error(Errc::DimensionMismatch, "vectorize expects a square matrix");
  const Eigen::Index n = rho.rows();
  ComplexVector v(n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) v(i * n + j) = rho(i, j);
  return v;
}

inline ComplexVector vectorize(const DensityMatrix& rho) { return vectorize(rho.matrix()); }

inline ComplexMatrix devectorize(const ComplexVector& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) throw Error(Errc::DimensionMismatch, "vector length is not a perfect square");
  ComplexMatrix rho(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) rho(i, j) = v(i * n + j);
  return rho;
}

/// Hamiltonian plus jump list; the shared input of every generator builder.
struct LindbladGenerator {
  ComplexMatrix h;
  std::vector<JumpOperator> jumps;
  Eigen::VectorXd loss;  // diagonal of sum_k L_k^+ L_k

  int dim() const noexcept { return static_cast<int>(h.rows()); }
};

inline LindbladGenerator make_generator(const LadderModel& model) {
  LindbladGenerator g;
  g.h = hamiltonian(model);
  g.jumps = jump_operators(model);
  g.loss = Eigen::VectorXd::Zero(model.dim());
  for (const auto& op : g.jumps) g.loss(op.source) += op.rate();
  return g;
}

/// Matrix-form right-hand side: -i[H, rho] + sum_k (L rho L^+ - 1/2 {L^+ L, rho}).
inline ComplexMatrix apply_lindbladian(const LindbladGenerator& g, const ComplexMatrix& rho) {
  ComplexMatrix out = -kI * (g.h * rho - rho * g.h);
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.cols(); ++j) out(i, j) -= 0.5 * (g.loss(i) + g.loss(j)) * rho(i, j);
  for (const auto& op : g.jumps) out(op.target, op.target) += op.rate() * rho(op.source, op.source);
  return out;
}

/// Calls emit(i, j, value) for every nonzero entry of L(|a><b|).
template <class Emit>
void apply_to_unit(const LindbladGenerator& g, int a, int b, Emit&& emit) {
  const int n = g.dim();
  for (int i = 0; i < n; ++i) {
    const cplx hia = g.h(i, a);
    if (hia != 0.0) emit(i, b, -kI * hia);
  }
  for (int j = 0; j < n; ++j) {
    const cplx hbj = g.h(b, j);
    if (hbj != 0.0) emit(a, j, kI * hbj);
  }
  const double loss = g.loss(a) + g.loss(b);
  if (loss != 0.0) emit(a, b, cplx(-0.5 * loss));
  if (a == b)
    for (const auto& op : g.jumps)
      if (op.source == a) emit(op.target, op.target, cplx(op.rate()));
}

inline constexpr int kMaxDenseHilbertDim = 32;

/// M = -i(H kron I - I kron H^T) + sum_k [L kron conj(L) - 1/2 (L^+L) kron I - 1/2 I kron (L^+L)^T].
inline SuperOperatorMatrix liouvillian_matrix(const LadderModel& model, int max_hilbert_dim = kMaxDenseHilbertDim) {
  const int n = model.dim();
  if (n > max_hilbert_dim)
    throw Error(Errc::DimensionTooLarge,
                "dense generator limited to N <= " + std::to_string(max_hilbert_dim) + "; use the block path");
  const LindbladGenerator g = make_generator(model);
  const int d = n * n;
  SuperOperatorMatrix m;
  m.n = n;
  m.data = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const cplx hik = g.h(i, k);
      const cplx hki = g.h(k, i);
      if (hik == 0.0 && hki == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        m.data(i * n + j, k * n + j) += -kI * hik;  // H kron I
        m.data(j * n + i, j * n + k) += kI * hki;   // I kron H^T
      }
    }
  for (const auto& op : g.jumps) {
    const int s = op.source;
    const int t = op.target;
    const double rate = op.rate();
    m.data(t * n + t, s * n + s) += rate;
    for (int j = 0; j < n; ++j) {
      m.data(s * n + j, s * n + j) -= 0.5 * rate;
      m.data(j * n + s, j * n + s) -= 0.5 * rate;
    }
  }
  return m;
}

/// ||vec(I)^T M||_inf; zero for a trace-preserving generator.
inline double trace_preservation_residual(const SuperOperatorMatrix& m) {
  require_row_major(m);
  if (m.dim() == 0) return 0.0;
  ComplexVector row = ComplexVector::Zero(m.dim());
  for (int i = 0; i < m.n; ++i) row += m.data.row(i * m.n + i).transpose();
  return row.cwiseAbs().maxCoeff();
}

}  // namespace optpump

#endif  // OPTPUMP_SUPEROP_HPP
