// Reference implementations used only by the tests. They are built directly
// from the model definition with Eigen's Kronecker product and matrix
// exponential and share no code with the library's generator builders.
#ifndef OPTPUMP_TESTS_ORACLES_HPP
#define OPTPUMP_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct Params {
  int lmax = 4;
  std::vector<double> omega;  // lmax-1 entries
  std::vector<double> rabi;   // lmax entries, last one is the wrap link
  double g0 = 0.0, g1 = 1.0, g2 = 0.0;
  bool pbc = false;
  bool wrap_jumps = false;
};

inline Params uniform(int lmax, double rabi, double omega, double g0, double g1, bool pbc = false) {
  Params p;
  p.lmax = lmax;
  p.omega.assign(static_cast<std::size_t>(lmax - 1), omega);
  p.rabi.assign(static_cast<std::size_t>(lmax), rabi);
  p.g0 = g0;
  p.g1 = g1;
  p.pbc = pbc;
  return p;
}

// |g,l> is basis vector 2(l-1), |e,l> is 2(l-1)+1
inline int g(int l) { return 2 * (l - 1); }
inline int e(int l) { return 2 * (l - 1) + 1; }

inline Mat ket_bra(int n, int a, int b) {
  Mat m = Mat::Zero(n, n);
  m(a, b) = 1.0;
  return m;
}

inline Mat hamiltonian(const Params& p) {
  const int n = 2 * p.lmax;
  Mat h = Mat::Zero(n, n);
  double energy = 0.0;
  for (int l = 2; l <= p.lmax; ++l) {
    energy += p.omega[static_cast<std::size_t>(l - 2)];
    h += energy * (ket_bra(n, g(l), g(l)) + ket_bra(n, e(l), e(l)));
  }
  for (int l = 1; l < p.lmax; ++l)
    h += p.rabi[static_cast<std::size_t>(l - 1)] * (ket_bra(n, e(l), g(l + 1)) + ket_bra(n, g(l + 1), e(l)));
  if (p.pbc) h += p.rabi.back() * (ket_bra(n, e(p.lmax), g(1)) + ket_bra(n, g(1), e(p.lmax)));
  return h;
}

inline std::vector<Mat> jumps(const Params& p) {
  const int n = 2 * p.lmax;
  std::vector<Mat> ls;
  for (int l = 1; l <= p.lmax; ++l) {
    if (p.g0 > 0 && l < p.lmax) ls.push_back(std::sqrt(p.g0) * ket_bra(n, g(l + 1), e(l)));
    if (p.g1 > 0) ls.push_back(std::sqrt(p.g1) * ket_bra(n, g(l), e(l)));
    if (p.g2 > 0 && l < p.lmax) ls.push_back(std::sqrt(p.g2) * ket_bra(n, g(l), e(l + 1)));
  }
  if (p.pbc && p.wrap_jumps) {
    if (p.g0 > 0) ls.push_back(std::sqrt(p.g0) * ket_bra(n, g(1), e(p.lmax)));
    if (p.g2 > 0) ls.push_back(std::sqrt(p.g2) * ket_bra(n, g(p.lmax), e(1)));
  }
  return ls;
}

/// Row-major vectorization: vec(A X B) = (A kron B^T) vec(X).
inline Mat liouvillian(const Params& p) {
  const Mat h = hamiltonian(p);
  const int n = static_cast<int>(h.rows());
  const Mat id = Mat::Identity(n, n);
  Mat m = -cd(0, 1) * (Eigen::kroneckerProduct(h, id).eval() - Eigen::kroneckerProduct(id, h.transpose()).eval());
  for (const Mat& l : jumps(p)) {
    const Mat ll = l.adjoint() * l;
    m += Eigen::kroneckerProduct(l, l.conjugate()).eval();
    m -= 0.5 * Eigen::kroneckerProduct(ll, id).eval();
    m -= 0.5 * Eigen::kroneckerProduct(id, ll.transpose()).eval();
  }
  return m;
}

inline Mat apply(const Params& p, const Mat& rho) {
  const Mat h = hamiltonian(p);
  Mat out = -cd(0, 1) * (h * rho - rho * h);
  for (const Mat& l : jumps(p)) {
    const Mat ll = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll);
  }
  return out;
}

inline Vec vec(const Mat& rho) {
  const Eigen::Index n = rho.rows();
  Vec v(n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) v(i * n + j) = rho(i, j);
  return v;
}

inline Mat unvec(const Vec& v, Eigen::Index n) {
  Mat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = v(i * n + j);
  return m;
}

/// rho(t) = unvec(exp(M t) vec(rho0)).
inline Mat propagate(const Params& p, const Mat& rho0, double t) {
  const Mat m = liouvillian(p) * t;
  return unvec(m.exp() * vec(rho0), rho0.rows());
}

inline std::vector<cd> eigenvalues(const Mat& m) {
  Eigen::ComplexEigenSolver<Mat> es(m, false);
  std::vector<cd> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return v;
}

/// Greedy nearest matching distance; adequate when the multisets are close
/// and well separated. Independent of the library's Hungarian matcher.
inline double greedy_distance(std::vector<cd> a, std::vector<cd> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (const cd& z : a) {
    std::size_t best = 0;
    double d = INFINITY;
    for (std::size_t k = 0; k < b.size(); ++k)
      if (std::abs(z - b[k]) < d) {
        d = std::abs(z - b[k]);
        best = k;
      }
    worst = std::max(worst, d);
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return worst;
}

}  // namespace oracle

#endif  // OPTPUMP_TESTS_ORACLES_HPP
