#ifndef OPTPUMP_SPECTRAL_HPP
#define OPTPUMP_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "optpump/error.hpp"
#include "optpump/superop.hpp"
#include "optpump/types.hpp"

namespace optpump {

/// Relative threshold separating steady (|Re| <= eps) from decaying modes.
inline constexpr double kSteadyEpsilon = 1e-9;
/// Eigenvalues within this (relative) distance of lambda_2 are treated as one
/// numerically split cluster when extracting the gap.
inline constexpr double kGapClusterRadius = 1e-6;
inline constexpr int kMaxDenseSuperDim = kMaxDenseHilbertDim * kMaxDenseHilbertDim;

/// Descending real part, ties broken by ascending imaginary part.
inline bool spectral_order(const cplx& a, const cplx& b) noexcept {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() < b.imag();
}

struct SpectrumResult {
  Eigenvalues eigenvalues;  // sorted by spectral_order
  std::optional<ComplexMatrix> right_eigenvectors;  // columns, unit norm
  std::optional<ComplexMatrix> left_eigenvectors;   // columns, unit norm, <l_m|r_n> = 0 for m != n
  double basis_condition = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::size_t> steady_indices;
  double steady_threshold = 0.0;
  double gap = 0.0;
};

inline double steady_threshold_for(const Eigenvalues& eigs) {
  double scale = 0.0;
  for (const auto& z : eigs) scale = std::max(scale, std::abs(z.real()));
  return kSteadyEpsilon * scale;
}

/// Delta = |Re lambda_2|, lambda_2 the leading eigenvalue outside the steady
/// set. Defective eigenvalues come out of a dense solver split by ~sqrt(eps);
/// the real parts of the cluster around lambda_2 are averaged, which restores
/// O(eps) accuracy.
inline double liouvillian_gap(const SpectrumResult& spec) {
  if (spec.eigenvalues.empty()) throw Error(Errc::EmptySpectrum, "no eigenvalues");
  const auto& eigs = spec.eigenvalues;
  std::vector<cplx> decaying;
  decaying.reserve(eigs.size());
  for (const auto& z : eigs)
    if (std::abs(z.real()) > spec.steady_threshold) decaying.push_back(z);
  if (decaying.empty()) return 0.0;
  const cplx lead = *std::min_element(decaying.begin(), decaying.end(), spectral_order);
  double scale = 1.0;
  for (const auto& z : eigs) scale = std::max(scale, std::abs(z.real()));
  const double radius = kGapClusterRadius * scale;
  double sum = 0.0;
  int count = 0;
  for (const auto& z : decaying)
    if (std::abs(z - lead) <= radius) {
      sum += z.real();
      ++count;
    }
  return std::abs(sum / count);
}

/// Sorts eigenvalues and derives the steady set and gap.
inline SpectrumResult make_spectrum(Eigenvalues eigs) {
  std::sort(eigs.begin(), eigs.end(), spectral_order);
  SpectrumResult r;
  r.eigenvalues = std::move(eigs);
  r.steady_threshold = steady_threshold_for(r.eigenvalues);
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
    if (std::abs(r.eigenvalues[i].real()) <= r.steady_threshold) r.steady_indices.push_back(i);
  if (!r.eigenvalues.empty()) r.gap = liouvillian_gap(r);
  return r;
}

/// Eigenvalues of an arbitrary dense complex matrix.
inline Eigenvalues dense_eigenvalues(const ComplexMatrix& a) {
  if (a.rows() == 0) return {};
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a, false);
  if (es.info() != Eigen::Success) throw Error(Errc::SolverFailure, "complex eigensolver did not converge");
  const auto& v = es.eigenvalues();
  return Eigenvalues(v.data(), v.data() + v.size());
}

inline SpectrumResult full_spectrum(const SuperOperatorMatrix& m, bool want_vectors = false,
                                    int max_dim = kMaxDenseSuperDim) {
  require_row_major(m);
  if (m.dim() > max_dim)
    throw Error(Errc::DimensionTooLarge, "dense eigensolve limited to dimension " + std::to_string(max_dim));
  if (!want_vectors) return make_spectrum(dense_eigenvalues(m.data));

  Eigen::ComplexEigenSolver<ComplexMatrix> es(m.data, true);
  if (es.info() != Eigen::Success) throw Error(Errc::SolverFailure, "complex eigensolver did not converge");
  const Eigen::Index d = m.data.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& vals = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return spectral_order(vals(a), vals(b)); });

  Eigenvalues sorted(static_cast<std::size_t>(d));
  ComplexMatrix right(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    sorted[static_cast<std::size_t>(k)] = vals(src);
    right.col(k) = es.eigenvectors().col(src).normalized();
  }
  // Rows of V^{-1} are the dual basis; their adjoints are left eigenvectors.
  ComplexMatrix left = right.partialPivLu().inverse().adjoint();
  for (Eigen::Index k = 0; k < d; ++k) left.col(k).normalize();

  Eigen::BDCSVD<ComplexMatrix> svd(right);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();

  SpectrumResult r = make_spectrum(sorted);  // already sorted; order unchanged
  r.right_eigenvectors = std::move(right);
  r.left_eigenvectors = std::move(left);
  r.basis_condition = cond;
  return r;
}

// ---------------------------------------------------------------------------
// Steady states

/// Maps a basis coordinate of a (restricted) generator to the entry (i, j) of rho.
struct SectorEmbedding {
  int n = 0;  // Hilbert dimension
  std::vector<std::pair<int, int>> entries;

  static SectorEmbedding full(int n) {
    SectorEmbedding e;
    e.n = n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) e.entries.emplace_back(i, j);
    return e;
  }

  ComplexMatrix to_matrix(const ComplexVector& v) const {
    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    for (std::size_t k = 0; k < entries.size(); ++k)
      rho(entries[k].first, entries[k].second) = v(static_cast<Eigen::Index>(k));
    return rho;
  }
};

struct SteadySpace {
  std::vector<ComplexMatrix> basis;  // Hermitized, trace-normalized where possible
  int extra_modes = 0;  // zero modes known to exist but not represented in basis

  int dimension() const noexcept { return static_cast<int>(basis.size()) + extra_modes; }
  bool degenerate() const noexcept { return dimension() > 1; }
};

inline ComplexMatrix hermitize_normalize(const ComplexMatrix& rho) {
  ComplexMatrix h = 0.5 * (rho + rho.adjoint());
  const cplx tr = h.trace();
  if (std::abs(tr) > 0.0) h /= tr.real();
  return h;
}

/// Null space of a generator restricted to the sectors listed in `embed`.
inline SteadySpace steady_space(const ComplexMatrix& gen, const SectorEmbedding& embed) {
  const Eigen::Index d = gen.rows();
  if (d == 0 || static_cast<std::size_t>(d) != embed.entries.size())
    throw Error(Errc::DimensionMismatch, "generator and embedding disagree");
  Eigen::ComplexEigenSolver<ComplexMatrix> es(gen, true);
  if (es.info() != Eigen::Success) throw Error(Errc::SolverFailure, "complex eigensolver did not converge");
  const auto& vals = es.eigenvalues();
  double scale = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) scale = std::max(scale, std::abs(vals(k).real()));
  const double eps = kSteadyEpsilon * std::max(scale, 1.0);
  std::vector<Eigen::Index> zeros;
  for (Eigen::Index k = 0; k < d; ++k)
    if (std::abs(vals(k)) <= eps) zeros.push_back(k);
  if (zeros.empty()) throw Error(Errc::SolverFailure, "generator has no zero eigenvalue");

  SteadySpace out;
  if (zeros.size() == 1) {
    // Solve [G; tr] x = [0; 1] in the least-squares sense for full accuracy.
    ComplexMatrix a(d + 1, d);
    a.topRows(d) = gen;
    a.row(d).setZero();
    for (std::size_t k = 0; k < embed.entries.size(); ++k)
      if (embed.entries[k].first == embed.entries[k].second) a(d, static_cast<Eigen::Index>(k)) = 1.0;
    ComplexVector rhs = ComplexVector::Zero(d + 1);
    rhs(d) = 1.0;
    const ComplexVector x = a.colPivHouseholderQr().solve(rhs);
    out.basis.push_back(hermitize_normalize(embed.to_matrix(x)));
    return out;
  }
  for (Eigen::Index k : zeros) out.basis.push_back(hermitize_normalize(embed.to_matrix(es.eigenvectors().col(k))));
  return out;
}

inline DensityMatrix density_from_steady(const SteadySpace& space) {
  if (space.degenerate())
    throw Error(Errc::DegenerateSteadySpace,
                "steady space has dimension " + std::to_string(space.dimension()));
  return DensityMatrix::from_matrix(space.basis.front(), 1e-12, 1e-12, 1e-10);
}

/// Unique steady state of a dense generator.
inline DensityMatrix steady_state(const SuperOperatorMatrix& m) {
  require_row_major(m);
  return density_from_steady(steady_space(m.data, SectorEmbedding::full(m.n)));
}

// ---------------------------------------------------------------------------
// Spectral enclosure

struct EnclosureReport {
  std::size_t inside = 0;
  std::size_t outside = 0;
  std::size_t excluded = 0;
  std::size_t loop_points = 0;
  bool identical = false;

  std::size_t testable() const noexcept { return inside + outside; }
  double inside_fraction() const noexcept {
    return testable() == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(testable());
  }
};

namespace detail {

inline double min_distance(const cplx& z, const Eigenvalues& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : set) best = std::min(best, std::abs(z - w));
  return best;
}

inline double cross(const cplx& a, const cplx& b, const cplx& c) {
  return (b.real() - a.real()) * (c.imag() - a.imag()) - (c.real() - a.real()) * (b.imag() - a.imag());
}

/// Winding number of a closed polygon around z.
inline int winding_number(const std::vector<cplx>& poly, const cplx& z) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const cplx& a = poly[i];
    const cplx& b = poly[(i + 1) % n];
    if (a.imag() <= z.imag()) {
      if (b.imag() > z.imag() && cross(a, b, z) > 0.0) ++wn;
    } else if (b.imag() <= z.imag() && cross(a, b, z) < 0.0) {
      --wn;
    }
  }
  return wn;
}

}  // namespace detail

/// Orders the boundary-sensitive PBC eigenvalues (those farther than eps from
/// every OBC eigenvalue) into a loop by angle around their centroid, ties by
/// radius, and counts OBC eigenvalues with nonzero winding. OBC eigenvalues
/// within eps of any PBC eigenvalue are excluded.
inline EnclosureReport spectrum_encloses(const Eigenvalues& pbc, const Eigenvalues& obc, double eps) {
  EnclosureReport rep;
  std::vector<cplx> loop;
  for (const auto& z : pbc) {
    if (detail::min_distance(z, obc) <= eps) continue;
    bool dup = false;
    for (const auto& w : loop)
      if (std::abs(z - w) <= eps) {
        dup = true;
        break;
      }
    if (!dup) loop.push_back(z);
  }
  std::vector<cplx> testable;
  for (const auto& z : obc) {
    if (detail::min_distance(z, pbc) <= eps)
      ++rep.excluded;
    else
      testable.push_back(z);
  }
  rep.loop_points = loop.size();
  if (loop.empty() && testable.empty()) {
    rep.identical = true;
    return rep;
  }
  if (loop.size() < 3) throw Error(Errc::DegenerateLoop, "fewer than three distinct loop points");

  cplx centroid{0.0, 0.0};
  for (const auto& z : loop) centroid += z;
  centroid /= static_cast<double>(loop.size());
  // Collinearity: every point on the line through the two most distant points.
  const cplx p0 = loop.front();
  cplx far = p0;
  for (const auto& z : loop)
    if (std::abs(z - p0) > std::abs(far - p0)) far = z;
  double spread = 0.0;
  for (const auto& z : loop) spread = std::max(spread, std::abs(detail::cross(p0, far, z)) / std::abs(far - p0));
  if (spread <= eps) throw Error(Errc::DegenerateLoop, "loop points are collinear");

  std::sort(loop.begin(), loop.end(), [&](const cplx& a, const cplx& b) {
    const double ta = std::arg(a - centroid);
    const double tb = std::arg(b - centroid);
    if (ta != tb) return ta < tb;
    return std::abs(a - centroid) < std::abs(b - centroid);
  });
  for (const auto& z : testable) {
    if (detail::winding_number(loop, z) != 0)
      ++rep.inside;
    else
      ++rep.outside;
  }
  return rep;
}

}  // namespace optpump

#endif  // OPTPUMP_SPECTRAL_HPP
