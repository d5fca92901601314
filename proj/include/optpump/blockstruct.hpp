#ifndef OPTPUMP_BLOCKSTRUCT_HPP
#define OPTPUMP_BLOCKSTRUCT_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "optpump/error.hpp"
#include "optpump/model.hpp"
#include "optpump/operators.hpp"
#include "optpump/spectral.hpp"
#include "optpump/superop.hpp"
#include "optpump/types.hpp"

namespace optpump {

/// Connected components of H_eff. Indices are zero-based.
struct SubsystemDecomposition {
  std::vector<std::vector<int>> components;  // ascending by smallest member
  std::vector<ComplexMatrix> blocks;         // H_eff restricted to each component
  std::vector<int> component_of;             // state -> component

  int size() const noexcept { return static_cast<int>(components.size()); }
};

inline SubsystemDecomposition decompose_subsystems(const ComplexMatrix& heff) {
  const int n = static_cast<int>(heff.rows());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (heff(i, j) != 0.0 || heff(j, i) != 0.0) {
        const int a = find(i);
        const int b = find(j);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }

  SubsystemDecomposition d;
  d.component_of.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> root_to_comp(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    auto& c = root_to_comp[static_cast<std::size_t>(r)];
    if (c < 0) {
      c = d.size();
      d.components.emplace_back();
    }
    d.components[static_cast<std::size_t>(c)].push_back(i);
    d.component_of[static_cast<std::size_t>(i)] = c;
  }
  for (const auto& comp : d.components) {
    const auto m = static_cast<Eigen::Index>(comp.size());
    ComplexMatrix b(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) b(i, j) = heff(comp[static_cast<std::size_t>(i)], comp[static_cast<std::size_t>(j)]);
    d.blocks.push_back(std::move(b));
  }
  return d;
}

inline SubsystemDecomposition decompose_subsystems(const LadderModel& model) {
  return decompose_subsystems(effective_hamiltonian(model));
}

/// Eigenvalues of a 1x1 or 2x2 block in closed form (exact at exceptional points).
inline Eigenvalues small_block_eigenvalues(const ComplexMatrix& b) {
  if (b.rows() == 1) return {b(0, 0)};
  if (b.rows() == 2) {
    const cplx mean = 0.5 * (b(0, 0) + b(1, 1));
    const cplx half = 0.5 * (b(0, 0) - b(1, 1));
    const cplx root = std::sqrt(half * half + b(0, 1) * b(1, 0));
    return {mean + root, mean - root};
  }
  return dense_eigenvalues(b);
}

/// Generator restricted to the within-subsystem sectors rho^(j,j), stacked in
/// component order; inside a component, entry (i, j) is ordered row-major.
struct L0Matrix {
  ComplexMatrix data;
  SectorEmbedding embedding;
  std::vector<int> offsets;  // block start per component, plus total size at the end

  int blocks() const noexcept { return static_cast<int>(offsets.size()) - 1; }
  ComplexMatrix block(int c) const {
    const int a = offsets[static_cast<std::size_t>(c)];
    const int m = offsets[static_cast<std::size_t>(c) + 1] - a;
    return data.block(a, a, m, m);
  }
  /// True when every entry below the diagonal blocks vanishes.
  bool block_upper_triangular() const {
    for (int c = 0; c < blocks(); ++c) {
      const int a = offsets[static_cast<std::size_t>(c)];
      const int e = offsets[static_cast<std::size_t>(c) + 1];
      for (int col = a; col < e; ++col)
        for (int row = e; row < data.rows(); ++row)
          if (data(row, col) != 0.0) return false;
    }
    return true;
  }
};

inline L0Matrix build_L0(const LadderModel& model, const SubsystemDecomposition& dec) {
  if (model.gamma2() != 0.0)
    throw Error(Errc::UnsupportedChannel, "block path does not cover the gamma2 channel");
  const int n = model.dim();
  if (static_cast<int>(dec.component_of.size()) != n)
    throw Error(Errc::DimensionMismatch, "decomposition does not match the model");
  const LindbladGenerator g = make_generator(model);

  L0Matrix l0;
  l0.embedding.n = n;
  std::vector<int> slot(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
  l0.offsets.push_back(0);
  for (const auto& comp : dec.components) {
    for (int i : comp)
      for (int j : comp) {
        slot[static_cast<std::size_t>(i) * n + j] = static_cast<int>(l0.embedding.entries.size());
        l0.embedding.entries.emplace_back(i, j);
      }
    l0.offsets.push_back(static_cast<int>(l0.embedding.entries.size()));
  }
  const auto d = static_cast<Eigen::Index>(l0.embedding.entries.size());
  l0.data = ComplexMatrix::Zero(d, d);
  for (Eigen::Index col = 0; col < d; ++col) {
    const auto [a, b] = l0.embedding.entries[static_cast<std::size_t>(col)];
    apply_to_unit(g, a, b, [&](int i, int j, cplx v) {
      const int row = slot[static_cast<std::size_t>(i) * n + j];
      if (row < 0) throw Error(Errc::SolverFailure, "within-subsystem sectors are not invariant");
      l0.data(row, col) += v;
    });
  }
  return l0;
}

inline L0Matrix build_L0(const LadderModel& model) { return build_L0(model, decompose_subsystems(model)); }

/// 4x4 generator on the sectors of subsystem {|e,l>, |g,l+1>}, basis
/// (ee, eg, ge, gg) with e = |e,l>, g = |g,l+1>.
inline ComplexMatrix diagonal_block_Bl(const LadderModel& model, int l) {
  if (l < 1 || l >= model.l_max()) throw Error(Errc::OutOfRange, "B_l needs 1 <= l <= l_max-1");
  const LindbladGenerator g = make_generator(model);
  const int idx[2] = {excited(l), ground(l + 1)};
  auto pos = [&](int i) { return i == idx[0] ? 0 : (i == idx[1] ? 1 : -1); };
  ComplexMatrix b = ComplexMatrix::Zero(4, 4);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      apply_to_unit(g, idx[p], idx[q], [&](int i, int j, cplx v) {
        const int pi = pos(i);
        const int pj = pos(j);
        if (pi >= 0 && pj >= 0) b(2 * pi + pj, 2 * p + q) += v;
      });
  return b;
}

/// Generator on sector rho^(r,s), r != s: -i(H_r kron I - I kron conj(H_s)).
inline ComplexMatrix build_Lrs(const SubsystemDecomposition& dec, int r, int s) {
  if (r == s || r < 0 || s < 0 || r >= dec.size() || s >= dec.size())
    throw Error(Errc::InvalidSectorPair, "cross sector needs distinct valid components");
  const ComplexMatrix& hr = dec.blocks[static_cast<std::size_t>(r)];
  const ComplexMatrix& hs = dec.blocks[static_cast<std::size_t>(s)];
  const Eigen::Index nr = hr.rows();
  const Eigen::Index ns = hs.rows();
  ComplexMatrix m = ComplexMatrix::Zero(nr * ns, nr * ns);
  for (Eigen::Index i = 0; i < nr; ++i)
    for (Eigen::Index k = 0; k < nr; ++k)
      for (Eigen::Index j = 0; j < ns; ++j) m(i * ns + j, k * ns + j) += -kI * hr(i, k);
  for (Eigen::Index i = 0; i < nr; ++i)
    for (Eigen::Index j = 0; j < ns; ++j)
      for (Eigen::Index k = 0; k < ns; ++k) m(i * ns + j, i * ns + k) += kI * std::conj(hs(j, k));
  return m;
}

inline ComplexMatrix build_Lrs(const LadderModel& model, int r, int s) {
  return build_Lrs(decompose_subsystems(model), r, s);
}

/// Which part of the block structure an eigenvalue came from; r == s marks
/// L0 (component r, or -1 when L0 was solved as a whole).
struct EigenOrigin {
  int r = -1;
  int s = -1;
};

/// All -i(eps_a - conj(eps_b)) over ordered pairs of distinct components.
inline Eigenvalues cross_sector_eigs(const SubsystemDecomposition& dec, std::vector<EigenOrigin>* origin = nullptr) {
  std::vector<Eigenvalues> eps;
  eps.reserve(dec.blocks.size());
  for (const auto& b : dec.blocks) eps.push_back(small_block_eigenvalues(b));
  Eigenvalues out;
  for (int r = 0; r < dec.size(); ++r)
    for (int s = 0; s < dec.size(); ++s) {
      if (r == s) continue;
      for (const auto& a : eps[static_cast<std::size_t>(r)])
        for (const auto& b : eps[static_cast<std::size_t>(s)]) {
          out.push_back(-kI * (a - std::conj(b)));
          if (origin) origin->push_back({r, s});
        }
    }
  return out;
}

struct BlockSpectrum {
  Eigenvalues l0_eigs;
  Eigenvalues cross_eigs;
  std::vector<EigenOrigin> l0_origin;
  std::vector<EigenOrigin> cross_origin;
  bool l0_from_blocks = false;  // union of diagonal blocks (triangular L0) vs dense solve

  Eigenvalues all() const {
    Eigenvalues v = l0_eigs;
    v.insert(v.end(), cross_eigs.begin(), cross_eigs.end());
    return v;
  }
  SpectrumResult to_spectrum() const { return make_spectrum(all()); }
};

inline BlockSpectrum block_spectrum(const LadderModel& model) {
  const SubsystemDecomposition dec = decompose_subsystems(model);
  const L0Matrix l0 = build_L0(model, dec);
  BlockSpectrum bs;
  bs.l0_from_blocks = l0.block_upper_triangular();
  if (bs.l0_from_blocks) {
    for (int c = 0; c < l0.blocks(); ++c) {
      const Eigenvalues e = dense_eigenvalues(l0.block(c));
      bs.l0_eigs.insert(bs.l0_eigs.end(), e.begin(), e.end());
      bs.l0_origin.insert(bs.l0_origin.end(), e.size(), EigenOrigin{c, c});
    }
  } else {
    bs.l0_eigs = dense_eigenvalues(l0.data);
    bs.l0_origin.assign(bs.l0_eigs.size(), EigenOrigin{});
  }
  bs.cross_eigs = cross_sector_eigs(dec, &bs.cross_origin);
  return bs;
}

/// Steady space from the L0 sectors; cross-sector zero modes only enlarge
/// the reported dimension (they occur when Omega = 0 and omega = 0).
inline SteadySpace steady_space_blocks(const LadderModel& model) {
  const SubsystemDecomposition dec = decompose_subsystems(model);
  const L0Matrix l0 = build_L0(model, dec);
  SteadySpace space = steady_space(l0.data, l0.embedding);
  const Eigenvalues cross = cross_sector_eigs(dec);
  double scale = 1.0;
  for (const auto& z : cross) scale = std::max(scale, std::abs(z.real()));
  for (const auto& z : cross)
    if (std::abs(z) <= kSteadyEpsilon * scale) ++space.extra_modes;
  return space;
}

/// Steady state of a model: block path when gamma2 = 0, dense otherwise.
inline DensityMatrix steady_state(const LadderModel& model) {
  if (model.gamma2() == 0.0) return density_from_steady(steady_space_blocks(model));
  return steady_state(liouvillian_matrix(model));
}

// ---------------------------------------------------------------------------
// PBC momentum-space bands

enum class KQuantization {
  Circulant,  // k_m = 2 pi m / (N/2), m = 0..N/2-1
  AsPrinted,  // k_m = m pi / N, m = 1..N/2
};

inline void require_band_model(const LadderModel& model) {
  bool ok = model.boundary() == Boundary::Periodic && model.translation_invariant() && model.gamma0() == 0.0 &&
            model.gamma2() == 0.0;
  for (double w : model.omega()) ok = ok && w == 0.0;
  if (!ok)
    throw Error(Errc::UnsupportedParameters,
                "band matrix needs PBC, uniform couplings, omega = 0, gamma0 = 0 and gamma2 = 0");
}

inline ComplexMatrix pbc_band_matrix(const LadderModel& model, double k) {
  require_band_model(model);
  const double r = model.rabi().front();
  const double g1 = model.gamma1();
  const cplx ir = kI * r;
  ComplexMatrix h(4, 4);
  h << -g1, ir, -ir, g1 * std::exp(kI * k),
       ir, -0.5 * g1, 0.0, -ir,
       -ir, 0.0, -0.5 * g1, ir,
       0.0, -ir, ir, 0.0;
  return h;
}

inline std::vector<double> band_momenta(const LadderModel& model, KQuantization rule) {
  const int cells = model.l_max();
  std::vector<double> ks;
  for (int m = 0; m < cells; ++m) {
    if (rule == KQuantization::Circulant)
      ks.push_back(2.0 * std::numbers::pi * m / cells);
    else
      ks.push_back((m + 1) * std::numbers::pi / model.dim());
  }
  return ks;
}

inline Eigenvalues pbc_band_eigenvalues(const LadderModel& model, KQuantization rule = KQuantization::Circulant) {
  Eigenvalues out;
  for (double k : band_momenta(model, rule)) {
    const Eigenvalues e = dense_eigenvalues(pbc_band_matrix(model, k));
    out.insert(out.end(), e.begin(), e.end());
  }
  return out;
}

/// Gap over the non-steady band eigenvalues.
inline double pbc_gap_from_bands(const LadderModel& model) {
  return make_spectrum(pbc_band_eigenvalues(model)).gap;
}

/// Fraction of |v|^2 carried by the listed entries of a row-major vectorized operator.
inline double localization_weight(const ComplexVector& v, int n, const std::vector<std::pair<int, int>>& entries) {
  const double total = v.squaredNorm();
  if (total == 0.0) return 0.0;
  double w = 0.0;
  for (const auto& [i, j] : entries) w += std::norm(v(static_cast<Eigen::Index>(i) * n + j));
  return w / total;
}

}  // namespace optpump

#endif  // OPTPUMP_BLOCKSTRUCT_HPP
