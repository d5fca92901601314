#ifndef OPTPUMP_OPERATORS_HPP
#define OPTPUMP_OPERATORS_HPP

#include <cmath>
#include <vector>

#include "optpump/model.hpp"
#include "optpump/types.hpp"

namespace optpump {

// Dissipator convention used throughout:
//   d rho/dt = -i[H, rho] + sum_p gamma_p (s rho s^+ - 1/2 {s^+ s, rho})
// with unit-amplitude transition operators s. A JumpOperator stores
// L = sqrt(gamma_p) s, so the generator reads L rho L^+ - 1/2 {L^+ L, rho}.

enum class Channel { P0, P1, P2 };

/// Single-entry jump operator amplitude * |target><source|.
struct JumpOperator {
  Channel channel = Channel::P1;
  int rung = 1;
  int source = 0;  // zero-based excited index
  int target = 0;  // zero-based ground index
  double amplitude = 0.0;  // sqrt(rate)

  double rate() const noexcept { return amplitude * amplitude; }

  ComplexMatrix matrix(int dim) const {
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(target, source) = amplitude;
    return m;
  }
};

inline ComplexMatrix hamiltonian(const LadderModel& model) {
  const int n = model.dim();
  const int lmax = model.l_max();
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int l = 1; l < lmax; ++l) {
    const double e = model.rung_energy(l + 1);
    h(ground(l + 1), ground(l + 1)) = e;
    h(excited(l + 1), excited(l + 1)) = e;
    const double r = model.rabi()[static_cast<std::size_t>(l - 1)];
    h(excited(l), ground(l + 1)) = r;
    h(ground(l + 1), excited(l)) = r;
  }
  if (model.boundary() == Boundary::Periodic) {
    const double r = model.rabi().back();
    h(excited(lmax), ground(1)) = r;
    h(ground(1), excited(lmax)) = r;
  }
  return h;
}

inline std::vector<JumpOperator> jump_operators(const LadderModel& model) {
  const int lmax = model.l_max();
  const bool wrap = model.boundary() == Boundary::Periodic && model.pbc_wrap_jumps();
  std::vector<JumpOperator> ops;
  auto add = [&](Channel c, int rung, int source, int target, double rate) {
    if (rate <= 0.0) return;
    JumpOperator op;
    op.channel = c;
    op.rung = rung;
    op.source = source;
    op.target = target;
    op.amplitude = std::sqrt(rate);
    ops.push_back(std::move(op));
  };
  for (int l = 1; l <= lmax; ++l) {
    if (l < lmax)
      add(Channel::P0, l, excited(l), ground(l + 1), model.gamma0());
    else if (wrap)
      add(Channel::P0, l, excited(lmax), ground(1), model.gamma0());
    add(Channel::P1, l, excited(l), ground(l), model.gamma1());
    if (l < lmax)
      add(Channel::P2, l, excited(l + 1), ground(l), model.gamma2());
    else if (wrap)
      add(Channel::P2, l, excited(1), ground(lmax), model.gamma2());
  }
  return ops;
}

/// H - (i/2) sum_k L_k^+ L_k. The anti-Hermitian part is diagonal because
/// every jump has a single entry.
inline ComplexMatrix effective_hamiltonian(const LadderModel& model) {
  ComplexMatrix heff = hamiltonian(model);
  for (const auto& op : jump_operators(model))
    heff(op.source, op.source) -= 0.5 * kI * op.rate();
  return heff;
}

}  // namespace optpump

#endif  // OPTPUMP_OPERATORS_HPP
