#ifndef OPTPUMP_CLOSEDFORM_HPP
#define OPTPUMP_CLOSEDFORM_HPP

#include <cmath>
#include <string>
#include <vector>

#include "optpump/error.hpp"
#include "optpump/types.hpp"

namespace optpump {

// Closed-form Liouvillian gaps of the uniform OBC ladder.

enum class FormulaBranch { First, Second, Third };

constexpr const char* to_string(FormulaBranch b) noexcept {
  switch (b) {
    case FormulaBranch::First: return "first";
    case FormulaBranch::Second: return "second";
    case FormulaBranch::Third: return "third";
  }
  return "?";
}

struct GapFormulaResult {
  double value = 0.0;
  FormulaBranch branch = FormulaBranch::First;
  double rabi = 0.0;
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  double omega = 0.0;
};

namespace detail {
/// (g - Re sqrt(g^2 - 16 Omega^2)) / 4
inline double cross_gap(double rabi, double g) {
  const double disc = g * g - 16.0 * rabi * rabi;
  return disc > 0.0 ? 0.25 * (g - std::sqrt(disc)) : 0.25 * g;
}
}  // namespace detail

/// gamma0 = 0, omega = 0.
inline GapFormulaResult gap_obc(double rabi, double gamma1) {
  GapFormulaResult r;
  r.rabi = rabi;
  r.gamma1 = gamma1;
  if (4.0 * rabi < gamma1) {
    r.value = 0.25 * (gamma1 - std::sqrt(gamma1 * gamma1 - 16.0 * rabi * rabi));
    r.branch = FormulaBranch::First;
  } else {
    r.value = 0.25 * gamma1;
    r.branch = FormulaBranch::Second;
  }
  return r;
}

/// How the complex square root in the detuned formula is turned into a real number.
enum class SqrtBranch {
  ImaginaryPrincipal,     // Im sqrt(X), as printed
  RealPrincipal,          // |Re sqrt(X)|
  AbsImaginaryPrincipal,  // |Im sqrt(X)|
};

constexpr const char* to_string(SqrtBranch b) noexcept {
  switch (b) {
    case SqrtBranch::ImaginaryPrincipal: return "imaginary_principal";
    case SqrtBranch::RealPrincipal: return "real_principal";
    case SqrtBranch::AbsImaginaryPrincipal: return "abs_imaginary_principal";
  }
  return "?";
}

/// Branch that reproduces the dense numeric gap (re-validated by the test suite).
inline constexpr SqrtBranch kDetunedSqrtBranch = SqrtBranch::RealPrincipal;

/// (gamma1 - B(sqrt(gamma1^2 - 4 omega^2 - 4 i omega gamma1 - 16 Omega^2))) / 4.
inline GapFormulaResult gap_obc_omega(double rabi, double gamma1, double omega,
                                      SqrtBranch branch = kDetunedSqrtBranch) {
  const cplx x{gamma1 * gamma1 - 4.0 * omega * omega - 16.0 * rabi * rabi, -4.0 * omega * gamma1};
  const cplx s = std::sqrt(x);
  double b = 0.0;
  switch (branch) {
    case SqrtBranch::ImaginaryPrincipal: b = s.imag(); break;
    case SqrtBranch::RealPrincipal: b = std::abs(s.real()); break;
    case SqrtBranch::AbsImaginaryPrincipal: b = std::abs(s.imag()); break;
  }
  GapFormulaResult r;
  r.value = 0.25 * (gamma1 - b);
  r.branch = FormulaBranch::First;
  r.rabi = rabi;
  r.gamma1 = gamma1;
  r.omega = omega;
  return r;
}

/// Returns the first candidate branch whose formula matches `numeric(rabi,
/// omega, gamma1)` within tol on the whole grid.
template <class Oracle>
SqrtBranch resolve_detuned_branch(Oracle&& numeric, const std::vector<double>& rabi_grid,
                                  const std::vector<double>& omega_grid, double gamma1, double tol = 1e-6) {
  const SqrtBranch candidates[] = {SqrtBranch::ImaginaryPrincipal, SqrtBranch::RealPrincipal,
                                   SqrtBranch::AbsImaginaryPrincipal};
  std::vector<std::vector<double>> oracle;
  for (double r : rabi_grid) {
    oracle.emplace_back();
    for (double w : omega_grid) oracle.back().push_back(numeric(r, w, gamma1));
  }
  for (SqrtBranch b : candidates) {
    bool ok = true;
    for (std::size_t i = 0; i < rabi_grid.size() && ok; ++i)
      for (std::size_t j = 0; j < omega_grid.size() && ok; ++j)
        ok = std::abs(gap_obc_omega(rabi_grid[i], gamma1, omega_grid[j], b).value - oracle[i][j]) <= tol;
    if (ok) return b;
  }
  throw Error(Errc::BranchUnresolved, "no square-root branch reproduces the numeric gap");
}

/// Third-branch expression of the gamma0 formula: the slowest root of the
/// recycling block's cubic. Returns NaN where it is undefined (gamma0 = 0).
inline double gamma0_cubic_gap(double rabi, double gamma0, double gamma1) {
  if (gamma0 <= 0.0) return std::nan("");
  const double g = gamma0 + gamma1;
  const double r2 = rabi * rabi;
  const double p = -3.0 * g * g + 48.0 * r2;
  const cplx inner = std::sqrt(cplx(46656.0 * gamma0 * gamma0 * r2 * r2 + p * p * p));
  const cplx a = std::pow(cplx(72.0 * gamma0 * r2) + inner / 3.0, 1.0 / 3.0);
  if (std::abs(a) == 0.0) return std::nan("");
  const cplx v = 0.5 * g - a / (2.0 * std::cbrt(9.0)) - (g * g - 16.0 * r2) / (2.0 * std::cbrt(3.0) * a);
  return v.real();
}

/// Branch chosen by the printed conditions.
inline FormulaBranch printed_gamma0_branch(double rabi, double gamma0, double gamma1) {
  const double g = gamma0 + gamma1;
  const double r2 = rabi * rabi;
  if (4.0 * rabi < g &&
      527.0 * gamma0 * gamma0 + 575.0 * gamma1 * gamma1 + 1166.0 * gamma0 * gamma1 > 9216.0 * r2)
    return FormulaBranch::First;
  if (4.0 * rabi >= g && 64.0 * r2 * (gamma1 - gamma0) > 3.0 * g * g * g) return FormulaBranch::Second;
  return FormulaBranch::Third;
}

/// omega = 0. The gap is the smaller of the cross-sector value (first and
/// second branches) and the recycling-block value (third branch).
inline GapFormulaResult gap_with_gamma0(double rabi, double gamma0, double gamma1) {
  const double g = gamma0 + gamma1;
  GapFormulaResult r;
  r.rabi = rabi;
  r.gamma0 = gamma0;
  r.gamma1 = gamma1;
  r.value = detail::cross_gap(rabi, g);
  r.branch = 4.0 * rabi < g ? FormulaBranch::First : FormulaBranch::Second;
  const double cubic = gamma0_cubic_gap(rabi, gamma0, gamma1);
  if (std::isfinite(cubic) && cubic < r.value) {
    r.value = cubic;
    r.branch = FormulaBranch::Third;
  }
  return r;
}

/// Value selected by the printed branch conditions.
inline GapFormulaResult gap_with_gamma0_printed(double rabi, double gamma0, double gamma1) {
  GapFormulaResult r;
  r.rabi = rabi;
  r.gamma0 = gamma0;
  r.gamma1 = gamma1;
  r.branch = printed_gamma0_branch(rabi, gamma0, gamma1);
  r.value = r.branch == FormulaBranch::Third ? gamma0_cubic_gap(rabi, gamma0, gamma1)
                                             : detail::cross_gap(rabi, gamma0 + gamma1);
  return r;
}

namespace detail {
/// cbrt(sqrt(81 g^2 Omega^4 + 64 Omega^6) - 9 g Omega^2)
inline double optimum_root(double rabi, double gamma1) {
  const double r2 = rabi * rabi;
  return std::cbrt(std::sqrt(81.0 * gamma1 * gamma1 * r2 * r2 + 64.0 * r2 * r2 * r2) - 9.0 * gamma1 * r2);
}
}  // namespace detail

/// gamma0 maximizing the gap at omega = 0.
inline GapFormulaResult gamma0_optimal(double rabi, double gamma1) {
  GapFormulaResult r;
  r.rabi = rabi;
  r.gamma1 = gamma1;
  if (4.0 * rabi < gamma1) {
    r.value = 0.0;
    r.branch = FormulaBranch::First;
  } else if (gamma1 >= 3.5 * rabi) {
    r.value = 4.0 * rabi - gamma1;
    r.branch = FormulaBranch::Second;
  } else {
    const double c = detail::optimum_root(rabi, gamma1);
    r.value = -4.0 / 3.0 * c + 16.0 * rabi * rabi / (3.0 * c) - gamma1;
    r.branch = FormulaBranch::Third;
  }
  r.gamma0 = r.value;
  return r;
}

/// Gap at the optimal gamma0.
inline GapFormulaResult gap_max(double rabi, double gamma1) {
  GapFormulaResult r;
  r.rabi = rabi;
  r.gamma1 = gamma1;
  r.gamma0 = gamma0_optimal(rabi, gamma1).value;
  if (4.0 * rabi < gamma1) {
    r.value = 0.25 * (gamma1 - std::sqrt(gamma1 * gamma1 - 16.0 * rabi * rabi));
    r.branch = FormulaBranch::First;
  } else if (gamma1 >= 3.5 * rabi) {
    r.value = rabi;
    r.branch = FormulaBranch::Second;
  } else {
    const double c = detail::optimum_root(rabi, gamma1);
    r.value = -c / 3.0 + 4.0 * rabi * rabi / (3.0 * c);
    r.branch = FormulaBranch::Third;
  }
  return r;
}

}  // namespace optpump

#endif  // OPTPUMP_CLOSEDFORM_HPP
