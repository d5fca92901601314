#ifndef OPTPUMP_DYNAMICS_HPP
#define OPTPUMP_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "optpump/blockstruct.hpp"
#include "optpump/error.hpp"
#include "optpump/model.hpp"
#include "optpump/spectral.hpp"
#include "optpump/superop.hpp"
#include "optpump/types.hpp"

namespace optpump {

enum class EvolutionMethod { Spectral, ODE };

constexpr const char* to_string(EvolutionMethod m) noexcept {
  return m == EvolutionMethod::Spectral ? "spectral" : "ode";
}

struct DynamicsTrace {
  std::vector<double> times;
  std::vector<std::vector<double>> populations;  // populations[t][n-1] = rho_nn(t)
  std::vector<double> mean_index;                // sum_n n rho_nn
  std::vector<double> ntilde;                    // filled by observables()
  std::vector<ComplexMatrix> states;             // only with EvolveOptions::keep_states
  EvolutionMethod method = EvolutionMethod::ODE;
};

struct EvolveOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  bool keep_states = false;
  double max_step = 1.0;
};

namespace detail {

inline void validate_times(const std::vector<double>& times) {
  if (times.empty()) throw Error(Errc::InvalidArgument, "time grid is empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) throw Error(Errc::InvalidArgument, "times must be finite and >= 0");
    if (i > 0 && times[i] < times[i - 1]) throw Error(Errc::InvalidArgument, "times must be nondecreasing");
  }
}

inline void record(DynamicsTrace& tr, double t, const ComplexMatrix& rho, bool keep) {
  const Eigen::Index n = rho.rows();
  std::vector<double> pop(static_cast<std::size_t>(n));
  double mean = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    pop[static_cast<std::size_t>(i)] = rho(i, i).real();
    mean += static_cast<double>(i + 1) * rho(i, i).real();
  }
  tr.times.push_back(t);
  tr.populations.push_back(std::move(pop));
  tr.mean_index.push_back(mean);
  if (keep) tr.states.push_back(rho);
}

/// Lindblad right-hand side with H stored by rows of nonzeros.
class SparseLindblad {
 public:
  explicit SparseLindblad(const LadderModel& model) : g_(make_generator(model)) {
    const int n = g_.dim();
    rows_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (g_.h(i, k) != 0.0) rows_[static_cast<std::size_t>(i)].emplace_back(k, g_.h(i, k));
  }

  template <class In, class Out>
  void operator()(const In& rho, Out& out) const {
    const Eigen::Index n = rho.rows();
    out.setZero();
    // -i H rho + i rho H; column i of rho H is sum_k conj(H(i,k)) rho(:,k).
    for (Eigen::Index i = 0; i < n; ++i)
      for (const auto& [k, h] : rows_[static_cast<std::size_t>(i)]) {
        const cplx a = -kI * h;
        const cplx b = kI * std::conj(h);
        out.row(i) += a * rho.row(k);
        out.col(i) += b * rho.col(k);
      }
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) out(i, j) -= 0.5 * (g_.loss(i) + g_.loss(j)) * rho(i, j);
    for (const auto& op : g_.jumps) out(op.target, op.target) += op.rate() * rho(op.source, op.source);
  }

 private:
  LindbladGenerator g_;
  std::vector<std::vector<std::pair<int, cplx>>> rows_;
};

inline void hermitize(ComplexMatrix& m) {
  const ComplexMatrix a = m.adjoint();
  m = 0.5 * (m + a);
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration (boost::odeint) of the
/// matrix-form master equation, sampled exactly on `times`.
inline DynamicsTrace evolve_ode(const LadderModel& model, const DensityMatrix& rho0, const std::vector<double>& times,
                                const EvolveOptions& opt = {}) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<cplx>;
  using Map = Eigen::Map<ComplexMatrix>;
  using ConstMap = Eigen::Map<const ComplexMatrix>;

  if (rho0.dim() != model.dim()) throw Error(Errc::DimensionMismatch, "initial state dimension differs from model");
  detail::validate_times(times);
  const detail::SparseLindblad f(model);
  const Eigen::Index n = model.dim();

  State x(rho0.matrix().data(), rho0.matrix().data() + n * n);
  auto rhs = [&](const State& y, State& dy, double) {
    Map out(dy.data(), n, n);
    f(ConstMap(y.data(), n, n), out);
  };

  DynamicsTrace tr;
  tr.method = EvolutionMethod::ODE;
  auto record = [&](const State& y, double t) {
    ComplexMatrix rho = ConstMap(y.data(), n, n);
    detail::hermitize(rho);
    detail::record(tr, t, rho, opt.keep_states);
  };

  std::vector<double> grid{0.0};
  for (double t : times)
    if (t > grid.back()) grid.push_back(t);
  std::size_t next = 0;
  auto observe = [&](const State& y, double t) {
    while (next < times.size() && times[next] <= t) record(y, times[next++]);
  };
  if (grid.size() == 1) {
    observe(x, 0.0);
    return tr;
  }
  try {
    auto stepper = ode::make_controlled(opt.atol, opt.rtol, opt.max_step, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), std::min(opt.max_step, 1e-2), observe);
  } catch (const ode::step_adjustment_error& e) {
    throw Error(Errc::StepSizeUnderflow, e.what());
  } catch (const ode::no_progress_error& e) {
    throw Error(Errc::StepSizeUnderflow, e.what());
  }
  return tr;
}

inline constexpr int kMaxSpectralHilbertDim = 24;
inline constexpr double kMaxBasisCondition = 1e8;

/// rho(t) = sum_mu c_mu exp(lambda_mu t) rho^R_mu with c = V^{-1} vec(rho0).
inline DynamicsTrace evolve_spectral(const LadderModel& model, const DensityMatrix& rho0,
                                     const std::vector<double>& times, const EvolveOptions& opt = {}) {
  if (rho0.dim() != model.dim()) throw Error(Errc::DimensionMismatch, "initial state dimension differs from model");
  if (model.dim() > kMaxSpectralHilbertDim)
    throw Error(Errc::DimensionTooLarge, "spectral evolution limited to N <= " + std::to_string(kMaxSpectralHilbertDim));
  detail::validate_times(times);
  const SpectrumResult spec = full_spectrum(liouvillian_matrix(model), true);
  if (!(spec.basis_condition <= kMaxBasisCondition))
    throw Error(Errc::IllConditionedBasis, "eigenbasis condition number " + std::to_string(spec.basis_condition));
  const ComplexMatrix& v = *spec.right_eigenvectors;
  const ComplexVector c = v.partialPivLu().solve(vectorize(rho0));
  const Eigen::Index d = c.size();

  DynamicsTrace tr;
  tr.method = EvolutionMethod::Spectral;
  ComplexVector w(d);
  for (double t : times) {
    for (Eigen::Index k = 0; k < d; ++k) w(k) = c(k) * std::exp(spec.eigenvalues[static_cast<std::size_t>(k)] * t);
    ComplexMatrix rho = devectorize(v * w);
    detail::hermitize(rho);
    detail::record(tr, t, rho, opt.keep_states);
  }
  return tr;
}

/// Fills trace.ntilde with sum_n n (rho_nn(t) - rho_ss,nn).
inline void observables(DynamicsTrace& trace, const DensityMatrix& rho_ss) {
  trace.ntilde.clear();
  trace.mean_index.clear();
  for (const auto& pop : trace.populations) {
    if (static_cast<int>(pop.size()) != rho_ss.dim())
      throw Error(Errc::DimensionMismatch, "steady state dimension differs from trace");
    double mean = 0.0;
    double dev = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const double n = static_cast<double>(i + 1);
      mean += n * pop[i];
      dev += n * (pop[i] - rho_ss.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real());
    }
    trace.mean_index.push_back(mean);
    trace.ntilde.push_back(dev);
  }
}

struct RateFit {
  double rate = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  double residual = 0.0;  // rms of log|ntilde| about the fitted line
  std::size_t points = 0;
};

inline constexpr double kFitUpper = 1e-3;
inline constexpr double kFitLower = 1e-8;

/// Least-squares slope of log|y| where |y| lies in [1e-8, 1e-3] |y(0)|,
/// starting from the first entry into that window.
inline RateFit fit_asymptotic_rate(const std::vector<double>& times, const std::vector<double>& y,
                                   double upper = kFitUpper, double lower = kFitLower) {
  if (times.size() != y.size() || y.empty()) throw Error(Errc::LengthMismatch, "times and series differ in length");
  const double y0 = std::abs(y.front());
  if (y0 == 0.0) throw Error(Errc::WindowNotReached, "series starts at zero");
  std::size_t first = y.size();
  for (std::size_t i = 0; i < y.size(); ++i)
    if (std::abs(y[i]) <= upper * y0) {
      first = i;
      break;
    }
  std::vector<double> ts, ls;
  for (std::size_t i = first; i < y.size(); ++i) {
    const double a = std::abs(y[i]);
    if (a <= upper * y0 && a >= lower * y0) {
      ts.push_back(times[i]);
      ls.push_back(std::log(a));
    }
  }
  if (ts.size() < 2) throw Error(Errc::WindowNotReached, "series never enters the fit window with two samples");
  const double m = static_cast<double>(ts.size());
  const double tm = std::accumulate(ts.begin(), ts.end(), 0.0) / m;
  const double lm = std::accumulate(ls.begin(), ls.end(), 0.0) / m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (ts[i] - tm) * (ls[i] - lm);
    sxx += (ts[i] - tm) * (ts[i] - tm);
  }
  if (sxx == 0.0) throw Error(Errc::WindowNotReached, "fit window has zero width");
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ls[i] - (lm + slope * (ts[i] - tm));
    ss += r * r;
  }
  RateFit fit;
  fit.rate = -slope;
  fit.t_begin = ts.front();
  fit.t_end = ts.back();
  fit.residual = std::sqrt(ss / m);
  fit.points = ts.size();
  return fit;
}

inline RateFit fit_asymptotic_rate(const DynamicsTrace& trace) {
  return fit_asymptotic_rate(trace.times, trace.ntilde);
}

/// Uniform grid t_k = k * dt, k = 0..floor(t_end/dt).
inline std::vector<double> uniform_times(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw Error(Errc::InvalidArgument, "need dt > 0 and t_end >= 0");
  std::vector<double> ts;
  const auto count = static_cast<long long>(std::floor(t_end / dt + 1e-9));
  for (long long k = 0; k <= count; ++k) ts.push_back(static_cast<double>(k) * dt);
  return ts;
}

}  // namespace optpump

#endif  // OPTPUMP_DYNAMICS_HPP
