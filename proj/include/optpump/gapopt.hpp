#ifndef OPTPUMP_GAPOPT_HPP
#define OPTPUMP_GAPOPT_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "optpump/blockstruct.hpp"
#include "optpump/error.hpp"
#include "optpump/model.hpp"
#include "optpump/spectral.hpp"
#include "optpump/superop.hpp"

namespace optpump {

/// Runs fn(i) for i in [0, count) on a small thread pool. Callers write
/// results by index, so output never depends on scheduling. The exception of
/// the lowest failing index is rethrown.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::exception_ptr> errors(count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

enum class GapMethod { Block, Dense, ClosedForm };

constexpr const char* to_string(GapMethod m) noexcept {
  switch (m) {
    case GapMethod::Block: return "block";
    case GapMethod::Dense: return "dense";
    case GapMethod::ClosedForm: return "closedform";
  }
  return "?";
}

struct GapEvaluation {
  double gap = 0.0;
  GapMethod method = GapMethod::Block;
};

/// Block path when gamma2 = 0, dense generator otherwise.
inline GapEvaluation numeric_gap(const LadderModel& model) {
  if (model.gamma2() == 0.0) return {block_spectrum(model).to_spectrum().gap, GapMethod::Block};
  return {full_spectrum(liouvillian_matrix(model)).gap, GapMethod::Dense};
}

/// Uniform OBC ladder; the OBC gap does not depend on l_max.
inline ModelConfig uniform_obc_config(double rabi, double omega, double gamma0, double gamma1, int l_max = 4) {
  ModelConfig c;
  c.l_max = l_max;
  c.omega = {omega};
  c.rabi = UniformCoupling{rabi};
  c.gamma0 = gamma0;
  c.gamma1 = gamma1;
  return c;
}

inline double obc_gap(double rabi, double omega, double gamma0, double gamma1) {
  return numeric_gap(build_model(uniform_obc_config(rabi, omega, gamma0, gamma1))).gap;
}

// ---------------------------------------------------------------------------
// Scans

enum class ScanParameter { Gamma0, Rabi, Omega, Size, Gamma2 };

constexpr const char* to_string(ScanParameter p) noexcept {
  switch (p) {
    case ScanParameter::Gamma0: return "gamma0";
    case ScanParameter::Rabi: return "rabi";
    case ScanParameter::Omega: return "omega";
    case ScanParameter::Size: return "N";
    case ScanParameter::Gamma2: return "gamma2";
  }
  return "?";
}

inline ScanParameter parse_scan_parameter(const std::string& s) {
  if (s == "gamma0") return ScanParameter::Gamma0;
  if (s == "rabi") return ScanParameter::Rabi;
  if (s == "omega") return ScanParameter::Omega;
  if (s == "N") return ScanParameter::Size;
  if (s == "gamma2") return ScanParameter::Gamma2;
  throw Error(Errc::InvalidArgument, "unknown scan parameter '" + s + "'");
}

inline ModelConfig with_parameter(ModelConfig c, ScanParameter p, double v) {
  switch (p) {
    case ScanParameter::Gamma0: c.gamma0 = v; break;
    case ScanParameter::Gamma2: c.gamma2 = v; break;
    case ScanParameter::Omega: c.omega = {v}; break;
    case ScanParameter::Rabi:
      if (auto* u = std::get_if<UniformCoupling>(&c.rabi))
        u->rabi = v;
      else if (auto* s = std::get_if<SqrtCoupling>(&c.rabi))
        s->rabi = v;
      else if (auto* sh = std::get_if<ShiftedInverseSqrtCoupling>(&c.rabi))
        sh->rabi = v;
      else
        throw Error(Errc::UnsupportedParameters, "cannot scan the Rabi rate of a custom coupling list");
      break;
    case ScanParameter::Size: {
      const double half = v / 2.0;
      if (half != std::floor(half) || half < 2.0) throw Error(Errc::InvalidArgument, "N must be an even integer >= 4");
      c.l_max = static_cast<int>(half);
      if (c.omega.size() != 1) throw Error(Errc::UnsupportedParameters, "N scan needs a uniform omega");
      break;
    }
  }
  return c;
}

struct ScanPoint {
  double value = 0.0;
  double gap = 0.0;
  GapMethod method = GapMethod::Block;
};

inline std::vector<ScanPoint> gap_scan(const ModelConfig& base, ScanParameter p, const std::vector<double>& grid) {
  std::vector<ScanPoint> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    try {
      if (!std::isfinite(grid[i])) throw Error(Errc::InvalidArgument, "non-finite grid value");
      const GapEvaluation g = numeric_gap(build_model(with_parameter(base, p, grid[i])));
      out[i] = {grid[i], g.gap, g.method};
    } catch (const Error& e) {
      throw Error(e.code(), "grid index " + std::to_string(i) + ": " + e.message());
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Derivative at gamma0 = 0

struct DerivativeResult {
  double value = 0.0;     // Richardson-refined forward difference
  double forward = 0.0;   // plain forward difference with step h
  double step = 0.0;
  bool kink = false;      // slope on [0, h] and [h, 2h] disagree
};

/// gamma0 < 0 is outside the model, so the difference is one-sided:
/// D(h) = (g(h) - g(0)) / h refined as 2 D(h/2) - D(h).
inline DerivativeResult gap_derivative_at_zero(double rabi, double omega, double gamma1) {
  DerivativeResult r;
  const double h = 1e-5 * std::max(gamma1, 1.0);
  const double g0 = obc_gap(rabi, omega, 0.0, gamma1);
  const double gh = obc_gap(rabi, omega, h, gamma1);
  const double gh2 = obc_gap(rabi, omega, 0.5 * h, gamma1);
  const double g2h = obc_gap(rabi, omega, 2.0 * h, gamma1);
  const double d1 = (gh - g0) / h;
  const double d2 = (gh2 - g0) / (0.5 * h);
  r.forward = d1;
  r.value = 2.0 * d2 - d1;
  r.step = h;
  const double next = (g2h - gh) / h;
  r.kink = std::abs(next - d1) > 1e-3 * std::max(1.0, std::abs(d1));
  return r;
}

// ---------------------------------------------------------------------------
// Maximization over gamma0

enum class GapShape { MonotoneDecreasing, InteriorMaximum };

constexpr const char* to_string(GapShape s) noexcept {
  return s == GapShape::MonotoneDecreasing ? "monotone_decreasing" : "interior_maximum";
}

struct OptimizeResult {
  double gamma0_star = 0.0;
  double gap_star = 0.0;
  GapShape classification = GapShape::MonotoneDecreasing;
  std::vector<std::pair<double, double>> evaluations;  // (gamma0, gap) in evaluation order
};

inline constexpr int kCoarsePoints = 32;

inline OptimizeResult maximize_gap_gamma0(double rabi, double omega, double gamma1) {
  OptimizeResult res;
  auto gap_at = [&](double g0) {
    const double v = obc_gap(rabi, omega, g0, gamma1);
    res.evaluations.emplace_back(g0, v);
    return v;
  };
  const double scale = std::max(gamma1, 1.0);
  const double lo = 1e-3 * scale;
  const double hi = std::max(10.0 * scale, 20.0 * rabi);
  std::vector<double> xs{0.0};
  for (int k = 0; k < kCoarsePoints; ++k)
    xs.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (kCoarsePoints - 1)));
  std::vector<double> ys(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { ys[i] = obc_gap(rabi, omega, xs[i], gamma1); });
  for (std::size_t i = 0; i < xs.size(); ++i) res.evaluations.emplace_back(xs[i], ys[i]);

  const auto best = static_cast<std::size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());
  if (best == 0) {
    res.gamma0_star = 0.0;
    res.gap_star = ys[0];
    res.classification = GapShape::MonotoneDecreasing;
    return res;
  }
  res.classification = GapShape::InteriorMaximum;
  double a = xs[best - 1];
  double b = best + 1 < xs.size() ? xs[best + 1] : xs[best];

  bool unimodal = true;
  for (std::size_t i = 1; i <= best; ++i) unimodal = unimodal && ys[i] >= ys[i - 1];
  for (std::size_t i = best + 1; i < ys.size(); ++i) unimodal = unimodal && ys[i] <= ys[i - 1];
  if (!unimodal) {
    // Narrow the bracket on a fine grid before trusting golden-section.
    constexpr int fine = 64;
    double bx = xs[best], by = ys[best];
    for (int k = 0; k <= fine; ++k) {
      const double x = a + (b - a) * k / fine;
      const double y = gap_at(x);
      if (y > by) {
        by = y;
        bx = x;
      }
    }
    const double w = (b - a) / fine;
    a = std::max(a, bx - w);
    b = std::min(b, bx + w);
  }

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double tol = 1e-4 * scale;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = gap_at(c);
  double fd = gap_at(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = gap_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = gap_at(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = gap_at(x);
  // The coarse maximum wins if refinement somehow lost it.
  if (fx >= ys[best]) {
    res.gamma0_star = x;
    res.gap_star = fx;
  } else {
    res.gamma0_star = xs[best];
    res.gap_star = ys[best];
  }
  return res;
}

// ---------------------------------------------------------------------------
// Surfaces

struct GapSurface {
  std::vector<double> rabi;   // rows
  std::vector<double> omega;  // columns
  std::vector<std::vector<double>> gap;  // gap[i][j] at (rabi[i], omega[j])
};

inline GapSurface gap_surface(const std::vector<double>& rabi, const std::vector<double>& omega, double gamma1,
                              double gamma0 = 0.0) {
  GapSurface s;
  s.rabi = rabi;
  s.omega = omega;
  s.gap.assign(rabi.size(), std::vector<double>(omega.size()));
  parallel_for(rabi.size() * omega.size(), [&](std::size_t idx) {
    const std::size_t i = idx / omega.size();
    const std::size_t j = idx % omega.size();
    s.gap[i][j] = obc_gap(rabi[i], omega[j], gamma0, gamma1);
  });
  return s;
}

}  // namespace optpump

#endif  // OPTPUMP_GAPOPT_HPP
