#ifndef OPTPUMP_CLI_COMMANDS_HPP
#define OPTPUMP_CLI_COMMANDS_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "optpump/cli/config.hpp"
#include "optpump/cli/output.hpp"
#include "optpump/cli/verify.hpp"
#include "optpump/optpump.hpp"

namespace optpump::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitCheckFailure = 1, kExitUsage = 2 };

inline const char* series_color(Boundary b) { return b == Boundary::Open ? "#1f77b4" : "#d62728"; }

inline LadderModel model_for(const RunConfig& cfg, Boundary b) {
  ModelConfig m = cfg.model;
  m.boundary = b;
  return build_model(m);
}

/// Full spectrum through the block path, or the dense generator when gamma2 != 0.
inline SpectrumResult model_spectrum(const LadderModel& m) {
  if (m.gamma2() == 0.0) return block_spectrum(m).to_spectrum();
  return full_spectrum(liouvillian_matrix(m));
}

inline void ensure_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(Errc::IoError, "cannot create output directory '" + out.string() + "'");
}

// ---------------------------------------------------------------------------

inline int cmd_spectrum(const RunConfig& cfg, const fs::path& out, std::ostream& os) {
  ensure_dir(out);
  CsvWriter csv({"boundary", "index", "re", "im"});
  SvgPlot svg("Liouvillian spectrum", "Re lambda", "Im lambda");
  std::vector<std::pair<Boundary, SpectrumResult>> spectra;
  for (Boundary b : cfg.boundaries) spectra.emplace_back(b, model_spectrum(model_for(cfg, b)));

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& [b, s] : spectra)
    for (const auto& z : s.eigenvalues) {
      x0 = std::min(x0, z.real());
      x1 = std::max(x1, z.real());
      y0 = std::min(y0, z.imag());
      y1 = std::max(y1, z.imag());
    }
  const double padx = 0.05 * std::max(x1 - x0, 1e-3), pady = 0.05 * std::max(y1 - y0, 1e-3);
  svg.set_range(x0 - padx, x1 + padx, y0 - pady, y1 + pady);

  for (const auto& [b, s] : spectra) {
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
      csv.row({to_string(b), std::to_string(k + 1), format_double(s.eigenvalues[k].real()),
               format_double(s.eigenvalues[k].imag())});
    for (const auto& z : s.eigenvalues) svg.circle(z.real(), z.imag(), b == Boundary::Open ? 2.0 : 3.0, series_color(b));
    svg.legend(to_string(b), series_color(b));
    os << "boundary=" << to_string(b) << " eigenvalues=" << s.eigenvalues.size() << " gap=" << format_double(s.gap)
       << "\n";
  }
  if (spectra.size() == 2) {
    try {
      const EnclosureReport r =
          spectrum_encloses(spectra[1].second.eigenvalues, spectra[0].second.eigenvalues, cfg.enclosure_eps);
      os << "enclosure: inside=" << r.inside << " outside=" << r.outside << " excluded=" << r.excluded
         << " loop_points=" << r.loop_points << " identical=" << (r.identical ? "yes" : "no") << "\n";
    } catch (const Error& e) {
      os << "enclosure: " << e.what() << "\n";
    }
  }
  write_atomic(out / "spectrum.csv", csv.str());
  write_atomic(out / "spectrum.svg", svg.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline int cmd_steady(const RunConfig& cfg, const fs::path& out, std::ostream& os) {
  ensure_dir(out);
  const LadderModel m = model_for(cfg, cfg.boundaries.front());
  SteadySpace space = m.gamma2() == 0.0 ? steady_space_blocks(m)
                                         : steady_space(liouvillian_matrix(m).data, SectorEmbedding::full(m.dim()));
  if (space.degenerate()) {
    os << "steady: degenerate steady space, dimension " << space.dimension() << "\n";
    return kExitCheckFailure;
  }
  const DensityMatrix rho = density_from_steady(space);
  const int n = m.dim();
  CsvWriter csv({"row", "col", "re", "im"});
  SvgPlot svg("Steady state |rho_nm|", "m", "n");
  svg.set_range(0.5, n + 0.5, 0.5, n + 0.5);
  double peak = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) peak = std::max(peak, std::abs(rho.matrix()(i, j)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx v = rho.matrix()(i, j);
      csv.row({std::to_string(i + 1), std::to_string(j + 1), format_double(v.real()), format_double(v.imag())});
      // row 1 drawn at the top
      svg.cell(j + 1, n - i, 1.0, 1.0, gradient_color(peak > 0.0 ? std::abs(v) / peak : 0.0));
    }
  svg.colorbar(0.0, peak);
  double ground = 0.0, excited_total = 0.0;
  for (int l = 1; l <= m.l_max(); ++l) {
    ground += rho.matrix()(optpump::ground(l), optpump::ground(l)).real();
    excited_total += rho.matrix()(optpump::excited(l), optpump::excited(l)).real();
  }
  os << "boundary=" << to_string(m.boundary()) << " rho_11=" << format_double(rho.matrix()(0, 0).real())
     << " ground_total=" << format_double(ground) << " excited_total=" << format_double(excited_total) << "\n";
  write_atomic(out / "steady.csv", csv.str());
  write_atomic(out / "steady.svg", svg.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline int cmd_dynamics(const RunConfig& cfg, const fs::path& out, std::ostream& os) {
  ensure_dir(out);
  const LadderModel m = model_for(cfg, cfg.boundaries.front());
  const DensityMatrix rho0 = DensityMatrix::basis_state(m, cfg.initial_l, cfg.initial_sector);
  const std::vector<double> times = uniform_times(cfg.t_end, cfg.dt);
  DynamicsTrace tr;
  if (cfg.method == "spectral") {
    try {
      tr = evolve_spectral(m, rho0, times);
    } catch (const Error& e) {
      if (e.code() != Errc::IllConditionedBasis && e.code() != Errc::DimensionTooLarge) throw;
      os << "spectral evolution unavailable (" << e.what() << "); using ode\n";
      tr = evolve_ode(m, rho0, times);
    }
  } else {
    tr = evolve_ode(m, rho0, times);
  }

  std::optional<DensityMatrix> rho_ss;
  try {
    rho_ss = steady_state(m);
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateSteadySpace) throw;
    os << "steady state degenerate; ntilde not defined\n";
  }
  if (rho_ss) observables(tr, *rho_ss);

  const int n = m.dim();
  CsvWriter csv({"t", "n", "population"});
  CsvWriter summary({"t", "mean_index", "ntilde"});
  double peak = 0.0;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    for (int i = 0; i < n; ++i) {
      const double p = tr.populations[k][static_cast<std::size_t>(i)];
      csv.row({format_double(tr.times[k]), std::to_string(i + 1), format_double(p)});
      peak = std::max(peak, p);
    }
    summary.row({format_double(tr.times[k]), format_double(tr.mean_index[k]),
                 rho_ss ? format_double(tr.ntilde[k]) : std::string("nan")});
  }

  SvgPlot svg("Populations rho_nn(t) and <n>(t)", "t", "n");
  const double t_last = tr.times.back();
  const std::size_t stride = std::max<std::size_t>(1, (tr.times.size() + 199) / 200);
  const double width = tr.times.size() > 1 ? (tr.times[1] - tr.times[0]) * static_cast<double>(stride) : 1.0;
  svg.set_range(-0.5 * width, t_last + 0.5 * width, 0.5, n + 0.5);
  for (std::size_t k = 0; k < tr.times.size(); k += stride)
    for (int i = 0; i < n; ++i)
      svg.cell(tr.times[k], i + 1, width, 1.0,
               gradient_color(peak > 0.0 ? tr.populations[k][static_cast<std::size_t>(i)] / peak : 0.0));
  svg.polyline(tr.times, tr.mean_index, "#ffffff", 2.0);
  svg.colorbar(0.0, peak);

  os << "method=" << to_string(tr.method) << " samples=" << tr.times.size()
     << " mean_index_final=" << format_double(tr.mean_index.back()) << "\n";
  if (rho_ss) {
    try {
      const RateFit fit = fit_asymptotic_rate(tr);
      os << "rate=" << format_double(fit.rate) << " window=[" << format_double(fit.t_begin) << ","
         << format_double(fit.t_end) << "] points=" << fit.points << " residual=" << format_double(fit.residual)
         << "\n";
    } catch (const Error& e) {
      os << "rate: " << e.what() << "\n";
    }
    if (m.gamma2() == 0.0) os << "gap=" << format_double(block_spectrum(m).to_spectrum().gap) << "\n";
  }
  write_atomic(out / "dynamics.csv", csv.str());
  write_atomic(out / "dynamics_summary.csv", summary.str());
  write_atomic(out / "dynamics.svg", svg.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

namespace detail {

/// Closed-form gap for a scan point where one applies (OBC, uniform couplings, gamma2 = 0).
inline std::optional<double> closed_form_for(const ModelConfig& c) {
  if (c.boundary != Boundary::Open || c.gamma2 != 0.0 || c.omega.size() != 1) return std::nullopt;
  const auto* u = std::get_if<UniformCoupling>(&c.rabi);
  if (!u) return std::nullopt;
  const double w = c.omega.front();
  if (c.gamma0 == 0.0) return w == 0.0 ? gap_obc(u->rabi, c.gamma1).value : gap_obc_omega(u->rabi, c.gamma1, w).value;
  if (w == 0.0) return gap_with_gamma0(u->rabi, c.gamma0, c.gamma1).value;
  return std::nullopt;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  return colors[i % 5];
}

}  // namespace detail

inline int cmd_gap_surface(const RunConfig& cfg, const fs::path& out, std::ostream& os) {
  const GapSurface s = gap_surface(cfg.rabi_grid, cfg.omega_grid, cfg.model.gamma1, cfg.model.gamma0);
  CsvWriter surf({"rabi", "omega", "gap"});
  CsvWriter csv({"scan_parameter", "value", "gap", "method"});
  double peak = 0.0;
  for (std::size_t i = 0; i < s.rabi.size(); ++i)
    for (std::size_t j = 0; j < s.omega.size(); ++j) {
      surf.row({format_double(s.rabi[i]), format_double(s.omega[j]), format_double(s.gap[i][j])});
      peak = std::max(peak, s.gap[i][j]);
    }
  // omega = 0 column against the closed form
  for (std::size_t j = 0; j < s.omega.size(); ++j) {
    if (s.omega[j] != 0.0) continue;
    for (std::size_t i = 0; i < s.rabi.size(); ++i) {
      csv.row({"rabi", format_double(s.rabi[i]), format_double(s.gap[i][j]), "block"});
      if (cfg.model.gamma0 == 0.0)
        csv.row({"rabi", format_double(s.rabi[i]), format_double(gap_obc(s.rabi[i], cfg.model.gamma1).value),
                 "closedform"});
    }
  }
  auto span = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double step = v.size() > 1 ? (*hi - *lo) / static_cast<double>(v.size() - 1) : 1.0;
    return std::array<double, 3>{*lo, *hi, step > 0.0 ? step : 1.0};
  };
  const auto xr = span(s.omega);
  const auto yr = span(s.rabi);
  SvgPlot svg("Liouvillian gap over (omega, Omega)", "omega", "Omega");
  svg.set_range(xr[0] - 0.5 * xr[2], xr[1] + 0.5 * xr[2], yr[0] - 0.5 * yr[2], yr[1] + 0.5 * yr[2]);
  for (std::size_t i = 0; i < s.rabi.size(); ++i)
    for (std::size_t j = 0; j < s.omega.size(); ++j)
      svg.cell(s.omega[j], s.rabi[i], xr[2], yr[2], gradient_color(peak > 0.0 ? s.gap[i][j] / peak : 0.0));
  svg.colorbar(0.0, peak);
  os << "surface: " << s.rabi.size() << "x" << s.omega.size() << " cells, max gap " << format_double(peak) << "\n";
  write_atomic(out / "gap_surface.csv", surf.str());
  write_atomic(out / "gap_scan.csv", csv.str());
  write_atomic(out / "gap_scan.svg", svg.str());
  return kExitOk;
}

inline int cmd_gap(const RunConfig& cfg, const fs::path& out, std::ostream& os) {
  ensure_dir(out);
  if (cfg.scan == "surface") return cmd_gap_surface(cfg, out, os);
  const ScanParameter p = parse_scan_parameter(cfg.scan);
  CsvWriter csv({"scan_parameter", "value", "gap", "method"});
  SvgPlot svg("Liouvillian gap scan", to_string(p), "gap");
  struct Series {
    std::string label;
    std::vector<double> x, y;
  };
  std::vector<Series> series;
  const bool tagged = cfg.boundaries.size() > 1;
  for (Boundary b : cfg.boundaries) {
    ModelConfig base = cfg.model;
    base.boundary = b;
    const std::string label = tagged ? std::string(to_string(p)) + "@" + to_string(b) : std::string(to_string(p));
    const auto points = gap_scan(base, p, cfg.grid);
    Series num{label + " " + (points.empty() ? "" : to_string(points.front().method)), {}, {}};
    Series cf{label + " closedform", {}, {}};
    for (const auto& pt : points) {
      csv.row({label, format_double(pt.value), format_double(pt.gap), to_string(pt.method)});
      num.x.push_back(pt.value);
      num.y.push_back(pt.gap);
    }
    for (const auto& pt : points)
      if (const auto v = detail::closed_form_for(with_parameter(base, p, pt.value))) {
        csv.row({label, format_double(pt.value), format_double(*v), "closedform"});
        cf.x.push_back(pt.value);
        cf.y.push_back(*v);
      }
    series.push_back(std::move(num));
    if (!cf.x.empty()) series.push_back(std::move(cf));
  }
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y1 = 0.0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y1 = std::max(y1, s.y[i]);
    }
  svg.set_range(x0, x1, 0.0, y1 > 0.0 ? 1.1 * y1 : 1.0);
  for (std::size_t k = 0; k < series.size(); ++k) {
    svg.polyline(series[k].x, series[k].y, detail::palette(k), k % 2 ? 1.0 : 2.0);
    for (std::size_t i = 0; i < series[k].x.size(); ++i) svg.circle(series[k].x[i], series[k].y[i], 3.0, detail::palette(k));
    svg.legend(series[k].label, detail::palette(k));
    os << series[k].label << ": " << series[k].x.size() << " points\n";
  }
  write_atomic(out / "gap_scan.csv", csv.str());
  write_atomic(out / "gap_scan.svg", svg.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline int cmd_optimize(const RunConfig& cfg, const fs::path& out, std::ostream& os) {
  ensure_dir(out);
  const double g1 = cfg.model.gamma1;
  CsvWriter csv({"rabi", "omega", "gamma0_star", "gap_star", "classification", "dgap_dgamma0",
                 "closedform_gamma0_star", "closedform_gap_star"});
  auto cellf = [&](const std::string& v, int w) { os << std::left << std::setw(w) << v << ' '; };
  cellf("rabi", 8);
  cellf("omega", 8);
  cellf("gamma0_star", 22);
  cellf("gap_star", 22);
  cellf("classification", 19);
  cellf("dgap/dgamma0", 22);
  os << "closedform\n";
  for (double r : cfg.rabi_grid)
    for (double w : cfg.omega_grid) {
      const OptimizeResult res = maximize_gap_gamma0(r, w, g1);
      const DerivativeResult d = gap_derivative_at_zero(r, w, g1);
      std::string cf_g0, cf_gap;
      if (w == 0.0) {
        cf_g0 = format_double(gamma0_optimal(r, g1).value);
        cf_gap = format_double(gap_max(r, g1).value);
      }
      csv.row({format_double(r), format_double(w), format_double(res.gamma0_star), format_double(res.gap_star),
               to_string(res.classification), format_double(d.value), cf_g0, cf_gap});
      cellf(format_double(r), 8);
      cellf(format_double(w), 8);
      cellf(format_double(res.gamma0_star), 22);
      cellf(format_double(res.gap_star), 22);
      cellf(to_string(res.classification), 19);
      cellf(format_double(d.value), 22);
      os << (cf_g0.empty() ? std::string("-") : cf_g0 + " / " + cf_gap) << "\n";
    }
  write_atomic(out / "optimize.csv", csv.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline int cmd_verify(const RunConfig& cfg, const fs::path& out, std::ostream& os) {
  ensure_dir(out);
  VerifyOptions opt;
  opt.seed = cfg.seed;
  opt.random_models = cfg.random_models;
  opt.dense_tag = cfg.vectorization == "column_major" ? Vectorization::ColumnMajor : Vectorization::RowMajor;
  const auto checks = run_verify(opt);
  const bool ok = report_checks(checks, os);
  CsvWriter csv({"check", "status", "value", "tolerance"});
  for (const auto& c : checks)
    csv.row({c.name, c.pass ? "PASS" : "FAIL", format_double(c.value), format_double(c.tolerance)});
  write_atomic(out / "verify.csv", csv.str());
  return ok ? kExitOk : kExitCheckFailure;
}

inline int run_command(const std::string& name, const RunConfig& cfg, const fs::path& out, std::ostream& os) {
  if (name == "spectrum") return cmd_spectrum(cfg, out, os);
  if (name == "steady") return cmd_steady(cfg, out, os);
  if (name == "dynamics") return cmd_dynamics(cfg, out, os);
  if (name == "gap") return cmd_gap(cfg, out, os);
  if (name == "optimize") return cmd_optimize(cfg, out, os);
  if (name == "verify") return cmd_verify(cfg, out, os);
  throw Error(Errc::InvalidArgument, "unknown command '" + name + "'");
}

}  // namespace optpump::cli

#endif  // OPTPUMP_CLI_COMMANDS_HPP
