#ifndef OPTPUMP_CLI_VERIFY_HPP
#define OPTPUMP_CLI_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "optpump/blockstruct.hpp"
#include "optpump/cli/output.hpp"
#include "optpump/closedform.hpp"
#include "optpump/gapopt.hpp"
#include "optpump/matching.hpp"
#include "optpump/spectral.hpp"
#include "optpump/superop.hpp"

namespace optpump::cli {

struct RandomModelOptions {
  int min_l_max = 2;
  int max_l_max = 8;
  bool random_boundary = true;
  Boundary boundary = Boundary::Open;
  bool with_gamma2 = true;
  double max_rate = 2.0;
};

/// Random ladder with one of the three coupling patterns and random rates.
inline ModelConfig random_model_config(std::mt19937_64& rng, const RandomModelOptions& o = {}) {
  std::uniform_int_distribution<int> lmax(o.min_l_max, o.max_l_max);
  std::uniform_int_distribution<int> pattern(0, 2);
  std::uniform_real_distribution<double> rate(0.0, o.max_rate);
  std::uniform_real_distribution<double> rabi(0.05, 1.0);
  std::uniform_real_distribution<double> det(0.0, 0.5);
  std::bernoulli_distribution coin(0.5);
  ModelConfig c;
  c.l_max = lmax(rng);
  switch (pattern(rng)) {
    case 0: c.rabi = UniformCoupling{rabi(rng)}; break;
    case 1: c.rabi = SqrtCoupling{rabi(rng)}; break;
    default: {
      const double r0 = rabi(rng);
      c.rabi = ShiftedInverseSqrtCoupling{r0, rabi(rng)};
    }
  }
  c.omega = {det(rng)};
  c.gamma0 = rate(rng);
  c.gamma1 = std::max(0.05, rate(rng));
  c.gamma2 = o.with_gamma2 ? rate(rng) : 0.0;
  c.boundary = o.random_boundary ? (coin(rng) ? Boundary::Periodic : Boundary::Open) : o.boundary;
  return c;
}

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string note;
};

inline double conjugation_defect(const Eigenvalues& eigs) {
  Eigenvalues c;
  c.reserve(eigs.size());
  for (const auto& z : eigs) c.push_back(std::conj(z));
  return matched_distance(eigs, c);
}

/// ||L(rho)||_inf through the matrix-form generator.
inline double steady_residual(const LadderModel& model, const DensityMatrix& rho) {
  return apply_lindbladian(make_generator(model), rho.matrix()).cwiseAbs().maxCoeff();
}

struct VerifyOptions {
  std::uint64_t seed = 12345;
  int random_models = 5;
  Vectorization dense_tag = Vectorization::RowMajor;  // ColumnMajor injects a fault
};

inline std::vector<CheckResult> run_verify(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  auto run = [&](const std::string& name, double tol, const std::function<double()>& body) {
    CheckResult r;
    r.name = name;
    r.tolerance = tol;
    try {
      r.value = body();
      r.pass = std::isfinite(r.value) && r.value <= tol;
    } catch (const std::exception& e) {
      r.pass = false;
      r.value = std::nan("");
      r.note = e.what();
    }
    out.push_back(r);
  };

  std::mt19937_64 rng(opt.seed);
  std::vector<LadderModel> models;
  for (int i = 0; i < opt.random_models; ++i) models.push_back(build_model(random_model_config(rng)));

  run("trace_preservation", 1e-10, [&] {
    double worst = 0.0;
    for (const auto& m : models) worst = std::max(worst, trace_preservation_residual(liouvillian_matrix(m)));
    return worst;
  });
  run("spectrum_stability", 1e-10, [&] {
    double worst = 0.0;
    for (const auto& m : models)
      worst = std::max(worst, std::max(0.0, full_spectrum(liouvillian_matrix(m)).eigenvalues.front().real()));
    return worst;
  });
  run("conjugation_closure", 1e-8, [&] {
    double worst = 0.0;
    for (const auto& m : models) worst = std::max(worst, conjugation_defect(full_spectrum(liouvillian_matrix(m)).eigenvalues));
    return worst;
  });
  run("steady_state_residual", 1e-9, [&] {
    double worst = 0.0;
    for (const auto& m : models) worst = std::max(worst, steady_residual(m, steady_state(m)));
    return worst;
  });
  run("block_vs_dense", 1e-8, [&] {
    double worst = 0.0;
    for (Boundary b : {Boundary::Open, Boundary::Periodic}) {
      RandomModelOptions o;
      o.min_l_max = o.max_l_max = 5;
      o.random_boundary = false;
      o.boundary = b;
      o.with_gamma2 = false;
      const LadderModel m = build_model(random_model_config(rng, o));
      SuperOperatorMatrix dense = liouvillian_matrix(m);
      dense.vectorization = opt.dense_tag;
      worst = std::max(worst, matched_distance(full_spectrum(dense).eigenvalues, block_spectrum(m).all()));
    }
    return worst;
  });
  run("union_property", 1e-8, [&] {
    RandomModelOptions o;
    o.min_l_max = o.max_l_max = 5;
    o.random_boundary = false;
    o.with_gamma2 = false;
    const LadderModel m = build_model(random_model_config(rng, o));
    const L0Matrix l0 = build_L0(m);
    Eigenvalues blocks;
    for (int c = 0; c < l0.blocks(); ++c) {
      const Eigenvalues e = dense_eigenvalues(l0.block(c));
      blocks.insert(blocks.end(), e.begin(), e.end());
    }
    return matched_distance(dense_eigenvalues(l0.data), blocks);
  });
  run("closedform_obc", 1e-6, [&] {
    double worst = 0.0;
    for (double r : {0.05, 0.1, 0.15, 0.2, 0.25, 0.4})
      worst = std::max(worst, std::abs(gap_obc(r, 1.0).value - obc_gap(r, 0.0, 0.0, 1.0)));
    return worst;
  });
  run("closedform_detuned", 1e-6, [&] {
    double worst = 0.0;
    for (double r : {0.05, 0.15, 0.25, 0.4})
      for (double w : {0.05, 0.2, 0.5})
        worst = std::max(worst, std::abs(gap_obc_omega(r, 1.0, w).value - obc_gap(r, w, 0.0, 1.0)));
    return worst;
  });
  run("closedform_gamma0", 1e-6, [&] {
    double worst = 0.0;
    for (double r : {0.05, 0.1, 0.2, 0.3, 0.5})
      for (double g0 : {0.0, 0.1, 0.3, 0.7, 1.5})
        worst = std::max(worst, std::abs(gap_with_gamma0(r, g0, 1.0).value - obc_gap(r, 0.0, g0, 1.0)));
    return worst;
  });
  return out;
}

inline bool report_checks(const std::vector<CheckResult>& checks, std::ostream& os) {
  int failed = 0;
  for (const auto& c : checks) {
    os << "check=" << c.name << " status=" << (c.pass ? "PASS" : "FAIL") << " value=" << format_double(c.value)
       << " tol=" << format_double(c.tolerance);
    if (!c.note.empty()) os << " note=\"" << c.note << "\"";
    os << "\n";
    if (!c.pass) ++failed;
  }
  os << "verify: " << (checks.size() - static_cast<std::size_t>(failed)) << " passed, " << failed << " failed\n";
  return failed == 0;
}

}  // namespace optpump::cli

#endif  // OPTPUMP_CLI_VERIFY_HPP
