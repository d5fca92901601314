#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "optpump/optpump.hpp"

using namespace optpump;

namespace {

// Gap from the Kronecker-product oracle, independent of the library's solvers.
double oracle_gap(double rabi, double omega, double g0, double g1) {
  const auto eigs = oracle::eigenvalues(oracle::liouvillian(oracle::uniform(4, rabi, omega, g0, g1)));
  return make_spectrum(Eigenvalues(eigs.begin(), eigs.end())).gap;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1)));
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// gap_obc

TEST(GapObc, PlateauValue) {
  const GapFormulaResult r = gap_obc(0.25, 1.0);
  EXPECT_DOUBLE_EQ(r.value, 0.25);
  EXPECT_EQ(r.branch, FormulaBranch::Second);
}

TEST(GapObc, NoDrive) { EXPECT_EQ(gap_obc(0.0, 1.0).value, 0.0); }

TEST(GapObc, WeakDrive) {
  EXPECT_NEAR(gap_obc(0.1, 1.0).value, 0.0208712, 1e-7);
  EXPECT_NEAR(gap_obc(0.1, 1.0).value, oracle_gap(0.1, 0.0, 0.0, 1.0), 1e-6);
}

TEST(GapObc, MatchesNumericOnGrid) {
  for (double r : {0.05, 0.1, 0.15, 0.2, 0.25, 0.4})
    EXPECT_NEAR(gap_obc(r, 1.0).value, oracle_gap(r, 0.0, 0.0, 1.0), 1e-6) << r;
  for (double g1 : log_grid(0.1, 5.0, 6))
    for (double r : log_grid(0.01, 2.0, 6)) EXPECT_NEAR(gap_obc(r, g1).value, obc_gap(r, 0.0, 0.0, g1), 1e-6);
}

// ---------------------------------------------------------------------------
// gap_obc_omega

TEST(GapDetuned, BranchResolvedByOracle) {
  const std::vector<double> rabi{0.05, 0.1, 0.2, 0.3, 0.5};
  const std::vector<double> omega{0.02, 0.1, 0.3, 0.6, 1.0};
  auto numeric = [](double r, double w, double g1) { return oracle_gap(r, w, 0.0, g1); };
  const SqrtBranch b = resolve_detuned_branch(numeric, rabi, omega, 1.0);
  EXPECT_EQ(b, kDetunedSqrtBranch);
}

TEST(GapDetuned, PrintedBranchFails) {
  const double numeric = oracle_gap(0.1, 0.2, 0.0, 1.0);
  EXPECT_GT(std::abs(gap_obc_omega(0.1, 1.0, 0.2, SqrtBranch::ImaginaryPrincipal).value - numeric), 1e-3);
}

TEST(GapDetuned, UnresolvableOracle) {
  auto wrong = [](double, double, double) { return -1.0; };
  try {
    resolve_detuned_branch(wrong, {0.1}, {0.1}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BranchUnresolved);
  }
}

TEST(GapDetuned, ReducesToUndetuned) {
  for (double r : {0.05, 0.1, 0.2, 0.25, 0.3, 0.5})
    EXPECT_NEAR(gap_obc_omega(r, 1.0, 0.0).value, gap_obc(r, 1.0).value, 1e-12);
}

TEST(GapDetuned, ReferencePoint) {
  const double v = gap_obc_omega(0.25, 1.0, 0.3).value;
  EXPECT_LT(v, 0.25);
  EXPECT_NEAR(v, oracle_gap(0.25, 0.3, 0.0, 1.0), 1e-6);
}

TEST(GapDetuned, MonotoneToZero) {
  double prev = gap_obc_omega(0.25, 1.0, 0.0).value;
  double prev_numeric = obc_gap(0.25, 0.0, 0.0, 1.0);
  for (double w : log_grid(0.01, 100.0, 25)) {
    const double v = gap_obc_omega(0.25, 1.0, w).value;
    const double n = obc_gap(0.25, w, 0.0, 1.0);
    EXPECT_LE(v, prev + 1e-12);
    EXPECT_LE(n, prev_numeric + 1e-9);
    EXPECT_NEAR(v, n, 1e-6) << w;
    prev = v;
    prev_numeric = n;
  }
  EXPECT_LT(prev, 1e-4);
}

// ---------------------------------------------------------------------------
// gap_with_gamma0

TEST(GapGamma0, SecondBranch) {
  // 4 Omega >= gamma0 + gamma1 and 64 Omega^2 (gamma1 - gamma0) > 3 (gamma1 + gamma0)^3
  const double g0 = 0.1;
  ASSERT_GE(4 * 0.3, g0 + 1.0);
  ASSERT_GT(64 * 0.09 * (1.0 - g0), 3 * std::pow(1.0 + g0, 3));
  const GapFormulaResult r = gap_with_gamma0(0.3, g0, 1.0);
  EXPECT_EQ(r.branch, FormulaBranch::Second);
  EXPECT_DOUBLE_EQ(r.value, (g0 + 1.0) / 4);
  EXPECT_EQ(printed_gamma0_branch(0.3, g0, 1.0), FormulaBranch::Second);
}

TEST(GapGamma0, ReducesWithoutGamma0) {
  for (double r : {0.05, 0.1, 0.2, 0.25, 0.4}) EXPECT_EQ(gap_with_gamma0(r, 0.0, 1.0).value, gap_obc(r, 1.0).value);
}

TEST(GapGamma0, StrongPumping) { EXPECT_NEAR(gap_with_gamma0(0.5, 0.5, 1.0).value, oracle_gap(0.5, 0.0, 0.5, 1.0), 1e-6); }

TEST(GapGamma0, MatchesNumericOnGrid) {
  for (double r : {0.05, 0.1, 0.2, 0.3, 0.5})
    for (double g0 : {0.0, 0.1, 0.3, 0.7, 1.5})
      EXPECT_NEAR(gap_with_gamma0(r, g0, 1.0).value, oracle_gap(r, 0.0, g0, 1.0), 1e-6) << r << " " << g0;
  for (double g1 : {0.5, 1.0, 2.0})
    for (double r : log_grid(0.02, 2.0, 8))
      for (double g0 : log_grid(1e-3, 5.0, 8))
        EXPECT_NEAR(gap_with_gamma0(r, g0, g1).value, obc_gap(r, 0.0, g0, g1), 1e-6);
}

TEST(GapGamma0, PrintedSelectorWhereItHolds) {
  // The printed branch conditions are reliable for gamma0 well below gamma1.
  for (double r : {0.05, 0.1, 0.2, 0.3, 0.5})
    for (double g0 : {0.0, 0.05, 0.1, 0.2})
      EXPECT_NEAR(gap_with_gamma0_printed(r, g0, 1.0).value, oracle_gap(r, 0.0, g0, 1.0), 1e-6) << r << " " << g0;
}

TEST(GapGamma0, PrintedSelectorFailsForStrongPumping) {
  EXPECT_NEAR(gap_with_gamma0_printed(0.3, 1.0, 1.0).value, 0.1, 1e-12);
  EXPECT_NEAR(oracle_gap(0.3, 0.0, 1.0, 1.0), 0.08525, 1e-5);
  EXPECT_NEAR(gap_with_gamma0(0.3, 1.0, 1.0).value, oracle_gap(0.3, 0.0, 1.0, 1.0), 1e-6);
}

TEST(GapGamma0, CubicUndefinedWithoutGamma0) { EXPECT_TRUE(std::isnan(gamma0_cubic_gap(0.3, 0.0, 1.0))); }

// ---------------------------------------------------------------------------
// gamma0_optimal and gap_max

TEST(Optimum, MiddleBranch) {
  EXPECT_NEAR(gamma0_optimal(0.27, 1.0).value, 0.08, 1e-12);
  EXPECT_EQ(gamma0_optimal(0.27, 1.0).branch, FormulaBranch::Second);
  EXPECT_DOUBLE_EQ(gap_max(0.27, 1.0).value, 0.27);
}

TEST(Optimum, WeakDrive) {
  EXPECT_EQ(gamma0_optimal(0.1, 1.0).value, 0.0);
  EXPECT_NEAR(gap_max(0.2, 1.0).value, 0.1, 1e-12);
}

TEST(Optimum, StrongDriveArgmax) {
  const double star = gamma0_optimal(0.5, 1.0).value;
  double best = 0.0, arg = 0.0;
  for (int k = 0; k <= 3000; ++k) {
    const double g0 = 1e-3 * k;
    const double v = gap_with_gamma0(0.5, g0, 1.0).value;
    if (v > best) {
      best = v;
      arg = g0;
    }
  }
  EXPECT_NEAR(arg, star, 1e-3);
}

TEST(Optimum, GapMaxIsGridMaximum) {
  for (double r : {0.1, 0.2, 0.27, 0.3, 0.5, 1.0}) {
    double best = 0.0;
    // The maximum is a kink of slope ~1/4, so a 1e-4 step bounds the grid error by ~2.5e-5.
    for (int k = 0; k <= 30000; ++k) best = std::max(best, gap_with_gamma0(r, 1e-4 * k, 1.0).value);
    EXPECT_NEAR(gap_max(r, 1.0).value, best, 1e-4) << r;
  }
}

TEST(Optimum, Asymptote) {
  const double v = gap_max(50.0, 1.0).value;
  EXPECT_GE(v, 0.45);
  EXPECT_LE(v, 0.5);
  EXPECT_LT(gap_max(1.0, 1.0).value, gap_max(10.0, 1.0).value);
}

// ---------------------------------------------------------------------------
// scans

TEST(Scan, Gamma0DecreasingForWeakDrive) {
  ModelConfig base = uniform_obc_config(0.1, 0.0, 0.0, 1.0);
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(0.1 * k);
  const auto pts = gap_scan(base, ScanParameter::Gamma0, grid);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LT(pts[i].gap, pts[i - 1].gap);
  EXPECT_EQ(pts[0].method, GapMethod::Block);
}

TEST(Scan, SizeConstantUnderObc) {
  ModelConfig base = uniform_obc_config(0.25, 0.0, 0.0, 1.0);
  for (const auto& p : gap_scan(base, ScanParameter::Size, {8, 16, 24, 40, 60})) EXPECT_NEAR(p.gap, 0.25, 1e-6);
}

TEST(Scan, ShiftedPatternObcFinitePbcDecreasing) {
  ModelConfig base = uniform_obc_config(0.0, 0.0, 0.0, 1.0);
  base.rabi = ShiftedInverseSqrtCoupling{0.1, 0.25};
  const std::vector<double> grid{8, 16, 32, 64, 96};
  const auto obc = gap_scan(base, ScanParameter::Size, grid);
  base.boundary = Boundary::Periodic;
  const auto pbc = gap_scan(base, ScanParameter::Size, grid);
  const double limit = gap_obc(0.1, 1.0).value;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    EXPECT_LT(pbc[i].gap, pbc[i - 1].gap);
    EXPECT_GE(obc[i].gap, limit - 1e-9);
  }
  EXPECT_LT(std::abs(obc.back().gap - obc[obc.size() - 2].gap), std::abs(obc[1].gap - obc[0].gap));
  EXPECT_GT(obc.back().gap, pbc.back().gap);
}

TEST(Scan, ErrorsCarryGridIndex) {
  ModelConfig base = uniform_obc_config(0.25, 0.0, 0.0, 1.0);
  try {
    gap_scan(base, ScanParameter::Gamma0, {0.1, 0.2, -1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NegativeRate);
    EXPECT_NE(std::string(e.what()).find("grid index 2"), std::string::npos);
  }
  EXPECT_THROW(gap_scan(base, ScanParameter::Size, {7}), Error);
  EXPECT_THROW(parse_scan_parameter("bogus"), Error);
}

TEST(Scan, DenseFallbackWithLongRange) {
  ModelConfig base = uniform_obc_config(0.25, 0.0, 0.0, 1.0, 3);
  const auto pts = gap_scan(base, ScanParameter::Gamma2, {0.0, 0.3});
  EXPECT_EQ(pts[0].method, GapMethod::Block);
  EXPECT_EQ(pts[1].method, GapMethod::Dense);
}

TEST(Scan, ParallelMatchesSerial) {
  ModelConfig base = uniform_obc_config(0.3, 0.1, 0.0, 1.0);
  std::vector<double> grid;
  for (int k = 0; k < 16; ++k) grid.push_back(0.07 * k);
  std::vector<double> serial(grid.size()), threaded(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { serial[i] = obc_gap(0.3, 0.1, grid[i], 1.0); }, 1);
  parallel_for(grid.size(), [&](std::size_t i) { threaded[i] = obc_gap(0.3, 0.1, grid[i], 1.0); }, 4);
  EXPECT_EQ(serial, threaded);
}

// ---------------------------------------------------------------------------
// derivative and optimizer

TEST(Derivative, SecondBranchSlope) { EXPECT_NEAR(gap_derivative_at_zero(0.3, 0.0, 1.0).value, 0.25, 0.02); }

TEST(Derivative, FirstBranchSlope) {
  const double analytic = 0.25 * (1.0 - 1.0 / std::sqrt(1.0 - 16.0 * 0.01));
  EXPECT_NEAR(analytic, -0.0228, 1e-4);
  EXPECT_NEAR(gap_derivative_at_zero(0.1, 0.0, 1.0).value, -0.0228, 0.005);
  EXPECT_NEAR(gap_derivative_at_zero(0.1, 0.0, 1.0).value, analytic, 1e-4);
}

TEST(Derivative, SignMatchesShape) {
  for (double r : {0.1, 0.2, 0.3, 0.5})
    for (double w : {0.0, 0.1, 0.3, 0.6}) {
      const bool rising = gap_derivative_at_zero(r, w, 1.0).value > 1e-4;
      const bool interior = maximize_gap_gamma0(r, w, 1.0).classification == GapShape::InteriorMaximum;
      EXPECT_EQ(rising, interior) << r << " " << w;
    }
}

TEST(Optimizer, InteriorOptimumAtRabi027) {
  const OptimizeResult r = maximize_gap_gamma0(0.27, 0.0, 1.0);
  EXPECT_NEAR(r.gamma0_star, 0.08, 0.01);
  EXPECT_NEAR(r.gap_star, 0.27, 0.005);
  EXPECT_EQ(r.classification, GapShape::InteriorMaximum);
  EXPECT_NEAR(r.gap_star, obc_gap(0.27, 0.0, r.gamma0_star, 1.0), 1e-12);
}

TEST(Optimizer, WeakDriveBoundary) {
  const OptimizeResult r = maximize_gap_gamma0(0.1, 0.0, 1.0);
  EXPECT_EQ(r.gamma0_star, 0.0);
  EXPECT_EQ(r.classification, GapShape::MonotoneDecreasing);
  EXPECT_NEAR(r.gap_star, gap_obc(0.1, 1.0).value, 1e-8);
}

TEST(Optimizer, DetuningLowersOptimum) {
  EXPECT_LE(maximize_gap_gamma0(0.25, 0.3, 1.0).gap_star, maximize_gap_gamma0(0.25, 0.0, 1.0).gap_star);
}

TEST(Optimizer, AgreesWithClosedForm) {
  for (double r : {0.1, 0.2, 0.27, 0.3, 0.5, 1.0}) {
    const OptimizeResult o = maximize_gap_gamma0(r, 0.0, 1.0);
    EXPECT_NEAR(o.gamma0_star, gamma0_optimal(r, 1.0).value, 1e-3) << r;
    EXPECT_NEAR(o.gap_star, gap_max(r, 1.0).value, 1e-3) << r;
  }
}

TEST(Optimizer, Deterministic) {
  const OptimizeResult a = maximize_gap_gamma0(0.4, 0.1, 1.0);
  const OptimizeResult b = maximize_gap_gamma0(0.4, 0.1, 1.0);
  EXPECT_EQ(a.gamma0_star, b.gamma0_star);
  EXPECT_EQ(a.gap_star, b.gap_star);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

// ---------------------------------------------------------------------------
// surfaces

TEST(Surface, RowsColumnsAndPlateau) {
  const std::vector<double> rabi{0.05, 0.1, 0.2, 0.25, 0.5};
  const std::vector<double> omega{0.0, 0.1, 0.2, 0.4, 0.8};
  const GapSurface s = gap_surface(rabi, omega, 1.0);
  for (std::size_t i = 0; i < rabi.size(); ++i) {
    EXPECT_NEAR(s.gap[i][0], gap_obc(rabi[i], 1.0).value, 1e-6);
    for (std::size_t j = 1; j < omega.size(); ++j) EXPECT_LE(s.gap[i][j], s.gap[i][j - 1] + 1e-9);
    for (std::size_t j = 0; j < omega.size(); ++j) EXPECT_EQ(s.gap[i][j], obc_gap(rabi[i], omega[j], 0.0, 1.0));
  }
  EXPECT_NEAR(s.gap[4][0], 0.25, 1e-6);
}
