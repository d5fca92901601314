#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "optpump/optpump.hpp"

using namespace optpump;

namespace {

ModelConfig uniform_config(int l_max, double rabi, double omega = 0.0, double g0 = 0.0, double g1 = 1.0,
                           Boundary b = Boundary::Open) {
  ModelConfig c;
  c.l_max = l_max;
  c.omega = {omega};
  c.rabi = UniformCoupling{rabi};
  c.gamma0 = g0;
  c.gamma1 = g1;
  c.boundary = b;
  return c;
}

oracle::Params to_params(const LadderModel& m) {
  oracle::Params p;
  p.lmax = m.l_max();
  p.omega = m.omega();
  p.rabi = m.rabi();
  p.g0 = m.gamma0();
  p.g1 = m.gamma1();
  p.g2 = m.gamma2();
  p.pbc = m.boundary() == Boundary::Periodic;
  p.wrap_jumps = m.pbc_wrap_jumps();
  return p;
}

ModelConfig random_config(std::mt19937_64& rng, int l_max) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelConfig c;
  c.l_max = l_max;
  c.omega.clear();
  std::vector<double> rabi;
  for (int l = 1; l < l_max; ++l) c.omega.push_back(0.5 * u(rng));
  for (int l = 1; l <= l_max; ++l) rabi.push_back(0.05 + u(rng));
  c.rabi = CustomCoupling{rabi};
  c.gamma0 = 2.0 * u(rng);
  c.gamma1 = 2.0 * u(rng);
  c.gamma2 = 2.0 * u(rng);
  c.boundary = u(rng) < 0.5 ? Boundary::Open : Boundary::Periodic;
  c.pbc_wrap_jumps = u(rng) < 0.5;
  return c;
}

ComplexMatrix random_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> d;
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(d(rng), d(rng));
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// model

TEST(Model, SixtyStateLadderBuilds) {
  const LadderModel m = build_model(uniform_config(30, 0.25));
  EXPECT_EQ(m.dim(), 60);
  EXPECT_EQ(m.omega().size(), 29u);
  EXPECT_EQ(m.rabi().size(), 30u);
  EXPECT_TRUE(m.translation_invariant());
}

TEST(Model, RejectsSingleRung) {
  ModelConfig c = uniform_config(2, 0.25);
  c.l_max = 1;
  try {
    build_model(c);
    FAIL() << "expected NonPositiveSize";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonPositiveSize);
  }
}

TEST(Model, RejectsNegativeRates) {
  ModelConfig c = uniform_config(3, 0.25);
  c.gamma0 = -0.1;
  EXPECT_THROW(build_model(c), Error);
  c = uniform_config(3, -0.25);
  try {
    build_model(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NegativeRate);
  }
}

TEST(Model, RejectsWrongListLengths) {
  ModelConfig c = uniform_config(4, 0.25);
  c.omega = {0.1, 0.2};
  try {
    build_model(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LengthMismatch);
  }
  c = uniform_config(4, 0.25);
  c.rabi = CustomCoupling{{0.1, 0.2}};
  try {
    build_model(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LengthMismatch);
  }
  c.rabi = CustomCoupling{{0.1, 0.2, 0.3}};
  c.boundary = Boundary::Periodic;
  EXPECT_THROW(build_model(c), Error);
  c.wrap_rabi = 0.4;
  EXPECT_DOUBLE_EQ(build_model(c).rabi().back(), 0.4);
}

TEST(Model, SqrtPatternValues) {
  ModelConfig c = uniform_config(4, 0.0);
  c.rabi = SqrtCoupling{0.25};
  const LadderModel m = build_model(c);
  EXPECT_NEAR(m.rabi()[0], 0.25, 1e-12);
  EXPECT_NEAR(m.rabi()[1], 0.3536, 1e-4);
  EXPECT_NEAR(m.rabi()[2], 0.4330, 1e-4);
  EXPECT_NEAR(m.rabi()[1], 0.25 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(m.rabi()[2], 0.25 * std::sqrt(3.0), 1e-12);
}

TEST(Model, CouplingAt) {
  EXPECT_EQ(coupling_at(UniformCoupling{0.25}, 7), 0.25);
  EXPECT_DOUBLE_EQ(coupling_at(SqrtCoupling{0.25}, 4), 0.5);
  EXPECT_DOUBLE_EQ(coupling_at(ShiftedInverseSqrtCoupling{0.15, 0.25}, 1), 0.25);
  EXPECT_THROW(coupling_at(UniformCoupling{0.25}, 0), Error);
  EXPECT_THROW(coupling_at(CustomCoupling{{0.1}}, 2), Error);
}

TEST(Model, PatternsFiniteAndNonNegative) {
  for (int l = 1; l <= 10000; ++l) {
    for (const CouplingPattern& p :
         {CouplingPattern{UniformCoupling{0.25}}, CouplingPattern{SqrtCoupling{0.25}},
          CouplingPattern{ShiftedInverseSqrtCoupling{0.15, 0.25}}}) {
      const double v = coupling_at(p, l);
      ASSERT_TRUE(std::isfinite(v));
      ASSERT_GE(v, 0.0);
    }
  }
}

TEST(Model, StateIndexing) {
  EXPECT_EQ(state_index(1, Sector::Ground, 30), 1);
  EXPECT_EQ(state_index(15, Sector::Ground, 30), 29);
  const StateIndex s = index_state(2, 30);
  EXPECT_EQ(s.l, 1);
  EXPECT_EQ(s.sector, Sector::Excited);
  EXPECT_THROW(state_index(0, Sector::Ground, 3), Error);
  EXPECT_THROW(state_index(4, Sector::Ground, 3), Error);
  EXPECT_THROW(index_state(7, 3), Error);
  for (int l = 1; l <= 100; ++l)
    for (Sector sec : {Sector::Ground, Sector::Excited}) {
      const StateIndex r = index_state(state_index(l, sec, 100), 100);
      ASSERT_EQ(r.l, l);
      ASSERT_EQ(r.sector, sec);
    }
}

TEST(Model, PbcWrapDefaultsToPatternAtLmax) {
  ModelConfig c = uniform_config(4, 0.0, 0.0, 0.0, 1.0, Boundary::Periodic);
  c.rabi = SqrtCoupling{0.25};
  EXPECT_DOUBLE_EQ(build_model(c).rabi().back(), 0.5);
}

// ---------------------------------------------------------------------------
// operators

TEST(Operators, HamiltonianTwoRungs) {
  const LadderModel m = build_model(uniform_config(2, 0.25, 0.3));
  const ComplexMatrix h = hamiltonian(m);
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(2, 2) = expected(3, 3) = 0.3;   // H[3,3], H[4,4]
  expected(1, 2) = expected(2, 1) = 0.25;  // H[2,3], H[3,2]
  EXPECT_EQ((h - expected).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Operators, HamiltonianZero) {
  const LadderModel m = build_model(uniform_config(3, 0.0));
  EXPECT_EQ(hamiltonian(m).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Operators, HamiltonianPbcWrap) {
  const LadderModel m = build_model(uniform_config(2, 0.25, 0.0, 0.0, 1.0, Boundary::Periodic));
  const ComplexMatrix h = hamiltonian(m);
  EXPECT_EQ(h(3, 0), cplx(0.25));
  EXPECT_EQ(h(0, 3), cplx(0.25));
}

TEST(Operators, HamiltonianExactlyHermitianAndMatchesOracle) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 10; ++k) {
    const LadderModel m = build_model(random_config(rng, 2 + k % 5));
    const ComplexMatrix h = hamiltonian(m);
    EXPECT_EQ((h - h.adjoint()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT((h - oracle::hamiltonian(to_params(m))).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Operators, PumpingJumps) {
  const LadderModel m = build_model(uniform_config(3, 0.25));
  const auto ops = jump_operators(m);
  ASSERT_EQ(ops.size(), 3u);
  for (const auto& op : ops) {
    EXPECT_EQ(op.channel, Channel::P1);
    const ComplexMatrix mat = op.matrix(m.dim());
    // entry (2l-1, 2l) in 1-based indexing
    EXPECT_EQ(mat(2 * op.rung - 2, 2 * op.rung - 1), cplx(1.0));
    EXPECT_EQ(mat.cwiseAbs().sum(), 1.0);
  }
}

TEST(Operators, ClosedSystemHasNoJumps) {
  const LadderModel m = build_model(uniform_config(3, 0.25, 0.0, 0.0, 0.0));
  EXPECT_TRUE(jump_operators(m).empty());
}

TEST(Operators, LongRangeChannel) {
  ModelConfig c = uniform_config(3, 0.25);
  c.gamma2 = 0.5;
  const LadderModel m = build_model(c);
  std::vector<std::pair<int, int>> entries;
  for (const auto& op : jump_operators(m))
    if (op.channel == Channel::P2) {
      EXPECT_DOUBLE_EQ(op.amplitude, std::sqrt(0.5));
      entries.emplace_back(op.target + 1, op.source + 1);
    }
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0], std::make_pair(1, 4));
  EXPECT_EQ(entries[1], std::make_pair(3, 6));
}

TEST(Operators, WrapJumpsOnlyWhenRequested) {
  ModelConfig c = uniform_config(3, 0.25, 0.0, 0.3, 1.0, Boundary::Periodic);
  c.gamma2 = 0.2;
  EXPECT_EQ(jump_operators(build_model(c)).size(), 3u + 2u + 2u);
  c.pbc_wrap_jumps = true;
  EXPECT_EQ(jump_operators(build_model(c)).size(), 3u + 3u + 3u);
}

TEST(Operators, SourceIsExcitedSingleEntry) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10; ++k) {
    const LadderModel m = build_model(random_config(rng, 3 + k % 4));
    for (const auto& op : jump_operators(m)) {
      EXPECT_EQ(index_state(op.source + 1, m.l_max()).sector, Sector::Excited);
      EXPECT_EQ(index_state(op.target + 1, m.l_max()).sector, Sector::Ground);
      EXPECT_EQ((op.matrix(m.dim()).array() != cplx(0.0)).count(), 1);
    }
  }
}

TEST(Operators, EffectiveHamiltonianDiagonal) {
  const LadderModel m = build_model(uniform_config(2, 0.25));
  const ComplexMatrix heff = effective_hamiltonian(m);
  EXPECT_EQ(heff(1, 1), cplx(0.0, -0.5));
  EXPECT_EQ(heff(3, 3), cplx(0.0, -0.5));
  const LadderModel closed = build_model(uniform_config(3, 0.25, 0.1, 0.0, 0.0));
  EXPECT_EQ((effective_hamiltonian(closed) - hamiltonian(closed)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Operators, EffectiveHamiltonianDissipative) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 10; ++k) {
    const LadderModel m = build_model(random_config(rng, 2 + k % 6));
    const ComplexMatrix diff = effective_hamiltonian(m) - hamiltonian(m);
    for (int i = 0; i < m.dim(); ++i)
      for (int j = 0; j < m.dim(); ++j) {
        if (i != j) ASSERT_EQ(diff(i, j), cplx(0.0));
        ASSERT_EQ(diff(i, j).real(), 0.0);
        ASSERT_LE(diff(i, j).imag(), 0.0);
      }
    for (const auto& z : dense_eigenvalues(effective_hamiltonian(m))) EXPECT_LE(z.imag(), 1e-12);
  }
}

// ---------------------------------------------------------------------------
// superop

TEST(Superop, VectorizeHalfIdentity) {
  const ComplexMatrix rho = 0.5 * ComplexMatrix::Identity(2, 2);
  const ComplexVector v = vectorize(rho);
  ASSERT_EQ(v.size(), 4);
  EXPECT_EQ(v(0), cplx(0.5));
  EXPECT_EQ(v(1), cplx(0.0));
  EXPECT_EQ(v(2), cplx(0.0));
  EXPECT_EQ(v(3), cplx(0.5));
}

TEST(Superop, RoundTrip) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const ComplexMatrix a = random_matrix(rng, 5);
    const ComplexMatrix rho = a + a.adjoint();
    EXPECT_EQ((devectorize(vectorize(rho)) - rho).cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_THROW(devectorize(ComplexVector::Zero(5)), Error);
  EXPECT_THROW(vectorize(ComplexMatrix::Zero(2, 3)), Error);
}

TEST(Superop, KroneckerIdentity) {
  std::mt19937_64 rng(5);
  const ComplexMatrix a = random_matrix(rng, 3), rho = random_matrix(rng, 3), b = random_matrix(rng, 3);
  const ComplexMatrix k = Eigen::kroneckerProduct(a, b.transpose()).eval();
  EXPECT_LT((vectorize(a * rho * b) - k * vectorize(rho)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Superop, ZeroGenerator) {
  // l_max = 1 is rejected, so the static two-level case is a decoupled l_max = 2 ladder.
  const LadderModel m = build_model(uniform_config(2, 0.0, 0.0, 0.0, 0.0));
  EXPECT_EQ(liouvillian_matrix(m).data.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Superop, MatchesKroneckerOracle) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 12; ++k) {
    const LadderModel m = build_model(random_config(rng, 2 + k % 6));
    const SuperOperatorMatrix s = liouvillian_matrix(m);
    EXPECT_EQ(s.vectorization, Vectorization::RowMajor);
    EXPECT_LT((s.data - oracle::liouvillian(to_params(m))).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Superop, ActionMatchesMatrixForm) {
  std::mt19937_64 rng(19);
  const LadderModel m = build_model(random_config(rng, 4));
  const SuperOperatorMatrix s = liouvillian_matrix(m);
  for (int k = 0; k < 5; ++k) {
    const ComplexMatrix rho = random_matrix(rng, m.dim());
    const ComplexMatrix via_super = devectorize(s.data * vectorize(rho));
    EXPECT_LT((via_super - oracle::apply(to_params(m), rho)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((via_super - apply_lindbladian(make_generator(m), rho)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Superop, ExceptionalPointSubBlock) {
  const LadderModel m = build_model(uniform_config(2, 0.25));
  const SuperOperatorMatrix s = liouvillian_matrix(m);
  const int n = 4;
  const int idx[2] = {excited(1), ground(2)};
  std::vector<int> sector;
  for (int a : idx)
    for (int b : idx) sector.push_back(a * n + b);
  ComplexMatrix sub(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) sub(i, j) = s.data(sector[i], sector[j]);
  // Fourfold exceptional point: a dense solve splits it by ~eps^(1/4).
  for (const auto& z : dense_eigenvalues(sub)) EXPECT_LT(std::abs(z - cplx(-0.5)), 1e-3);
  // The characteristic polynomial is exactly (lambda + 1/2)^4.
  const ComplexMatrix shifted = sub + 0.5 * ComplexMatrix::Identity(4, 4);
  EXPECT_LT((shifted * shifted * shifted * shifted).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Superop, TracePreservation) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 10; ++k) {
    const LadderModel m = build_model(random_config(rng, 2 + k % 7));
    EXPECT_LT(trace_preservation_residual(liouvillian_matrix(m)), 1e-10);
  }
  SuperOperatorMatrix zero;
  zero.n = 3;
  zero.data = ComplexMatrix::Zero(9, 9);
  EXPECT_EQ(trace_preservation_residual(zero), 0.0);
}

TEST(Superop, DroppedAnticommutatorBreaksTrace) {
  const double gamma = 0.7;
  const LadderModel m = build_model(uniform_config(3, 0.25, 0.0, 0.0, gamma));
  SuperOperatorMatrix s = liouvillian_matrix(m);
  const int n = m.dim();
  // remove -1/2 {s^+ s, rho} of the rung-2 pumping jump
  const int src = excited(2);
  for (int j = 0; j < n; ++j) {
    s.data(src * n + j, src * n + j) += 0.5 * gamma;
    s.data(j * n + src, j * n + src) += 0.5 * gamma;
  }
  EXPECT_GE(trace_preservation_residual(s), gamma - 1e-12);
}

TEST(Superop, VectorizationTagChecked) {
  const LadderModel m = build_model(uniform_config(2, 0.25));
  SuperOperatorMatrix s = liouvillian_matrix(m);
  s.vectorization = Vectorization::ColumnMajor;
  try {
    full_spectrum(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::VectorizationMismatch);
  }
}

TEST(Superop, DenseLimit) {
  const LadderModel m = build_model(uniform_config(17, 0.25));
  try {
    liouvillian_matrix(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionTooLarge);
  }
}

TEST(Superop, DensityMatrixValidation) {
  ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
  rho(0, 0) = 0.5;
  rho(1, 1) = 0.5;
  EXPECT_NO_THROW(DensityMatrix::from_matrix(rho));
  rho(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix::from_matrix(rho), Error);  // not Hermitian
  rho(1, 0) = 0.1;
  EXPECT_NO_THROW(DensityMatrix::from_matrix(rho));
  rho(0, 1) = rho(1, 0) = 0.0;
  rho(0, 0) = 1.2;
  rho(1, 1) = -0.2;
  EXPECT_THROW(DensityMatrix::from_matrix(rho), Error);  // negative eigenvalue
  rho(1, 1) = 0.2;
  EXPECT_THROW(DensityMatrix::from_matrix(rho), Error);  // trace
  const LadderModel m = build_model(uniform_config(30, 0.25));
  const DensityMatrix s = DensityMatrix::basis_state(m, 15, Sector::Ground);
  EXPECT_EQ(s.matrix()(28, 28), cplx(1.0));
}
