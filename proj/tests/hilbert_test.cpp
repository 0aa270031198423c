#include "ratchet/hilbert.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <numbers>

#include "test_support.hpp"

namespace ratchet {
namespace {

using testing::max_abs_diff;
using testing::random_state;

TEST(LatticeTest, MomentumOrderingIsDftOrder) {
  EXPECT_EQ(lattice::momentum_at(0, 8), 0);
  EXPECT_EQ(lattice::momentum_at(3, 8), 3);
  EXPECT_EQ(lattice::momentum_at(4, 8), -4);
  EXPECT_EQ(lattice::momentum_at(7, 8), -1);
  // Odd N: {-3, ..., 3}.
  EXPECT_EQ(lattice::momentum_at(3, 7), 3);
  EXPECT_EQ(lattice::momentum_at(4, 7), -3);
  for (std::size_t n : {4u, 5u, 8u, 9u}) {
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(lattice::index_of(lattice::momentum_at(i, n), n), i);
    }
  }
}

TEST(LatticeTest, PositionGridConventions) {
  EXPECT_DOUBLE_EQ(lattice::position_at(0, 8, GridConvention::zero_to_two_pi),
                   0.0);
  EXPECT_DOUBLE_EQ(lattice::position_at(0, 8, GridConvention::minus_pi_to_pi),
                   -std::numbers::pi);
  EXPECT_DOUBLE_EQ(lattice::position_at(4, 8, GridConvention::minus_pi_to_pi),
                   0.0);
  EXPECT_NEAR(lattice::wrap(7.0, GridConvention::zero_to_two_pi),
              7.0 - 2 * std::numbers::pi, 1e-15);
  EXPECT_NEAR(lattice::wrap(3.5, GridConvention::minus_pi_to_pi),
              3.5 - 2 * std::numbers::pi, 1e-15);
}

TEST(InitStateTest, UnitAmplitudeAtZeroMomentum) {
  const auto s = init_zero_momentum_state(8, 8, 0.0, 0.0);
  for (std::size_t a = 0; a < 8; ++a) {
    for (std::size_t b = 0; b < 8; ++b) {
      const double expected = (a == 0 && b == 0) ? 1.0 : 0.0;
      EXPECT_EQ(s(a, b), Complex(expected, 0.0));
    }
  }
  EXPECT_EQ(s.representation(Axis::first), Representation::momentum);
  EXPECT_EQ(s.representation(Axis::second), Representation::momentum);
}

TEST(InitStateTest, StoresQuasiMomenta) {
  const auto s = init_zero_momentum_state(8, 8, 0.05, -0.02);
  EXPECT_EQ(s.beta(Axis::first), 0.05);
  EXPECT_EQ(s.beta(Axis::second), -0.02);
  EXPECT_EQ(s(0, 0), Complex(1.0, 0.0));
  EXPECT_DOUBLE_EQ(init_zero_momentum_state(16, 16, 0, 0).norm_squared(), 1.0);
}

TEST(InitStateTest, RejectsSmallDimensions) {
  EXPECT_THROW(init_zero_momentum_state(3, 8, 0, 0), InvalidDimension);
  EXPECT_THROW(init_zero_momentum_state(8, 2, 0, 0), InvalidDimension);
}

TEST(TransformTest, ZeroMomentumIsUniformPlaneWave) {
  auto s = init_zero_momentum_state(8, 8, 0, 0);
  transform_axis(s, Axis::first, Representation::position);
  for (std::size_t j = 0; j < 8; ++j) {
    EXPECT_NEAR(std::abs(s(j, 0) - 1.0 / std::sqrt(8.0)), 0.0, 1e-15);
  }
  EXPECT_EQ(s.representation(Axis::first), Representation::position);
  EXPECT_EQ(s.representation(Axis::second), Representation::momentum);
}

TEST(TransformTest, FourPointTransformOfUnitMomentum) {
  // Direct evaluation: psi(q_j) = (1/2) e^{i q_j}, q_j = j pi / 2.
  WaveState s(4, 4, 0, 0);
  s(lattice::index_of(1, 4), 0) = 1.0;
  transform_axis(s, Axis::first, Representation::position);
  for (std::size_t j = 0; j < 4; ++j) {
    const double q = std::numbers::pi * static_cast<double>(j) / 2.0;
    EXPECT_NEAR(std::abs(s(j, 0) - 0.5 * std::polar(1.0, q)), 0.0, 1e-15);
  }
}

TEST(TransformTest, ShiftedGridUsesShiftedPositions) {
  WaveState s(5, 4, 0, 0, GridConvention::minus_pi_to_pi);
  s(lattice::index_of(-2, 5), 1) = 1.0;
  transform_axis(s, Axis::first, Representation::position);
  for (std::size_t j = 0; j < 5; ++j) {
    const double q =
        lattice::position_at(j, 5, GridConvention::minus_pi_to_pi);
    EXPECT_NEAR(std::abs(s(j, 1) - std::polar(1.0 / std::sqrt(5.0), -2.0 * q)),
                0.0, 1e-15);
  }
}

TEST(TransformTest, RejectsTransformIntoCurrentRepresentation) {
  auto s = init_zero_momentum_state(8, 8, 0, 0);
  EXPECT_THROW(transform_axis(s, Axis::second, Representation::momentum),
               RepresentationError);
}

TEST(TransformTest, RoundTripAndUnitarityOnRandomStates) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto grid :
         {GridConvention::zero_to_two_pi, GridConvention::minus_pi_to_pi}) {
      const std::size_t n1 = 4 + seed % 7;
      const std::size_t n2 = 4 + (seed * 3) % 9;
      const auto orig =
          random_state(n1, n2, seed, Representation::momentum, grid);
      auto s = orig;
      transform_axis(s, Axis::first, Representation::position);
      EXPECT_NEAR(s.norm_squared(), 1.0, 1e-13);
      transform_axis(s, Axis::second, Representation::position);
      EXPECT_NEAR(s.norm_squared(), 1.0, 1e-13);
      transform_axis(s, Axis::first, Representation::momentum);
      transform_axis(s, Axis::second, Representation::momentum);
      EXPECT_LT(max_abs_diff(s, orig), 1e-13);

      auto both = orig;
      transform_both(both, Representation::position);
      auto split = orig;
      transform_axis(split, Axis::first, Representation::position);
      transform_axis(split, Axis::second, Representation::position);
      EXPECT_LT(max_abs_diff(both, split), 1e-13);
    }
  }
}

TEST(TransformTest, EveryBasisStateHasFlatPositionModulus) {
  for (std::size_t n : {4u, 7u, 8u}) {
    for (std::size_t i = 0; i < n; ++i) {
      WaveState s(n, 4, 0.0, 0.0);
      s(i, 0) = 1.0;
      transform_axis(s, Axis::first, Representation::position);
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_NEAR(std::abs(s(j, 0)), 1.0 / std::sqrt(double(n)), 1e-15);
      }
    }
  }
}

TEST(PartialTraceTest, ProductStateIsPure) {
  const auto a = random_state(6, 4, 1);
  // Product c = u (x) v from the first row and column of a random state.
  WaveState s(6, 5, 0, 0);
  std::vector<Complex> u(6), v(5);
  double nu = 0, nv = 0;
  for (std::size_t i = 0; i < 6; ++i) nu += std::norm(u[i] = a(i, 0));
  for (std::size_t i = 0; i < 5; ++i) nv += std::norm(v[i] = a(i % 6, 1));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t k = 0; k < 5; ++k)
      s(i, k) = u[i] * v[k] / std::sqrt(nu * nv);
  const auto rho = partial_trace_1(s).rho;
  EXPECT_LT((rho * rho - rho).cwiseAbs().maxCoeff(), 1e-14);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t k = 0; k < 6; ++k)
      EXPECT_NEAR(std::abs(rho(i, k) - u[i] * std::conj(u[k]) / nu), 0.0,
                  1e-14);
}

TEST(PartialTraceTest, InitialStateAndMaximallyEntangled) {
  const auto init = init_zero_momentum_state(8, 8, 0, 0);
  const auto r0 = partial_trace_1(init);
  EXPECT_EQ(r0.at_momentum(0, 0), Complex(1.0, 0.0));
  EXPECT_EQ(r0.rho.cwiseAbs().sum(), 1.0);

  WaveState ent(6, 6, 0, 0);
  for (std::size_t i = 0; i < 6; ++i) ent(i, i) = 1.0 / std::sqrt(6.0);
  const auto r = partial_trace_1(ent).rho;
  EXPECT_LT((r - Eigen::MatrixXcd::Identity(6, 6) / 6.0).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(PartialTraceTest, RequiresMomentumRepresentation) {
  auto s = init_zero_momentum_state(8, 8, 0, 0);
  transform_axis(s, Axis::second, Representation::position);
  EXPECT_THROW(partial_trace_1(s), RepresentationError);
  EXPECT_THROW(fidelity_q(s), RepresentationError);
}

TEST(PartialTraceTest, HermitianUnitTracePsdOnRandomStates) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const auto s = random_state(4 + seed % 9, 4 + seed % 5, seed);
    const auto rho = partial_trace_1(s).rho;
    EXPECT_LT((rho - rho.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    EXPECT_NEAR(rho.trace().imag(), 0.0, 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
    EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(FidelityTest, MatchesReducedDensityEntry) {
  EXPECT_EQ(fidelity_q(init_zero_momentum_state(8, 8, 0.1, 0.2)), 1.0);
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    const auto s = random_state(5 + seed % 4, 6, seed);
    const auto rho = partial_trace_1(s);
    EXPECT_NEAR(fidelity_q(s), rho.at_momentum(0, 0).real(), 1e-12);
  }
  auto s = random_state(8, 8, 7);
  for (std::size_t k = 0; k < 8; ++k) s(0, k) = 0.0;
  EXPECT_EQ(fidelity_q(s), 0.0);
}

}  // namespace
}  // namespace ratchet
