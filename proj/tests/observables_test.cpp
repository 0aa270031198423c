#include "ratchet/observables.hpp"

#include <gtest/gtest.h>

#include <numbers>

#include "ratchet/propagate.hpp"
#include "test_support.hpp"

namespace ratchet {
namespace {

WaveState basis_state(std::size_t n1, std::size_t n2, long m1, long m2,
                      double b1 = 0.0, double b2 = 0.0) {
  WaveState s(n1, n2, b1, b2);
  s(lattice::index_of(m1, n1), lattice::index_of(m2, n2)) = 1.0;
  return s;
}

TEST(MeanMomentumTest, BasisStates) {
  EXPECT_EQ(mean_p1(init_zero_momentum_state(16, 16, 0.0, 0.0)), 0.0);
  EXPECT_DOUBLE_EQ(mean_p1(init_zero_momentum_state(16, 16, 0.05, 0.0)), 0.05);
  EXPECT_DOUBLE_EQ(mean_p1(basis_state(16, 16, 3, 0)), 3.0);
  EXPECT_DOUBLE_EQ(mean_p(basis_state(16, 16, 3, -5, 0.0, 0.1), Axis::second),
                   -4.9);
}

TEST(EnergyTest, RotorAndHarper) {
  const auto s0 = init_zero_momentum_state(16, 16, 0.0, 0.0);
  EXPECT_EQ(mean_energy(s0, Axis::first, ModelKind::ckr), 0.0);
  EXPECT_DOUBLE_EQ(mean_energy(s0, Axis::first, ModelKind::ckh, 4.0), 4.0);
  EXPECT_DOUBLE_EQ(mean_energy(basis_state(16, 16, 2, 0), Axis::first,
                               ModelKind::ckr),
                   2.0);
}

TEST(DistributionTest, InitialStateIsADelta) {
  const auto s = init_zero_momentum_state(16, 16, 0.04, 0.0);
  const auto d = momentum_distribution(s, Axis::first, false);
  ASSERT_EQ(d.m.size(), 16u);
  EXPECT_EQ(d.m.front(), -8);
  EXPECT_EQ(d.m.back(), 7);
  for (std::size_t k = 0; k < 16; ++k) {
    EXPECT_EQ(d.f[k], d.m[k] == 0 ? 1.0 : 0.0);
    EXPECT_DOUBLE_EQ(d.p[k], d.m[k] + 0.04);
  }
}

TEST(DistributionTest, NormalizedAndConsistentWithMean) {
  const auto m = [] {
    auto x = ModelSpec::defaults(ModelKind::ckr);
    x.n1 = x.n2 = 128;
    return x;
  }();
  const auto t = build_phase_tables(m, 0.03, -0.01);
  auto s = init_zero_momentum_state(128, 128, 0.03, -0.01);
  for (int n = 0; n < 10; ++n) step_forward(s, t);
  const auto d = momentum_distribution(s, Axis::first, false);
  double total = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < d.f.size(); ++k) {
    total += d.f[k];
    mean += d.p[k] * d.f[k];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(mean, mean_p1(s), 1e-12);
  const auto scaled = momentum_distribution(s, Axis::first, true);
  EXPECT_DOUBLE_EQ(*std::max_element(scaled.f.begin(), scaled.f.end()), 1.0);
}

TEST(DistributionTest, CosineAtZeroBetaIsSymmetric) {
  auto m = ModelSpec::defaults(ModelKind::ckr);
  m.n1 = m.n2 = 256;
  m.interaction = InteractionKind::cosine;
  const auto t = build_phase_tables(m, 0.0, 0.0);
  auto s = init_zero_momentum_state(256, 256, 0.0, 0.0);
  for (int n = 0; n < 15; ++n) {
    step_forward(s, t);
    const auto d = momentum_distribution(s, Axis::first, false);
    for (std::size_t k = 1; k < d.f.size(); ++k) {
      const std::size_t mirror = d.f.size() - k;
      EXPECT_NEAR(d.f[k], d.f[mirror], 1e-10);
    }
    EXPECT_NEAR(mean_p1(s), 0.0, 1e-10);
  }
}

TEST(DistributionTest, Asymmetry) {
  const std::vector<double> sym = {0.1, 0.2, 0.4, 0.2, 0.1};
  EXPECT_EQ(distribution_asymmetry(sym, -2), 0.0);
  const std::vector<double> skew = {0.0, 0.1, 0.5, 0.4, 0.0};
  EXPECT_NEAR(distribution_asymmetry(skew, -2), 0.6, 1e-15);
  // m = -2 has no mirror on an even lattice {-2, -1, 0, 1}.
  const std::vector<double> even = {0.3, 0.2, 0.3, 0.2};
  EXPECT_NEAR(distribution_asymmetry(even, -2), 0.3, 1e-15);
}

TEST(KappaTest, UniformPositionStateGivesZero) {
  const auto s = init_zero_momentum_state(32, 32, 0.0, 0.0);
  EXPECT_NEAR(kappa(s, Axis::first, 5.0), 0.0, 1e-15);
  EXPECT_NEAR(kappa(s, Axis::second, 5.0), 0.0, 1e-15);
}

TEST(KappaTest, LocalizedStatePicksUpSine) {
  WaveState s(16, 16, 0.0, 0.0, GridConvention::zero_to_two_pi,
              Representation::position);
  s(4, 0) = 1.0;  // q1 = pi/2, q2 = 0
  EXPECT_NEAR(kappa(s, Axis::first, 5.0), 5.0, 1e-14);
  EXPECT_NEAR(kappa(s, Axis::second, 5.0), 0.0, 1e-14);
  // Same answer from the momentum representation.
  transform_both(s, Representation::momentum);
  EXPECT_NEAR(kappa(s, Axis::first, 5.0), 5.0, 1e-13);
  EXPECT_EQ(s.representation(Axis::first), Representation::momentum);
}

TEST(AutocorrelationTest, ConstantSeries) {
  const std::vector<double> c(64, 2.5);
  const auto a = autocorrelation(c, 10);
  ASSERT_EQ(a.centered.size(), 11u);
  for (std::size_t m = 0; m <= 10; ++m) {
    EXPECT_EQ(a.centered[m], 0.0);
    EXPECT_EQ(a.normalized[m], 0.0);
    EXPECT_DOUBLE_EQ(a.raw[m], 6.25);
  }
}

TEST(AutocorrelationTest, AlternatingSeries) {
  std::vector<double> x(100);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? -1.0 : 1.0;
  const auto a = autocorrelation(x, 20);
  for (std::size_t m = 0; m <= 20; ++m) {
    EXPECT_NEAR(a.normalized[m], m % 2 ? -1.0 : 1.0, 1e-15);
  }
}

TEST(AutocorrelationTest, LagZeroIsVariance) {
  std::vector<double> x(200);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.37 * i * i);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= x.size();
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= x.size();
  const auto a = autocorrelation(x, 250);
  EXPECT_NEAR(a.centered[0], var, 1e-12);
  EXPECT_EQ(a.centered.size(), 200u);
  EXPECT_DOUBLE_EQ(a.normalized[0], 1.0);
}

TEST(AutocorrelationTest, ShortSeriesRejected) {
  EXPECT_THROW(autocorrelation(std::vector<double>(31, 1.0), 5),
               SeriesTooShort);
}

TEST(EdgeTest, InitialStateHasNone) {
  EXPECT_EQ(edge_population(init_zero_momentum_state(64, 64, 0, 0), 4), 0.0);
}

TEST(EdgeTest, UniformStateClosedForm) {
  for (auto [n1, n2, band] : {std::tuple{64, 48, 4}, std::tuple{33, 40, 3}}) {
    WaveState s(n1, n2, 0.0, 0.0);
    for (auto& z : s.amplitudes()) z = 1.0 / std::sqrt(double(n1 * n2));
    const double inner1 = double(n1 - 2 * band) / n1;
    const double inner2 = double(n2 - 2 * band) / n2;
    EXPECT_NEAR(edge_population(s, band), 1.0 - inner1 * inner2, 1e-13);
    auto m = ModelSpec::defaults(ModelKind::ckr);
    EXPECT_NEAR(measure_step(s, m, band).edge_population,
                1.0 - inner1 * inner2, 1e-13);
  }
}

TEST(EdgeTest, BandIsValidated) {
  const auto s = init_zero_momentum_state(16, 16, 0, 0);
  EXPECT_THROW(edge_population(s, 0), InvalidDimension);
  EXPECT_THROW(edge_population(s, 4), InvalidDimension);
  EXPECT_NO_THROW(edge_population(s, 3));
}

TEST(MeasureStepTest, AgreesWithSeparateObservables) {
  auto m = ModelSpec::defaults(ModelKind::ckh);
  m.n1 = 64;
  m.n2 = 48;
  const auto t = build_phase_tables(m, 0.02, -0.03);
  auto s = init_zero_momentum_state(64, 48, 0.02, -0.03);
  for (int n = 0; n < 40; ++n) step_forward(s, t);
  const auto o = measure_step(s, m, 3);
  EXPECT_NEAR(o.mean_p1, mean_p1(s), 1e-12);
  EXPECT_NEAR(o.mean_p2, mean_p(s, Axis::second), 1e-12);
  EXPECT_NEAR(o.energy1, mean_energy(s, Axis::first, m.kind, m.l1), 1e-12);
  EXPECT_NEAR(o.energy2, mean_energy(s, Axis::second, m.kind, m.l2), 1e-12);
  EXPECT_NEAR(o.kinetic1, mean_energy(s, Axis::first, ModelKind::ckr), 1e-11);
  EXPECT_NEAR(o.edge_population, edge_population(s, 3), 1e-14);
  EXPECT_NEAR(o.norm, 1.0, 1e-12);
}

TEST(ObservablesTest, RequireMomentumRepresentation) {
  WaveState s(16, 16, 0, 0, GridConvention::zero_to_two_pi,
              Representation::position);
  EXPECT_THROW(mean_p1(s), RepresentationError);
  EXPECT_THROW(edge_population(s, 2), RepresentationError);
}

}  // namespace
}  // namespace ratchet
