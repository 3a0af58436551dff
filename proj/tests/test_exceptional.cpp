#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "epsearch/exceptional.hpp"
#include "epsearch/graphs.hpp"
#include "oracles.hpp"

using namespace epsearch;

namespace {

std::vector<Complex> circle(double radius, int count, double offset = 0.1) {
    std::vector<Complex> xs;
    for (int i = 0; i < count; ++i) xs.push_back(std::polar(radius, offset + kTwoPi * i / count));
    return xs;
}

// Spectral data with p_k = 1/N and phases E_k tau = 2 pi k / N, built without a graph.
SpectralData uniform_roots(int n, double tau) {
    SpectralData s;
    s.energies.resize(n);
    for (int k = 0; k < n; ++k) s.energies(k) = kTwoPi * k / (n * tau);
    s.eigenvectors = Matrix::Identity(n, n);
    s.overlaps = RealVector::Constant(n, 1.0 / n);
    return s;
}

}  // namespace

TEST(Survival, TwoNodeCrawlIsStrictlyLower) {
    const auto s = survival_operator(build_crawl(2, 1.0), basis_state(2, 0), kPi);
    EXPECT_LE(std::abs(s.matrix(0, 0)) + std::abs(s.matrix(0, 1)) + std::abs(s.matrix(1, 1)), 1e-15);
    EXPECT_NEAR(s.matrix(1, 0).real(), 0.0, 1e-15);
    EXPECT_NEAR(s.matrix(1, 0).imag(), -1.0, 1e-15);
    EXPECT_LE((s.matrix * s.matrix).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Survival, MatchesDenseExponential) {
    std::mt19937_64 engine(2);
    HermitianGraph g{5, 1.0, Family::custom, oracle::random_hermitian(5, engine)};
    const auto s = survival_operator(g, basis_state(5, 3), 1.1);
    EXPECT_LE((s.matrix - oracle::survival(g.matrix, basis_state(5, 3), 1.1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Spectrum, CrawlFiftyIsExceptional) {
    const auto report = survival_spectrum(survival_operator(build_crawl(50, 1.0), basis_state(50, 0), kTwoPi / 50));
    EXPECT_TRUE(report.is_exceptional);
    EXPECT_LE(report.nilpotency_norm, 1e-6);
    EXPECT_NEAR(report.index_norm, 1.0, 1e-8);
    EXPECT_TRUE(report.dark_states.empty());
}

TEST(Spectrum, SkIsNotExceptional) {
    const auto report = survival_spectrum(survival_operator(build_sk(50, 1), basis_state(50, 0), 1.3));
    EXPECT_FALSE(report.is_exceptional);
    EXPECT_GT(report.max_abs_eig, 0.0);
    EXPECT_LT(report.max_abs_eig, 1.0);
}

TEST(Spectrum, TwoNodeEigenvaluesVanish) {
    const auto report = survival_spectrum(survival_operator(build_crawl(2, 1.0), basis_state(2, 0), kPi));
    for (const auto& xi : report.eigenvalues) EXPECT_LE(std::abs(xi), 1e-15);
}

TEST(Spectrum, DisconnectedNodeIsDark) {
    Matrix h = Matrix::Zero(3, 3);
    h(0, 1) = h(1, 0) = 1.0;
    const auto report = survival_spectrum(survival_operator(HermitianGraph{3, 1.0, Family::custom, h}, basis_state(3, 0), 0.5));
    ASSERT_EQ(report.dark_states.size(), 1u);
    EXPECT_NEAR(report.dark_states[0].abs_xi, 1.0, 1e-12);
}

TEST(Spectrum, EigenvaluesScatterButNormVanishes) {
    const int n = 8;
    const auto report = survival_spectrum(survival_operator(build_funnel(n, 1.0), basis_state(n, 0), designed_tau(n, 1.0)));
    EXPECT_TRUE(report.is_exceptional);
    const double bound = 10.0 * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / n);
    for (const auto& xi : report.eigenvalues) EXPECT_LE(std::abs(xi), bound);
}

TEST(Tolerance, ScalesBeyondSixtyFour) {
    EXPECT_DOUBLE_EQ(nilpotency_tolerance(2), 1e-6);
    EXPECT_DOUBLE_EQ(nilpotency_tolerance(64), 1e-6);
    EXPECT_DOUBLE_EQ(nilpotency_tolerance(128), 2e-6);
}

TEST(Identity, UniformRootsOfUnity) {
    const auto spectral = uniform_roots(5, 0.3);
    EXPECT_LE(characteristic_identity_check(spectral, 0.3, circle(0.5, 32)), 1e-10);
}

TEST(Identity, OriginGivesZero) {
    EXPECT_LE(characteristic_identity_check(uniform_roots(4, 1.0), 1.0, {Complex(0.0)}), 1e-15);
}

TEST(Identity, PerturbedOverlapBreaks) {
    auto spectral = uniform_roots(5, 0.3);
    spectral.overlaps(0) += 0.01;
    EXPECT_GT(characteristic_identity_check(spectral, 0.3, circle(0.5, 32)), 1e-4);
}

TEST(Identity, ShiftedCrawlSpectrum) {
    const int n = 7;
    const auto g = shifted(build_crawl(n, 1.0), 2.5);
    const double tau = designed_tau(n, 1.0);
    const auto spectral = diagonalize(g, basis_state(n, 0));
    EXPECT_LE(characteristic_identity_check(spectral, tau, circle(0.6, 40)), 1e-10);
}

TEST(Identity, RejectsSampleOnPole) {
    EXPECT_THROW(characteristic_identity_check(uniform_roots(3, 1.0), 1.0, {Complex(1.0, 0.0)}), InputError);
}

TEST(DeterminantLemma, RandomGraph) {
    std::mt19937_64 engine(9);
    HermitianGraph g{6, 1.0, Family::custom, oracle::random_hermitian(6, engine)};
    EXPECT_LE(determinant_lemma_residual(g, oracle::random_state(6, engine), 0.8, circle(0.7, 16)), 1e-8);
}

TEST(Probe, TwoLevel) {
    const auto report = necessary_condition_probe(2, 1e-9);
    ASSERT_EQ(report.admissible.size(), 1u);
    EXPECT_NEAR(report.admissible[0].deltas[0], kPi, 1e-12);
    EXPECT_NEAR(report.admissible[0].p[0].real(), 0.5, 1e-12);
    EXPECT_NEAR(report.admissible[0].p[1].real(), 0.5, 1e-12);
    EXPECT_TRUE(report.matches_uniform_roots);
}

TEST(Probe, ThreeLevel) {
    const auto report = necessary_condition_probe(3, 1e-9);
    ASSERT_EQ(report.admissible.size(), 2u);
    EXPECT_TRUE(report.matches_uniform_roots);
    for (const auto& s : report.admissible) {
        for (const auto& p : s.p) EXPECT_NEAR(std::abs(p - Complex(1.0 / 3)), 0.0, 1e-12);
    }
}

TEST(Probe, QuarterTurnIsComplex) {
    const auto p = solve_zero_overlaps({kPi / 2});
    ASSERT_EQ(p.size(), 2u);
    EXPECT_GT(std::abs(p[0].imag()), 0.1);
}

TEST(Probe, ThreeLevelClosedForm) {
    // Lagrange form: p_k = prod_{m != k} w_m / (w_m - w_k).
    const double d2 = 0.9;
    const double d3 = 2.6;
    const Complex w2 = std::polar(1.0, d2);
    const Complex w3 = std::polar(1.0, d3);
    const auto p = solve_zero_overlaps({d2, d3});
    EXPECT_LE(std::abs(p[0] - w2 * w3 / ((w2 - 1.0) * (w3 - 1.0))), 1e-12);
    EXPECT_LE(std::abs(p[1] - w3 / ((1.0 - w2) * (w3 - w2))), 1e-12);
    EXPECT_LE(std::abs(p[2] - w2 / ((1.0 - w3) * (w2 - w3))), 1e-12);
}

TEST(Probe, DegeneratePhases) { EXPECT_TRUE(solve_zero_overlaps({0.0}).empty()); }

TEST(Probe, UnsupportedSize) { EXPECT_THROW(necessary_condition_probe(4, 1e-9), InputError); }
