#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "epsearch/graphs.hpp"
#include "epsearch/monitored.hpp"
#include "oracles.hpp"

using namespace epsearch;

namespace {

double sum_except(const std::vector<double>& f, std::size_t skip) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (i != skip) s += f[i];
    return s;
}

}  // namespace

TEST(Evolve, ZeroTimeIsIdentity) {
    const auto g = build_funnel(6, 1.0);
    const Vector psi = basis_state(6, 4);
    EXPECT_LE((evolve(g, psi, 0.0) - psi).norm(), 1e-14);
}

TEST(Evolve, MatchesMatrixExponential) {
    std::mt19937_64 engine(11);
    HermitianGraph g{5, 1.0, Family::custom, oracle::random_hermitian(5, engine)};
    const Vector psi = oracle::random_state(5, engine);
    EXPECT_LE((evolve(g, psi, 0.83) - oracle::unitary(g.matrix, 0.83) * psi).norm(), 1e-12);
}

TEST(Detection, CrawlWalkerMovesUpward) {
    // The crawl carries node x to x+1 per interval, so |x> reaches |0> after N-x steps.
    const int n = 50;
    const auto g = build_crawl(n, 1.0);
    const auto series = first_detection_series(g, Protocol{designed_tau(n, 1.0), basis_state(n, 0), 2 * n},
                                               basis_state(n, 3));
    EXPECT_NEAR(series.f[n - 3 - 1], 1.0, 1e-8);
    EXPECT_LE(sum_except(series.f, n - 3 - 1), 1e-10);
    EXPECT_NEAR(*series.stats.mean_n, n - 3, 1e-8);
    EXPECT_LE(*series.stats.var_n, 1e-8);
}

TEST(Detection, ConjugateCrawlDetectsAtX) {
    const int n = 50;
    const auto g = conjugate(build_crawl(n, 1.0));
    for (int x : {1, 3, 49}) {
        const auto series = first_detection_series(g, Protocol{designed_tau(n, 1.0), basis_state(n, 0), n},
                                                   basis_state(n, x));
        EXPECT_NEAR(series.f[x - 1], 1.0, 1e-8) << x;
    }
}

TEST(Detection, FunnelReturnPeak) {
    const int n = 50;
    const auto series = first_detection_series(build_funnel(n, 1.0),
                                               Protocol{designed_tau(n, 1.0), basis_state(n, 0), 2 * n},
                                               basis_state(n, 0));
    EXPECT_NEAR(series.f[n - 1], 1.0, 1e-8);
    EXPECT_NEAR(*series.stats.mean_n, n, 1e-8);
}

TEST(Detection, FunnelCutoff) {
    const int n = 50;
    const auto series = first_detection_series(build_funnel(n, 1.0),
                                               Protocol{designed_tau(n, 1.0), basis_state(n, 0), 500},
                                               basis_state(n, 17));
    EXPECT_NEAR(std::accumulate(series.f.begin(), series.f.begin() + n, 0.0), 1.0, 1e-8);
    for (int i = n; i < 500; ++i) EXPECT_LE(series.f[i], 1e-10) << i + 1;
    EXPECT_FALSE(series.truncated);
}

TEST(Detection, TwoNodeCrawlHalfPeriod) {
    const auto g = build_crawl(2, 1.0);
    const Protocol protocol{kPi, basis_state(2, 0), 1};
    EXPECT_NEAR(std::abs(detection_amplitude_direct(g, protocol, basis_state(2, 1), 1)), 1.0, 1e-12);
}

TEST(Detection, FirstAmplitudeHasNoProjection) {
    std::mt19937_64 engine(5);
    HermitianGraph g{4, 1.0, Family::custom, oracle::random_hermitian(4, engine)};
    const Vector psi0 = oracle::random_state(4, engine);
    const Protocol protocol{0.6, basis_state(4, 1), 1};
    const Complex expected = basis_state(4, 1).dot(oracle::unitary(g.matrix, 0.6) * psi0);
    EXPECT_LE(std::abs(detection_amplitude_direct(g, protocol, psi0, 1) - expected), 1e-13);
    EXPECT_LE(std::abs(first_detection_series(g, protocol, psi0).phi[0] - expected), 1e-13);
}

TEST(Detection, ProjectionLoopMatchesDirectPath) {
    std::mt19937_64 engine(17);
    HermitianGraph g{6, 1.0, Family::custom, oracle::random_hermitian(6, engine)};
    const Vector psi0 = oracle::random_state(6, engine);
    const Protocol protocol{0.9, basis_state(6, 0), 30};
    const auto series = first_detection_series(g, protocol, psi0);
    for (int n = 1; n <= 30; ++n) {
        EXPECT_LE(std::abs(series.phi[n - 1] - detection_amplitude_direct(g, protocol, psi0, n)), 1e-10) << n;
    }
}

TEST(Detection, RejectsBadInput) {
    const auto g = build_crawl(4, 1.0);
    EXPECT_THROW(first_detection_series(g, Protocol{0.0, basis_state(4, 0), 5}, basis_state(4, 1)), InputError);
    EXPECT_THROW(first_detection_series(g, Protocol{1.0, basis_state(4, 0), 0}, basis_state(4, 1)), InputError);
    EXPECT_THROW(first_detection_series(g, Protocol{1.0, basis_state(4, 0), 5}, Vector::Ones(4)), InputError);
    EXPECT_THROW(first_detection_series(g, Protocol{1.0, basis_state(3, 0), 5}, basis_state(4, 1)), InputError);
}

TEST(Detection, NormBookkeeping) {
    std::mt19937_64 engine(23);
    HermitianGraph g{5, 1.0, Family::custom, oracle::random_hermitian(5, engine)};
    const auto series =
        first_detection_series(g, Protocol{0.4, basis_state(5, 2), 40}, oracle::random_state(5, engine));
    EXPECT_NEAR(series.stats.p_det + series.surviving_norm2, 1.0, 1e-12);
}

TEST(Detection, DarkStateLeakageFlagged) {
    // Node 2 is disconnected from the target: its amplitude is never detected.
    Matrix h = Matrix::Zero(3, 3);
    h(0, 1) = h(1, 0) = 1.0;
    h(2, 2) = 0.3;
    HermitianGraph g{3, 1.0, Family::custom, h};
    Vector psi0 = Vector::Zero(3);
    psi0(1) = psi0(2) = 1.0 / std::sqrt(2.0);
    const auto series = first_detection_series(g, Protocol{0.7, basis_state(3, 0), 2000}, psi0);
    EXPECT_TRUE(series.dark_state_leakage);
    EXPECT_NEAR(series.stats.p_det, 0.5, 1e-6);
    ASSERT_TRUE(series.spectral_gap.has_value());
    EXPECT_LE(*series.spectral_gap, 1e-8);
}

TEST(Statistics, AllZero) {
    const auto stats = detection_statistics(std::vector<double>(10, 0.0), 1.0);
    EXPECT_EQ(stats.p_det, 0.0);
    EXPECT_FALSE(stats.mean_n.has_value());
    EXPECT_FALSE(stats.mean_t.has_value());
}

TEST(Statistics, IncompleteNeedsOptIn) {
    std::vector<double> f{0.25, 0.25};
    EXPECT_FALSE(detection_statistics(f, 1.0).mean_n.has_value());
    const auto conditional = detection_statistics(f, 2.0, {.threshold = 0.999, .allow_conditional = true});
    EXPECT_TRUE(conditional.conditional);
    EXPECT_DOUBLE_EQ(*conditional.mean_n, 1.5);
    EXPECT_DOUBLE_EQ(*conditional.mean_t, 3.0);
}

TEST(Statistics, Moments) {
    std::vector<double> f{0.5, 0.0, 0.5};
    const auto stats = detection_statistics(f, 0.5);
    EXPECT_DOUBLE_EQ(*stats.mean_n, 2.0);
    EXPECT_DOUBLE_EQ(*stats.var_n, 1.0);
    EXPECT_DOUBLE_EQ(*stats.mean_t, 1.0);
}

TEST(TailEstimate, GeometricSeries) {
    std::vector<double> f;
    for (int n = 1; n <= 200; ++n) f.push_back(0.1 * std::pow(0.9, n));
    const double exact = 0.1 * std::pow(0.9, 201) / (1 - 0.9);
    EXPECT_NEAR(truncation_tail_estimate(f), exact, 1e-9 * exact + 1e-15);
}
