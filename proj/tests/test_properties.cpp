// Randomised invariants. Every case is seeded so failures reproduce.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "epsearch/exceptional.hpp"
#include "epsearch/graphs.hpp"
#include "epsearch/monitored.hpp"
#include "epsearch/qbasis.hpp"
#include "epsearch/topology.hpp"
#include "oracles.hpp"

using namespace epsearch;

namespace {

Matrix random_unitary(int n, std::mt19937_64& engine) {
    std::normal_distribution<double> normal;
    Matrix a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a(r, c) = Complex(normal(engine), normal(engine));
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(n, n);
}

// A search problem meeting the sufficient conditions with a random eigenbasis:
// energies on the 2 pi / (N tau) ladder (randomly folded by multiples of
// 2 pi / tau) and a target with equal weight on every eigenvector.
struct DesignedProblem {
    HermitianGraph graph;
    Vector target;
    double tau;
};

DesignedProblem random_designed(int n, std::mt19937_64& engine) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::uniform_int_distribution<int> fold(-2, 2);
    const double tau = 0.3 + uniform(engine);
    const double shift = 4.0 * (uniform(engine) - 0.5);
    RealVector energies(n);
    for (int k = 0; k < n; ++k) energies(k) = shift + (kTwoPi * k / n + kTwoPi * fold(engine)) / tau;
    const Matrix vectors = random_unitary(n, engine);
    Vector target = Vector::Zero(n);
    for (int k = 0; k < n; ++k) target += std::polar(1.0 / std::sqrt(double(n)), kTwoPi * uniform(engine)) * vectors.col(k);
    const Matrix h = vectors * energies.cast<Complex>().asDiagonal() * vectors.adjoint();
    HermitianGraph g{n, 1.0, Family::custom, 0.5 * (h + h.adjoint())};
    return {g, target / target.norm(), tau};
}

HermitianGraph random_graph(int n, std::mt19937_64& engine) {
    return HermitianGraph{n, 1.0, Family::custom, oracle::random_hermitian(n, engine)};
}

}  // namespace

TEST(Property, ProjectionLoopMatchesMatrixPower) {
    std::mt19937_64 engine(1001);
    std::uniform_int_distribution<int> size(2, 8);
    std::uniform_real_distribution<double> tau_dist(0.1, 2.0);
    for (int c = 0; c < 100; ++c) {
        const int n = size(engine);
        const auto g = random_graph(n, engine);
        const Vector target = oracle::node(n, c % n);
        const Vector psi0 = oracle::random_state(n, engine);
        const double tau = tau_dist(engine);
        const auto series = first_detection_series(g, Protocol{tau, target, 12}, psi0);
        for (int k = 1; k <= 12; ++k) {
            ASSERT_LE(std::abs(series.phi[k - 1] - oracle::phi(g.matrix, target, psi0, tau, k)), 1e-10)
                << "case " << c << " n " << k;
        }
    }
}

TEST(Property, DesignedProblemsAreExceptional) {
    std::mt19937_64 engine(2002);
    for (int c = 0; c < 30; ++c) {
        const int n = 2 + c % 9;
        const auto p = random_designed(n, engine);
        ASSERT_TRUE(check_search_conditions(p.graph, p.target, p.tau).pass) << c;
        const auto report = survival_spectrum(survival_operator(p.graph, p.target, p.tau));
        EXPECT_TRUE(report.is_exceptional) << c;
        EXPECT_GT(report.index_norm, 0.5) << c;
    }
}

TEST(Property, DesignedQBasisIsOrthonormalShift) {
    std::mt19937_64 engine(3003);
    for (int c = 0; c < 30; ++c) {
        const int n = 2 + c % 9;
        const auto p = random_designed(n, engine);
        const auto basis = build_qbasis(p.graph, p.target, p.tau);
        EXPECT_LE(gram_check(basis), 1e-10) << c;
        EXPECT_LE(shift_action_check(p.graph, basis, p.tau).max_residual, 1e-10) << c;
    }
}

TEST(Property, DesignedSearchFinishesWithinN) {
    std::mt19937_64 engine(4004);
    for (int c = 0; c < 30; ++c) {
        const int n = 2 + c % 9;
        const auto p = random_designed(n, engine);
        const Vector psi0 = oracle::random_state(n, engine);
        const auto series = first_detection_series(p.graph, Protocol{p.tau, p.target, 3 * n}, psi0);
        double within = 0.0;
        for (int i = 0; i < n; ++i) within += series.f[i];
        EXPECT_NEAR(within, 1.0, 1e-9) << c;
        const auto predicted = predict_detection(build_qbasis(p.graph, p.target, p.tau), psi0);
        for (int i = 0; i < n; ++i) EXPECT_NEAR(predicted[i], series.f[i], 1e-9) << c;
        const auto ret = first_detection_series(p.graph, Protocol{p.tau, p.target, 3 * n}, p.target);
        EXPECT_NEAR(ret.f[n - 1], 1.0, 1e-9) << c;
    }
}

TEST(Property, DesignedWindingCountsSteps) {
    std::mt19937_64 engine(5005);
    for (int c = 0; c < 12; ++c) {
        const int n = 2 + c % 6;
        const auto p = random_designed(n, engine);
        const auto basis = build_qbasis(p.graph, p.target, p.tau);
        const int k = c % n;
        const auto series =
            generating_function(p.graph, Protocol{p.tau, p.target, 1}, basis.q(k), default_theta_samples(n));
        ASSERT_TRUE(series.winding.has_value()) << c;
        EXPECT_EQ(*series.winding, n - k) << c;
    }
}

TEST(Property, DeterminantLemma) {
    std::mt19937_64 engine(6006);
    std::uniform_real_distribution<double> radius(0.2, 0.9);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    for (int c = 0; c < 40; ++c) {
        const int n = 2 + c % 7;
        const auto g = random_graph(n, engine);
        std::vector<Complex> xs;
        for (int i = 0; i < 8; ++i) xs.push_back(std::polar(radius(engine), angle(engine)));
        EXPECT_LE(determinant_lemma_residual(g, oracle::random_state(n, engine), 0.2 + c * 0.03, xs), 1e-8) << c;
    }
}

TEST(Property, GlobalShiftLeavesStatisticsUnchanged) {
    std::mt19937_64 engine(7007);
    for (int c = 0; c < 20; ++c) {
        const int n = 3 + c % 5;
        const auto g = random_graph(n, engine);
        const Vector psi0 = oracle::random_state(n, engine);
        const Protocol protocol{0.7, basis_state(n, 0), 40};
        const auto a = first_detection_series(g, protocol, psi0);
        const auto b = first_detection_series(shifted(g, 3.3 * c), protocol, psi0);
        for (int i = 0; i < 40; ++i) EXPECT_NEAR(a.f[i], b.f[i], 1e-11) << c;
    }
}

TEST(Property, GlobalShiftKeepsConditionsAndIdentity) {
    std::mt19937_64 engine(7107);
    std::uniform_real_distribution<double> uniform(-10.0, 10.0);
    for (int n : {3, 5, 8}) {
        const auto g = shifted(build_funnel(n, 1.0), uniform(engine));
        const double tau = designed_tau(n, 1.0);
        EXPECT_TRUE(check_search_conditions(g, basis_state(n, 0), tau).pass);
        const auto spectral = diagonalize(g, basis_state(n, 0));
        EXPECT_LE(characteristic_identity_check(spectral, tau, {Complex(0.3, 0.2), Complex(-0.5, 0.1)}), 1e-10);
    }
}

TEST(Property, ProbabilityIsConserved) {
    std::mt19937_64 engine(8008);
    for (int c = 0; c < 30; ++c) {
        const int n = 2 + c % 7;
        const auto g = random_graph(n, engine);
        const auto series = first_detection_series(g, Protocol{0.5, oracle::node(n, 0), 50}, oracle::random_state(n, engine));
        EXPECT_NEAR(series.stats.p_det + series.surviving_norm2, 1.0, 1e-12) << c;
        for (double f : series.f) EXPECT_GE(f, 0.0);
    }
}

TEST(Property, ConjugationReversesCrawl) {
    auto next_node = [](const HermitianGraph& g, int x, double tau) {
        Eigen::Index node = 0;
        const double best = evolve(g, basis_state(g.n, x), tau).cwiseAbs2().maxCoeff(&node);
        EXPECT_NEAR(best, 1.0, 1e-10);
        return static_cast<int>(node);
    };
    for (int n : {5, 12, 20}) {
        const double tau = designed_tau(n, 1.0);
        for (int x : {1, n / 2, n - 1}) {
            EXPECT_EQ(next_node(build_crawl(n, 1.0), x, tau), (x + 1) % n);
            EXPECT_EQ(next_node(conjugate(build_crawl(n, 1.0)), x, tau), (x - 1 + n) % n);
        }
    }
}
