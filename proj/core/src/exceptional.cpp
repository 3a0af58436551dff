#include "epsearch/exceptional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "epsearch/monitored.hpp"

namespace epsearch {

SurvivalOperator survival_operator(const HermitianGraph& graph, const Vector& target, double tau) {
    return survival_operator(diagonalize(graph), target, tau);
}

SurvivalOperator survival_operator(const SpectralData& spectral, const Vector& target, double tau) {
    const int n = spectral.size();
    if (target.size() != n) throw InputError("target dimension does not match graph");
    Matrix u = propagator(spectral, tau);
    Matrix projector = Matrix::Identity(n, n) - target * target.adjoint();
    return SurvivalOperator{projector * u, tau, target};
}

double nilpotency_tolerance(int n) { return kNilpotencyTol * std::max(1.0, n / 64.0); }

namespace {

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

}  // namespace

ExceptionalReport survival_spectrum(const SurvivalOperator& survival) {
    const int n = survival.size();
    ExceptionalReport report;
    report.tolerance = nilpotency_tolerance(n);

    Eigen::ComplexEigenSolver<Matrix> solver(survival.matrix, false);
    if (solver.info() != Eigen::Success) {
        throw ValidationError("survival operator eigenvalue solver did not converge");
    }
    const auto& xi = solver.eigenvalues();
    report.eigenvalues.assign(xi.data(), xi.data() + xi.size());
    for (int k = 0; k < n; ++k) {
        const double modulus = std::abs(xi(k));
        report.max_abs_eig = std::max(report.max_abs_eig, modulus);
        if (modulus >= kDarkStateThreshold) report.dark_states.push_back({k, modulus});
    }

    Matrix power = Matrix::Identity(n, n);
    for (int k = 1; k < n; ++k) power = (power * survival.matrix).eval();
    report.index_norm = spectral_norm(power);
    power = (power * survival.matrix).eval();
    report.nilpotency_norm = spectral_norm(power);
    report.is_exceptional = report.nilpotency_norm <= report.tolerance;
    return report;
}

double characteristic_identity_check(const SpectralData& spectral, double tau,
                                     const std::vector<Complex>& xi_samples) {
    const int n = spectral.size();
    if (spectral.overlaps.size() != n) throw InputError("spectral data has no target attached");
    std::vector<Complex> poles(n);
    for (int k = 0; k < n; ++k) poles[k] = std::polar(1.0, -spectral.energies(k) * tau);
    const Complex c_pow_n = std::polar(1.0, -n * spectral.energies(0) * tau);

    double worst = 0.0;
    for (const Complex& xi : xi_samples) {
        for (const Complex& pole : poles) {
            if (std::abs(xi - pole) < kPoleExclusion) {
                throw InputError(fmt::format("sample xi = ({}, {}) lies within {} of a pole", xi.real(),
                                             xi.imag(), kPoleExclusion));
            }
        }
        Complex sum = 0.0;
        for (int k = 0; k < n; ++k) sum += spectral.overlaps(k) / (xi - poles[k]);
        const Complex lhs = xi * sum;
        const Complex xi_n = std::pow(xi, n);
        const Complex rhs = -xi_n / (c_pow_n - xi_n);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double determinant_lemma_residual(const HermitianGraph& graph, const Vector& target, double tau,
                                  const std::vector<Complex>& xi_samples) {
    const int n = graph.n;
    const SpectralData spectral = diagonalize(graph);
    const Matrix u = propagator(spectral, tau);
    const SurvivalOperator s = survival_operator(spectral, target, tau);
    const Matrix identity = Matrix::Identity(n, n);

    double worst = 0.0;
    for (const Complex& xi : xi_samples) {
        const Matrix shifted_u = xi * identity - u;
        Eigen::PartialPivLU<Matrix> lu(shifted_u);
        const Complex det_u = lu.determinant();
        const Complex resolvent = target.dot(lu.solve(target));
        const Complex rhs = xi * det_u * resolvent;
        const Complex lhs = (xi * identity - s.matrix).determinant();
        const double scale = std::max(std::abs(lhs), std::numeric_limits<double>::min());
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

std::vector<Complex> solve_zero_overlaps(const std::vector<double>& deltas) {
    const int n = static_cast<int>(deltas.size()) + 1;
    std::vector<Complex> w(n);
    w[0] = 1.0;
    for (int k = 1; k < n; ++k) w[k] = std::polar(1.0, deltas[k - 1]);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (std::abs(w[a] - w[b]) < 1e-12) return {};
        }
    }
    // Rows: normalisation, then the vanishing moments j = 1..n-1.
    Matrix system(n, n);
    Vector rhs = Vector::Zero(n);
    rhs(0) = 1.0;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) system(j, k) = std::pow(w[k], j);
    }
    Vector p = system.fullPivLu().solve(rhs);
    return {p.data(), p.data() + p.size()};
}

namespace {

bool admissible(const std::vector<Complex>& p, double tol) {
    if (p.empty()) return false;
    return std::all_of(p.begin(), p.end(), [tol](const Complex& v) {
        return std::abs(v.imag()) <= tol && v.real() >= -tol;
    });
}

bool is_uniform_roots(const ProbeSolution& s, int n, double tol) {
    for (const auto& p : s.p) {
        if (std::abs(p - Complex(1.0 / n)) > std::max(tol, 1e-9)) return false;
    }
    // Phases {0, Delta_21, ...} must be the n-th roots of unity in some order.
    std::vector<int> slots(n, 0);
    slots[0] = 1;
    for (double d : s.deltas) {
        const double slot_real = d / (kTwoPi / n);
        const long slot = std::lround(slot_real);
        if (std::abs(slot_real - slot) > 1e-9) return false;
        ++slots[((slot % n) + n) % n];
    }
    return std::all_of(slots.begin(), slots.end(), [](int c) { return c == 1; });
}

}  // namespace

NecessaryConditionReport necessary_condition_probe(int n, double tol, int grid) {
    if (n != 2 && n != 3) throw InputError("necessary-condition probe supports n = 2 or n = 3");
    if (grid < n) throw InputError("probe grid too coarse");
    NecessaryConditionReport report;
    report.n = n;
    report.grid = grid;
    report.tolerance = tol;

    const double step = kTwoPi / grid;
    auto consider = [&](std::vector<double> deltas) {
        ++report.points_scanned;
        auto p = solve_zero_overlaps(deltas);
        if (admissible(p, tol)) report.admissible.push_back({std::move(deltas), std::move(p)});
    };
    if (n == 2) {
        for (int a = 1; a < grid; ++a) consider({a * step});
    } else {
        for (int a = 1; a < grid; ++a) {
            for (int b = 1; b < grid; ++b) consider({a * step, b * step});
        }
    }
    report.matches_uniform_roots =
        !report.admissible.empty() && std::all_of(report.admissible.begin(), report.admissible.end(),
                                                  [&](const ProbeSolution& s) { return is_uniform_roots(s, n, tol); });
    return report;
}

}  // namespace epsearch
