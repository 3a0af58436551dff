#include "epsearch/qbasis.hpp"

#include <algorithm>
#include <cmath>

#include "epsearch/exceptional.hpp"
#include "epsearch/monitored.hpp"

namespace epsearch {

QBasis build_qbasis(const HermitianGraph& graph, const Vector& target, double tau) {
    const SpectralData spectral = diagonalize(graph, target);
    const Matrix u = propagator(spectral, tau);

    QBasis basis;
    basis.tau = tau;
    basis.target = target;
    basis.conditions_pass = check_search_conditions(spectral, tau).pass;
    basis.vectors.resize(graph.n, graph.n);
    basis.vectors.col(0) = target;
    for (int k = 1; k < graph.n; ++k) basis.vectors.col(k) = u * basis.vectors.col(k - 1);
    return basis;
}

double gram_check(const QBasis& basis) {
    const int n = basis.size();
    if (n == 0) return 0.0;
    return (basis.vectors.adjoint() * basis.vectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

ShiftActionReport shift_action_check(const HermitianGraph& graph, const QBasis& basis, double tau) {
    const int n = basis.size();
    const SpectralData spectral = diagonalize(graph);
    const SurvivalOperator s = survival_operator(spectral, basis.target, tau);

    ShiftActionReport report;
    report.residuals.reserve(n);
    for (int k = 0; k < n; ++k) {
        Vector image = s.matrix * basis.vectors.col(k);
        if (k + 1 < n) image -= basis.vectors.col(k + 1);
        report.residuals.push_back(image.norm());
    }
    report.max_residual = *std::max_element(report.residuals.begin(), report.residuals.end());
    const Matrix u = propagator(spectral, tau);
    // U^N acts on the target as a global phase, so compare up to that phase.
    const Vector wrapped = u * basis.vectors.col(n - 1);
    const Complex overlap = basis.vectors.col(0).dot(wrapped);
    const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
    report.wraparound_residual = (wrapped - phase * basis.vectors.col(0)).norm();
    return report;
}

std::vector<double> qbasis_overlaps(const QBasis& basis, const Vector& psi0) {
    if (psi0.size() != basis.vectors.rows()) throw InputError("state dimension does not match basis");
    const RealVector overlaps = (basis.vectors.adjoint() * psi0).cwiseAbs2();
    return {overlaps.data(), overlaps.data() + overlaps.size()};
}

std::vector<double> predict_detection(const QBasis& basis, const Vector& psi0) {
    const auto overlaps = qbasis_overlaps(basis, psi0);
    const int n = basis.size();
    std::vector<double> f(n);
    for (int step = 1; step <= n; ++step) f[step - 1] = overlaps[n - step];
    return f;
}

}  // namespace epsearch
