#include "epsearch/monitored.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "epsearch/exceptional.hpp"

namespace epsearch {

void Protocol::validate(int n) const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError(fmt::format("tau must be > 0, got {}", tau));
    if (n_max < 1) throw InputError("step budget n_max must be >= 1");
    if (target.size() != n) throw InputError("target dimension does not match graph");
    if (std::abs(target.norm() - 1.0) > 1e-12) throw InputError("target state is not normalised");
}

namespace {

void require_normalised(const Vector& psi, int n, const char* what) {
    if (psi.size() != n) throw InputError(fmt::format("{} dimension does not match graph", what));
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw InputError(fmt::format("{} is not normalised", what));
}

}  // namespace

Matrix propagator(const SpectralData& spectral, double t) {
    Vector phases(spectral.size());
    for (int k = 0; k < spectral.size(); ++k) phases(k) = std::polar(1.0, -spectral.energies(k) * t);
    return spectral.eigenvectors * phases.asDiagonal() * spectral.eigenvectors.adjoint();
}

Vector evolve(const SpectralData& spectral, const Vector& state, double t) {
    Vector coefficients = spectral.eigenvectors.adjoint() * state;
    for (int k = 0; k < spectral.size(); ++k) coefficients(k) *= std::polar(1.0, -spectral.energies(k) * t);
    return spectral.eigenvectors * coefficients;
}

Vector evolve(const HermitianGraph& graph, const Vector& state, double t) {
    if (state.size() != graph.n) throw InputError("state dimension does not match graph");
    return evolve(diagonalize(graph), state, t);
}

DetectionSeries first_detection_series(const HermitianGraph& graph, const Protocol& protocol,
                                       const Vector& psi0) {
    return first_detection_series(diagonalize(graph), protocol, psi0);
}

DetectionSeries first_detection_series(const SpectralData& spectral, const Protocol& protocol,
                                       const Vector& psi0) {
    const int n = spectral.size();
    protocol.validate(n);
    require_normalised(psi0, n, "initial state");

    const Matrix u = propagator(spectral, protocol.tau);
    const Vector& target = protocol.target;

    DetectionSeries series;
    series.phi.reserve(protocol.n_max);
    series.f.reserve(protocol.n_max);

    Vector psi = psi0;
    Vector next(n);
    for (int step = 0; step < protocol.n_max; ++step) {
        next.noalias() = u * psi;
        const Complex amplitude = target.dot(next);
        next -= amplitude * target;
        psi.swap(next);
        series.phi.push_back(amplitude);
        series.f.push_back(std::norm(amplitude));
    }
    series.surviving_norm2 = psi.squaredNorm();
    series.truncated = series.surviving_norm2 > 1e-9;
    series.stats = detection_statistics(series.f, protocol.tau);
    series.tail_estimate = series.truncated ? truncation_tail_estimate(series.f) : 0.0;

    // Leakage: probability stuck below one while the last decade adds almost nothing.
    if (series.stats.p_det < 1.0 - 1e-6 && series.surviving_norm2 > 1e-6) {
        const std::size_t decade = std::max<std::size_t>(1, series.f.size() / 10);
        double recent = 0.0;
        for (std::size_t i = series.f.size() - decade; i < series.f.size(); ++i) recent += series.f[i];
        if (recent < 1e-3 * series.surviving_norm2) {
            series.dark_state_leakage = true;
            const auto report = survival_spectrum(survival_operator(spectral, target, protocol.tau));
            series.spectral_gap = 1.0 - report.max_abs_eig;
        }
    }
    return series;
}

Complex detection_amplitude_direct(const HermitianGraph& graph, const Protocol& protocol, const Vector& psi0,
                                   int n) {
    if (n < 1) throw InputError("detection index n must be >= 1");
    protocol.validate(graph.n);
    require_normalised(psi0, graph.n, "initial state");

    // Plain exponential of the explicit matrix, not the spectral path used above.
    const Matrix generator = Complex(0.0, -protocol.tau) * graph.matrix;
    const Matrix u = generator.exp();
    const Matrix projector =
        Matrix::Identity(graph.n, graph.n) - protocol.target * protocol.target.adjoint();
    const Matrix s = projector * u;

    Vector state = psi0;
    for (int k = 1; k < n; ++k) state = (s * state).eval();
    return protocol.target.dot(u * state);
}

DetectionStatistics detection_statistics(const std::vector<double>& f, double tau,
                                         const StatisticsOptions& options) {
    DetectionStatistics stats;
    double first = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        stats.p_det += f[i];
        first += static_cast<double>(i + 1) * f[i];
    }
    const bool complete = stats.p_det >= options.threshold;
    if (stats.p_det <= 0.0 || (!complete && !options.allow_conditional)) return stats;

    const double mean = first / stats.p_det;
    double spread = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = static_cast<double>(i + 1) - mean;
        spread += d * d * f[i];
    }
    stats.mean_n = mean;
    stats.var_n = spread / stats.p_det;
    stats.mean_t = tau * mean;
    stats.conditional = !complete;
    return stats;
}

double truncation_tail_estimate(const std::vector<double>& f) {
    if (f.size() < 20) return 0.0;
    const std::size_t decade = f.size() / 10;
    const std::size_t start = f.size() - decade;
    // Least-squares slope of log F_n against n.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (std::size_t i = start; i < f.size(); ++i) {
        if (f[i] <= 0.0) continue;
        const double x = static_cast<double>(i);
        const double y = std::log(f[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) return 0.0;
    const double denom = count * sxx - sx * sx;
    if (denom <= 0.0) return 0.0;
    const double slope = (count * sxy - sx * sy) / denom;
    const double ratio = std::exp(slope);
    if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
    const double intercept = (sy - slope * sx) / count;
    const double last = std::exp(intercept + slope * static_cast<double>(f.size() - 1));
    return last * ratio / (1.0 - ratio);
}

}  // namespace epsearch
