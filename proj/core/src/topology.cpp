#include "epsearch/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <unsupported/Eigen/FFT>

namespace epsearch {

int default_theta_samples(int n) { return std::max(1024, 64 * n); }

std::vector<Complex> spectral_derivative(const std::vector<Complex>& values) {
    const auto m = static_cast<long>(values.size());
    if (m == 0) return {};
    Eigen::FFT<double> fft;
    std::vector<Complex> coefficients;
    fft.fwd(coefficients, values);
    // The half-sample grid offset cancels between forward and inverse transforms.
    for (long b = 0; b < m; ++b) {
        long freq = (b < (m + 1) / 2) ? b : b - m;
        if (m % 2 == 0 && b == m / 2) freq = 0;
        coefficients[b] *= Complex(0.0, static_cast<double>(freq));
    }
    std::vector<Complex> derivative;
    fft.inv(derivative, coefficients);
    return derivative;
}

namespace {

void fill_phase_geometry(ThetaSeries& series) {
    const std::size_t m = series.values.size();
    series.unwrapped_phase.assign(m, 0.0);
    series.min_modulus = std::numeric_limits<double>::infinity();
    series.max_phase_jump = 0.0;
    for (const auto& v : series.values) series.min_modulus = std::min(series.min_modulus, std::abs(v));
    if (m == 0) return;

    series.unwrapped_phase[0] = std::arg(series.values[0]);
    for (std::size_t j = 1; j < m; ++j) {
        const double jump = wrap_angle(std::arg(series.values[j]) - std::arg(series.values[j - 1]));
        series.max_phase_jump = std::max(series.max_phase_jump, std::abs(jump));
        series.unwrapped_phase[j] = series.unwrapped_phase[j - 1] + jump;
    }
    const double closing = wrap_angle(std::arg(series.values[0]) - std::arg(series.values[m - 1]));
    series.max_phase_jump = std::max(series.max_phase_jump, std::abs(closing));
    series.phase_change = (series.unwrapped_phase[m - 1] + closing - series.unwrapped_phase[0]) / kTwoPi;

    if (series.min_modulus > 0.0) {
        const auto derivative = spectral_derivative(series.values);
        Complex sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) sum += derivative[j] / series.values[j];
        series.argument_integral = (sum / Complex(0.0, static_cast<double>(m))).real();
    }
}

}  // namespace

ThetaSeries generating_function(const HermitianGraph& graph, const Protocol& protocol, const Vector& psi0,
                                int m_samples, const GeneratingOptions& options) {
    const int n = graph.n;
    if (m_samples < 64 * n) {
        throw InputError(fmt::format("need at least 64 N = {} theta samples, got {}", 64 * n, m_samples));
    }
    const SpectralData spectral = diagonalize(graph, protocol.target);
    const bool designed = check_search_conditions(spectral, protocol.tau).pass;

    ThetaSeries series;
    series.n_trunc = options.n_trunc.value_or(designed ? n : 10000);
    if (series.n_trunc < 1) throw InputError("n_trunc must be >= 1");

    // Strategy (b): truncated amplitude sum.
    Protocol truncated = protocol;
    truncated.n_max = series.n_trunc;
    const DetectionSeries detection = first_detection_series(spectral, truncated, psi0);
    series.truncation_norm2 = detection.surviving_norm2;
    series.strict_agreement = detection.surviving_norm2 <= 1e-16;

    // Strategy (a): resolvent ratio in the energy eigenbasis.
    const Vector target_coeff = spectral.eigenvectors.adjoint() * protocol.target;
    const Vector psi0_coeff = spectral.eigenvectors.adjoint() * psi0;
    std::vector<Complex> numerator_weight(n);
    std::vector<double> denominator_weight(n);
    std::vector<double> pole_angle(n);
    for (int k = 0; k < n; ++k) {
        numerator_weight[k] = std::conj(target_coeff(k)) * psi0_coeff(k);
        denominator_weight[k] = std::norm(target_coeff(k));
        pole_angle[k] = spectral.energies(k) * protocol.tau;
    }
    const double damping = std::exp(-options.epsilon);

    series.thetas.resize(m_samples);
    series.values.resize(m_samples);
    for (int j = 0; j < m_samples; ++j) {
        const double nominal = kTwoPi * (j + 0.5) / m_samples;
        double theta = nominal;
        for (int attempt = 0; attempt < 8; ++attempt) {
            const bool near_pole = std::any_of(pole_angle.begin(), pole_angle.end(), [&](double angle) {
                return std::abs(1.0 - std::polar(1.0, theta - angle)) < options.pole_distance;
            });
            if (!near_pole) break;
            theta += 10.0 * options.pole_distance;
            if (attempt == 0) series.nudged.push_back(static_cast<std::size_t>(j));
        }
        Complex numerator = 0.0;
        Complex denominator = 1.0;
        for (int k = 0; k < n; ++k) {
            const Complex z = damping * std::polar(1.0, theta - pole_angle[k]);
            const Complex ratio = z / (1.0 - z);
            numerator += numerator_weight[k] * ratio;
            denominator += denominator_weight[k] * ratio;
        }
        series.thetas[j] = nominal;
        series.values[j] = numerator / denominator;

        Complex sum = 0.0;
        const Complex step = std::polar(1.0, theta);
        Complex phase = step;
        for (const Complex& amplitude : detection.phi) {
            sum += amplitude * phase;
            phase *= step;
        }
        series.strategy_discrepancy = std::max(series.strategy_discrepancy, std::abs(sum - series.values[j]));
    }
    if (series.strict_agreement && series.strategy_discrepancy > options.agreement_tol) {
        throw ValidationError(fmt::format("generating-function strategies disagree by {:.3e} (tolerance {:.1e})",
                                          series.strategy_discrepancy, options.agreement_tol));
    }

    fill_phase_geometry(series);
    series.winding = winding_number(series);
    return series;
}

std::optional<int> winding_number(const ThetaSeries& series) {
    if (series.values.empty() || series.min_modulus < kMinWindingModulus) return std::nullopt;
    if (series.max_phase_jump > kPi / 2) return std::nullopt;
    const long rounded = std::lround(series.phase_change);
    if (std::abs(series.phase_change - rounded) > 0.1) return std::nullopt;
    if (std::abs(series.argument_integral - rounded) > 0.1) return std::nullopt;
    return static_cast<int>(rounded);
}

IntegralStatistics integral_statistics(const ThetaSeries& series, double tau) {
    IntegralStatistics out;
    const std::size_t m = series.values.size();
    if (m == 0) return out;
    const auto derivative = spectral_derivative(series.values);
    double power = 0.0;
    Complex moment = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        power += std::norm(series.values[j]);
        moment += std::conj(series.values[j]) * derivative[j];
    }
    out.p_det = power / static_cast<double>(m);
    out.mean_t = tau * (moment / Complex(0.0, static_cast<double>(m))).real();
    return out;
}

}  // namespace epsearch
