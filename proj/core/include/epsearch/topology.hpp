#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "epsearch/monitored.hpp"

namespace epsearch {

/// Generating function Phi(theta) = sum_n e^{i n theta} phi_n sampled on the
/// uniform grid theta_j = 2 pi (j + 1/2) / M.
struct ThetaSeries {
    std::vector<double> thetas;
    std::vector<Complex> values;
    std::vector<double> unwrapped_phase;
    double min_modulus = 0.0;
    double max_phase_jump = 0.0;      // largest |arg Phi_{j+1} - arg Phi_j| on the closed loop
    double phase_change = 0.0;        // closed-loop unwrapped phase change / 2 pi
    double argument_integral = 0.0;   // (1/2 pi i) \oint Phi'/Phi d theta, spectral derivative
    std::optional<int> winding;

    double strategy_discrepancy = 0.0;  // max |resolvent - truncated sum|
    bool strict_agreement = false;      // truncated sum was complete and the 1e-6 check applied
    int n_trunc = 0;
    double truncation_norm2 = 0.0;      // undetected weight after n_trunc attempts
    std::vector<std::size_t> nudged;    // samples moved off a resolvent pole
};

struct GeneratingOptions {
    double epsilon = 1e-9;            // regulator theta -> theta + i epsilon
    std::optional<int> n_trunc;       // default: N on graphs meeting the search conditions, else 1e4
    double agreement_tol = 1e-6;
    double pole_distance = 1e-6;
};

struct IntegralStatistics {
    double p_det = 0.0;
    double mean_t = 0.0;
};

inline constexpr double kMinWindingModulus = 1e-6;

/// max(1024, 64 N)
int default_theta_samples(int n);

/// Evaluates Phi through the resolvent ratio in the energy eigenbasis and
/// through the truncated amplitude sum, and requires agreement to
/// `agreement_tol` whenever the truncated sum is complete. `protocol.n_max`
/// is not used; see GeneratingOptions::n_trunc.
ThetaSeries generating_function(const HermitianGraph& graph, const Protocol& protocol, const Vector& psi0,
                                int m_samples, const GeneratingOptions& options = {});

/// round(phase change / 2 pi), or nothing when the curve passes through the
/// origin, the grid under-resolves the phase, or the argument-principle
/// integral disagrees with the unwrapped count by more than 0.1.
std::optional<int> winding_number(const ThetaSeries& series);

/// P_det = (1/2pi) \int |Phi|^2 and <t> = (tau / 2 pi i) \int Phi^* dPhi/dtheta
/// by trapezoidal quadrature with a spectral derivative.
IntegralStatistics integral_statistics(const ThetaSeries& series, double tau);

/// dPhi/dtheta on the uniform grid via FFT.
std::vector<Complex> spectral_derivative(const std::vector<Complex>& values);

}  // namespace epsearch
