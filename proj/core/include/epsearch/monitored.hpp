#pragma once

#include <optional>
#include <vector>

#include "epsearch/graphs.hpp"

namespace epsearch {

/// Stroboscopic measurement protocol: projective yes/no measurements of
/// `target` at times tau, 2 tau, ..., up to `n_max` attempts.
struct Protocol {
    double tau = 0.0;
    Vector target;
    int n_max = 1;

    void validate(int n) const;
};

/// Moments of the first-detection distribution. Each moment is absent when the
/// distribution is too incomplete to condition on (see StatisticsOptions).
struct DetectionStatistics {
    double p_det = 0.0;
    std::optional<double> mean_n;
    std::optional<double> var_n;
    std::optional<double> mean_t;
    bool conditional = false;  // moments are conditioned on detection with p_det below threshold
};

struct StatisticsOptions {
    double threshold = 0.999;
    bool allow_conditional = false;
};

struct DetectionSeries {
    std::vector<Complex> phi;  // phi_1 .. phi_{n_max}
    std::vector<double> f;     // F_n = |phi_n|^2
    DetectionStatistics stats;
    double surviving_norm2 = 0.0;  // squared norm left undetected after n_max attempts
    bool truncated = false;        // surviving_norm2 above 1e-9
    double tail_estimate = 0.0;    // geometric extrapolation of sum_{n > n_max} F_n
    bool dark_state_leakage = false;
    std::optional<double> spectral_gap;  // 1 - max |xi| of the survival operator, set with leakage

    double p_det() const { return stats.p_det; }
};

/// exp(-i H t) assembled from a spectral decomposition.
Matrix propagator(const SpectralData& spectral, double t);

Vector evolve(const SpectralData& spectral, const Vector& state, double t);
Vector evolve(const HermitianGraph& graph, const Vector& state, double t);

/// Projection-loop simulation: evolve by tau, read the target amplitude,
/// remove it, repeat.
DetectionSeries first_detection_series(const HermitianGraph& graph, const Protocol& protocol,
                                       const Vector& psi0);
DetectionSeries first_detection_series(const SpectralData& spectral, const Protocol& protocol,
                                       const Vector& psi0);

/// phi_n = <target| U S^{n-1} |psi0> from an explicit survival matrix and
/// repeated matrix-vector products. Independent of the projection loop.
Complex detection_amplitude_direct(const HermitianGraph& graph, const Protocol& protocol, const Vector& psi0,
                                   int n);

DetectionStatistics detection_statistics(const std::vector<double>& f, double tau,
                                         const StatisticsOptions& options = {});

/// Geometric fit over the last decade of F_n, extrapolated to infinity.
double truncation_tail_estimate(const std::vector<double>& f);

}  // namespace epsearch
