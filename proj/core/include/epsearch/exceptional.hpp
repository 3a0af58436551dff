#pragma once

#include <array>
#include <vector>

#include "epsearch/graphs.hpp"

namespace epsearch {

/// S(tau) = (1 - |target><target|) U(tau).
struct SurvivalOperator {
    Matrix matrix;
    double tau = 0.0;
    Vector target;

    int size() const { return static_cast<int>(matrix.rows()); }
};

struct DarkState {
    int index = 0;
    double abs_xi = 0.0;
};

struct ExceptionalReport {
    std::vector<Complex> eigenvalues;
    double nilpotency_norm = 0.0;  // ||S^N||_2
    double index_norm = 0.0;       // ||S^{N-1}||_2, nonzero at an order-N exceptional point
    double max_abs_eig = 0.0;
    double tolerance = 0.0;
    bool is_exceptional = false;
    std::vector<DarkState> dark_states;
};

inline constexpr double kDarkStateThreshold = 1.0 - 1e-8;
inline constexpr double kNilpotencyTol = 1e-6;
inline constexpr double kPoleExclusion = 1e-3;

SurvivalOperator survival_operator(const HermitianGraph& graph, const Vector& target, double tau);
SurvivalOperator survival_operator(const SpectralData& spectral, const Vector& target, double tau);

/// Nilpotency tolerance for an N x N survival operator: kNilpotencyTol for
/// N <= 64, growing linearly beyond.
double nilpotency_tolerance(int n);

/// Eigenvalues, ||S^N||_2 and dark states. Exceptionality is decided by the
/// nilpotency norm only: the computed eigenvalues of an order-N defective zero
/// scatter on a circle of radius ~eps^{1/N}.
ExceptionalReport survival_spectrum(const SurvivalOperator& survival);

/// max over samples of |xi sum_k p_k / (xi - e^{-iE_k tau}) + xi^N / (c^N - xi^N)|
/// with c^N = e^{-i N E_0 tau}; c = 1 recovers the root-of-unity identity.
/// Throws InputError for samples closer than kPoleExclusion to a pole.
double characteristic_identity_check(const SpectralData& spectral, double tau,
                                     const std::vector<Complex>& xi_samples);

/// max over samples of |det(xi - S) - xi det(xi - U) <t|(xi - U)^{-1}|t>| / |det(xi - S)|.
double determinant_lemma_residual(const HermitianGraph& graph, const Vector& target, double tau,
                                  const std::vector<Complex>& xi_samples);

struct ProbeSolution {
    std::vector<double> deltas;  // Delta_{k1}, k = 2..n, in [0, 2pi)
    std::vector<Complex> p;      // solved overlaps p_1..p_n
};

struct NecessaryConditionReport {
    int n = 0;
    int grid = 0;
    double tolerance = 0.0;
    std::size_t points_scanned = 0;
    std::vector<ProbeSolution> admissible;  // real, non-negative p within tolerance
    bool matches_uniform_roots = false;     // every admissible point is p_k = 1/n on n-th roots of unity
};

/// Overlaps p_k for which the order-(n-1) zero conditions
/// sum_k p_k w_k^j = 0 (j = 1..n-1), sum_k p_k = 1 hold, with w_1 = 1 and
/// w_k = e^{i Delta_{k1}}. Empty when the phases are degenerate.
std::vector<Complex> solve_zero_overlaps(const std::vector<double>& deltas);

/// Sweeps Delta_{k1} on a uniform grid of `grid` points per axis and keeps the
/// points where the solved overlaps are real and non-negative. n is 2 or 3;
/// `grid` should be a multiple of n so the root-of-unity phases are sampled.
NecessaryConditionReport necessary_condition_probe(int n, double tol, int grid = 360);

}  // namespace epsearch
