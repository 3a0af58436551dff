#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "epsearch/types.hpp"

namespace epsearch {

/// An N x N Hermitian tight-binding Hamiltonian together with its energy
/// scale and the family it was built from.
struct HermitianGraph {
    int n = 0;
    double gamma = 0.0;
    Family family = Family::custom;
    Matrix matrix;

    /// max |H[j][m] - conj(H[m][j])|
    double hermiticity_deviation() const;
    /// Throws InputError when the matrix is not square n x n or not Hermitian
    /// within 1e-12 * max(gamma, 1) * n.
    void validate() const;
};

/// Eigen-decomposition of a graph. Energies ascend; each eigenvector has its
/// first non-negligible component rotated onto the positive real axis.
struct SpectralData {
    RealVector energies;
    Matrix eigenvectors;  // column k is |E_k>
    RealVector overlaps;  // p_k = |<E_k|target>|^2; empty when no target attached

    int size() const { return static_cast<int>(energies.size()); }
    double gram_deviation() const;
    double reconstruction_deviation(const Matrix& h) const;
};

struct ConditionReport {
    bool overlaps_uniform = false;
    double overlap_deviation = 0.0;  // max_k |p_k - 1/N|
    bool phases_equispaced = false;
    double phase_deviation = 0.0;  // max angular distance to c * (N-th roots of unity)
    bool degenerate = false;       // two propagator phases coincide (dark-state risk)
    double global_phase = 0.0;     // arg c in [0, 2pi)
    double tau_used = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline constexpr double kDefaultConditionTol = 1e-8;

HermitianGraph build_crawl(int n, double gamma);
HermitianGraph build_funnel(int n, double gamma);

/// Closed-form funnel energy states |E_0>..|E_{N-1}> (columns), all real.
Matrix funnel_eigenvectors(int n);

/// Sherrington-Kirkpatrick reference graph: zero diagonal, independent
/// N(0, coupling_scale^2 / N) couplings, deterministic for a given seed.
HermitianGraph build_sk(int n, std::uint64_t seed, double coupling_scale = 1.0);

/// H = sum_k E_k |E_k><E_k|. Rejects eigenvector sets whose Gram matrix
/// deviates from identity by more than 1e-8.
HermitianGraph synthesize_from_spectrum(const RealVector& energies, const Matrix& eigenvectors,
                                        double gamma = 1.0);

/// Complex conjugate H*. For the crawl graph this reverses the walking direction.
HermitianGraph conjugate(const HermitianGraph& graph);

/// H + shift * I.
HermitianGraph shifted(const HermitianGraph& graph, double shift);

SpectralData diagonalize(const HermitianGraph& graph);
SpectralData diagonalize(const HermitianGraph& graph, const Vector& target);

/// Sampling interval 2pi/(N gamma) + 2 j pi / gamma.
double designed_tau(int n, double gamma, int j = 0);

ConditionReport check_search_conditions(const HermitianGraph& graph, const Vector& target, double tau,
                                        double tol = kDefaultConditionTol);
ConditionReport check_search_conditions(const SpectralData& spectral, double tau,
                                        double tol = kDefaultConditionTol);

}  // namespace epsearch
