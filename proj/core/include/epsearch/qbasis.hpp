#pragma once

#include <vector>

#include "epsearch/graphs.hpp"

namespace epsearch {

/// Shift basis |Q_k> = U(tau)^k |target>, k = 0..N-1 (columns of `vectors`).
/// Built off the exceptional point too; the Gram deviation then measures the
/// distance from it.
struct QBasis {
    Matrix vectors;
    double tau = 0.0;
    Vector target;
    bool conditions_pass = false;  // whether the graph met the search conditions at tau

    int size() const { return static_cast<int>(vectors.cols()); }
    Vector q(int k) const { return vectors.col(k); }
};

struct ShiftActionReport {
    std::vector<double> residuals;  // ||S Q_k - Q_{k+1}|| for k < N-1, then ||S Q_{N-1}||
    double max_residual = 0.0;
    double wraparound_residual = 0.0;  // min over phases c of ||U Q_{N-1} - c Q_0||
};

QBasis build_qbasis(const HermitianGraph& graph, const Vector& target, double tau);

double gram_check(const QBasis& basis);

ShiftActionReport shift_action_check(const HermitianGraph& graph, const QBasis& basis, double tau);

/// F_n = |<Q_{N-n}|psi0>|^2 for n = 1..N (index n-1 in the result).
std::vector<double> predict_detection(const QBasis& basis, const Vector& psi0);

/// |<Q_k|psi0>|^2 for k = 0..N-1.
std::vector<double> qbasis_overlaps(const QBasis& basis, const Vector& psi0);

}  // namespace epsearch
