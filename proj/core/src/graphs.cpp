#include "epsearch/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

namespace epsearch {

std::string_view to_string(Family family) {
    switch (family) {
        case Family::crawl: return "crawl";
        case Family::funnel: return "funnel";
        case Family::sk: return "sk";
        case Family::custom: return "custom";
    }
    return "custom";
}

Family parse_family(std::string_view name) {
    if (name == "crawl") return Family::crawl;
    if (name == "funnel") return Family::funnel;
    if (name == "sk") return Family::sk;
    if (name == "custom") return Family::custom;
    throw InputError(fmt::format("unknown graph family '{}'", name));
}

double wrap_angle(double angle) {
    double wrapped = std::remainder(angle, kTwoPi);
    if (wrapped <= -kPi) wrapped += kTwoPi;
    return wrapped;
}

Vector basis_state(int n, int index) {
    if (index < 0 || index >= n) {
        throw InputError(fmt::format("node {} out of range for N = {}", index, n));
    }
    Vector v = Vector::Zero(n);
    v(index) = 1.0;
    return v;
}

double HermitianGraph::hermiticity_deviation() const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

void HermitianGraph::validate() const {
    if (n < 1 || matrix.rows() != n || matrix.cols() != n) {
        throw InputError(fmt::format("graph matrix must be {0}x{0}, got {1}x{2}", n, matrix.rows(),
                                     matrix.cols()));
    }
    const double tol = 1e-12 * std::max(gamma, 1.0) * n;
    if (double dev = hermiticity_deviation(); dev > tol) {
        throw InputError(fmt::format("graph matrix is not Hermitian (deviation {:.3e})", dev));
    }
}

double SpectralData::gram_deviation() const {
    const auto n = eigenvectors.cols();
    return (eigenvectors.adjoint() * eigenvectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

double SpectralData::reconstruction_deviation(const Matrix& h) const {
    Matrix rebuilt = eigenvectors * energies.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
    return (rebuilt - h).cwiseAbs().maxCoeff();
}

namespace {

void require_size(int n) {
    if (n < 2) throw InputError(fmt::format("graph needs at least 2 nodes, got {}", n));
}

void require_gamma(double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw InputError(fmt::format("energy scale must be finite and >= 0, got {}", gamma));
    }
}

}  // namespace

HermitianGraph build_crawl(int n, double gamma) {
    require_size(n);
    require_gamma(gamma);
    HermitianGraph g{n, gamma, Family::crawl, Matrix::Zero(n, n)};
    for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m) {
            if (j == m) continue;
            const int k = ((m - j) % n + n) % n;
            const double theta = kTwoPi * k / n;
            g.matrix(j, m) = gamma / (1.0 - std::polar(1.0, theta));
        }
    }
    // Row/column entries are exact conjugates analytically; symmetrise away rounding.
    g.matrix = 0.5 * (g.matrix + g.matrix.adjoint()).eval();
    return g;
}

HermitianGraph build_funnel(int n, double gamma) {
    require_size(n);
    require_gamma(gamma);
    const double nn = n;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m(0, 0) = nn - 1.0;
    for (int j = 1; j < n; ++j) m(j, j) = 2.0 * j - 1.0;
    for (int c = 1; c < n; ++c) {
        m(0, c) = m(c, 0) = std::sqrt((nn - c) * (nn - c + 1.0) / nn);
    }
    for (int j = 1; j < n; ++j) {
        for (int c = j + 1; c < n; ++c) {
            m(j, c) = m(c, j) = std::sqrt((nn - c) * (nn - c + 1.0) / ((nn - j + 1.0) * (nn - j)));
        }
    }
    return HermitianGraph{n, gamma, Family::funnel, (0.5 * gamma * m).cast<Complex>()};
}

Matrix funnel_eigenvectors(int n) {
    require_size(n);
    const double nn = n;
    Eigen::MatrixXd states = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        states(0, i) = 1.0 / std::sqrt(nn);
        for (int c = 1; c <= i; ++c) {
            states(c, i) = 1.0 / std::sqrt((nn - c + 1.0) * (nn - c));
        }
        states(i + 1, i) = -std::sqrt((nn - 1.0 - i) / (nn - i));
    }
    // The last state mirrors |E_{N-2}> with its final entry flipped.
    states.col(n - 1) = states.col(n - 2);
    states(n - 1, n - 1) = -states(n - 1, n - 2);
    return states.cast<Complex>();
}

HermitianGraph build_sk(int n, std::uint64_t seed, double coupling_scale) {
    require_size(n);
    require_gamma(coupling_scale);
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> coupling(0.0, coupling_scale / std::sqrt(static_cast<double>(n)));
    HermitianGraph g{n, coupling_scale, Family::sk, Matrix::Zero(n, n)};
    for (int j = 0; j < n; ++j) {
        for (int m = j + 1; m < n; ++m) {
            const double value = coupling(engine);
            g.matrix(j, m) = value;
            g.matrix(m, j) = value;
        }
    }
    return g;
}

HermitianGraph synthesize_from_spectrum(const RealVector& energies, const Matrix& eigenvectors, double gamma) {
    const auto n = eigenvectors.rows();
    if (eigenvectors.cols() != n || energies.size() != n) {
        throw InputError("spectrum and eigenvector dimensions do not match");
    }
    const double gram = (eigenvectors.adjoint() * eigenvectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (gram > 1e-8) {
        throw InputError(fmt::format("eigenvectors are not orthonormal (Gram deviation {:.3e})", gram));
    }
    Matrix h = eigenvectors * energies.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
    h = 0.5 * (h + h.adjoint()).eval();
    return HermitianGraph{static_cast<int>(n), gamma, Family::custom, std::move(h)};
}

HermitianGraph conjugate(const HermitianGraph& graph) {
    HermitianGraph out = graph;
    out.matrix = graph.matrix.conjugate();
    return out;
}

HermitianGraph shifted(const HermitianGraph& graph, double shift) {
    HermitianGraph out = graph;
    out.matrix.diagonal().array() += shift;
    return out;
}

SpectralData diagonalize(const HermitianGraph& graph) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(graph.matrix);
    if (solver.info() != Eigen::Success) {
        throw ValidationError("Hermitian eigen-decomposition did not converge");
    }
    SpectralData out;
    out.energies = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    for (Eigen::Index k = 0; k < out.eigenvectors.cols(); ++k) {
        auto column = out.eigenvectors.col(k);
        const double scale = column.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < column.size(); ++i) {
            if (std::abs(column(i)) > 1e-10 * scale) {
                column *= std::conj(column(i)) / std::abs(column(i));
                column(i) = std::abs(column(i));
                break;
            }
        }
    }
    return out;
}

SpectralData diagonalize(const HermitianGraph& graph, const Vector& target) {
    if (target.size() != graph.n) throw InputError("target dimension does not match graph");
    SpectralData out = diagonalize(graph);
    out.overlaps = (out.eigenvectors.adjoint() * target).cwiseAbs2();
    return out;
}

double designed_tau(int n, double gamma, int j) {
    if (n < 1 || !(gamma > 0.0)) throw InputError("designed tau needs N >= 1 and gamma > 0");
    if (j < 0) throw InputError("tau branch index j must be non-negative");
    return kTwoPi / (n * gamma) + kTwoPi * j / gamma;
}

ConditionReport check_search_conditions(const HermitianGraph& graph, const Vector& target, double tau,
                                        double tol) {
    return check_search_conditions(diagonalize(graph, target), tau, tol);
}

ConditionReport check_search_conditions(const SpectralData& spectral, double tau, double tol) {
    const int n = spectral.size();
    if (spectral.overlaps.size() != n) throw InputError("spectral data has no target attached");

    ConditionReport report;
    report.tau_used = tau;
    report.tolerance = tol;
    report.overlap_deviation = (spectral.overlaps.array() - 1.0 / n).abs().maxCoeff();
    report.overlaps_uniform = report.overlap_deviation <= tol;

    // Propagator phases -E_k tau. An equispaced set c * omega^k satisfies
    // e^{i N phase_k} = c^N for every k, which gives c up to an N-th root of unity.
    std::vector<double> phases(n);
    Complex accumulated = 0.0;
    for (int k = 0; k < n; ++k) {
        phases[k] = -spectral.energies(k) * tau;
        accumulated += std::polar(1.0, n * phases[k]);
    }
    double global = std::arg(accumulated) / n;
    global = std::fmod(global + kTwoPi, kTwoPi / n);
    report.global_phase = global;

    const double step = kTwoPi / n;
    std::vector<int> slot_used(n, 0);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        const double offset = wrap_angle(phases[k] - global);
        const double slot_real = offset / step;
        int slot = static_cast<int>(std::lround(slot_real));
        const double deviation = std::abs(wrap_angle(offset - slot * step));
        slot = ((slot % n) + n) % n;
        ++slot_used[slot];
        worst = std::max(worst, deviation);
    }

    std::vector<double> sorted = phases;
    for (auto& p : sorted) p = std::fmod(std::fmod(p, kTwoPi) + kTwoPi, kTwoPi);
    std::sort(sorted.begin(), sorted.end());
    double min_gap = kTwoPi;
    for (int k = 0; k < n; ++k) {
        const double next = (k + 1 < n) ? sorted[k + 1] : sorted[0] + kTwoPi;
        min_gap = std::min(min_gap, next - sorted[k]);
    }
    report.degenerate = n > 1 && min_gap <= std::max(tol, 1e-12);

    const bool permutation = std::all_of(slot_used.begin(), slot_used.end(), [](int c) { return c == 1; });
    report.phase_deviation = (permutation && !report.degenerate) ? worst : kPi;
    report.phases_equispaced = report.phase_deviation <= tol;
    report.pass = report.overlaps_uniform && report.phases_equispaced;
    return report;
}

}  // namespace epsearch
