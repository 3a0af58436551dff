#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "epsearch/monitored.hpp"

namespace epsearch {

// ---------------------------------------------------------------------------
// Noisy sampling interval
// ---------------------------------------------------------------------------

enum class NoiseMode {
    per_step,         // fresh tau for every inter-measurement interval (default)
    per_realization,  // one tau drawn per realization
};

struct NoiseConfig {
    double magnitude_a = 0.0;
    int realizations = 1000;
    std::uint64_t seed = 1;
    int n_detect_window = 0;  // attempts counted in P_det; 0 means N
    int horizon = 0;          // attempts simulated for the F_n profile; 0 means 2 * window
    NoiseMode mode = NoiseMode::per_step;
    unsigned threads = 0;     // 0 = hardware concurrency
};

struct NoiseResult {
    double mean_p_det = 0.0;
    double std_p_det = 0.0;
    std::vector<double> p_det;   // per realization
    std::vector<double> mean_f;  // ensemble-averaged F_n, n = 1..horizon
    int window = 0;
};

/// Seed for realization `index` of a run seeded with `master`. Realizations
/// are independent of evaluation order.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

/// tau_i = designed_tau(N, gamma) * (1 + a * uniform[-0.5, 0.5]).
NoiseResult noise_run(const HermitianGraph& graph, const Vector& target, const Vector& psi0,
                      const NoiseConfig& config);

// ---------------------------------------------------------------------------
// tau sweep
// ---------------------------------------------------------------------------

struct SweepResult {
    std::vector<double> taus;
    std::vector<double> mean_n;         // conditional on detection within n_max
    std::vector<double> p_det_at_nmax;
    std::vector<bool> heavy_truncation;  // p_det(n_max) < 0.99
    int n_max = 0;
};

/// 60 log-spaced points over [0.2, 4.0].
std::vector<double> default_sweep_taus(int points = 60, double lo = 0.2, double hi = 4.0);

SweepResult detection_sweep(const HermitianGraph& graph, const Vector& target, const Vector& psi0,
                            const std::vector<double>& taus, int n_max, unsigned threads = 0);

/// SK graph with unit coupling scale, target |0>, walker starting on |1>.
SweepResult sk_sweep(int n, const std::vector<double>& taus, std::uint64_t seed, int n_max = 100000,
                     unsigned threads = 0);

// ---------------------------------------------------------------------------
// Unmonitored evolution
// ---------------------------------------------------------------------------

struct Localization {
    int k = 0;          // t = k tau
    int node = 0;
    double max_prob = 0.0;
};

struct ProfileResult {
    std::vector<double> times;
    Eigen::MatrixXd probabilities;   // row per time, column per node
    std::vector<Localization> at_multiples;
    double revival_overlap = 0.0;    // |<psi0|psi(N tau)>|^2
};

/// Times 0, tau/sub, 2 tau/sub, ..., periods * N * tau.
std::vector<double> profile_grid(int n, double tau, int subdivisions = 10, int periods = 1);

ProfileResult non_monitored_profile(const HermitianGraph& graph, const Vector& psi0,
                                    const std::vector<double>& t_grid, double tau);

/// Earliest time on the tau/subdivisions grid (up to N tau) with probability
/// >= 1 - 1e-8 on node xf, starting from node x0.
std::optional<double> state_transfer_check(const HermitianGraph& graph, int x0, int xf, double tau,
                                           int subdivisions = 10);

}  // namespace epsearch
