#include "epsearch/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include <fmt/format.h>

namespace epsearch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Runs body(i) for i in [0, count) on a small pool; results land in caller-owned
// slots so assembly order never depends on scheduling.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    }
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

NoiseResult noise_run(const HermitianGraph& graph, const Vector& target, const Vector& psi0,
                      const NoiseConfig& config) {
    if (config.magnitude_a < 0.0) throw InputError("noise magnitude must be >= 0");
    if (config.realizations < 1) throw InputError("need at least one realization");
    if (!(graph.gamma > 0.0)) throw InputError("noise run needs a graph with gamma > 0");
    const int n = graph.n;
    const int window = config.n_detect_window > 0 ? config.n_detect_window : n;
    const int horizon = std::max(window, config.horizon > 0 ? config.horizon : 2 * window);
    const double base_tau = designed_tau(n, graph.gamma);

    const SpectralData spectral = diagonalize(graph);
    const Matrix& basis = spectral.eigenvectors;
    const Vector target_coeff = basis.adjoint() * target;
    const Vector start_coeff = basis.adjoint() * psi0;

    NoiseResult result;
    result.window = window;
    result.p_det.assign(config.realizations, 0.0);
    std::vector<std::vector<double>> profiles(config.realizations);

    parallel_for(static_cast<std::size_t>(config.realizations), config.threads, [&](std::size_t r) {
        std::mt19937_64 engine(substream_seed(config.seed, r));
        std::uniform_real_distribution<double> uniform(-0.5, 0.5);
        auto draw_tau = [&] { return base_tau * (1.0 + config.magnitude_a * uniform(engine)); };

        // Work in the energy eigenbasis: evolution is diagonal there, the
        // projection removes the target component.
        Vector coeff = start_coeff;
        double tau = draw_tau();
        std::vector<double> f(horizon);
        double detected = 0.0;
        for (int step = 0; step < horizon; ++step) {
            if (config.mode == NoiseMode::per_step && step > 0) tau = draw_tau();
            for (int k = 0; k < n; ++k) coeff(k) *= std::polar(1.0, -spectral.energies(k) * tau);
            const Complex amplitude = target_coeff.dot(coeff);
            coeff -= amplitude * target_coeff;
            f[step] = std::norm(amplitude);
            if (step < window) detected += f[step];
        }
        result.p_det[r] = detected;
        profiles[r] = std::move(f);
    });

    result.mean_f.assign(horizon, 0.0);
    double sum = 0.0;
    for (int r = 0; r < config.realizations; ++r) {
        sum += result.p_det[r];
        for (int step = 0; step < horizon; ++step) result.mean_f[step] += profiles[r][step];
    }
    const double count = config.realizations;
    result.mean_p_det = sum / count;
    for (auto& v : result.mean_f) v /= count;
    double spread = 0.0;
    for (double p : result.p_det) spread += (p - result.mean_p_det) * (p - result.mean_p_det);
    result.std_p_det = config.realizations > 1 ? std::sqrt(spread / (count - 1.0)) : 0.0;
    return result;
}

std::vector<double> default_sweep_taus(int points, double lo, double hi) {
    if (points < 1 || !(lo > 0.0) || !(hi >= lo)) throw InputError("invalid tau grid");
    std::vector<double> taus(points);
    if (points == 1) {
        taus[0] = lo;
        return taus;
    }
    const double ratio = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) taus[i] = lo * std::exp(ratio * i);
    taus.back() = hi;
    return taus;
}

SweepResult detection_sweep(const HermitianGraph& graph, const Vector& target, const Vector& psi0,
                            const std::vector<double>& taus, int n_max, unsigned threads) {
    const SpectralData spectral = diagonalize(graph);
    SweepResult result;
    result.taus = taus;
    result.n_max = n_max;
    result.mean_n.assign(taus.size(), 0.0);
    result.p_det_at_nmax.assign(taus.size(), 0.0);
    std::vector<char> heavy(taus.size(), 0);

    parallel_for(taus.size(), threads, [&](std::size_t i) {
        const DetectionSeries series = first_detection_series(spectral, Protocol{taus[i], target, n_max}, psi0);
        const auto stats = detection_statistics(series.f, taus[i], {.threshold = 0.999, .allow_conditional = true});
        result.mean_n[i] = stats.mean_n.value_or(std::numeric_limits<double>::infinity());
        result.p_det_at_nmax[i] = stats.p_det;
        heavy[i] = stats.p_det < 0.99;
    });
    result.heavy_truncation.assign(heavy.begin(), heavy.end());
    return result;
}

SweepResult sk_sweep(int n, const std::vector<double>& taus, std::uint64_t seed, int n_max, unsigned threads) {
    if (n_max < 10000) throw InputError(fmt::format("SK sweep needs n_max >= 1e4, got {}", n_max));
    const HermitianGraph graph = build_sk(n, seed, 1.0);
    return detection_sweep(graph, basis_state(n, 0), basis_state(n, 1), taus, n_max, threads);
}

std::vector<double> profile_grid(int n, double tau, int subdivisions, int periods) {
    if (subdivisions < 1 || periods < 1) throw InputError("invalid profile grid");
    const int count = subdivisions * n * periods + 1;
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i) grid[i] = tau * i / subdivisions;
    return grid;
}

ProfileResult non_monitored_profile(const HermitianGraph& graph, const Vector& psi0,
                                    const std::vector<double>& t_grid, double tau) {
    if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw InputError("time grid must be ascending");
    if (psi0.size() != graph.n) throw InputError("state dimension does not match graph");
    const SpectralData spectral = diagonalize(graph);

    ProfileResult result;
    result.times = t_grid;
    result.probabilities.resize(static_cast<Eigen::Index>(t_grid.size()), graph.n);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const Vector psi = evolve(spectral, psi0, t_grid[i]);
        result.probabilities.row(static_cast<Eigen::Index>(i)) = psi.cwiseAbs2().transpose();
        const double k_real = t_grid[i] / tau;
        const long k = std::lround(k_real);
        if (std::abs(k_real - k) < 1e-9) {
            Eigen::Index node = 0;
            const double best = result.probabilities.row(static_cast<Eigen::Index>(i)).maxCoeff(&node);
            result.at_multiples.push_back({static_cast<int>(k), static_cast<int>(node), best});
        }
    }
    const Vector revived = evolve(spectral, psi0, graph.n * tau);
    result.revival_overlap = std::norm(psi0.dot(revived));
    return result;
}

std::optional<double> state_transfer_check(const HermitianGraph& graph, int x0, int xf, double tau,
                                           int subdivisions) {
    if (x0 == xf) throw InputError("state transfer needs distinct start and end nodes");
    if (xf < 0 || xf >= graph.n) throw InputError(fmt::format("node {} out of range for N = {}", xf, graph.n));
    const Vector start = basis_state(graph.n, x0);
    const SpectralData spectral = diagonalize(graph);
    for (double t : profile_grid(graph.n, tau, subdivisions)) {
        if (std::norm(evolve(spectral, start, t)(xf)) >= 1.0 - 1e-8) return t;
    }
    return std::nullopt;
}

}  // namespace epsearch
