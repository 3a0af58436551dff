#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "epsearch/exceptional.hpp"
#include "epsearch/experiments.hpp"
#include "epsearch/graphs.hpp"
#include "epsearch/io.hpp"
#include "epsearch/monitored.hpp"
#include "epsearch/qbasis.hpp"
#include "epsearch/topology.hpp"

namespace epsearch::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr const char* kToolVersion = "epsearch " EPSEARCH_VERSION;

struct GraphArgs {
    std::string path;
    std::string family;
    int n = 0;
    double gamma = 1.0;
    std::uint64_t seed = 1;
};

struct ProtocolArgs {
    int target = 0;
    std::optional<double> tau;
    int j = 0;
};

struct OutputArgs {
    std::string dir;
    std::string stem;
};

// Everything a command produced, collected for the manifest.
struct RunRecord {
    fs::path dir;
    std::string stem;
    std::vector<std::string> artifacts;
    std::uint64_t seed = 0;
    int exit_code = kExitOk;

    fs::path artifact(const std::string& name) {
        artifacts.push_back(name);
        return dir / name;
    }
};

void add_graph_options(CLI::App* sub, GraphArgs& g, const char* seed_flag = "--seed") {
    sub->add_option("--graph", g.path, "Graph JSON file");
    sub->add_option("--family", g.family, "crawl | funnel | sk")->capture_default_str();
    sub->add_option("--n", g.n, "Number of nodes")->capture_default_str();
    sub->add_option("--gamma", g.gamma, "Energy scale (coupling scale for sk)")->capture_default_str();
    sub->add_option(seed_flag, g.seed, "Seed for the sk family")->capture_default_str();
}

void add_protocol_options(CLI::App* sub, ProtocolArgs& p) {
    sub->add_option("--target", p.target, "Detector node")->capture_default_str();
    sub->add_option("--tau", p.tau, "Sampling interval (default 2 pi / (N gamma))");
    sub->add_option("--j", p.j, "Branch of the designed interval, tau = 2pi/(N gamma) + 2 j pi / gamma")
        ->capture_default_str();
}

void add_output_options(CLI::App* sub, OutputArgs& o) {
    sub->add_option("--out-dir", o.dir, "Output directory (default $EPSEARCH_OUT_DIR or .)");
    sub->add_option("--stem", o.stem, "Base name for output files");
}

HermitianGraph resolve_graph(const GraphArgs& g) {
    if (!g.path.empty()) return io::load_graph(g.path);
    if (g.family.empty()) throw InputError("give either --graph or --family");
    switch (parse_family(g.family)) {
        case Family::crawl:
            return build_crawl(g.n, g.gamma);
        case Family::funnel:
            return build_funnel(g.n, g.gamma);
        case Family::sk:
            return build_sk(g.n, g.seed, g.gamma);
        case Family::custom:
            break;
    }
    throw InputError("family 'custom' needs --graph");
}

double resolve_tau(const HermitianGraph& graph, const ProtocolArgs& p) {
    if (p.tau) {
        if (!(*p.tau > 0.0)) throw InputError(fmt::format("--tau must be > 0, got {}", *p.tau));
        return *p.tau;
    }
    return designed_tau(graph.n, graph.gamma, p.j);
}

// node:<i>, qk:<k>, or a state file {"re": [...], "im": [...]}.
Vector resolve_state(const std::string& spec, const HermitianGraph& graph, const Vector& target, double tau) {
    auto parse_index = [&](std::string_view digits) {
        int value = 0;
        const auto* end = digits.data() + digits.size();
        const auto [ptr, ec] = std::from_chars(digits.data(), end, value);
        if (digits.empty() || ec != std::errc() || ptr != end) {
            throw InputError(fmt::format("malformed state spec '{}'", spec));
        }
        return value;
    };
    if (spec.starts_with("node:")) return basis_state(graph.n, parse_index(std::string_view(spec).substr(5)));
    if (spec.starts_with("qk:")) {
        const int k = parse_index(std::string_view(spec).substr(3));
        if (k < 0 || k >= graph.n) throw InputError(fmt::format("qk index {} out of range for N = {}", k, graph.n));
        return evolve(graph, target, k * tau);
    }
    if (fs::is_regular_file(spec)) {
        const Vector state = io::state_from_json(io::read_json(spec));
        if (state.size() != graph.n) throw InputError("state file dimension does not match graph");
        if (std::abs(state.norm() - 1.0) > 1e-8) throw InputError("state file is not normalised");
        return state / state.norm();
    }
    throw InputError(fmt::format("malformed state spec '{}' (expected node:<i>, qk:<k> or a file)", spec));
}

fs::path resolve_out_dir(const std::string& flag) {
    fs::path dir = flag;
    if (dir.empty()) {
        const char* env = std::getenv("EPSEARCH_OUT_DIR");
        dir = (env && *env) ? fs::path(env) : fs::path(".");
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    return dir;
}

template <typename Writer>
void write_text(const fs::path& path, Writer writer) {
    std::ofstream out(path);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
    writer(out);
    if (!out) throw InputError(fmt::format("failed writing '{}'", path.string()));
}

std::map<std::string, std::string> collect_parameters(const CLI::App* sub) {
    std::map<std::string, std::string> params;
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "out-dir") continue;
        std::string value;
        if (opt->count() > 0) {
            const auto& results = opt->results();
            for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
        } else {
            value = opt->get_default_str();
        }
        params[name] = value;
    }
    return params;
}

// argv without --out-dir, so a manifest replays into whatever directory holds it.
std::vector<std::string> strip_out_dir(const std::vector<std::string>& args) {
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out-dir") {
            ++i;
            continue;
        }
        if (args[i].starts_with("--out-dir=")) continue;
        kept.push_back(args[i]);
    }
    return kept;
}

std::string stem_or(const OutputArgs& o, std::string fallback) { return o.stem.empty() ? fallback : o.stem; }

}  // namespace

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exceptional-point quantum search: graphs, monitored walks, winding numbers", "epsearch"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    ProtocolArgs protocol_args;
    OutputArgs output_args;
    RunRecord record;
    std::function<void()> action;
    std::string command;

    // ---- build ------------------------------------------------------------
    double build_tol = kDefaultConditionTol;
    GraphArgs build_graph;
    auto* build = app.add_subcommand("build", "Construct a graph and report the search conditions");
    build->add_option("--family", build_graph.family, "crawl | funnel | sk")->required();
    build->add_option("--n", build_graph.n, "Number of nodes")->required();
    build->add_option("--gamma", build_graph.gamma, "Energy scale")->capture_default_str();
    build->add_option("--seed", build_graph.seed, "Seed for the sk family")->capture_default_str();
    add_protocol_options(build, protocol_args);
    build->add_option("--tol", build_tol, "Condition tolerance")->capture_default_str();
    add_output_options(build, output_args);
    build->callback([&] {
        action = [&] {
            const Family family = parse_family(build_graph.family);
            if (family == Family::custom) throw InputError("build supports crawl, funnel and sk");
            const HermitianGraph graph = resolve_graph(build_graph);
            const double tau = resolve_tau(graph, protocol_args);
            const Vector target = basis_state(graph.n, protocol_args.target);
            const SpectralData spectral = diagonalize(graph, target);
            const ConditionReport report = check_search_conditions(spectral, tau, build_tol);
            if (family == Family::sk) record.seed = build_graph.seed;

            const std::string stem = record.stem = stem_or(output_args, fmt::format("{}_n{}", build_graph.family, graph.n));
            io::save_graph(record.artifact(stem + ".json"), graph);
            write_text(record.artifact(stem + ".spectrum.csv"),
                       [&](std::ostream& os) { io::write_spectrum_csv(os, spectral); });
            io::write_json(record.artifact(stem + ".conditions.json"), io::condition_report_to_json(report));
            if (family != Family::sk) {
                out << "conditions: " << (report.pass ? "PASS" : "FAIL") << '\n';
                if (!report.pass) {
                    out << fmt::format("  overlap deviation {:.3e}, phase deviation {:.3e}, tol {:.1e}\n",
                                       report.overlap_deviation, report.phase_deviation, report.tolerance);
                }
            }
        };
    });

    // ---- check ------------------------------------------------------------
    double check_tol = kDefaultConditionTol;
    GraphArgs check_graph;
    auto* check = app.add_subcommand("check", "Verify the search conditions and the exceptional point");
    add_graph_options(check, check_graph);
    add_protocol_options(check, protocol_args);
    check->add_option("--tol", check_tol, "Condition tolerance")->capture_default_str();
    add_output_options(check, output_args);
    check->callback([&] {
        action = [&] {
            const HermitianGraph graph = resolve_graph(check_graph);
            const double tau = resolve_tau(graph, protocol_args);
            const Vector target = basis_state(graph.n, protocol_args.target);
            const SpectralData spectral = diagonalize(graph, target);
            const ConditionReport report = check_search_conditions(spectral, tau, check_tol);
            const ExceptionalReport ep = survival_spectrum(survival_operator(spectral, target, tau));
            if (graph.family == Family::sk) record.seed = check_graph.seed;

            const std::string stem = record.stem = stem_or(output_args, "check");
            io::write_json(record.artifact(stem + ".json"),
                           json{{"conditions", io::condition_report_to_json(report)},
                                {"exceptional", io::exceptional_to_json(ep)}});
            write_text(record.artifact(stem + ".spectrum.csv"),
                       [&](std::ostream& os) { io::write_spectrum_csv(os, spectral); });
            out << "verdict: " << (report.pass ? "pass" : "fail") << '\n';
            out << fmt::format("||S^N|| = {:.3e} ({})\n", ep.nilpotency_norm,
                               ep.is_exceptional ? "exceptional point" : "not exceptional");
            if (!report.pass) record.exit_code = kExitValidation;
        };
    });

    // ---- detect -----------------------------------------------------------
    std::string psi0_spec;
    int n_max = 0;
    GraphArgs detect_graph;
    auto* detect = app.add_subcommand("detect", "First-detection statistics under stroboscopic monitoring");
    add_graph_options(detect, detect_graph);
    add_protocol_options(detect, protocol_args);
    detect->add_option("--psi0", psi0_spec, "node:<i>, qk:<k> or a state file")->required();
    detect->add_option("--n-max", n_max, "Number of measurements (default 10 N)");
    add_output_options(detect, output_args);
    detect->callback([&] {
        action = [&] {
            const HermitianGraph graph = resolve_graph(detect_graph);
            const double tau = resolve_tau(graph, protocol_args);
            const Vector target = basis_state(graph.n, protocol_args.target);
            const Vector psi0 = resolve_state(psi0_spec, graph, target, tau);
            const int budget = n_max > 0 ? n_max : 10 * graph.n;
            const DetectionSeries series = first_detection_series(graph, Protocol{tau, target, budget}, psi0);
            if (graph.family == Family::sk) record.seed = detect_graph.seed;

            const std::string stem = record.stem = stem_or(output_args, "detect");
            write_text(record.artifact(stem + ".csv"), [&](std::ostream& os) { io::write_detection_csv(os, series); });
            io::write_json(record.artifact(stem + ".json"), io::detection_summary_json(series));
            out << fmt::format("P_det = {:.12f}", series.stats.p_det);
            if (series.stats.mean_n) out << fmt::format(", <n> = {:.6f}", *series.stats.mean_n);
            out << '\n';
        };
    });

    // ---- winding ----------------------------------------------------------
    int samples = 0;
    std::optional<int> n_trunc;
    double epsilon = 1e-9;
    GraphArgs winding_graph{.path = {}, .family = "crawl", .n = 3, .gamma = 1.0, .seed = 1};
    auto* winding = app.add_subcommand("winding", "Winding number of the generating function");
    add_graph_options(winding, winding_graph);
    add_protocol_options(winding, protocol_args);
    winding->add_option("--psi0", psi0_spec, "node:<i>, qk:<k> or a state file")->required();
    winding->add_option("--samples", samples, "Theta samples (default max(1024, 64 N))");
    winding->add_option("--n-trunc", n_trunc, "Terms in the truncated amplitude sum");
    winding->add_option("--epsilon", epsilon, "Resolvent regulator")->capture_default_str();
    add_output_options(winding, output_args);
    winding->callback([&] {
        action = [&] {
            const HermitianGraph graph = resolve_graph(winding_graph);
            const double tau = resolve_tau(graph, protocol_args);
            const Vector target = basis_state(graph.n, protocol_args.target);
            const Vector psi0 = resolve_state(psi0_spec, graph, target, tau);
            GeneratingOptions options;
            options.epsilon = epsilon;
            options.n_trunc = n_trunc;
            const int m = samples > 0 ? samples : default_theta_samples(graph.n);
            const ThetaSeries series = generating_function(graph, Protocol{tau, target, 1}, psi0, m, options);
            const IntegralStatistics stats = integral_statistics(series, tau);
            const QBasis basis = build_qbasis(graph, target, tau);
            if (graph.family == Family::sk) record.seed = winding_graph.seed;

            const std::string stem = record.stem = stem_or(output_args, "winding");
            write_text(record.artifact(stem + ".csv"), [&](std::ostream& os) { io::write_theta_csv(os, series); });
            io::write_json(record.artifact(stem + ".json"), io::winding_json(series, stats));
            write_text(record.artifact(stem + ".qbasis.csv"),
                       [&](std::ostream& os) { io::write_qbasis_csv(os, qbasis_overlaps(basis, psi0)); });
            if (series.winding) {
                out << "winding: " << *series.winding << '\n';
            } else {
                out << fmt::format("winding: undefined (min |Phi| = {:.3e})\n", series.min_modulus);
                record.exit_code = kExitValidation;
            }
        };
    });

    // ---- noise ------------------------------------------------------------
    NoiseConfig noise_config;
    noise_config.magnitude_a = 0.1;
    std::string noise_mode = "per-step";
    std::string noise_psi0;
    auto* noise = app.add_subcommand("noise", "Detection probability under a jittered sampling interval");
    GraphArgs noise_graph{.path = {}, .family = "funnel", .n = 50, .gamma = 1.0, .seed = 1};
    add_graph_options(noise, noise_graph, "--graph-seed");
    noise->add_option("--target", protocol_args.target, "Detector node")->capture_default_str();
    noise->add_option("--psi0", noise_psi0, "Initial state (default node:N-1)");
    noise->add_option("--a", noise_config.magnitude_a, "Relative jitter magnitude")->capture_default_str();
    noise->add_option("--realizations", noise_config.realizations, "Ensemble size")->capture_default_str();
    noise->add_option("--seed", noise_config.seed, "Master seed")->capture_default_str();
    noise->add_option("--mode", noise_mode, "per-step | per-realization")
        ->check(CLI::IsMember({"per-step", "per-realization"}))
        ->capture_default_str();
    noise->add_option("--window", noise_config.n_detect_window, "Attempts counted in P_det (default N)");
    noise->add_option("--horizon", noise_config.horizon, "Attempts simulated (default 2 window)");
    noise->add_option("--threads", noise_config.threads, "Worker threads (0 = all cores)");
    add_output_options(noise, output_args);
    noise->callback([&] {
        action = [&] {
            const HermitianGraph graph = resolve_graph(noise_graph);
            const double tau = designed_tau(graph.n, graph.gamma);
            const Vector target = basis_state(graph.n, protocol_args.target);
            const Vector psi0 = resolve_state(noise_psi0.empty() ? fmt::format("node:{}", graph.n - 1) : noise_psi0,
                                              graph, target, tau);
            noise_config.mode = noise_mode == "per-step" ? NoiseMode::per_step : NoiseMode::per_realization;
            const NoiseResult result = noise_run(graph, target, psi0, noise_config);
            record.seed = noise_config.seed;

            const std::string stem = record.stem = stem_or(output_args, "noise");
            write_text(record.artifact(stem + ".csv"),
                       [&](std::ostream& os) { io::write_noise_csv(os, noise_config.magnitude_a, result); });
            write_text(record.artifact(stem + ".profile.csv"),
                       [&](std::ostream& os) { io::write_noise_profile_csv(os, result); });
            io::write_json(record.artifact(stem + ".json"), io::noise_summary_json(noise_config.magnitude_a, result));
            out << fmt::format("mean P_det = {:.6f} +- {:.6f} over {} realizations\n", result.mean_p_det,
                               result.std_p_det, result.p_det.size());
        };
    });

    // ---- sweep ------------------------------------------------------------
    GraphArgs sweep_graph{.path = {}, .family = "sk", .n = 50, .gamma = 1.0, .seed = 1};
    std::string sweep_psi0 = "node:1";
    std::vector<double> sweep_taus;
    int points = 60;
    double tau_min = 0.2;
    double tau_max = 4.0;
    int sweep_n_max = 100000;
    unsigned sweep_threads = 0;
    auto* sweep = app.add_subcommand("sweep", "Mean detection time across sampling intervals");
    add_graph_options(sweep, sweep_graph);
    sweep->add_option("--target", protocol_args.target, "Detector node")->capture_default_str();
    sweep->add_option("--psi0", sweep_psi0, "Initial state")->capture_default_str();
    sweep->add_option("--points", points, "Log-spaced grid points")->capture_default_str();
    sweep->add_option("--tau-min", tau_min, "Smallest tau")->capture_default_str();
    sweep->add_option("--tau-max", tau_max, "Largest tau")->capture_default_str();
    sweep->add_option("--taus", sweep_taus, "Explicit tau list, replaces the grid")->delimiter(',');
    sweep->add_option("--n-max", sweep_n_max, "Measurements per point")->capture_default_str();
    sweep->add_option("--threads", sweep_threads, "Worker threads (0 = all cores)");
    add_output_options(sweep, output_args);
    sweep->callback([&] {
        action = [&] {
            const HermitianGraph graph = resolve_graph(sweep_graph);
            const Vector target = basis_state(graph.n, protocol_args.target);
            const std::vector<double> taus =
                sweep_taus.empty() ? default_sweep_taus(points, tau_min, tau_max) : sweep_taus;
            for (double t : taus) {
                if (!(t > 0.0)) throw InputError(fmt::format("tau values must be > 0, got {}", t));
            }
            const Vector psi0 = resolve_state(sweep_psi0, graph, target, taus.front());
            const SweepResult result = detection_sweep(graph, target, psi0, taus, sweep_n_max, sweep_threads);
            record.seed = graph.family == Family::sk ? sweep_graph.seed : 0;

            std::vector<double> sorted = result.mean_n;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t mid = sorted.size() / 2;
            const double median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
            const auto heavy = std::count(result.heavy_truncation.begin(), result.heavy_truncation.end(), true);

            const std::string stem = record.stem = stem_or(output_args, "sweep");
            write_text(record.artifact(stem + ".csv"), [&](std::ostream& os) { io::write_sweep_csv(os, result); });
            io::write_json(record.artifact(stem + ".json"),
                           json{{"n", graph.n},
                                {"n_max", result.n_max},
                                {"points", result.taus.size()},
                                {"median_mean_n", median},
                                {"heavy_truncation_points", heavy},
                                {"mean_n_conditional", true}});
            out << fmt::format("median <n> = {:.3f} over {} points ({} with P_det(n_max) < 0.99)\n", median,
                               result.taus.size(), heavy);
        };
    });

    // ---- evolve -----------------------------------------------------------
    std::string evolve_psi0 = "node:0";
    int subdivisions = 10;
    int periods = 1;
    GraphArgs evolve_graph;
    auto* evolve_cmd = app.add_subcommand("evolve", "Unmonitored evolution on a time grid");
    add_graph_options(evolve_cmd, evolve_graph);
    add_protocol_options(evolve_cmd, protocol_args);
    evolve_cmd->add_option("--psi0", evolve_psi0, "Initial state")->capture_default_str();
    evolve_cmd->add_option("--sub", subdivisions, "Grid points per tau")->capture_default_str();
    evolve_cmd->add_option("--periods", periods, "Number of N tau periods")->capture_default_str();
    add_output_options(evolve_cmd, output_args);
    evolve_cmd->callback([&] {
        action = [&] {
            const HermitianGraph graph = resolve_graph(evolve_graph);
            const double tau = resolve_tau(graph, protocol_args);
            const Vector target = basis_state(graph.n, protocol_args.target);
            const Vector psi0 = resolve_state(evolve_psi0, graph, target, tau);
            const ProfileResult result =
                non_monitored_profile(graph, psi0, profile_grid(graph.n, tau, subdivisions, periods), tau);
            if (graph.family == Family::sk) record.seed = evolve_graph.seed;

            json localizations = json::array();
            for (const auto& loc : result.at_multiples) {
                localizations.push_back(json{{"k", loc.k}, {"node", loc.node}, {"max_prob", loc.max_prob}});
            }
            const std::string stem = record.stem = stem_or(output_args, "evolve");
            write_text(record.artifact(stem + ".csv"), [&](std::ostream& os) { io::write_profile_csv(os, result); });
            io::write_json(record.artifact(stem + ".json"),
                           json{{"tau", tau},
                                {"revival_overlap", result.revival_overlap},
                                {"localizations", std::move(localizations)}});
            out << fmt::format("revival |<psi0|psi(N tau)>|^2 = {:.12f}\n", result.revival_overlap);
        };
    });

    // ---- replay -----------------------------------------------------------
    std::string manifest_path;
    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay->add_option("manifest", manifest_path, "Manifest JSON")->required();
    replay->add_option("--out-dir", output_args.dir, "Output directory (default: the manifest's directory)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (replay->parsed()) {
            const io::RunManifest manifest = io::manifest_from_json(io::read_json(manifest_path));
            if (manifest.argv.empty() || manifest.argv.front() == "replay") {
                throw InputError("manifest does not record a replayable command");
            }
            std::vector<std::string> replay_args = manifest.argv;
            const fs::path dir =
                output_args.dir.empty() ? fs::absolute(manifest_path).parent_path() : fs::path(output_args.dir);
            replay_args.push_back("--out-dir");
            replay_args.push_back(dir.string());
            return run(replay_args, out, err);
        }

        for (const CLI::App* sub : app.get_subcommands()) command = sub->get_name();
        record.dir = resolve_out_dir(output_args.dir);
        action();

        io::RunManifest manifest;
        manifest.command = command;
        manifest.argv = strip_out_dir(args);
        manifest.parameters = collect_parameters(app.get_subcommand(command));
        manifest.seed = record.seed;
        manifest.artifact_paths = record.artifacts;
        manifest.tool_version = kToolVersion;
        io::write_json(record.dir / (record.stem + ".manifest.json"), io::manifest_to_json(manifest));
        return record.exit_code;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const ValidationError& e) {
        err << "validation failed: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

}  // namespace epsearch::cli
