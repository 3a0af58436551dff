#include "epsearch/io.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>

namespace epsearch::io {

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

json graph_to_json(const HermitianGraph& graph) {
    json re = json::array();
    json im = json::array();
    for (int j = 0; j < graph.n; ++j) {
        json re_row = json::array();
        json im_row = json::array();
        for (int m = 0; m < graph.n; ++m) {
            re_row.push_back(graph.matrix(j, m).real());
            im_row.push_back(graph.matrix(j, m).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return json{{"n", graph.n},
                {"gamma", graph.gamma},
                {"family", std::string(to_string(graph.family))},
                {"re", std::move(re)},
                {"im", std::move(im)}};
}

HermitianGraph graph_from_json(const json& doc) {
    try {
        HermitianGraph graph;
        graph.n = doc.at("n").get<int>();
        graph.gamma = doc.at("gamma").get<double>();
        graph.family = parse_family(doc.at("family").get<std::string>());
        const auto& re = doc.at("re");
        const auto& im = doc.at("im");
        if (graph.n < 1 || re.size() != static_cast<std::size_t>(graph.n) ||
            im.size() != static_cast<std::size_t>(graph.n)) {
            throw InputError("graph JSON: matrix row count does not match n");
        }
        graph.matrix.resize(graph.n, graph.n);
        for (int j = 0; j < graph.n; ++j) {
            if (re[j].size() != static_cast<std::size_t>(graph.n) || im[j].size() != static_cast<std::size_t>(graph.n)) {
                throw InputError(fmt::format("graph JSON: row {} has the wrong length", j));
            }
            for (int m = 0; m < graph.n; ++m) {
                graph.matrix(j, m) = Complex(re[j][m].get<double>(), im[j][m].get<double>());
            }
        }
        graph.validate();
        return graph;
    } catch (const json::exception& e) {
        throw InputError(fmt::format("malformed graph JSON: {}", e.what()));
    }
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
    }
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
    out << doc.dump(2) << '\n';
    if (!out) throw InputError(fmt::format("failed writing '{}'", path.string()));
}

void save_graph(const std::filesystem::path& path, const HermitianGraph& graph) {
    write_json(path, graph_to_json(graph));
}

HermitianGraph load_graph(const std::filesystem::path& path) { return graph_from_json(read_json(path)); }

json state_to_json(const Vector& state) {
    json re = json::array();
    json im = json::array();
    for (Eigen::Index i = 0; i < state.size(); ++i) {
        re.push_back(state(i).real());
        im.push_back(state(i).imag());
    }
    return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

Vector state_from_json(const json& doc) {
    try {
        const auto& re = doc.at("re");
        const json im = doc.contains("im") ? doc.at("im") : json::array();
        if (!im.empty() && im.size() != re.size()) throw InputError("state JSON: re/im length mismatch");
        Vector state(static_cast<Eigen::Index>(re.size()));
        for (std::size_t i = 0; i < re.size(); ++i) {
            state(static_cast<Eigen::Index>(i)) = Complex(re[i].get<double>(), im.empty() ? 0.0 : im[i].get<double>());
        }
        return state;
    } catch (const json::exception& e) {
        throw InputError(fmt::format("malformed state JSON: {}", e.what()));
    }
}

json condition_report_to_json(const ConditionReport& r) {
    return json{{"overlaps_uniform", r.overlaps_uniform},
                {"overlap_deviation", r.overlap_deviation},
                {"phases_equispaced", r.phases_equispaced},
                {"phase_deviation", r.phase_deviation},
                {"degenerate", r.degenerate},
                {"global_phase", r.global_phase},
                {"tau_used", r.tau_used},
                {"tolerance", r.tolerance},
                {"verdict", r.pass ? "pass" : "fail"}};
}

json exceptional_to_json(const ExceptionalReport& r) {
    json eigenvalues = json::array();
    for (const auto& xi : r.eigenvalues) eigenvalues.push_back(json::array({xi.real(), xi.imag()}));
    json dark = json::array();
    for (const auto& d : r.dark_states) dark.push_back(json{{"index", d.index}, {"abs_xi", d.abs_xi}});
    return json{{"eigenvalues", std::move(eigenvalues)},
                {"nilpotency_norm", r.nilpotency_norm},
                {"index_norm", r.index_norm},
                {"max_abs_eig", r.max_abs_eig},
                {"tolerance", r.tolerance},
                {"is_exceptional", r.is_exceptional},
                {"dark_states", std::move(dark)}};
}

namespace {

json optional_number(const std::optional<double>& value) {
    return value ? json(*value) : json(nullptr);
}

}  // namespace

json detection_summary_json(const DetectionSeries& series) {
    json doc{{"p_det", series.stats.p_det},
             {"mean_n", optional_number(series.stats.mean_n)},
             {"var_n", optional_number(series.stats.var_n)},
             {"mean_t", optional_number(series.stats.mean_t)},
             {"truncated", series.truncated},
             {"surviving_norm2", series.surviving_norm2},
             {"tail_estimate", series.tail_estimate},
             {"dark_state_leakage", series.dark_state_leakage}};
    if (series.spectral_gap) doc["spectral_gap"] = *series.spectral_gap;
    return doc;
}

json winding_json(const ThetaSeries& series, const IntegralStatistics& stats) {
    return json{{"winding", series.winding ? json(*series.winding) : json(nullptr)},
                {"p_det", stats.p_det},
                {"mean_t", stats.mean_t},
                {"min_modulus", series.min_modulus},
                {"phase_change", series.phase_change},
                {"argument_integral", series.argument_integral},
                {"strategy_discrepancy", series.strategy_discrepancy},
                {"n_trunc", series.n_trunc},
                {"truncation_norm2", series.truncation_norm2},
                {"nudged_samples", series.nudged.size()}};
}

json noise_summary_json(double magnitude_a, const NoiseResult& result) {
    return json{{"a", magnitude_a},
                {"realizations", result.p_det.size()},
                {"window", result.window},
                {"mean_p_det", result.mean_p_det},
                {"std_p_det", result.std_p_det}};
}

void write_spectrum_csv(std::ostream& out, const SpectralData& spectral) {
    out << "k,energy,p_k\n";
    for (int k = 0; k < spectral.size(); ++k) {
        const double p = spectral.overlaps.size() == spectral.size() ? spectral.overlaps(k) : 0.0;
        out << k << ',' << format_double(spectral.energies(k)) << ',' << format_double(p) << '\n';
    }
}

void write_detection_csv(std::ostream& out, const DetectionSeries& series) {
    out << "n,F_n,re_phi,im_phi\n";
    for (std::size_t i = 0; i < series.phi.size(); ++i) {
        out << (i + 1) << ',' << format_double(series.f[i]) << ',' << format_double(series.phi[i].real()) << ','
            << format_double(series.phi[i].imag()) << '\n';
    }
}

void write_qbasis_csv(std::ostream& out, const std::vector<double>& overlaps) {
    out << "k,|<Q_k|psi0>|^2\n";
    for (std::size_t k = 0; k < overlaps.size(); ++k) out << k << ',' << format_double(overlaps[k]) << '\n';
}

void write_theta_csv(std::ostream& out, const ThetaSeries& series) {
    out << "theta,re,im,abs,unwrapped_phase\n";
    for (std::size_t j = 0; j < series.values.size(); ++j) {
        const Complex v = series.values[j];
        out << format_double(series.thetas[j]) << ',' << format_double(v.real()) << ',' << format_double(v.imag())
            << ',' << format_double(std::abs(v)) << ',' << format_double(series.unwrapped_phase[j]) << '\n';
    }
}

void write_noise_csv(std::ostream& out, double magnitude_a, const NoiseResult& result) {
    out << "a,realization,p_det\n";
    for (std::size_t r = 0; r < result.p_det.size(); ++r) {
        out << format_double(magnitude_a) << ',' << r << ',' << format_double(result.p_det[r]) << '\n';
    }
}

void write_noise_profile_csv(std::ostream& out, const NoiseResult& result) {
    out << "n,F_n\n";
    for (std::size_t i = 0; i < result.mean_f.size(); ++i) {
        out << (i + 1) << ',' << format_double(result.mean_f[i]) << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "tau,mean_n,p_det_at_nmax\n";
    for (std::size_t i = 0; i < result.taus.size(); ++i) {
        out << format_double(result.taus[i]) << ',' << format_double(result.mean_n[i]) << ','
            << format_double(result.p_det_at_nmax[i]) << '\n';
    }
}

void write_profile_csv(std::ostream& out, const ProfileResult& result) {
    out << "t,node,prob\n";
    for (std::size_t i = 0; i < result.times.size(); ++i) {
        for (Eigen::Index x = 0; x < result.probabilities.cols(); ++x) {
            out << format_double(result.times[i]) << ',' << x << ','
                << format_double(result.probabilities(static_cast<Eigen::Index>(i), x)) << '\n';
        }
    }
}

json manifest_to_json(const RunManifest& m) {
    return json{{"command", m.command},   {"argv", m.argv},
                {"parameters", m.parameters}, {"seed", m.seed},
                {"artifact_paths", m.artifact_paths}, {"tool_version", m.tool_version}};
}

RunManifest manifest_from_json(const json& doc) {
    try {
        RunManifest m;
        m.command = doc.at("command").get<std::string>();
        m.argv = doc.at("argv").get<std::vector<std::string>>();
        m.parameters = doc.value("parameters", std::map<std::string, std::string>{});
        m.seed = doc.value("seed", std::uint64_t{0});
        m.artifact_paths = doc.value("artifact_paths", std::vector<std::string>{});
        m.tool_version = doc.value("tool_version", std::string{});
        return m;
    } catch (const json::exception& e) {
        throw InputError(fmt::format("malformed run manifest: {}", e.what()));
    }
}

}  // namespace epsearch::io
