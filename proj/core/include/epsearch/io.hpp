#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "epsearch/exceptional.hpp"
#include "epsearch/experiments.hpp"
#include "epsearch/graphs.hpp"
#include "epsearch/monitored.hpp"
#include "epsearch/topology.hpp"

namespace epsearch::io {

using nlohmann::json;

/// 17 significant digits; round-trips every finite double.
std::string format_double(double value);

// Graph files: {"n", "gamma", "family", "re": [[...]], "im": [[...]]}
json graph_to_json(const HermitianGraph& graph);
HermitianGraph graph_from_json(const json& doc);
void save_graph(const std::filesystem::path& path, const HermitianGraph& graph);
HermitianGraph load_graph(const std::filesystem::path& path);

// State files: {"re": [...], "im": [...]}
json state_to_json(const Vector& state);
Vector state_from_json(const json& doc);

json condition_report_to_json(const ConditionReport& report);
json exceptional_to_json(const ExceptionalReport& report);
json detection_summary_json(const DetectionSeries& series);
json winding_json(const ThetaSeries& series, const IntegralStatistics& stats);
json noise_summary_json(double magnitude_a, const NoiseResult& result);

void write_spectrum_csv(std::ostream& out, const SpectralData& spectral);
void write_detection_csv(std::ostream& out, const DetectionSeries& series);
void write_qbasis_csv(std::ostream& out, const std::vector<double>& overlaps);
void write_theta_csv(std::ostream& out, const ThetaSeries& series);
void write_noise_csv(std::ostream& out, double magnitude_a, const NoiseResult& result);
void write_noise_profile_csv(std::ostream& out, const NoiseResult& result);
void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_profile_csv(std::ostream& out, const ProfileResult& result);

/// Every CLI output is paired with one of these; replaying `argv` reproduces
/// the artifacts byte for byte.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::map<std::string, std::string> parameters;
    std::uint64_t seed = 0;
    std::vector<std::string> artifact_paths;
    std::string tool_version;
};

json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const json& doc);

json read_json(const std::filesystem::path& path);
/// Writes `doc` pretty-printed with a trailing newline. Throws InputError when
/// the file cannot be opened.
void write_json(const std::filesystem::path& path, const json& doc);

}  // namespace epsearch::io
