#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thermolocate/patch.hpp"
#include "thermolocate/reconstruct.hpp"
#include "thermolocate/simulator.hpp"
#include "thermolocate/types.hpp"

namespace thermolocate {

struct NoiseSpec {
    double percent = 0.0;
    std::uint64_t seed = 0;
    bool literal_variance = false;
};

struct GridSpec {
    int n_r = 0;
    int n_theta = 0;
    int n_phi = 0;
    double r_min = 0.0;
    double r_max = 0.0;
};

struct ReconstructionSpec {
    GridSpec grid;
    int nav = 10;
    double amp_threshold = 0.02;
    Eigen::Index min_patch_points = 900;
    int anchor_k = 9;
    PhaseNormalization phase_normalization = PhaseNormalization::StdMatch;
    std::string input_basename;  // empty: derive from the config file stem
};

struct ForwardSpec {
    std::vector<Vec3> points;
    std::vector<double> times;
};

struct DistinguishabilitySpec {
    double total_power = 0.0;
    double source_radius = 0.0;
    Eigen::VectorXd depths;
    Eigen::VectorXd diffusivities;
    double frequency = 0.0;  // 0 = static map
    double offset = 0.05;
};

// Parsed scenario file. Sections are optional; each command checks for the
// sections it needs. Power values in the file may be given as {"total": W}
// or {"density": W/volume} (converted with the source's ball volume).
struct ScenarioConfig {
    std::string units = "dimensionless";
    std::optional<Medium> medium;
    std::optional<DomainSpec> domain;
    std::optional<RobinBoundary> boundary;
    std::vector<SourceSpec> sources;
    std::optional<StageSchedule> schedule;
    std::optional<double> initial_temperature;  // default: boundary ambient
    std::optional<CapGeometry> extraction;
    NoiseSpec noise;
    std::optional<ReconstructionSpec> reconstruction;
    std::optional<ForwardSpec> forward;
    std::optional<DistinguishabilitySpec> distinguishability;

    std::string config_hash;  // fingerprint of the file bytes
    std::string stem;         // file name without directory or extension
};

// Reads and parses a scenario file. Unreadable file -> IoError; malformed
// JSON or schema violations -> ConfigError with a line- or path-anchored
// message.
ScenarioConfig load_config(const std::string& path);

// Parses config text directly (the file-less variant used by tests).
ScenarioConfig parse_config(const std::string& text, const std::string& name);

}  // namespace thermolocate
