// Batch front end: simulate boundary data, run reconstructions, evaluate the
// analytic forward model, and sweep distinguishability maps. Every output is
// deterministic for a fixed config + seed and carries a provenance header.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "thermolocate/analysis.hpp"
#include "thermolocate/config.hpp"
#include "thermolocate/errors.hpp"
#include "thermolocate/io.hpp"
#include "thermolocate/model.hpp"
#include "thermolocate/reconstruct.hpp"
#include "thermolocate/simulator.hpp"
#include "thermolocate/spectral.hpp"
#include "thermolocate/version.hpp"

namespace {

using namespace thermolocate;

constexpr int kExitUsage = 2;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitStability = 4;
constexpr int kExitDataMismatch = 5;
constexpr int kExitNoSolution = 6;

const char* kUsage =
    "usage: thermolocate <forward|simulate|reconstruct|distinguishability>\n"
    "                    --config <file> [--out <dir>] [--seed <n>]\n"
    "                    [--threads <n>] [--penalty-field]\n";

struct CliArgs {
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool penalty_field = false;
};

CliArgs parse_args(int argc, char** argv) {
    CliArgs args;
    if (argc < 2) throw ConfigError("missing command");
    args.command = argv[1];
    if (args.command != "forward" && args.command != "simulate" &&
        args.command != "reconstruct" && args.command != "distinguishability")
        throw ConfigError("unknown command '" + args.command + "'");
    for (int i = 2; i < argc; ++i) {
        const std::string flag = argv[i];
        auto value = [&]() -> std::string {
            if (i + 1 >= argc) throw ConfigError(flag + " needs a value");
            return argv[++i];
        };
        if (flag == "--config") {
            args.config_path = value();
        } else if (flag == "--out") {
            args.out_dir = value();
        } else if (flag == "--seed") {
            args.seed = std::strtoull(value().c_str(), nullptr, 10);
        } else if (flag == "--threads") {
            args.threads = static_cast<int>(std::strtol(value().c_str(), nullptr, 10));
        } else if (flag == "--penalty-field") {
            args.penalty_field = true;
        } else {
            throw ConfigError("unknown option '" + flag + "'");
        }
    }
    if (args.config_path.empty()) throw ConfigError("--config is required");
    return args;
}

std::string out_path(const CliArgs& args, const std::string& stem, const std::string& suffix) {
    return (std::filesystem::path(args.out_dir) / (stem + suffix)).string();
}

Provenance provenance_of(const ScenarioConfig& cfg) {
    return Provenance{std::string(kVersion), cfg.config_hash};
}

template <typename T>
const T& require_section(const std::optional<T>& section, const char* name,
                         const ScenarioConfig& cfg) {
    if (!section) throw ConfigError(cfg.stem + ": missing required section '" + name + "'");
    return *section;
}

int cmd_forward(const ScenarioConfig& cfg, const CliArgs& args) {
    const Medium& medium = require_section(cfg.medium, "medium", cfg);
    const ForwardSpec& fwd = require_section(cfg.forward, "forward", cfg);
    if (cfg.sources.empty()) throw ConfigError(cfg.stem + ": missing required section 'sources'");

    const std::string path = out_path(args, cfg.stem, "_forward.csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    const Provenance prov = provenance_of(cfg);
    out << "# thermolocate " << prov.version << "\n# config " << prov.config_hash << "\n";
    out << "x,y,z,t,T\n";
    for (const Vec3& x : fwd.points) {
        for (double t : fwd.times) {
            double temperature = 0.0;
            for (const SourceSpec& src : cfg.sources)
                temperature += dynamic_point_temperature(x, t, src, medium);
            out << format_number(x.x()) << ',' << format_number(x.y()) << ','
                << format_number(x.z()) << ',' << format_number(t) << ','
                << format_number(temperature) << "\n";
        }
    }
    if (!out) throw IoError("failed writing " + path);
    std::cout << "forward: wrote " << path << "\n";
    return 0;
}

int cmd_simulate(const ScenarioConfig& cfg, const CliArgs& args) {
    const Medium& medium = require_section(cfg.medium, "medium", cfg);
    const DomainSpec& domain = require_section(cfg.domain, "domain", cfg);
    const RobinBoundary& boundary = require_section(cfg.boundary, "boundary", cfg);
    const StageSchedule& schedule = require_section(cfg.schedule, "schedule", cfg);
    const CapGeometry& extraction = require_section(cfg.extraction, "extraction", cfg);
    if (cfg.sources.empty()) throw ConfigError(cfg.stem + ": missing required section 'sources'");

    boundary.validate(domain);
    schedule.validate(domain, medium);
    const double initial = cfg.initial_temperature.value_or(boundary.ambient);
    const std::uint64_t seed = args.seed.value_or(cfg.noise.seed);

    const HalfBallGrid grid = build_domain(domain);
    const StageRunResult run =
        run_stages(grid, medium, boundary, cfg.sources, schedule, initial);

    const Provenance prov = provenance_of(cfg);
    PatchManifest manifest;
    manifest.extraction_radius = extraction.radius;
    manifest.cap_direction = extraction.cap_direction.normalized();
    manifest.cap_angle = extraction.cap_angle;
    manifest.provenance = prov;

    const std::string csv_path = out_path(args, cfg.stem, "_patch.csv");
    if (run.sample_rate) {
        DynamicPatch patch = extract_patch(grid, run, extraction);
        if (cfg.noise.percent > 0.0)
            add_noise(patch, cfg.noise.percent, seed, cfg.noise.literal_variance);
        manifest.type = "dynamic";
        manifest.n_points = patch.size();
        manifest.sample_rate = patch.sample_rate;
        manifest.n_samples = patch.samples();
        write_dynamic_patch_csv(csv_path, patch, prov);
        std::cout << "simulate: " << patch.size() << " points, " << patch.samples()
                  << " frames at " << format_number(patch.sample_rate) << " Hz\n";
    } else {
        MeasurementPatch patch = extract_patch(grid, run.final_field, extraction);
        if (cfg.noise.percent > 0.0)
            add_noise(patch, cfg.noise.percent, seed, cfg.noise.literal_variance);
        manifest.type = "static";
        manifest.n_points = patch.size();
        write_static_patch_csv(csv_path, patch, prov);
        std::cout << "simulate: " << patch.size() << " points (static)\n";
    }
    write_manifest(out_path(args, cfg.stem, "_manifest.json"), manifest);
    std::cout << "simulate: wrote " << csv_path << "\n";
    return 0;
}

int cmd_reconstruct(const ScenarioConfig& cfg, const CliArgs& args) {
    const Medium& medium = require_section(cfg.medium, "medium", cfg);
    const CapGeometry& extraction = require_section(cfg.extraction, "extraction", cfg);
    const ReconstructionSpec& rec = require_section(cfg.reconstruction, "reconstruction", cfg);

    const std::string basename =
        rec.input_basename.empty() ? cfg.stem : rec.input_basename;
    const std::string input_base =
        (std::filesystem::path(args.out_dir) / basename).string();
    const PatchManifest manifest = read_manifest(input_base + "_manifest.json");

    const CandidateGrid grid =
        make_candidate_grid(extraction, rec.grid.n_r, rec.grid.n_theta, rec.grid.n_phi,
                            rec.grid.r_min, rec.grid.r_max);
    const GridMetadata meta{rec.grid.n_r, rec.grid.n_theta, rec.grid.n_phi, rec.grid.r_min,
                            rec.grid.r_max};
    const Provenance prov = provenance_of(cfg);
    const std::string report_path = out_path(args, cfg.stem, "_report.json");

    if (manifest.type == "static") {
        const MeasurementPatch patch = read_static_patch_csv(input_base + "_patch.csv", manifest);
        StaticOptions options;
        options.nav = rec.nav;
        options.threads = args.threads;
        Eigen::VectorXd field;
        StaticReconstruction result = reconstruct_static(
            patch, grid, medium, options, args.penalty_field ? &field : nullptr);
        write_static_report(report_path, result, grid, meta, prov);
        if (args.penalty_field)
            write_penalty_field_csv(out_path(args, cfg.stem, "_penalty_static.csv"), grid, field,
                                    prov);
        std::cout << "reconstruct: location (" << format_number(result.location.x()) << ", "
                  << format_number(result.location.y()) << ", "
                  << format_number(result.location.z()) << "), Q "
                  << format_number(result.power) << ", C " << format_number(result.baseline)
                  << ", penalty " << format_number(result.penalty) << "\n";
    } else {
        DynamicPatch patch = read_dynamic_patch_csv(input_base + "_patch.csv", manifest);
        detrend(patch);
        const SpectrumPatch spec = spectrum(patch);
        DynamicOptions options;
        options.amp_threshold = rec.amp_threshold;
        options.min_patch_points = rec.min_patch_points;
        options.anchor_k = rec.anchor_k;
        options.phase_normalization = rec.phase_normalization;
        options.threads = args.threads;
        Eigen::VectorXd amp_field, phase_field;
        DynamicReconstruction result = reconstruct_dynamic(
            spec, grid, medium, options, args.penalty_field ? &amp_field : nullptr,
            args.penalty_field ? &phase_field : nullptr);
        write_dynamic_report(report_path, result, grid, meta, prov);
        write_spectrum_csv(out_path(args, cfg.stem, "_spectrum.csv"), spec, rec.amp_threshold,
                           prov);
        if (args.penalty_field) {
            write_penalty_field_csv(out_path(args, cfg.stem, "_penalty_amp.csv"), grid, amp_field,
                                    prov);
            write_penalty_field_csv(out_path(args, cfg.stem, "_penalty_phase.csv"), grid,
                                    phase_field, prov);
        }
        std::cout << "reconstruct: amplitude criterion ("
                  << format_number(result.location_amp.x()) << ", "
                  << format_number(result.location_amp.y()) << ", "
                  << format_number(result.location_amp.z()) << "), sigma "
                  << format_number(result.sigma_amp) << "\n";
        std::cout << "reconstruct: phase criterion ("
                  << format_number(result.location_phase.x()) << ", "
                  << format_number(result.location_phase.y()) << ", "
                  << format_number(result.location_phase.z()) << "), sigma "
                  << format_number(result.sigma_phase) << "\n";
    }
    std::cout << "reconstruct: wrote " << report_path << "\n";
    return 0;
}

int cmd_distinguishability(const ScenarioConfig& cfg, const CliArgs& args) {
    const Medium& medium = require_section(cfg.medium, "medium", cfg);
    (void)medium;  // map sweeps its own diffusivity axis; medium anchors the config schema
    const DistinguishabilitySpec& spec =
        require_section(cfg.distinguishability, "distinguishability", cfg);

    const DistinguishabilityMap map =
        distinguishability_map(spec.total_power, spec.source_radius, spec.depths,
                               spec.diffusivities, spec.frequency, spec.offset);
    const Provenance prov = provenance_of(cfg);
    const std::string csv_path = out_path(args, cfg.stem, "_map.csv");
    write_distinguishability_csv(csv_path, map, prov);

    const std::string meta_path = out_path(args, cfg.stem, "_map.json");
    std::ofstream out(meta_path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + meta_path);
    out << "{\n"
        << "  \"version\": \"" << prov.version << "\",\n"
        << "  \"config\": \"" << prov.config_hash << "\",\n"
        << "  \"total_power\": " << format_number(spec.total_power) << ",\n"
        << "  \"source_radius\": " << format_number(spec.source_radius) << ",\n"
        << "  \"frequency\": " << format_number(spec.frequency) << ",\n"
        << "  \"offset\": " << format_number(spec.offset) << "\n"
        << "}\n";
    if (!out) throw IoError("failed writing " + meta_path);
    std::cout << "distinguishability: wrote " << csv_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CliArgs args;
    try {
        args = parse_args(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "thermolocate: " << e.what() << "\n" << kUsage;
        return kExitUsage;
    }

    try {
        std::filesystem::create_directories(args.out_dir);
        ScenarioConfig cfg = load_config(args.config_path);
        if (args.seed) cfg.noise.seed = *args.seed;
        if (args.command == "forward") return cmd_forward(cfg, args);
        if (args.command == "simulate") return cmd_simulate(cfg, args);
        if (args.command == "reconstruct") return cmd_reconstruct(cfg, args);
        return cmd_distinguishability(cfg, args);
    } catch (const ConfigError& e) {
        std::cerr << "thermolocate: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StabilityError& e) {
        std::cerr << "thermolocate: " << e.what() << "\n";
        return kExitStability;
    } catch (const DataMismatchError& e) {
        std::cerr << "thermolocate: " << e.what() << "\n";
        return kExitDataMismatch;
    } catch (const NoSolutionError& e) {
        std::cerr << "thermolocate: " << e.what() << "\n";
        return kExitNoSolution;
    } catch (const IoError& e) {
        std::cerr << "thermolocate: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "thermolocate: " << e.what() << "\n";
        return 1;
    }
}
