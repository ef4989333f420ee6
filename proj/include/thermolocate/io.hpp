#pragma once

#include <string>

#include "thermolocate/analysis.hpp"
#include "thermolocate/patch.hpp"
#include "thermolocate/reconstruct.hpp"
#include "thermolocate/spectral.hpp"

namespace thermolocate {

// Stamped into every output so results are traceable to the exact config
// that produced them. No timestamps: outputs must be byte-identical across
// repeated runs.
struct Provenance {
    std::string version;
    std::string config_hash;
};

// Sidecar manifest describing a patch CSV. `type` is "static" or "dynamic";
// sample_rate/n_samples are meaningful for dynamic patches only.
struct PatchManifest {
    std::string type;
    Eigen::Index n_points = 0;
    double extraction_radius = 0.0;
    Vec3 cap_direction = Vec3::UnitZ();
    double cap_angle = 0.0;
    double sample_rate = 0.0;
    Eigen::Index n_samples = 0;
    Provenance provenance;
};

// Patch CSVs carry '#'-prefixed provenance lines, then a header row
// (`x,y,z,T` static, `x,y,z,t0,t1,...` dynamic), then one row per point.
void write_static_patch_csv(const std::string& path, const MeasurementPatch& patch,
                            const Provenance& prov);
void write_dynamic_patch_csv(const std::string& path, const DynamicPatch& patch,
                             const Provenance& prov);
void write_manifest(const std::string& path, const PatchManifest& manifest);

PatchManifest read_manifest(const std::string& path);
// Readers validate the CSV against the manifest (point count, frame count,
// extraction radius) and throw DataMismatchError on disagreement.
MeasurementPatch read_static_patch_csv(const std::string& path, const PatchManifest& manifest);
DynamicPatch read_dynamic_patch_csv(const std::string& path, const PatchManifest& manifest);

// One row per (point, exported bin): x,y,z,bin,freq,amplitude,phase. Only
// bins whose peak amplitude exceeds min_amplitude are exported, keeping the
// file proportional to the interesting content.
void write_spectrum_csv(const std::string& path, const SpectrumPatch& spec, double min_amplitude,
                        const Provenance& prov);

// Penalty landscape over the candidate grid: r,theta,phi,epsilon in grid
// index order ("inf" marks rejected candidates).
void write_penalty_field_csv(const std::string& path, const CandidateGrid& grid,
                             const Eigen::VectorXd& penalties, const Provenance& prov);

// Distinguishability map: depth,alpha,freq,deltaT rows.
void write_distinguishability_csv(const std::string& path, const DistinguishabilityMap& map,
                                  const Provenance& prov);

struct GridMetadata {
    int n_r = 0;
    int n_theta = 0;
    int n_phi = 0;
    double r_min = 0.0;
    double r_max = 0.0;
};

void write_static_report(const std::string& path, const StaticReconstruction& result,
                         const CandidateGrid& grid, const GridMetadata& meta,
                         const Provenance& prov);
void write_dynamic_report(const std::string& path, const DynamicReconstruction& result,
                          const CandidateGrid& grid, const GridMetadata& meta,
                          const Provenance& prov);

// %.15g rendering used by every writer.
std::string format_number(double v);

}  // namespace thermolocate
