#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "thermolocate/patch.hpp"
#include "thermolocate/spectral.hpp"
#include "thermolocate/types.hpp"

namespace thermolocate {

// Spherical lattice of source candidates under the measurement cap, in
// lexicographic (radius, polar, azimuth) order: index = (i*n_theta + j)*n_phi + k.
// Radii span [r_min, r_max] inclusively, polar angles span [0, cap_angle]
// inclusively, azimuths are the n_phi-th roots of the full turn.
struct CandidateGrid {
    Eigen::Matrix3Xd centers;
    Eigen::VectorXd radii;    // n_r lattice values
    Eigen::VectorXd polar;    // n_theta lattice values, measured from cap_direction
    Eigen::VectorXd azimuth;  // n_phi lattice values
    Vec3 cap_direction = Vec3::UnitZ();

    Eigen::Index size() const { return centers.cols(); }
    // Lattice coordinates of one candidate.
    void spherical(Eigen::Index index, double& r, double& theta, double& phi) const;
};

// Builds the candidate lattice for a cap geometry. Every candidate must stay
// at least one radial step below the extraction surface (model singularity
// guard); violations throw ConfigError. Resolution components must be >= 2.
CandidateGrid make_candidate_grid(const CapGeometry& cap, int n_r, int n_theta, int n_phi,
                                  double r_min, double r_max);

struct PowerFit {
    double power = 0.0;     // Q
    double baseline = 0.0;  // C
};

// Two-anchor inversion of the static model: anchors are the means of the
// nav lowest and nav highest temperatures (positions averaged alongside).
// Returns nullopt when the candidate is equidistant from both anchors or
// sits on one of them (degenerate inversion).
std::optional<PowerFit> fit_power(const MeasurementPatch& patch, const Vec3& candidate,
                                  const Medium& medium, int nav);

// Count-normalized discrete L2 residual of the patch against the static
// model Q/(4*pi*alpha*r) + C.
double static_penalty(const MeasurementPatch& patch, const Vec3& candidate, double power,
                      double baseline, const Medium& medium);

struct StaticReconstruction {
    Vec3 location = Vec3::Zero();
    double power = 0.0;
    double baseline = 0.0;
    double penalty = 0.0;
    Eigen::Index grid_index = -1;
};

struct StaticOptions {
    int nav = 10;
    int threads = 0;  // 0 = hardware concurrency
};

// Exhaustive grid search: fit_power + static_penalty per candidate, argmin
// with (penalty, grid index) ordering so the result is deterministic under
// any thread count. Degenerate candidates carry infinite penalty; if all
// candidates degenerate, throws NoSolutionError. When penalty_field is given
// it receives every candidate's penalty (infinity where rejected).
StaticReconstruction reconstruct_static(const MeasurementPatch& patch, const CandidateGrid& grid,
                                        const Medium& medium, const StaticOptions& options = {},
                                        Eigen::VectorXd* penalty_field = nullptr);

// Model amplitude profile over the patch for one bin: the steady gain ratio
// anchored so the nearest patch point to the candidate reads anchor_amp.
Eigen::VectorXd predicted_amplitude_profile(const Vec3& candidate, double anchor_amp,
                                            double freq, const Medium& medium,
                                            const Eigen::Matrix3Xd& positions);

// Indices where the profile exceeds amp_threshold; empty when fewer than
// min_points qualify (the bin is then discarded).
std::vector<Eigen::Index> truncate_patch(const Eigen::VectorXd& profile, double amp_threshold,
                                         Eigen::Index min_points);

// Count-normalized L2 distance between data amplitudes and a model profile
// over the full patch.
double amplitude_penalty(const Eigen::VectorXd& data_amps, const Eigen::VectorXd& profile);

enum class PhaseNormalization { None, StdMatch };

// Count-normalized L2 of the phase mismatch over the usable subset, divided
// once more by the subset size (area weighting). Both fields must already be
// zeroed at the anchor point; StdMatch rescales the model field to the data
// field's standard deviation over the subset first.
double phase_penalty(const Eigen::VectorXd& data_phases, const Eigen::VectorXd& model_phases,
                     const std::vector<Eigen::Index>& subset, PhaseNormalization normalization);

// Inverts the steady response at the anchor distance: amplitude is divided
// by the gain, the phase lag k*r_C is added back and the result wrapped.
Harmonic recover_harmonic(double anchor_distance, double anchor_amp, double anchor_phase,
                          double freq, const Medium& medium);

struct RecoveredBin {
    double frequency = 0.0;
    double amplitude = 0.0;  // S_n; exactly 0 for truncated bins
    double phase = 0.0;      // phi_n in (-pi, pi]; 0 for truncated bins
    Eigen::Index usable_points = 0;
};

struct DynamicReconstruction {
    Vec3 location_amp = Vec3::Zero();
    Eigen::Index amp_index = -1;
    double sigma_amp = 0.0;
    std::vector<RecoveredBin> spectrum_amp;

    Vec3 location_phase = Vec3::Zero();
    Eigen::Index phase_index = -1;
    double sigma_phase = 0.0;
    std::vector<RecoveredBin> spectrum_phase;

    double amp_threshold = 0.0;
    Eigen::Index min_patch_points = 0;
};

struct DynamicOptions {
    double amp_threshold = 0.02;      // A_t
    Eigen::Index min_patch_points = 900;  // M_t
    int anchor_k = 9;                 // neighborhood size for anchor bins
    PhaseNormalization phase_normalization = PhaseNormalization::StdMatch;
    int threads = 0;
};

// Dual grid search over the oscillatory bins (bin 0 carries ambient offset,
// not source oscillation, so it is excluded): per candidate, anchor bins are
// read as neighborhood averages at the nearest patch point, model profiles
// built and truncated, and the amplitude/phase penalty sums minimized
// independently. Candidates whose every bin truncates are rejected; if that
// happens everywhere, throws NoSolutionError. Optional fields receive the
// full penalty landscapes.
DynamicReconstruction reconstruct_dynamic(const SpectrumPatch& spec, const CandidateGrid& grid,
                                          const Medium& medium, const DynamicOptions& options = {},
                                          Eigen::VectorXd* amp_field = nullptr,
                                          Eigen::VectorXd* phase_field = nullptr);

}  // namespace thermolocate
