#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "thermolocate/patch.hpp"
#include "thermolocate/types.hpp"

namespace thermolocate {

enum class Axis { PosX, NegX, PosY, NegY, PosZ, NegZ };

// Half-ball computational domain: the ball |x| <= ball_radius cut by the
// plane through the origin whose outward flat face points along
// flat_face_normal; the domain lies on the positive side of that plane.
struct DomainSpec {
    double ball_radius = 0.0;
    double grid_spacing = 0.0;
    Axis flat_face_normal = Axis::PosZ;

    void validate() const;
};

// Convective boundary closure kappa * dT/dnu = h * (T_ambient - T), exposed
// as the single coefficient h/kappa (units 1/length).
struct RobinBoundary {
    double coeff = 0.0;    // h/kappa
    double ambient = 0.0;  // T_atm

    void validate(const DomainSpec& domain) const;
};

// One stepping stage; stages run back to back, each continuing from the
// previous final state. Frames are collected only in stages with a
// sample_rate.
struct Stage {
    double dt = 0.0;
    double duration = 0.0;
    std::optional<double> sample_rate;  // Hz
};

struct StageSchedule {
    std::vector<Stage> stages;

    // Explicit 7-point stencil bound: dt <= 0.9 * h^2 / (6 * alpha).
    void validate(const DomainSpec& domain, const Medium& medium) const;
};

// Cell-centered lattice over the half-ball bounding box; interior cells
// (centers inside the ball, on the domain side of the cut plane) are stored
// compactly. neighbors(c, f) is the compact index of the face-f neighbor or
// -1 when the face leaves the domain (a boundary face).
class HalfBallGrid {
public:
    explicit HalfBallGrid(const DomainSpec& spec);

    const DomainSpec& spec() const { return spec_; }
    double spacing() const { return spec_.grid_spacing; }
    double cell_volume() const { return std::pow(spec_.grid_spacing, 3); }
    Eigen::Index interior_count() const { return centers_.cols(); }
    const Eigen::Matrix3Xd& centers() const { return centers_; }
    Vec3 center(Eigen::Index c) const { return centers_.col(c); }
    std::int32_t neighbor(Eigen::Index c, int face) const { return neighbors_[6 * c + face]; }
    int boundary_face_count(Eigen::Index c) const { return boundary_faces_[c]; }

    // Compact index of the interior cell containing x, or -1.
    std::int32_t locate(const Vec3& x) const;

    // Trilinear interpolation among the 8 surrounding cell centers; weights
    // of exterior corners are renormalized away. Throws std::domain_error if
    // no surrounding center is interior.
    double interpolate(const Eigen::ArrayXd& field, const Vec3& x) const;

private:
    DomainSpec spec_;
    std::array<int, 3> dims_{};
    Vec3 origin_;  // center of cell (0, 0, 0)
    std::vector<std::int32_t> compact_;  // full-box -> compact index or -1
    Eigen::Matrix3Xd centers_;
    std::vector<std::int32_t> neighbors_;
    std::vector<std::uint8_t> boundary_faces_;

    std::int32_t full_index(int i, int j, int k) const;
};

HalfBallGrid build_domain(const DomainSpec& spec);

// Cells whose centers lie within the source radius, with the factor that
// converts total signal power into a per-cell density: 1 / (count * cell volume).
struct SourceCells {
    const SourceSpec* source = nullptr;
    std::vector<std::int32_t> cells;
    double density_factor = 0.0;
};

SourceCells collect_source_cells(const HalfBallGrid& grid, const SourceSpec& source);

// One explicit Euler step of dT/dt = alpha * lap(T) + q at time t; source
// power is evaluated at the step midpoint t + dt/2. Throws StabilityError if
// dt violates the stencil bound.
void step_heat(const HalfBallGrid& grid, const Medium& medium, const RobinBoundary& robin,
               const std::vector<SourceCells>& sources, double t, double dt,
               const Eigen::ArrayXd& field, Eigen::ArrayXd& next);

struct StageRunResult {
    Eigen::ArrayXd final_field;       // interior-compact
    Eigen::MatrixXd frames;           // interior_count x n_frames
    std::vector<double> frame_times;  // absolute times since the run start
    std::optional<double> sample_rate;
};

// Runs the schedule from a uniform initial temperature (or a provided field),
// chaining stage final states and collecting frames in sampled stages. Frame
// instants must align with the stage step (1/sample_rate an integer multiple
// of dt).
StageRunResult run_stages(const HalfBallGrid& grid, const Medium& medium,
                          const RobinBoundary& robin, const std::vector<SourceSpec>& sources,
                          const StageSchedule& schedule, double initial_temperature);

// Interpolates one field onto the cap lattice.
MeasurementPatch extract_patch(const HalfBallGrid& grid, const Eigen::ArrayXd& field,
                               const CapGeometry& cap);

// Interpolates every frame onto the cap lattice.
DynamicPatch extract_patch(const HalfBallGrid& grid, const StageRunResult& run,
                           const CapGeometry& cap);

// Adds iid Gaussian noise with sd = percent * (max - min) of the noiseless
// values; with literal_variance the percent-of-range value is used as the
// variance instead. Deterministic for a fixed seed.
void add_noise(MeasurementPatch& patch, double percent, std::uint64_t seed,
               bool literal_variance = false);
void add_noise(DynamicPatch& patch, double percent, std::uint64_t seed,
               bool literal_variance = false);

// Removes the least-squares affine trend a + b*t from one series in place.
void detrend(Eigen::Ref<Eigen::VectorXd> series, double sample_rate);

// Detrends every point series of the patch.
void detrend(DynamicPatch& patch);

}  // namespace thermolocate
