#pragma once

#include <Eigen/Dense>

#include "thermolocate/types.hpp"

namespace thermolocate {

// Spherical-cap measurement geometry: points on the sphere |x| = radius
// within cap_angle of cap_direction, spaced roughly angular_spacing apart.
struct CapGeometry {
    double radius = 0.0;
    Vec3 cap_direction = Vec3::UnitZ();
    double cap_angle = 0.0;       // radians
    double angular_spacing = 0.02;  // radians; point count ~ cap solid angle / spacing^2

    void validate() const;
};

// Number of points the cap lattice produces: round(2*pi*(1-cos(cap_angle)) / spacing^2),
// so the count scales with the cap area.
int cap_point_count(const CapGeometry& cap);

// Deterministic golden-angle lattice covering the cap with near-uniform area
// per point; every point lies exactly on the extraction sphere.
Eigen::Matrix3Xd cap_points(const CapGeometry& cap);

// Static measurement patch: one temperature per point.
struct MeasurementPatch {
    Eigen::Matrix3Xd positions;   // 3 x n
    Eigen::VectorXd temperatures; // n
    double extraction_radius = 0.0;

    Eigen::Index size() const { return positions.cols(); }
    void validate() const;
};

// Time-resolved patch: column p of series is the time series of point p,
// sampled uniformly at sample_rate starting at the first frame.
struct DynamicPatch {
    Eigen::Matrix3Xd positions;  // 3 x n
    Eigen::MatrixXd series;      // n_samples x n
    double sample_rate = 0.0;    // Hz
    double extraction_radius = 0.0;

    Eigen::Index size() const { return positions.cols(); }
    Eigen::Index samples() const { return series.rows(); }
    double frame_time(Eigen::Index k) const { return static_cast<double>(k) / sample_rate; }
    void validate() const;
};

// Builds an orthonormal frame whose third column is axis (normalized).
Eigen::Matrix3d frame_from_axis(const Vec3& axis);

}  // namespace thermolocate
