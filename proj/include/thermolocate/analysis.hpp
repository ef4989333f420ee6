#pragma once

#include <Eigen/Dense>

#include "thermolocate/types.hpp"

namespace thermolocate {

// Detectability proxy: temperature gap between the boundary hot spot directly
// above a buried source and a point a fixed offset away on the tangent plane.
// Sphere sources enter as their equal-total-power point equivalent (exact for
// the static exterior field, an approximation dynamically).

// Static gap: Q_total/(4*pi*alpha) * (1/depth - 1/sqrt(depth^2 + offset^2)).
// Throws when depth does not exceed the source radius.
double static_distinguishability(double total_power, double source_radius, double depth,
                                 const Medium& medium, double offset = 0.05);

// Oscillation-amplitude gap between the same two points: S_total times the
// steady gain difference. freq = 0 reduces exactly to the static gap.
double dynamic_distinguishability(double total_amplitude, double source_radius, double depth,
                                  double freq, const Medium& medium, double offset = 0.05);

struct DistinguishabilityMap {
    Eigen::VectorXd depths;         // row axis
    Eigen::VectorXd diffusivities;  // column axis
    double frequency = 0.0;         // 0 marks a static map
    double offset = 0.05;
    Eigen::MatrixXd values;         // depths.size() x diffusivities.size()
};

// Sweeps the gap over depth x diffusivity; freq = 0 gives the static map.
DistinguishabilityMap distinguishability_map(double total_power, double source_radius,
                                             const Eigen::VectorXd& depths,
                                             const Eigen::VectorXd& diffusivities, double freq,
                                             double offset = 0.05);

}  // namespace thermolocate
