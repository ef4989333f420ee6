#pragma once

#include <Eigen/Dense>

#include "thermolocate/patch.hpp"

namespace thermolocate {

// Per-point one-sided spectrum of a dynamic patch. Row n holds bin n for
// every point; bin frequencies are f_n = n * f_s / N_s for n = 0..floor(N_s/2).
struct SpectrumPatch {
    Eigen::Matrix3Xd positions;
    double extraction_radius = 0.0;
    double sample_rate = 0.0;
    Eigen::Index n_samples = 0;
    Eigen::MatrixXd amplitudes;  // bins x points, A_n >= 0
    Eigen::MatrixXd phases;      // bins x points, values in (-pi, pi]

    Eigen::Index bins() const { return amplitudes.rows(); }
    Eigen::Index size() const { return positions.cols(); }
    double frequency(Eigen::Index n) const;
    void validate() const;
};

// Windowless DFT of every point's series. Amplitudes are scaled so a pure
// cosine at an integer bin reads its amplitude directly: A_0 = |X_0|/N,
// A_n = 2|X_n|/N for 0 < n <= floor(N/2). Phases are arg(X_n).
SpectrumPatch spectrum(const DynamicPatch& patch);

// Removes 2pi jumps: successive differences are mapped into (-pi, pi], the
// first element is kept as-is.
Eigen::VectorXd unwrap_phase(const Eigen::VectorXd& angles);

// Phase field of one bin, unwrapped along the ordering of increasing distance
// from the reference patch point and shifted so the reference reads zero.
Eigen::VectorXd normalize_phase(const SpectrumPatch& spec, Eigen::Index bin,
                                Eigen::Index reference);

// Circular mean: arg of the mean unit vector. Throws if the resultant length
// is below 1e-12 (antipodal or empty-direction input has no mean).
double average_phase(const Eigen::VectorXd& angles);

}  // namespace thermolocate
