#pragma once

#include "thermolocate/types.hpp"

namespace thermolocate {

/**
 * Free-space heat kernel in three dimensions,
 *   G(x, t) = (4*pi*alpha*t)^{-3/2} * exp(-x.x / (4*alpha*t)).
 *
 * Integrates to one over space for every t > 0; the temperature response to
 * an instantaneous unit point release at the origin.
 *
 * @throws std::domain_error for t <= 0.
 */
double gaussian_kernel(const Vec3& x, double t, const Medium& medium);

/**
 * Controls for the adaptive Duhamel quadrature. Nodes cluster
 * logarithmically near w -> 0 where the integrand vanishes steeply; the
 * remaining range is sampled finely enough to resolve the fastest harmonic
 * of the source signal (at least 20 nodes per period). Refinement doubles
 * the node count until successive results agree to rel_tol.
 */
struct QuadratureConfig {
    double rel_tol = 1e-4;
    double abs_tol = 0.0;        // absolute floor of the convergence test; a
                                 // purely relative test cannot terminate near
                                 // zero crossings of an oscillating response
    int nodes_per_period = 32;   // panels per period of the fastest harmonic
    int base_log_nodes = 64;     // initial panel count of the logarithmic segment
    int max_refinements = 14;

    void validate() const {
        if (!(rel_tol > 0.0)) throw std::domain_error("QuadratureConfig: rel_tol must be > 0");
        if (!(abs_tol >= 0.0)) throw std::domain_error("QuadratureConfig: abs_tol must be >= 0");
        if (nodes_per_period < 20)
            throw std::domain_error("QuadratureConfig: nodes_per_period must be >= 20");
        if (base_log_nodes < 2 || max_refinements < 1)
            throw std::domain_error("QuadratureConfig: invalid node/refinement counts");
    }
};

/**
 * Exact time-domain response to a point source with power signal s(t)
 * switched on at t = 0, evaluated by adaptive quadrature of the Duhamel
 * convolution in the substituted variable w = 4*alpha*(t - t'):
 *
 *   T(x, t) = (4*alpha)^{-1} pi^{-3/2}
 *             * Integral_0^{4*alpha*t} exp(-x.x/w) w^{-3/2} s(t - w/(4*alpha)) dw.
 *
 * Serves as the independent oracle for the closed-form steady responses.
 *
 * @throws std::domain_error for |x| = 0 or t <= 0.
 * @throws AccuracyError if refinement stalls above rel_tol (carries the
 *         achieved estimate).
 */
double duhamel_temperature(const Vec3& x, double t, const SignalSpec& signal,
                           const Medium& medium, const QuadratureConfig& quad = {});

/**
 * Steady-state temperature at distance r from a constant point source of
 * total power q against a uniform offset: T = q / (4*pi*alpha*r) + offset.
 *
 * @throws std::domain_error for r <= 0.
 */
double static_point_temperature(double r, double power, double offset, const Medium& medium);

/// Decay/phase rate of a thermal wave of frequency f: k = sqrt(pi*f/alpha).
double thermal_wavenumber(double freq, const Medium& medium);

/**
 * Steady periodic response at distance r to a unit cosine point source of
 * frequency f:
 *
 *   gain        = exp(-k r) / (4*pi*alpha*r),   k = sqrt(pi*f/alpha)
 *   phase_shift = -k r
 *
 * For f = 0 the gain reduces to the static factor 1/(4*pi*alpha*r) and the
 * phase shift is zero; static work should use static_point_temperature.
 *
 * @throws std::domain_error for r <= 0 or f < 0.
 */
SpectralResponse steady_spectral_response(double r, double freq, const Medium& medium);

/**
 * Steady-state temperature at position x and time t for a multi-harmonic
 * point source: the dc offset contributes its static field and every
 * harmonic its attenuated, phase-lagged cosine (superposition).
 *
 * @throws std::domain_error when x coincides with the source center.
 */
double dynamic_point_temperature(const Vec3& x, double t, const SourceSpec& source,
                                 const Medium& medium);

/**
 * Bessel function of the first kind J_k(x) by the ascending power series,
 * accurate for the moderate arguments used by the modulation expansions.
 * Negative orders via J_{-k}(x) = (-1)^k J_k(x).
 */
double bessel_j(int k, double x);

/**
 * Harmonic expansion of a phase-modulated drive
 *   cos(omega*t + mod_index * sin(omega_m*t))
 *     = sum_k J_k(mod_index) * cos((omega + k*omega_m) * t),  k = -order..order.
 *
 * Negative-frequency terms are folded onto their positive mirror, exact
 * zero-frequency terms fold into the dc offset, coincident frequencies are
 * merged by phasor addition, and zero-amplitude harmonics are dropped.
 */
SignalSpec phase_modulated_expansion(double omega, double mod_index, double omega_m, int order);

/**
 * Harmonic expansion of an amplitude-modulated drive
 *   (1 + mod_depth*cos(omega_a*t)) * cos(omega*t + phase)
 *     = cos(omega*t + phase)
 *       + mod_depth/2 * cos((omega + omega_a)*t + phase)
 *       + mod_depth/2 * cos((omega - omega_a)*t + phase).
 *
 * Exact for every phase; sidelobe amplitudes are exactly mod_depth/2.
 * Folding and merging as in phase_modulated_expansion.
 */
SignalSpec amplitude_modulated_expansion(double omega, double mod_depth, double omega_a,
                                         double phase);

}  // namespace thermolocate
