// Acceptance harness: end-to-end gates over the analytic core, the
// simulator, the reconstruction pipeline and the batch CLI. One function per
// criterion; every check prints [FAIL] with context and the harness exits
// nonzero if any criterion fails. No doctest here: this binary is meant to
// read like a lab protocol.
//
// Usage: acceptance_checks <path-to-thermolocate-cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <Eigen/Dense>

#include "oracle.hpp"
#include "thermolocate/model.hpp"
#include "thermolocate/patch.hpp"
#include "thermolocate/reconstruct.hpp"
#include "thermolocate/simulator.hpp"
#include "thermolocate/spectral.hpp"
#include "thermolocate/types.hpp"

using namespace thermolocate;

namespace {

// Always-on check; failures report the line and a streamed message, and the
// enclosing criterion gives up (returns false) so later criteria still run.
#define REQUIRE(cond, msg)                                                      \
    do {                                                                        \
        if (!(cond)) {                                                          \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << ": " << msg \
                      << "\n";                                                  \
            return false;                                                       \
        }                                                                       \
    } while (0)

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------
// 1. Oracle equivalence: the time-domain Duhamel quadrature, settled past the
// switch-on transient and read by an independent least-squares fit, must
// agree with the closed-form steady response. The diffusivities are chosen so
// the attenuation depth D = r*sqrt(pi*f/alpha) stays <= 8; beyond that the
// steady amplitude falls under the fit's conditioning floor and no method can
// read it from time samples.
bool oracle_equivalence() {
    const double radii[] = {0.02, 0.05};
    const double freqs[] = {0.15, 0.5, 1.0};
    const double alphas[] = {1e-5, 1e-4};

    int tested = 0;
    for (double alpha : alphas) {
        const Medium medium{alpha};
        for (double r : radii) {
            for (double f : freqs) {
                const double depth = r * std::sqrt(kPi * f / alpha);
                if (depth > 8.0) continue;

                SignalSpec signal;
                signal.harmonics = {Harmonic{1.0, f, 0.0}};
                const SpectralResponse resp = steady_spectral_response(r, f, medium);
                QuadratureConfig quad;
                quad.rel_tol = 1e-7;
                // The settled wave crosses zero: anchor the convergence test
                // with the amplitude scale as an absolute floor.
                quad.abs_tol = 1e-7 * resp.gain;
                const double t_end = oracle::settled_time(r, f, medium);
                const oracle::SteadyFit fit =
                    oracle::steady_fit(Vec3(r, 0.0, 0.0), f, signal, medium, t_end, quad);

                const double amp_rel = std::abs(fit.amplitude - resp.gain) / resp.gain;
                const double phase_err = std::abs(wrap_angle(fit.phase - resp.phase_shift));
                REQUIRE(amp_rel <= 0.01, "amplitude mismatch " << amp_rel << " at r=" << r
                                                               << " f=" << f << " alpha=" << alpha);
                REQUIRE(phase_err <= 0.05, "phase mismatch " << phase_err << " rad at r=" << r
                                                             << " f=" << f << " alpha=" << alpha);
                ++tested;
            }
        }
    }
    REQUIRE(tested == 7, "expected 7 feasible (r, f, alpha) combinations, got " << tested);
    return true;
}

// ---------------------------------------------------------------------------
// 2. Static closed loop: an exact analytic patch from a candidate-grid node
// must reconstruct to that node with machine-accurate power and baseline; an
// off-node truth must land within one cell diagonal.
bool static_closed_loop() {
    const Medium medium{2.0};
    CapGeometry cap;
    cap.radius = 85.0;
    cap.cap_direction = Vec3::UnitZ();
    cap.cap_angle = kPi / 6.0;
    cap.angular_spacing = 0.02;
    const CandidateGrid grid = make_candidate_grid(cap, 6, 5, 8, 55.0, 75.0);

    const Eigen::Matrix3Xd points = cap_points(cap);
    const auto patch_from = [&](const Vec3& x0) {
        MeasurementPatch patch;
        patch.positions = points;
        patch.extraction_radius = cap.radius;
        patch.temperatures.resize(points.cols());
        for (Eigen::Index p = 0; p < points.cols(); ++p)
            patch.temperatures[p] = static_point_temperature((points.col(p) - x0).norm(), 5.0,
                                                             20.0, medium);
        return patch;
    };

    StaticOptions options;
    options.nav = 1;  // single-point anchors keep the two-point inversion exact

    for (const Eigen::Index idx : {Eigen::Index{17}, Eigen::Index{101}, Eigen::Index{230}}) {
        const Vec3 x0 = grid.centers.col(idx);
        const StaticReconstruction rec = reconstruct_static(patch_from(x0), grid, medium, options);
        REQUIRE(rec.grid_index == idx,
                "node " << idx << " reconstructed to index " << rec.grid_index);
        REQUIRE(std::abs(rec.power - 5.0) <= 1e-6,
                "power " << rec.power << " off by " << std::abs(rec.power - 5.0));
        REQUIRE(std::abs(rec.baseline - 20.0) <= 1e-6,
                "baseline " << rec.baseline << " off by " << std::abs(rec.baseline - 20.0));
    }

    // Off-node truth: the winner can only be the nearest node, so the error
    // is bounded by the cell diagonal sqrt(3) * max lattice pitch.
    const double r_true = 63.3, theta_true = 0.21, phi_true = 2.6;
    const Vec3 x0 = r_true * Vec3(std::sin(theta_true) * std::cos(phi_true),
                                  std::sin(theta_true) * std::sin(phi_true),
                                  std::cos(theta_true));
    const StaticReconstruction rec = reconstruct_static(patch_from(x0), grid, medium, options);
    const double dr = (75.0 - 55.0) / 5.0;
    const double dtheta = (kPi / 6.0) / 4.0;
    const double dphi = 2.0 * kPi / 8.0;
    const double pitch = std::max({dr, r_true * dtheta, r_true * std::sin(theta_true) * dphi});
    const double err = (rec.location - x0).norm();
    REQUIRE(err <= std::sqrt(3.0) * pitch,
            "off-node error " << err << " exceeds " << std::sqrt(3.0) * pitch);
    return true;
}

// ---------------------------------------------------------------------------
// 3. Dynamic closed loop: a single-harmonic analytic patch (S = 2.2 at
// 0.2 Hz, sampled 10 Hz x 10 s) must localize exactly at its grid node,
// recover S within 1% and phase within 0.05 rad, and truncate every
// non-source bin to exactly zero under A_t = 0.02, M_t = 900. The geometry is
// scaled so the anchor amplitude clears A_t with S = 2.2.
bool dynamic_closed_loop() {
    const Medium medium{2.0};
    CapGeometry cap;
    cap.radius = 10.0;
    cap.cap_direction = Vec3::UnitZ();
    cap.cap_angle = kPi / 6.0;
    cap.angular_spacing = 0.0055;
    const CandidateGrid grid = make_candidate_grid(cap, 4, 4, 6, 8.0, 9.2);
    const Eigen::Index true_idx = (2 * 4 + 1) * 6 + 0;  // (i, j, k) = (2, 1, 0)

    SourceSpec source;
    source.center = grid.centers.col(true_idx);
    source.radius = 0.5;
    source.signal.dc_offset = 100.0;
    source.signal.harmonics = {Harmonic{2.2, 0.2, 0.8}};

    DynamicPatch patch;
    patch.positions = cap_points(cap);
    patch.extraction_radius = cap.radius;
    patch.sample_rate = 10.0;
    const Eigen::Index n_samples = 100;
    patch.series.resize(n_samples, patch.size());
    for (Eigen::Index p = 0; p < patch.size(); ++p)
        for (Eigen::Index k = 0; k < n_samples; ++k)
            patch.series(k, p) = dynamic_point_temperature(patch.positions.col(p),
                                                           patch.frame_time(k), source, medium);

    const SpectrumPatch spec = spectrum(patch);
    DynamicOptions options;
    options.amp_threshold = 0.02;
    options.min_patch_points = 900;
    options.anchor_k = 1;  // exact data: the nearest point alone is the anchor
    const DynamicReconstruction rec = reconstruct_dynamic(spec, grid, medium, options);

    REQUIRE(rec.amp_index == true_idx,
            "amplitude criterion landed on " << rec.amp_index << ", node is " << true_idx);
    REQUIRE(rec.phase_index == true_idx,
            "phase criterion landed on " << rec.phase_index << ", node is " << true_idx);

    // 0.2 Hz sits in bin 2; recovered bins start at bin 1.
    const std::size_t source_slot = 1;
    REQUIRE(rec.spectrum_amp.size() > source_slot, "recovered spectrum too short");
    const RecoveredBin& bin = rec.spectrum_amp[source_slot];
    REQUIRE(std::abs(bin.frequency - 0.2) <= 1e-12, "source bin frequency " << bin.frequency);
    REQUIRE(std::abs(bin.amplitude - 2.2) <= 0.022,
            "recovered S " << bin.amplitude << " off by " << std::abs(bin.amplitude - 2.2));
    REQUIRE(std::abs(wrap_angle(bin.phase - 0.8)) <= 0.05,
            "recovered phase " << bin.phase << " off by "
                               << std::abs(wrap_angle(bin.phase - 0.8)));
    REQUIRE(bin.usable_points >= options.min_patch_points,
            "source bin kept only " << bin.usable_points << " points");

    for (std::size_t j = 0; j < rec.spectrum_amp.size(); ++j) {
        if (j == source_slot) continue;
        REQUIRE(rec.spectrum_amp[j].amplitude == 0.0,
                "bin " << j + 1 << " not truncated: amplitude "
                       << rec.spectrum_amp[j].amplitude);
        REQUIRE(rec.spectrum_amp[j].usable_points == 0,
                "bin " << j + 1 << " kept " << rec.spectrum_amp[j].usable_points << " points");
    }
    return true;
}

// ---------------------------------------------------------------------------
// 4. Trend reproduction on simulated data: three buried sources at
// increasing depth, reconstructed from a noisy boundary patch. The
// median-over-seeds location error must not decrease with depth at fixed
// noise, nor with noise for a fixed source, and the noiseless shallow case
// must stay within 15 length units of the truth.
bool simulated_trends() {
    const auto t0 = std::chrono::steady_clock::now();
    const Medium medium{2.0};
    DomainSpec dom;
    dom.ball_radius = 100.0;
    dom.grid_spacing = 10.0;
    dom.flat_face_normal = Axis::PosZ;
    const RobinBoundary robin{0.005, 20.0};
    const HalfBallGrid grid = build_domain(dom);

    const Vec3 centers[3] = {Vec3(40, 40, 50), Vec3(35, 35, 45), Vec3(30, 30, 40)};
    const double q_total = 4.0 / 3.0 * kPi * 1000.0;  // unit density in a radius-10 ball
    const double levels[4] = {0.0, 0.01, 0.05, 0.10};
    const std::uint64_t seeds[15] = {11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25};

    double med[3][4];
    double noiseless_shallow = -1.0;
    for (int s = 0; s < 3; ++s) {
        SourceSpec source;
        source.center = centers[s];
        source.radius = 10.0;
        source.signal.dc_offset = q_total;

        StageSchedule schedule;
        // Past the global Robin relaxation time (~R/(3 h_c alpha) ~ 3300 s):
        // the lingering warm-up transient otherwise adds a depth-dependent
        // bias comparable to the noise-driven error under study.
        schedule.stages = {Stage{7.5, 15000.0, std::nullopt}};
        const StageRunResult run =
            run_stages(grid, medium, robin, {source}, schedule, robin.ambient);

        CapGeometry cap;
        cap.radius = 90.0;
        cap.cap_direction = centers[s].normalized();
        cap.cap_angle = kPi / 6.0;
        cap.angular_spacing = 0.015;
        const MeasurementPatch clean = extract_patch(grid, run.final_field, cap);
        const CandidateGrid cgrid = make_candidate_grid(cap, 20, 20, 20, 40.0, 80.0);

        for (int li = 0; li < 4; ++li) {
            std::vector<double> errs;
            for (const std::uint64_t seed : seeds) {
                MeasurementPatch noisy = clean;
                add_noise(noisy, levels[li], seed);
                // Wider anchor groups tame the order-statistic inflation of
                // the fitted contrast at the 10% noise level.
                StaticOptions opt;
                opt.nav = 60;
                const StaticReconstruction rec = reconstruct_static(noisy, cgrid, medium, opt);
                errs.push_back((rec.location - centers[s]).norm());
            }
            med[s][li] = median_of(errs);
            if (s == 0 && li == 0) noiseless_shallow = errs.front();
        }
    }

    std::cout << "  median location error (rows: sources shallow->deep; cols: noise "
                 "0/1/5/10%)\n";
    for (int s = 0; s < 3; ++s) {
        std::cout << "   ";
        for (int li = 0; li < 4; ++li) std::cout << " " << med[s][li];
        std::cout << "\n";
    }

    REQUIRE(noiseless_shallow >= 0.0 && noiseless_shallow <= 15.0,
            "noiseless shallow-source error " << noiseless_shallow);
    const double tol = 1e-9;
    for (int li = 0; li < 4; ++li)
        for (int s = 0; s + 1 < 3; ++s)
            REQUIRE(med[s][li] <= med[s + 1][li] + tol,
                    "depth trend broken at noise " << levels[li] << ": " << med[s][li] << " > "
                                                   << med[s + 1][li]);
    for (int s = 0; s < 3; ++s)
        for (int li = 0; li + 1 < 4; ++li)
            REQUIRE(med[s][li] <= med[s][li + 1] + tol,
                    "noise trend broken for source " << s << ": " << med[s][li] << " > "
                                                     << med[s][li + 1]);

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(elapsed <= 1800.0, "trend study took " << elapsed << " s");
    return true;
}

// ---------------------------------------------------------------------------
// 5. Simulator physics: insulated energy conservation per step, the
// sphere-source / point-source exterior equivalence, and shape agreement
// between the simulated boundary patch and the analytic model.
bool simulator_physics() {
    // (a) Insulated, source-free: the interior integral of T must be a
    // per-step invariant of the explicit stencil to near machine precision.
    {
        DomainSpec dom;
        dom.ball_radius = 20.0;
        dom.grid_spacing = 2.0;
        const Medium medium{2.0};
        const RobinBoundary insulated{0.0, 0.0};
        const HalfBallGrid grid = build_domain(dom);

        Eigen::ArrayXd field(grid.interior_count());
        for (Eigen::Index c = 0; c < grid.interior_count(); ++c) {
            const Vec3 x = grid.center(c);
            field[c] = 25.0 + 3.0 * std::exp(-(x - Vec3(0, 0, 8)).squaredNorm() / 50.0);
        }
        Eigen::ArrayXd next(grid.interior_count());
        const double e0 = field.sum() * grid.cell_volume();
        double prev = e0;
        for (int k = 0; k < 200; ++k) {
            step_heat(grid, medium, insulated, {}, k * 0.25, 0.25, field, next);
            field.swap(next);
            const double e = field.sum() * grid.cell_volume();
            REQUIRE(std::abs(e - prev) <= 1e-10 * e0,
                    "energy drifted " << std::abs(e - prev) / e0 << " at step " << k);
            prev = e;
        }
    }

    // (b) A radius-4 ball source and an equal-power single-cell source in the
    // same lossy domain must agree within 3% everywhere beyond two source
    // radii: outside the source ball the exterior field only sees the total
    // power.
    {
        DomainSpec dom;
        dom.ball_radius = 30.0;
        dom.grid_spacing = 1.5;
        const Medium medium{2.0};
        const RobinBoundary robin{0.05, 0.0};
        const HalfBallGrid grid = build_domain(dom);
        const Vec3 center(0.75, 0.75, 12.75);  // exact cell center

        const auto steady_field = [&](double radius) {
            SourceSpec source;
            source.center = center;
            source.radius = radius;
            source.signal.dc_offset = 500.0;
            StageSchedule schedule;
            schedule.stages = {Stage{0.15, 900.0, std::nullopt}};
            return run_stages(grid, medium, robin, {source}, schedule, 0.0).final_field;
        };
        const Eigen::ArrayXd ball = steady_field(4.0);
        const Eigen::ArrayXd point = steady_field(0.76);  // single cell

        for (Eigen::Index c = 0; c < grid.interior_count(); ++c) {
            if ((grid.center(c) - center).norm() <= 8.0) continue;
            const double rel = std::abs(ball[c] - point[c]) /
                               std::max(std::abs(point[c]), 1e-12);
            REQUIRE(rel <= 0.03, "sphere/point mismatch " << rel << " at cell " << c);
        }
    }

    // (c) Simulated shallow-source boundary patch vs the analytic 1/distance
    // shape: Pearson correlation >= 0.95.
    {
        DomainSpec dom;
        dom.ball_radius = 100.0;
        dom.grid_spacing = 10.0;
        const Medium medium{2.0};
        const RobinBoundary robin{0.005, 20.0};
        const HalfBallGrid grid = build_domain(dom);
        const Vec3 center(40.0, 40.0, 50.0);

        SourceSpec source;
        source.center = center;
        source.radius = 10.0;
        source.signal.dc_offset = 4.0 / 3.0 * kPi * 1000.0;
        StageSchedule schedule;
        schedule.stages = {Stage{7.5, 6000.0, std::nullopt}};
        const StageRunResult run =
            run_stages(grid, medium, robin, {source}, schedule, robin.ambient);

        CapGeometry cap;
        cap.radius = 90.0;
        cap.cap_direction = center.normalized();
        cap.cap_angle = kPi / 6.0;
        cap.angular_spacing = 0.015;
        const MeasurementPatch patch = extract_patch(grid, run.final_field, cap);

        Eigen::VectorXd model(patch.size());
        for (Eigen::Index p = 0; p < patch.size(); ++p)
            model[p] = 1.0 / (patch.positions.col(p) - center).norm();
        const Eigen::VectorXd a = patch.temperatures.array() - patch.temperatures.mean();
        const Eigen::VectorXd b = model.array() - model.mean();
        const double corr = a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
        REQUIRE(corr >= 0.95, "patch/model shape correlation " << corr);
    }
    return true;
}

// ---------------------------------------------------------------------------
// 6. Spectral exactness: integer-bin cosines, Parseval's identity, and
// affine detrending.
bool spectral_exactness() {
    // Integer-bin recovery to 1e-9.
    {
        DynamicPatch patch;
        patch.positions = Vec3(0.0, 0.0, 5.0);
        patch.extraction_radius = 5.0;
        patch.sample_rate = 10.0;
        const Eigen::Index n = 100;
        patch.series.resize(n, 1);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double t = patch.frame_time(k);
            patch.series(k, 0) = 4.0 + 1.25 * std::cos(2.0 * kPi * 0.6 * t - 1.1) +
                                 0.4 * std::cos(2.0 * kPi * 2.3 * t + 2.4);
        }
        const SpectrumPatch spec = spectrum(patch);
        REQUIRE(std::abs(spec.amplitudes(0, 0) - 4.0) <= 1e-9, "dc bin");
        REQUIRE(std::abs(spec.amplitudes(6, 0) - 1.25) <= 1e-9, "bin 6 amplitude");
        REQUIRE(std::abs(wrap_angle(spec.phases(6, 0) + 1.1)) <= 1e-9, "bin 6 phase");
        REQUIRE(std::abs(spec.amplitudes(23, 0) - 0.4) <= 1e-9, "bin 23 amplitude");
        REQUIRE(std::abs(wrap_angle(spec.phases(23, 0) - 2.4)) <= 1e-9, "bin 23 phase");
        for (Eigen::Index b = 1; b < spec.bins(); ++b) {
            if (b == 6 || b == 23) continue;
            REQUIRE(spec.amplitudes(b, 0) <= 1e-9, "leakage " << spec.amplitudes(b, 0)
                                                              << " in bin " << b);
        }
    }

    // Parseval: mean square == A_0^2 + sum A_n^2 / 2 (no Nyquist content).
    {
        DynamicPatch patch;
        patch.positions = Vec3(0.0, 0.0, 5.0);
        patch.extraction_radius = 5.0;
        patch.sample_rate = 8.0;
        const Eigen::Index n = 128;
        patch.series.resize(n, 1);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double t = patch.frame_time(k);
            patch.series(k, 0) = 1.5 + 0.9 * std::cos(2.0 * kPi * 0.5 * t + 0.4) +
                                 0.55 * std::cos(2.0 * kPi * 1.25 * t - 1.9) +
                                 0.2 * std::cos(2.0 * kPi * 2.5 * t + 0.9);
        }
        const SpectrumPatch spec = spectrum(patch);
        double rhs = spec.amplitudes(0, 0) * spec.amplitudes(0, 0);
        for (Eigen::Index b = 1; b < spec.bins(); ++b)
            rhs += 0.5 * spec.amplitudes(b, 0) * spec.amplitudes(b, 0);
        const double lhs = patch.series.col(0).squaredNorm() / static_cast<double>(n);
        REQUIRE(std::abs(lhs - rhs) <= 1e-6 * lhs, "Parseval gap " << std::abs(lhs - rhs) / lhs);
    }

    // Detrend kills affine series outright.
    {
        Eigen::VectorXd series(240);
        for (Eigen::Index k = 0; k < series.size(); ++k)
            series[k] = 3.7 - 0.02 * (static_cast<double>(k) / 10.0);
        detrend(series, 10.0);
        REQUIRE(series.cwiseAbs().maxCoeff() <= 1e-10,
                "affine residue " << series.cwiseAbs().maxCoeff());
    }
    return true;
}

// ---------------------------------------------------------------------------
// 7. Modulation expansions. The order-8 phase-modulated partial sum at B = 2
// bottoms out near 5e-6: the first dropped term carries J_9(2) ~ 2.5e-6, so
// no order-8 sum can reach 1e-6. The harness measures that floor, then holds
// the 1e-6 gate at order 9 where the tail finally allows it.
bool modulation_expansions() {
    const double omega = 2.0 * kPi;
    const double omega_m = 2.0 * kPi * 0.3;
    const double mod_index = 2.0;

    const auto pm_error = [&](int order) {
        const SignalSpec series = phase_modulated_expansion(omega, mod_index, omega_m, order);
        double worst = 0.0;
        for (int k = 0; k < 2000; ++k) {
            const double t = 10.0 * k / 2000.0;
            const double exact = std::cos(omega * t + mod_index * std::sin(omega_m * t));
            worst = std::max(worst, std::abs(series(t) - exact));
        }
        return worst;
    };

    const double floor8 = pm_error(8);
    const double floor9 = pm_error(9);
    std::cout << "  phase-modulated partial sums at B=2: order 8 peak error " << floor8
              << " (tail term J_9(2) = " << bessel_j(9, 2.0)
              << " keeps it above 1e-6), order 9 peak error " << floor9 << "\n";
    REQUIRE(floor8 <= 1e-5, "order-8 partial sum error " << floor8);
    REQUIRE(floor8 > 1e-6, "order-8 floor unexpectedly fell below 1e-6; revisit the gate");
    REQUIRE(floor9 <= 1e-6, "order-9 partial sum error " << floor9);

    // Amplitude modulation is a finite trig identity: exact to roundoff.
    {
        const double omega_c = 2.0 * kPi * 0.8;
        const double omega_a = 2.0 * kPi * 0.25;
        const SignalSpec series = amplitude_modulated_expansion(omega_c, 0.6, omega_a, 1.1);
        double worst = 0.0;
        for (int k = 0; k < 2000; ++k) {
            const double t = 10.0 * k / 2000.0;
            const double exact =
                (1.0 + 0.6 * std::cos(omega_a * t)) * std::cos(omega_c * t + 1.1);
            worst = std::max(worst, std::abs(series(t) - exact));
        }
        REQUIRE(worst <= 1e-12, "amplitude-modulated identity error " << worst);
    }

    REQUIRE(std::abs(bessel_j(0, 2.0)) < std::abs(bessel_j(1, 2.0)),
            "|J_0(2)| = " << std::abs(bessel_j(0, 2.0)) << " not below |J_1(2)| = "
                          << std::abs(bessel_j(1, 2.0)));
    return true;
}

// ---------------------------------------------------------------------------
// 8. Determinism: the same scenario run twice through the CLI with a fixed
// seed must produce byte-identical output files.
bool determinism(const std::string& cli) {
    REQUIRE(!cli.empty(), "pass the thermolocate binary path as argv[1]");
    namespace fs = std::filesystem;

    const fs::path scratch =
        fs::temp_directory_path() / ("thermolocate_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    const fs::path config = scratch / "det.json";
    {
        std::ofstream out(config);
        out << R"({
  "medium": {"alpha": 2.0},
  "domain": {"ball_radius": 30.0, "grid_spacing": 3.0, "flat_face_normal": "+z"},
  "boundary": {"robin_coeff": 0.01, "ambient": 20.0},
  "sources": [{"center": [0, 0, 15], "radius": 3.0,
               "signal": {"dc": {"total": 500.0},
                          "harmonics": [{"amplitude": {"total": 300.0},
                                         "frequency": 0.2, "phase": 0.3}]}}],
  "schedule": {"stages": [{"dt": 0.5, "duration": 200.0},
                          {"dt": 0.05, "duration": 10.0, "sample_rate": 10.0}]},
  "extraction": {"radius": 27.0, "cap_direction": [0, 0, 1], "cap_angle_deg": 40.0,
                 "angular_spacing": 0.02},
  "noise": {"percent": 0.05, "seed": 1},
  "reconstruction": {"grid": {"n_r": 5, "n_theta": 4, "n_phi": 6,
                              "r_min": 10.0, "r_max": 22.0},
                     "amp_threshold": 1e-9, "min_patch_points": 10, "anchor_k": 3}
})";
    }

    const auto run_pipeline = [&](const std::string& label) {
        const fs::path out_dir = scratch / label;
        const std::string base = "\"" + cli + "\"";
        const std::string cfg = " --config \"" + config.string() + "\"";
        const std::string out = " --out \"" + out_dir.string() + "\"";
        int status = std::system((base + " simulate" + cfg + out + " --seed 424242").c_str());
        if (status != 0) return fs::path();
        status = std::system((base + " reconstruct" + cfg + out).c_str());
        if (status != 0) return fs::path();
        return out_dir;
    };

    const fs::path dir_a = run_pipeline("first");
    const fs::path dir_b = run_pipeline("second");
    REQUIRE(!dir_a.empty() && !dir_b.empty(), "pipeline run failed; see CLI output above");

    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    for (const char* name :
         {"det_patch.csv", "det_manifest.json", "det_report.json", "det_spectrum.csv"}) {
        const std::string a = slurp(dir_a / name);
        const std::string b = slurp(dir_b / name);
        REQUIRE(!a.empty(), "missing or empty output " << name);
        REQUIRE(a == b, "output " << name << " differs between identical runs");
    }
    fs::remove_all(scratch);
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";

    struct Criterion {
        const char* name;
        std::function<bool()> run;
        double budget_s;  // 0 = no runtime gate
    };
    const std::vector<Criterion> criteria = {
        {"oracle equivalence", oracle_equivalence, 60.0},
        {"static closed loop", static_closed_loop, 0.0},
        {"dynamic closed loop", dynamic_closed_loop, 0.0},
        {"simulated trend reproduction", simulated_trends, 1800.0},
        {"simulator physics", simulator_physics, 0.0},
        {"spectral exactness", spectral_exactness, 0.0},
        {"modulation expansions", modulation_expansions, 0.0},
        {"determinism", [&cli] { return determinism(cli); }, 0.0},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = criteria[i].run();
        } catch (const std::exception& e) {
            std::cerr << "[FAIL] criterion " << i + 1 << " threw: " << e.what() << "\n";
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (ok && criteria[i].budget_s > 0.0 && elapsed > criteria[i].budget_s) {
            std::cerr << "[FAIL] criterion " << i + 1 << " (" << criteria[i].name << ") took "
                      << elapsed << " s, budget " << criteria[i].budget_s << " s\n";
            ok = false;
        }
        if (ok) {
            std::cout << "[PASS] criterion " << i + 1 << ": " << criteria[i].name << " ("
                      << elapsed << " s)\n";
        } else {
            std::cout << "[FAIL] criterion " << i + 1 << ": " << criteria[i].name << " ("
                      << elapsed << " s)\n";
            ++failures;
        }
    }

    if (failures == 0) {
        std::cout << "acceptance: all " << criteria.size() << " criteria passed\n";
    } else {
        std::cout << "acceptance: " << failures << " of " << criteria.size()
                  << " criteria FAILED\n";
    }
    return failures == 0 ? 0 : 1;
}
