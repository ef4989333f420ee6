#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace thermolocate {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;

// Maps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::fmod(a, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    else if (r > kPi) r -= 2.0 * kPi;
    return r;
}

// Homogeneous isotropic medium; only the thermal diffusivity enters the model.
struct Medium {
    double alpha = 1.0;  // diffusivity, length^2 / time

    void validate() const {
        if (!(alpha > 0.0)) throw std::domain_error("Medium: alpha must be > 0");
    }
};

// One cosine component A * cos(2*pi*f*t + phase). Frequencies are strictly
// positive; constant power lives in SignalSpec::dc_offset.
struct Harmonic {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
};

// Source power signal s(t) = dc_offset + sum of harmonics. Harmonics are kept
// sorted by frequency with no duplicates; phases wrapped into (-pi, pi].
struct SignalSpec {
    double dc_offset = 0.0;
    std::vector<Harmonic> harmonics;

    double operator()(double t) const {
        double v = dc_offset;
        for (const Harmonic& h : harmonics)
            v += h.amplitude * std::cos(2.0 * kPi * h.frequency * t + h.phase);
        return v;
    }

    double max_frequency() const {
        double f = 0.0;
        for (const Harmonic& h : harmonics) f = std::max(f, h.frequency);
        return f;
    }

    void validate() const {
        double prev = 0.0;
        for (const Harmonic& h : harmonics) {
            if (!(h.frequency > 0.0))
                throw std::domain_error("SignalSpec: harmonic frequency must be > 0");
            if (h.frequency <= prev)
                throw std::domain_error("SignalSpec: harmonics must be sorted with no duplicate frequencies");
            if (!(h.amplitude >= 0.0))
                throw std::domain_error("SignalSpec: harmonic amplitude must be >= 0");
            if (h.phase <= -kPi || h.phase > kPi)
                throw std::domain_error("SignalSpec: harmonic phase must lie in (-pi, pi]");
            prev = h.frequency;
        }
    }
};

// Point-like heat source: all power of signal() released uniformly inside a
// ball of the given radius around center. The exterior field is that of an
// equal-power point source at center.
struct SourceSpec {
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
    SignalSpec signal;

    void validate() const {
        if (!(radius >= 0.0)) throw std::domain_error("SourceSpec: radius must be >= 0");
        signal.validate();
    }
};

// Steady periodic response of the medium at distance r from a unit-amplitude
// cosine point source: output = gain * cos(2*pi*f*t + phase_shift).
struct SpectralResponse {
    double gain = 0.0;
    double phase_shift = 0.0;
};

}  // namespace thermolocate
