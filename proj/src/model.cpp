#include "thermolocate/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include "thermolocate/errors.hpp"

namespace thermolocate {

double gaussian_kernel(const Vec3& x, double t, const Medium& medium) {
    medium.validate();
    if (!(t > 0.0)) throw std::domain_error("gaussian_kernel: t must be > 0");
    const double s = 4.0 * medium.alpha * t;
    return std::pow(kPi * s, -1.5) * std::exp(-x.squaredNorm() / s);
}

namespace {

// Compensated accumulator: the deep-attenuation regime cancels the kernel
// mass down by many orders of magnitude, so plain summation roundoff would
// swamp the result.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double y = v - carry;
        const double s = sum + y;
        carry = (s - sum) - y;
        sum = s;
    }
};

// Composite 4-point Gauss-Legendre panels. The eighth-order error falls by
// 256x per panel doubling, which keeps the refinement depth small even when
// the target tolerance sits far below the unsigned integrand mass.
constexpr double kGlNode[2] = {0.3399810435848563, 0.8611363115940526};
constexpr double kGlWeight[2] = {0.6521451548625461, 0.3478548451374538};

template <typename F>
double gl_panels(double a, double b, int n, const F& f) {
    KahanSum acc;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
        const double mid = a + (i + 0.5) * h;
        for (int j = 0; j < 2; ++j) {
            const double d = 0.5 * h * kGlNode[j];
            acc.add(0.5 * h * kGlWeight[j] * (f(mid - d) + f(mid + d)));
        }
    }
    return acc.sum;
}

// One quadrature pass over [w_lo, W]: logarithmically spaced panels up to
// w_mid capture the kernel peak, then a uniform segment runs to W. Panel
// widths in both segments are capped so the fastest harmonic of the signal
// stays resolved; without the cap the wide log panels near w_mid straddle
// whole oscillation periods and the composite error stagnates.
double duhamel_pass(double r2, double t, const SignalSpec& signal, double alpha,
                    int log_nodes, int nodes_per_period) {
    const double W = 4.0 * alpha * t;
    // Below w_lo the factor exp(-r2/w) is < 1e-304; the omitted mass is nil.
    const double w_lo = std::min(r2 / 700.0, 0.5 * W);
    const double w_mid = std::min(std::max(r2, 2.0 * w_lo), W);
    const double f_max = signal.max_frequency();

    const auto integrand = [&](double w) {
        return std::exp(-r2 / w) * std::pow(w, -1.5) * signal(t - w / (4.0 * alpha));
    };

    const double u_lo = std::log(w_lo);
    const double u_mid = std::log(w_mid);
    int n_log = log_nodes;
    if (f_max > 0.0) {
        // du maps to a w-step of w*du, largest at w_mid.
        const double du_max = 4.0 * alpha / (f_max * w_mid * nodes_per_period);
        n_log = std::max(n_log, static_cast<int>(std::ceil((u_mid - u_lo) / du_max)));
    }
    double acc = gl_panels(u_lo, u_mid, n_log,
                           [&](double u) {
                               const double w = std::exp(u);
                               return integrand(w) * w;
                           });

    if (W > w_mid) {
        double dw = (W - w_mid) / log_nodes;
        if (f_max > 0.0) dw = std::min(dw, 4.0 * alpha / f_max / nodes_per_period);
        const int n_lin = std::max(log_nodes, static_cast<int>(std::ceil((W - w_mid) / dw)));
        acc += gl_panels(w_mid, W, n_lin, integrand);
    }
    return acc / (4.0 * alpha * std::pow(kPi, 1.5));
}

}  // namespace

double duhamel_temperature(const Vec3& x, double t, const SignalSpec& signal,
                           const Medium& medium, const QuadratureConfig& quad) {
    medium.validate();
    signal.validate();
    quad.validate();
    const double r2 = x.squaredNorm();
    if (!(r2 > 0.0)) throw std::domain_error("duhamel_temperature: |x| must be > 0");
    if (!(t > 0.0)) throw std::domain_error("duhamel_temperature: t must be > 0");

    int log_nodes = quad.base_log_nodes;
    int per_period = quad.nodes_per_period;
    double prev = duhamel_pass(r2, t, signal, medium.alpha, log_nodes, per_period);
    for (int level = 0; level < quad.max_refinements; ++level) {
        log_nodes *= 2;
        per_period *= 2;
        const double cur = duhamel_pass(r2, t, signal, medium.alpha, log_nodes, per_period);
        const double delta = std::abs(cur - prev);
        if (delta <= std::max({quad.rel_tol * std::abs(cur), quad.abs_tol, 1e-300})) return cur;
        prev = cur;
    }
    throw AccuracyError("duhamel_temperature: quadrature did not converge to rel_tol", prev,
                        std::abs(prev));
}

double static_point_temperature(double r, double power, double offset, const Medium& medium) {
    medium.validate();
    if (!(r > 0.0)) throw std::domain_error("static_point_temperature: r must be > 0");
    return power / (4.0 * kPi * medium.alpha * r) + offset;
}

double thermal_wavenumber(double freq, const Medium& medium) {
    medium.validate();
    if (!(freq >= 0.0)) throw std::domain_error("thermal_wavenumber: freq must be >= 0");
    return std::sqrt(kPi * freq / medium.alpha);
}

SpectralResponse steady_spectral_response(double r, double freq, const Medium& medium) {
    medium.validate();
    if (!(r > 0.0)) throw std::domain_error("steady_spectral_response: r must be > 0");
    const double k = thermal_wavenumber(freq, medium);
    SpectralResponse resp;
    resp.gain = std::exp(-k * r) / (4.0 * kPi * medium.alpha * r);
    resp.phase_shift = -k * r;
    return resp;
}

double dynamic_point_temperature(const Vec3& x, double t, const SourceSpec& source,
                                 const Medium& medium) {
    source.validate();
    const double r = (x - source.center).norm();
    if (!(r > 0.0))
        throw std::domain_error("dynamic_point_temperature: x coincides with the source center");
    double T = static_point_temperature(r, source.signal.dc_offset, 0.0, medium);
    for (const Harmonic& h : source.signal.harmonics) {
        const SpectralResponse resp = steady_spectral_response(r, h.frequency, medium);
        T += h.amplitude * resp.gain * std::cos(2.0 * kPi * h.frequency * t + h.phase + resp.phase_shift);
    }
    return T;
}

double bessel_j(int k, double x) {
    if (k < 0) {
        const double v = bessel_j(-k, x);
        return (-k) % 2 == 0 ? v : -v;
    }
    if (x == 0.0) return k == 0 ? 1.0 : 0.0;
    // Ascending series: J_k(x) = sum_m (-1)^m / (m! (m+k)!) (x/2)^{2m+k}.
    const double half = 0.5 * x;
    double term = 1.0;
    for (int i = 1; i <= k; ++i) term *= half / i;
    double sum = term;
    const double q = half * half;
    for (int m = 1; m <= 256; ++m) {
        term *= -q / (static_cast<double>(m) * (m + k));
        sum += term;
        if (std::abs(term) <= 1e-18 * std::max(std::abs(sum), 1e-30)) break;
    }
    return sum;
}

namespace {

// Accumulates cosine terms keyed by frequency; signed/contrary terms merge by
// phasor addition, exact-zero frequencies fold into dc.
class HarmonicAccumulator {
public:
    void add(double freq_signed, double amplitude_signed, double phase) {
        double f = freq_signed;
        double ph = phase;
        if (f < 0.0) {
            // A cos(-2*pi*|f|*t + ph) = A cos(2*pi*|f|*t - ph)
            f = -f;
            ph = -ph;
        }
        if (f == 0.0) {
            dc_ += amplitude_signed * std::cos(ph);
            return;
        }
        bins_[f] += std::polar(std::abs(amplitude_signed),
                               amplitude_signed < 0.0 ? wrap_angle(ph + kPi) : ph);
    }

    SignalSpec finish() const {
        SignalSpec out;
        out.dc_offset = dc_;
        for (const auto& [f, z] : bins_) {
            const double amp = std::abs(z);
            if (amp == 0.0) continue;
            out.harmonics.push_back({amp, f, wrap_angle(std::arg(z))});
        }
        return out;
    }

private:
    double dc_ = 0.0;
    std::map<double, std::complex<double>> bins_;
};

}  // namespace

SignalSpec phase_modulated_expansion(double omega, double mod_index, double omega_m, int order) {
    if (!(omega > 0.0) || !(omega_m > 0.0))
        throw std::domain_error("phase_modulated_expansion: omega and omega_m must be > 0");
    if (order < 0) throw std::domain_error("phase_modulated_expansion: order must be >= 0");
    HarmonicAccumulator acc;
    for (int k = -order; k <= order; ++k)
        acc.add((omega + k * omega_m) / (2.0 * kPi), bessel_j(k, mod_index), 0.0);
    SignalSpec out = acc.finish();
    out.validate();
    return out;
}

SignalSpec amplitude_modulated_expansion(double omega, double mod_depth, double omega_a,
                                         double phase) {
    if (!(omega > 0.0) || !(omega_a > 0.0))
        throw std::domain_error("amplitude_modulated_expansion: omega and omega_a must be > 0");
    HarmonicAccumulator acc;
    acc.add(omega / (2.0 * kPi), 1.0, phase);
    acc.add((omega + omega_a) / (2.0 * kPi), 0.5 * mod_depth, phase);
    acc.add((omega - omega_a) / (2.0 * kPi), 0.5 * mod_depth, phase);
    SignalSpec out = acc.finish();
    out.validate();
    return out;
}

}  // namespace thermolocate
