#include "thermolocate/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "thermolocate/types.hpp"

namespace thermolocate {

double SpectrumPatch::frequency(Eigen::Index n) const {
    if (n < 0 || n >= bins()) throw std::domain_error("frequency: bin out of range");
    return static_cast<double>(n) * sample_rate / static_cast<double>(n_samples);
}

void SpectrumPatch::validate() const {
    if (positions.cols() == 0) throw std::domain_error("spectrum: empty point set");
    if (amplitudes.cols() != positions.cols() || phases.cols() != positions.cols())
        throw std::domain_error("spectrum: bin matrices do not match the point count");
    if (amplitudes.rows() != phases.rows())
        throw std::domain_error("spectrum: amplitude/phase bin counts differ");
    if (!(sample_rate > 0.0)) throw std::domain_error("spectrum: sample_rate must be > 0");
    if (n_samples < 4) throw std::domain_error("spectrum: needs at least 4 samples");
    if ((amplitudes.array() < 0.0).any())
        throw std::domain_error("spectrum: negative amplitude");
}

SpectrumPatch spectrum(const DynamicPatch& patch) {
    patch.validate();
    const Eigen::Index N = patch.samples();
    if (N < 4) throw std::domain_error("spectrum: needs at least 4 samples");
    const Eigen::Index n_bins = N / 2 + 1;

    Eigen::MatrixXcd dft(n_bins, N);
    const std::complex<double> jw(0.0, -2.0 * kPi / static_cast<double>(N));
    for (Eigen::Index n = 0; n < n_bins; ++n)
        for (Eigen::Index k = 0; k < N; ++k)
            dft(n, k) = std::exp(jw * static_cast<double>(n * k));

    const Eigen::MatrixXcd x = dft * patch.series.cast<std::complex<double>>();

    SpectrumPatch out;
    out.positions = patch.positions;
    out.extraction_radius = patch.extraction_radius;
    out.sample_rate = patch.sample_rate;
    out.n_samples = N;
    out.amplitudes.resize(n_bins, patch.size());
    out.phases.resize(n_bins, patch.size());
    const double scale = 2.0 / static_cast<double>(N);
    for (Eigen::Index p = 0; p < patch.size(); ++p) {
        out.amplitudes(0, p) = std::abs(x(0, p)) / static_cast<double>(N);
        out.phases(0, p) = std::arg(x(0, p));
        for (Eigen::Index n = 1; n < n_bins; ++n) {
            out.amplitudes(n, p) = scale * std::abs(x(n, p));
            out.phases(n, p) = std::arg(x(n, p));
        }
    }
    return out;
}

Eigen::VectorXd unwrap_phase(const Eigen::VectorXd& angles) {
    if (angles.size() == 0) throw std::domain_error("unwrap_phase: empty input");
    Eigen::VectorXd out(angles.size());
    out[0] = angles[0];
    for (Eigen::Index i = 1; i < angles.size(); ++i)
        out[i] = out[i - 1] + wrap_angle(angles[i] - angles[i - 1]);
    return out;
}

Eigen::VectorXd normalize_phase(const SpectrumPatch& spec, Eigen::Index bin,
                                Eigen::Index reference) {
    spec.validate();
    if (bin < 0 || bin >= spec.bins()) throw std::domain_error("normalize_phase: bin out of range");
    if (reference < 0 || reference >= spec.size())
        throw std::domain_error("normalize_phase: reference point out of range");

    const Eigen::Index n = spec.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Eigen::VectorXd dist(n);
    for (Eigen::Index p = 0; p < n; ++p)
        dist[p] = (spec.positions.col(p) - spec.positions.col(reference)).norm();
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return a < b;
    });

    Eigen::VectorXd along(n);
    for (Eigen::Index j = 0; j < n; ++j) along[j] = spec.phases(bin, order[static_cast<std::size_t>(j)]);
    along = unwrap_phase(along);

    double at_reference = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        if (order[static_cast<std::size_t>(j)] == reference) {
            at_reference = along[j];
            break;
        }

    Eigen::VectorXd out(n);
    for (Eigen::Index j = 0; j < n; ++j)
        out[order[static_cast<std::size_t>(j)]] = along[j] - at_reference;
    return out;
}

double average_phase(const Eigen::VectorXd& angles) {
    if (angles.size() == 0) throw std::domain_error("average_phase: empty input");
    double cx = 0.0;
    double sy = 0.0;
    for (Eigen::Index i = 0; i < angles.size(); ++i) {
        cx += std::cos(angles[i]);
        sy += std::sin(angles[i]);
    }
    cx /= static_cast<double>(angles.size());
    sy /= static_cast<double>(angles.size());
    if (std::hypot(cx, sy) < 1e-12)
        throw std::domain_error("average_phase: resultant too small, circular mean undefined");
    return std::atan2(sy, cx);
}

}  // namespace thermolocate
