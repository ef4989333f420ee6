#include "thermolocate/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <utility>

#include "thermolocate/errors.hpp"
#include "thermolocate/model.hpp"

namespace thermolocate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int resolve_threads(int requested, Eigen::Index work) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    return static_cast<int>(std::min<Eigen::Index>(n, std::max<Eigen::Index>(work, 1)));
}

// Runs fn(slot, begin, end) over a contiguous partition of [0, n). Results
// must be merged by the caller with a deterministic rule so the outcome is
// independent of the partition.
template <class Fn>
void parallel_blocks(Eigen::Index n, int threads, Fn&& fn) {
    const int nt = resolve_threads(threads, n);
    if (nt <= 1) {
        fn(0, Eigen::Index{0}, n);
        return;
    }
    const Eigen::Index chunk = (n + nt - 1) / nt;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nt));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        const Eigen::Index begin = static_cast<Eigen::Index>(t) * chunk;
        const Eigen::Index end = std::min(n, begin + chunk);
        pool.emplace_back([&, t, begin, end] {
            try {
                if (begin < end) fn(t, begin, end);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (std::thread& th : pool) th.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

void CandidateGrid::spherical(Eigen::Index index, double& r, double& theta, double& phi) const {
    if (index < 0 || index >= size()) throw std::domain_error("CandidateGrid: index out of range");
    const Eigen::Index n_phi = azimuth.size();
    const Eigen::Index n_theta = polar.size();
    phi = azimuth[index % n_phi];
    theta = polar[(index / n_phi) % n_theta];
    r = radii[index / (n_phi * n_theta)];
}

CandidateGrid make_candidate_grid(const CapGeometry& cap, int n_r, int n_theta, int n_phi,
                                  double r_min, double r_max) {
    cap.validate();
    if (n_r < 2 || n_theta < 2 || n_phi < 2)
        throw ConfigError("candidate grid: every resolution component must be >= 2");
    if (!(r_min >= 0.0) || !(r_max >= r_min))
        throw ConfigError("candidate grid: need 0 <= r_min <= r_max");
    const double dr = (r_max - r_min) / static_cast<double>(n_r - 1);
    if (!(r_max < cap.radius) || r_max > cap.radius - dr + 1e-12 * cap.radius)
        throw ConfigError(
            "candidate grid: r_max must stay at least one radial step below the "
            "extraction radius");

    CandidateGrid grid;
    grid.cap_direction = cap.cap_direction.normalized();
    grid.radii.resize(n_r);
    for (int i = 0; i < n_r; ++i) grid.radii[i] = r_min + dr * static_cast<double>(i);
    grid.polar.resize(n_theta);
    for (int j = 0; j < n_theta; ++j)
        grid.polar[j] = cap.cap_angle * static_cast<double>(j) / static_cast<double>(n_theta - 1);
    grid.azimuth.resize(n_phi);
    for (int k = 0; k < n_phi; ++k)
        grid.azimuth[k] = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n_phi);

    const Eigen::Matrix3d frame = frame_from_axis(grid.cap_direction);
    grid.centers.resize(3, static_cast<Eigen::Index>(n_r) * n_theta * n_phi);
    Eigen::Index idx = 0;
    for (int i = 0; i < n_r; ++i)
        for (int j = 0; j < n_theta; ++j) {
            const double st = std::sin(grid.polar[j]);
            const double ct = std::cos(grid.polar[j]);
            for (int k = 0; k < n_phi; ++k, ++idx) {
                const Vec3 local(st * std::cos(grid.azimuth[k]), st * std::sin(grid.azimuth[k]),
                                 ct);
                grid.centers.col(idx) = grid.radii[i] * (frame * local);
            }
        }
    return grid;
}

namespace {

// Candidate-independent half of the two-anchor fit: the nav coldest and nav
// hottest patch points. The model t = C + Q g(r) is linear in g, so group
// means of t pair exactly with group means of g. Positions must be kept per
// point: the cold group of a cap is azimuthally spread and its mean position
// would collapse toward the axis.
struct Anchors {
    Eigen::Matrix3Xd x_low;
    Eigen::Matrix3Xd x_high;
    double t_low = 0.0;
    double t_high = 0.0;
};

Anchors make_anchors(const MeasurementPatch& patch, int nav) {
    if (nav < 1) throw ConfigError("fit_power: nav must be >= 1");
    if (patch.size() < 2 * static_cast<Eigen::Index>(nav))
        throw ConfigError("fit_power: patch needs at least 2*nav points");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(patch.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (patch.temperatures[a] != patch.temperatures[b])
            return patch.temperatures[a] < patch.temperatures[b];
        return a < b;
    });
    Anchors anchors;
    anchors.x_low.resize(3, nav);
    anchors.x_high.resize(3, nav);
    for (int i = 0; i < nav; ++i) {
        const Eigen::Index lo = order[static_cast<std::size_t>(i)];
        const Eigen::Index hi = order[order.size() - 1 - static_cast<std::size_t>(i)];
        anchors.x_low.col(i) = patch.positions.col(lo);
        anchors.t_low += patch.temperatures[lo];
        anchors.x_high.col(i) = patch.positions.col(hi);
        anchors.t_high += patch.temperatures[hi];
    }
    anchors.t_low /= nav;
    anchors.t_high /= nav;
    return anchors;
}

// Mean of 1/(4 pi alpha r) over a group, empty optional if the candidate
// touches one of its points.
std::optional<double> mean_green(const Eigen::Matrix3Xd& group, const Vec3& candidate,
                                 double alpha) {
    double g = 0.0;
    for (Eigen::Index i = 0; i < group.cols(); ++i) {
        const double r = (group.col(i) - candidate).norm();
        if (!(r > 0.0)) return std::nullopt;
        g += 1.0 / (4.0 * kPi * alpha * r);
    }
    return g / static_cast<double>(group.cols());
}

std::optional<PowerFit> fit_from_anchors(const Anchors& anchors, const Vec3& candidate,
                                         const Medium& medium) {
    const std::optional<double> low = mean_green(anchors.x_low, candidate, medium.alpha);
    const std::optional<double> high = mean_green(anchors.x_high, candidate, medium.alpha);
    if (!low || !high) return std::nullopt;
    const double g_low = *low;
    const double g_high = *high;
    if (g_low == g_high) return std::nullopt;
    PowerFit fit;
    fit.power = (anchors.t_low - anchors.t_high) / (g_low - g_high);
    fit.baseline =
        0.5 * ((anchors.t_low - fit.power * g_low) + (anchors.t_high - fit.power * g_high));
    return fit;
}

}  // namespace

std::optional<PowerFit> fit_power(const MeasurementPatch& patch, const Vec3& candidate,
                                  const Medium& medium, int nav) {
    patch.validate();
    medium.validate();
    return fit_from_anchors(make_anchors(patch, nav), candidate, medium);
}

double static_penalty(const MeasurementPatch& patch, const Vec3& candidate, double power,
                      double baseline, const Medium& medium) {
    patch.validate();
    medium.validate();
    const double factor = power / (4.0 * kPi * medium.alpha);
    double sum = 0.0;
    for (Eigen::Index p = 0; p < patch.size(); ++p) {
        const double r = (patch.positions.col(p) - candidate).norm();
        if (!(r > 0.0)) return kInf;
        const double res = patch.temperatures[p] - (factor / r + baseline);
        sum += res * res;
    }
    return std::sqrt(sum / static_cast<double>(patch.size()));
}

StaticReconstruction reconstruct_static(const MeasurementPatch& patch, const CandidateGrid& grid,
                                        const Medium& medium, const StaticOptions& options,
                                        Eigen::VectorXd* penalty_field) {
    patch.validate();
    medium.validate();
    if (grid.size() == 0) throw ConfigError("reconstruct_static: empty candidate grid");
    const Anchors anchors = make_anchors(patch, options.nav);
    const Eigen::Index n = grid.size();
    if (penalty_field) penalty_field->setConstant(n, kInf);

    const int nt = resolve_threads(options.threads, n);
    struct Best {
        double penalty = kInf;
        Eigen::Index index = -1;
        PowerFit fit;
    };
    std::vector<Best> best(static_cast<std::size_t>(std::max(nt, 1)));

    parallel_blocks(n, options.threads, [&](int slot, Eigen::Index begin, Eigen::Index end) {
        Best local;
        for (Eigen::Index i = begin; i < end; ++i) {
            const Vec3 candidate = grid.centers.col(i);
            const std::optional<PowerFit> fit = fit_from_anchors(anchors, candidate, medium);
            double penalty = kInf;
            if (fit)
                penalty = static_penalty(patch, candidate, fit->power, fit->baseline, medium);
            if (penalty_field) (*penalty_field)[i] = penalty;
            if (penalty < local.penalty) {
                local.penalty = penalty;
                local.index = i;
                local.fit = *fit;
            }
        }
        best[static_cast<std::size_t>(slot)] = local;
    });

    Best overall;
    for (const Best& b : best)
        if (b.index >= 0 &&
            (b.penalty < overall.penalty ||
             (b.penalty == overall.penalty && b.index < overall.index)))
            overall = b;
    if (overall.index < 0)
        throw NoSolutionError("reconstruct_static: every candidate was rejected");

    StaticReconstruction out;
    out.location = grid.centers.col(overall.index);
    out.power = overall.fit.power;
    out.baseline = overall.fit.baseline;
    out.penalty = overall.penalty;
    out.grid_index = overall.index;
    return out;
}

Eigen::VectorXd predicted_amplitude_profile(const Vec3& candidate, double anchor_amp, double freq,
                                            const Medium& medium,
                                            const Eigen::Matrix3Xd& positions) {
    if (!(anchor_amp >= 0.0))
        throw std::domain_error("predicted_amplitude_profile: anchor amplitude must be >= 0");
    medium.validate();
    if (positions.cols() == 0)
        throw std::domain_error("predicted_amplitude_profile: empty point set");
    Eigen::ArrayXd r(positions.cols());
    for (Eigen::Index p = 0; p < positions.cols(); ++p)
        r[p] = (positions.col(p) - candidate).norm();
    const double r_anchor = r.minCoeff();
    if (!(r_anchor > 0.0))
        throw std::domain_error("predicted_amplitude_profile: candidate touches the patch");
    const double k = thermal_wavenumber(freq, medium);
    return (anchor_amp * (r_anchor / r) * (-k * (r - r_anchor)).exp()).matrix();
}

std::vector<Eigen::Index> truncate_patch(const Eigen::VectorXd& profile, double amp_threshold,
                                         Eigen::Index min_points) {
    if (!(amp_threshold >= 0.0))
        throw std::domain_error("truncate_patch: threshold must be >= 0");
    std::vector<Eigen::Index> subset;
    for (Eigen::Index p = 0; p < profile.size(); ++p)
        if (profile[p] > amp_threshold) subset.push_back(p);
    if (static_cast<Eigen::Index>(subset.size()) < min_points) subset.clear();
    return subset;
}

double amplitude_penalty(const Eigen::VectorXd& data_amps, const Eigen::VectorXd& profile) {
    if (data_amps.size() != profile.size() || data_amps.size() == 0)
        throw std::domain_error("amplitude_penalty: field sizes differ or are empty");
    return std::sqrt((data_amps - profile).squaredNorm() / static_cast<double>(data_amps.size()));
}

double phase_penalty(const Eigen::VectorXd& data_phases, const Eigen::VectorXd& model_phases,
                     const std::vector<Eigen::Index>& subset, PhaseNormalization normalization) {
    if (data_phases.size() != model_phases.size())
        throw std::domain_error("phase_penalty: field sizes differ");
    if (subset.empty()) throw std::domain_error("phase_penalty: empty usable subset");
    const auto n = static_cast<double>(subset.size());
    Eigen::VectorXd d(subset.size());
    Eigen::VectorXd m(subset.size());
    for (std::size_t j = 0; j < subset.size(); ++j) {
        d[static_cast<Eigen::Index>(j)] = data_phases[subset[j]];
        m[static_cast<Eigen::Index>(j)] = model_phases[subset[j]];
    }
    if (normalization == PhaseNormalization::StdMatch) {
        const double sd_d = std::sqrt((d.array() - d.mean()).square().sum() / n);
        const double sd_m = std::sqrt((m.array() - m.mean()).square().sum() / n);
        if (sd_m > 0.0) m *= sd_d / sd_m;
    }
    return std::sqrt((d - m).squaredNorm() / n) / n;
}

Harmonic recover_harmonic(double anchor_distance, double anchor_amp, double anchor_phase,
                          double freq, const Medium& medium) {
    if (!(anchor_distance > 0.0))
        throw std::domain_error("recover_harmonic: anchor distance must be > 0");
    if (!(anchor_amp >= 0.0))
        throw std::domain_error("recover_harmonic: anchor amplitude must be >= 0");
    const SpectralResponse resp = steady_spectral_response(anchor_distance, freq, medium);
    Harmonic h;
    h.frequency = freq;
    h.amplitude = anchor_amp / resp.gain;
    h.phase = wrap_angle(anchor_phase - resp.phase_shift);
    return h;
}

namespace {

// Per-candidate scratch shared across bins; the reference-point work (anchor
// neighborhood, distance-from-C ordering) is memoized because consecutive
// candidates usually share their nearest patch point.
struct ReferenceMemo {
    Eigen::Index point = -1;
    std::vector<Eigen::Index> neighborhood;       // anchor_k nearest patch points
    std::vector<Eigen::Index> distance_order;     // all points by distance from C
};

void refresh_reference(const SpectrumPatch& spec, Eigen::Index c, int anchor_k,
                       ReferenceMemo& memo) {
    if (memo.point == c) return;
    memo.point = c;
    const Eigen::Index n = spec.size();
    Eigen::VectorXd dist(n);
    for (Eigen::Index p = 0; p < n; ++p)
        dist[p] = (spec.positions.col(p) - spec.positions.col(c)).norm();
    memo.distance_order.resize(static_cast<std::size_t>(n));
    std::iota(memo.distance_order.begin(), memo.distance_order.end(), Eigen::Index{0});
    std::sort(memo.distance_order.begin(), memo.distance_order.end(),
              [&](Eigen::Index a, Eigen::Index b) {
                  if (dist[a] != dist[b]) return dist[a] < dist[b];
                  return a < b;
              });
    memo.neighborhood.assign(memo.distance_order.begin(),
                             memo.distance_order.begin() + anchor_k);
}

// Data phase field of one bin, unwrapped along the memoized ordering and
// zeroed at the reference point; mirrors normalize_phase.
Eigen::VectorXd normalized_data_phase(const Eigen::MatrixXd& phases_by_point, Eigen::Index bin,
                                      Eigen::Index c, const ReferenceMemo& memo) {
    const Eigen::Index n = phases_by_point.rows();
    Eigen::VectorXd along(n);
    for (Eigen::Index j = 0; j < n; ++j)
        along[j] = phases_by_point(memo.distance_order[static_cast<std::size_t>(j)], bin);
    along = unwrap_phase(along);
    double at_reference = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        if (memo.distance_order[static_cast<std::size_t>(j)] == c) {
            at_reference = along[j];
            break;
        }
    Eigen::VectorXd out(n);
    for (Eigen::Index j = 0; j < n; ++j)
        out[memo.distance_order[static_cast<std::size_t>(j)]] = along[j] - at_reference;
    return out;
}

// Largest distance at which the anchored profile still exceeds the
// threshold; the profile is strictly decreasing in r so membership is a
// one-sided comparison. Assumes profile(r_anchor) = anchor_amp > threshold.
double usable_radius(double anchor_amp, double r_anchor, double k, double threshold,
                     double r_far) {
    const auto profile = [&](double r) {
        return anchor_amp * (r_anchor / r) * std::exp(-k * (r - r_anchor));
    };
    if (profile(r_far) > threshold) return std::nextafter(r_far, kInf);
    double lo = r_anchor;
    double hi = r_far;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (profile(mid) > threshold ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct BinUse {
    Eigen::Index bin = 0;
    double anchor_amp = 0.0;
    Eigen::Index usable = 0;  // |subset|
};

// Evaluates one candidate: accumulated amplitude/phase penalty sums plus the
// per-bin usable counts. Returns false when no bin survives truncation.
struct CandidateResult {
    double sigma_amp = kInf;
    double sigma_phase = kInf;
    std::vector<BinUse> used;
};

CandidateResult evaluate_candidate(const SpectrumPatch& spec, const Eigen::MatrixXd& amps_by_point,
                                   const Eigen::MatrixXd& phases_by_point, const Vec3& candidate,
                                   const Medium& medium, const DynamicOptions& options,
                                   ReferenceMemo& memo, bool collect_bins) {
    CandidateResult result;
    const Eigen::Index n = spec.size();

    Eigen::ArrayXd r(n);
    for (Eigen::Index p = 0; p < n; ++p) r[p] = (spec.positions.col(p) - candidate).norm();
    Eigen::Index c = 0;
    for (Eigen::Index p = 1; p < n; ++p)
        if (r[p] < r[c]) c = p;
    const double r_anchor = r[c];
    if (!(r_anchor > 0.0)) return result;  // candidate on the patch: rejected

    refresh_reference(spec, c, options.anchor_k, memo);

    // Points ordered by distance from the candidate; prefix = usable subset.
    std::vector<Eigen::Index> by_r(static_cast<std::size_t>(n));
    std::iota(by_r.begin(), by_r.end(), Eigen::Index{0});
    std::sort(by_r.begin(), by_r.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (r[a] != r[b]) return r[a] < r[b];
        return a < b;
    });

    double sigma_amp = 0.0;
    double sigma_phase = 0.0;
    bool any = false;
    std::vector<Eigen::Index> subset;
    for (Eigen::Index bin = 1; bin < spec.bins(); ++bin) {
        double anchor_amp = 0.0;
        for (Eigen::Index nb : memo.neighborhood) anchor_amp += amps_by_point(nb, bin);
        anchor_amp /= static_cast<double>(memo.neighborhood.size());
        if (!(anchor_amp > options.amp_threshold)) continue;

        const double k = thermal_wavenumber(spec.frequency(bin), medium);
        const double rho =
            usable_radius(anchor_amp, r_anchor, k, options.amp_threshold, r[by_r.back()]);
        // Count of points strictly inside the usable radius.
        Eigen::Index m = 0;
        {
            Eigen::Index lo = 0;
            Eigen::Index hi = n;
            while (lo < hi) {
                const Eigen::Index mid = (lo + hi) / 2;
                if (r[by_r[static_cast<std::size_t>(mid)]] < rho) lo = mid + 1;
                else hi = mid;
            }
            m = lo;
        }
        if (m < options.min_patch_points || m == 0) continue;

        any = true;
        const Eigen::VectorXd profile =
            (anchor_amp * (r_anchor / r) * (-k * (r - r_anchor)).exp()).matrix();
        sigma_amp += amplitude_penalty(amps_by_point.col(bin), profile);

        subset.assign(by_r.begin(), by_r.begin() + m);
        const Eigen::VectorXd data_phase = normalized_data_phase(phases_by_point, bin, c, memo);
        const Eigen::VectorXd model_phase = (k * (r_anchor - r)).matrix();
        sigma_phase +=
            phase_penalty(data_phase, model_phase, subset, options.phase_normalization);
        if (collect_bins) result.used.push_back({bin, anchor_amp, m});
    }
    if (!any) return result;
    result.sigma_amp = sigma_amp;
    result.sigma_phase = sigma_phase;
    return result;
}

std::vector<RecoveredBin> recover_spectrum(const SpectrumPatch& spec,
                                           const Eigen::MatrixXd& amps_by_point,
                                           const Eigen::MatrixXd& phases_by_point,
                                           const Vec3& candidate, const Medium& medium,
                                           const DynamicOptions& options, ReferenceMemo& memo) {
    CandidateResult result = evaluate_candidate(spec, amps_by_point, phases_by_point, candidate,
                                                medium, options, memo, true);
    Eigen::Index c = 0;
    {
        double best = kInf;
        for (Eigen::Index p = 0; p < spec.size(); ++p) {
            const double d = (spec.positions.col(p) - candidate).norm();
            if (d < best) {
                best = d;
                c = p;
            }
        }
    }
    refresh_reference(spec, c, options.anchor_k, memo);
    const double r_anchor = (spec.positions.col(c) - candidate).norm();

    std::vector<RecoveredBin> bins;
    bins.reserve(static_cast<std::size_t>(spec.bins() - 1));
    std::size_t next_used = 0;
    for (Eigen::Index bin = 1; bin < spec.bins(); ++bin) {
        RecoveredBin rb;
        rb.frequency = spec.frequency(bin);
        const bool used = next_used < result.used.size() && result.used[next_used].bin == bin;
        if (used) {
            const BinUse& bu = result.used[next_used++];
            Eigen::VectorXd angles(static_cast<Eigen::Index>(memo.neighborhood.size()));
            for (std::size_t j = 0; j < memo.neighborhood.size(); ++j)
                angles[static_cast<Eigen::Index>(j)] =
                    phases_by_point(memo.neighborhood[j], bin);
            double anchor_phase = 0.0;
            try {
                anchor_phase = average_phase(angles);
            } catch (const std::domain_error&) {
                anchor_phase = 0.0;  // dispersed anchor phases: keep the bin, drop the phase
            }
            const Harmonic h =
                recover_harmonic(r_anchor, bu.anchor_amp, anchor_phase, rb.frequency, medium);
            rb.amplitude = h.amplitude;
            rb.phase = h.phase;
            rb.usable_points = bu.usable;
        }
        bins.push_back(rb);
    }
    return bins;
}

}  // namespace

DynamicReconstruction reconstruct_dynamic(const SpectrumPatch& spec, const CandidateGrid& grid,
                                          const Medium& medium, const DynamicOptions& options,
                                          Eigen::VectorXd* amp_field,
                                          Eigen::VectorXd* phase_field) {
    spec.validate();
    medium.validate();
    if (grid.size() == 0) throw ConfigError("reconstruct_dynamic: empty candidate grid");
    if (!(options.amp_threshold >= 0.0))
        throw ConfigError("reconstruct_dynamic: amp_threshold must be >= 0");
    if (options.min_patch_points < 0)
        throw ConfigError("reconstruct_dynamic: min_patch_points must be >= 0");
    if (options.anchor_k < 1 || static_cast<Eigen::Index>(options.anchor_k) > spec.size())
        throw ConfigError("reconstruct_dynamic: anchor_k must be in [1, patch size]");
    if (spec.bins() < 2)
        throw ConfigError("reconstruct_dynamic: spectrum has no oscillatory bins");

    // Bin-major copies: column b is contiguous over points.
    const Eigen::MatrixXd amps_by_point = spec.amplitudes.transpose();
    const Eigen::MatrixXd phases_by_point = spec.phases.transpose();

    const Eigen::Index n = grid.size();
    if (amp_field) amp_field->setConstant(n, kInf);
    if (phase_field) phase_field->setConstant(n, kInf);

    const int nt = resolve_threads(options.threads, n);
    struct Best {
        double value = kInf;
        Eigen::Index index = -1;
    };
    std::vector<Best> best_amp(static_cast<std::size_t>(std::max(nt, 1)));
    std::vector<Best> best_phase(static_cast<std::size_t>(std::max(nt, 1)));

    parallel_blocks(n, options.threads, [&](int slot, Eigen::Index begin, Eigen::Index end) {
        ReferenceMemo memo;
        Best amp_local;
        Best phase_local;
        for (Eigen::Index i = begin; i < end; ++i) {
            const CandidateResult res =
                evaluate_candidate(spec, amps_by_point, phases_by_point, grid.centers.col(i),
                                   medium, options, memo, false);
            if (amp_field) (*amp_field)[i] = res.sigma_amp;
            if (phase_field) (*phase_field)[i] = res.sigma_phase;
            if (res.sigma_amp < amp_local.value) {
                amp_local.value = res.sigma_amp;
                amp_local.index = i;
            }
            if (res.sigma_phase < phase_local.value) {
                phase_local.value = res.sigma_phase;
                phase_local.index = i;
            }
        }
        best_amp[static_cast<std::size_t>(slot)] = amp_local;
        best_phase[static_cast<std::size_t>(slot)] = phase_local;
    });

    const auto merge = [](const std::vector<Best>& parts) {
        Best overall;
        for (const Best& b : parts)
            if (b.index >= 0 &&
                (b.value < overall.value || (b.value == overall.value && b.index < overall.index)))
                overall = b;
        return overall;
    };
    const Best amp_best = merge(best_amp);
    const Best phase_best = merge(best_phase);
    if (amp_best.index < 0)
        throw NoSolutionError(
            "reconstruct_dynamic: every bin was truncated at every candidate (thresholds too "
            "strict for this data)");

    DynamicReconstruction out;
    out.amp_threshold = options.amp_threshold;
    out.min_patch_points = options.min_patch_points;
    ReferenceMemo memo;
    out.location_amp = grid.centers.col(amp_best.index);
    out.amp_index = amp_best.index;
    out.sigma_amp = amp_best.value;
    out.spectrum_amp = recover_spectrum(spec, amps_by_point, phases_by_point, out.location_amp,
                                        medium, options, memo);
    out.location_phase = grid.centers.col(phase_best.index);
    out.phase_index = phase_best.index;
    out.sigma_phase = phase_best.value;
    out.spectrum_phase = recover_spectrum(spec, amps_by_point, phases_by_point, out.location_phase,
                                          medium, options, memo);
    return out;
}

}  // namespace thermolocate
