#include "thermolocate/simulator.hpp"

#include <cmath>
#include <random>

#include "thermolocate/errors.hpp"

namespace thermolocate {

namespace {

Vec3 axis_vector(Axis a) {
    switch (a) {
        case Axis::PosX: return Vec3::UnitX();
        case Axis::NegX: return -Vec3::UnitX();
        case Axis::PosY: return Vec3::UnitY();
        case Axis::NegY: return -Vec3::UnitY();
        case Axis::PosZ: return Vec3::UnitZ();
        case Axis::NegZ: return -Vec3::UnitZ();
    }
    return Vec3::UnitZ();
}

double stability_limit(const DomainSpec& domain, const Medium& medium) {
    return 0.9 * domain.grid_spacing * domain.grid_spacing / (6.0 * medium.alpha);
}

}  // namespace

void DomainSpec::validate() const {
    if (!(ball_radius > 0.0)) throw ConfigError("domain: ball_radius must be > 0");
    if (!(grid_spacing > 0.0)) throw ConfigError("domain: grid_spacing must be > 0");
    if (ball_radius / grid_spacing < 10.0)
        throw ConfigError("domain: ball_radius / grid_spacing must be >= 10");
}

void RobinBoundary::validate(const DomainSpec& domain) const {
    if (!(coeff >= 0.0)) throw ConfigError("boundary: robin coefficient must be >= 0");
    if (coeff * domain.grid_spacing > 2.0)
        throw ConfigError("boundary: robin coefficient too large for the grid spacing "
                          "(ghost extrapolation requires coeff * h <= 2)");
}

void StageSchedule::validate(const DomainSpec& domain, const Medium& medium) const {
    if (stages.empty()) throw ConfigError("schedule: at least one stage required");
    const double dt_max = stability_limit(domain, medium);
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const Stage& s = stages[i];
        const std::string tag = "schedule stage " + std::to_string(i);
        if (!(s.dt > 0.0)) throw ConfigError(tag + ": dt must be > 0");
        if (!(s.duration >= 0.0)) throw ConfigError(tag + ": duration must be >= 0");
        if (s.dt > dt_max)
            throw StabilityError(tag + ": dt " + std::to_string(s.dt) +
                                 " exceeds the explicit stability bound " + std::to_string(dt_max));
        if (s.sample_rate) {
            if (!(*s.sample_rate > 0.0)) throw ConfigError(tag + ": sample_rate must be > 0");
            if (*s.sample_rate > 1.0 / s.dt + 1e-12)
                throw ConfigError(tag + ": sample_rate exceeds 1/dt");
            const double steps_per_frame = 1.0 / (*s.sample_rate * s.dt);
            if (std::abs(steps_per_frame - std::lround(steps_per_frame)) > 1e-9)
                throw ConfigError(tag + ": 1/sample_rate must be an integer multiple of dt");
        }
    }
}

std::int32_t HalfBallGrid::full_index(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= dims_[0] || j >= dims_[1] || k >= dims_[2]) return -1;
    return static_cast<std::int32_t>((static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i);
}

HalfBallGrid::HalfBallGrid(const DomainSpec& spec) : spec_(spec) {
    spec_.validate();
    const double R = spec_.ball_radius;
    const double h = spec_.grid_spacing;
    const Vec3 n = axis_vector(spec_.flat_face_normal);

    // Bounding box of the half ball: full extent across the cut plane's
    // tangent directions, half along the normal.
    const int full = static_cast<int>(std::ceil(2.0 * R / h));
    const int half = static_cast<int>(std::ceil(R / h));
    Vec3 lo;
    for (int d = 0; d < 3; ++d) {
        if (n[d] > 0.5) {
            dims_[d] = half;
            lo[d] = 0.0;
        } else if (n[d] < -0.5) {
            dims_[d] = half;
            lo[d] = -half * h;
        } else {
            dims_[d] = full;
            lo[d] = -0.5 * full * h;
        }
    }
    origin_ = lo + 0.5 * h * Vec3::Ones();

    const std::size_t n_full =
        static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
    compact_.assign(n_full, -1);

    std::vector<Vec3> centers;
    for (int k = 0; k < dims_[2]; ++k)
        for (int j = 0; j < dims_[1]; ++j)
            for (int i = 0; i < dims_[0]; ++i) {
                const Vec3 c = origin_ + h * Vec3(i, j, k);
                if (c.norm() <= R && c.dot(n) >= 0.0) {
                    compact_[static_cast<std::size_t>(full_index(i, j, k))] =
                        static_cast<std::int32_t>(centers.size());
                    centers.push_back(c);
                }
            }

    centers_.resize(3, static_cast<Eigen::Index>(centers.size()));
    for (std::size_t c = 0; c < centers.size(); ++c)
        centers_.col(static_cast<Eigen::Index>(c)) = centers[c];

    neighbors_.assign(centers.size() * 6, -1);
    boundary_faces_.assign(centers.size(), 0);
    static const int offsets[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                      {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
    for (int k = 0; k < dims_[2]; ++k)
        for (int j = 0; j < dims_[1]; ++j)
            for (int i = 0; i < dims_[0]; ++i) {
                const std::int32_t c = compact_[static_cast<std::size_t>(full_index(i, j, k))];
                if (c < 0) continue;
                int n_boundary = 0;
                for (int f = 0; f < 6; ++f) {
                    const std::int32_t fi =
                        full_index(i + offsets[f][0], j + offsets[f][1], k + offsets[f][2]);
                    const std::int32_t nb = fi < 0 ? -1 : compact_[static_cast<std::size_t>(fi)];
                    neighbors_[static_cast<std::size_t>(6 * c + f)] = nb;
                    if (nb < 0) ++n_boundary;
                }
                boundary_faces_[static_cast<std::size_t>(c)] =
                    static_cast<std::uint8_t>(n_boundary);
            }
}

HalfBallGrid build_domain(const DomainSpec& spec) { return HalfBallGrid(spec); }

std::int32_t HalfBallGrid::locate(const Vec3& x) const {
    const double h = spec_.grid_spacing;
    const Vec3 u = (x - origin_) / h;
    const int i = static_cast<int>(std::lround(u.x()));
    const int j = static_cast<int>(std::lround(u.y()));
    const int k = static_cast<int>(std::lround(u.z()));
    const std::int32_t fi = full_index(i, j, k);
    return fi < 0 ? -1 : compact_[static_cast<std::size_t>(fi)];
}

double HalfBallGrid::interpolate(const Eigen::ArrayXd& field, const Vec3& x) const {
    const double h = spec_.grid_spacing;
    const Vec3 u = (x - origin_) / h;
    const int i0 = static_cast<int>(std::floor(u.x()));
    const int j0 = static_cast<int>(std::floor(u.y()));
    const int k0 = static_cast<int>(std::floor(u.z()));
    const double fx = u.x() - i0;
    const double fy = u.y() - j0;
    const double fz = u.z() - k0;

    double value = 0.0;
    double weight = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                const std::int32_t fi = full_index(i0 + di, j0 + dj, k0 + dk);
                const std::int32_t c = fi < 0 ? -1 : compact_[static_cast<std::size_t>(fi)];
                if (c < 0) continue;
                const double w = (di ? fx : 1.0 - fx) * (dj ? fy : 1.0 - fy) * (dk ? fz : 1.0 - fz);
                value += w * field[c];
                weight += w;
            }
    if (weight <= 0.0)
        throw std::domain_error("interpolate: point has no interior neighbors (outside domain)");
    return value / weight;
}

SourceCells collect_source_cells(const HalfBallGrid& grid, const SourceSpec& source) {
    source.validate();
    SourceCells sc;
    sc.source = &source;
    const double r2 = source.radius * source.radius;
    for (Eigen::Index c = 0; c < grid.interior_count(); ++c)
        if ((grid.center(c) - source.center).squaredNorm() <= r2)
            sc.cells.push_back(static_cast<std::int32_t>(c));
    if (sc.cells.empty())
        throw ConfigError("source: no grid cell center lies within the source radius");
    sc.density_factor = 1.0 / (static_cast<double>(sc.cells.size()) * grid.cell_volume());
    return sc;
}

void step_heat(const HalfBallGrid& grid, const Medium& medium, const RobinBoundary& robin,
               const std::vector<SourceCells>& sources, double t, double dt,
               const Eigen::ArrayXd& field, Eigen::ArrayXd& next) {
    const double h = grid.spacing();
    if (dt > stability_limit(grid.spec(), medium) * (1.0 + 1e-12))
        throw StabilityError("step_heat: dt exceeds the explicit stability bound");
    const double mu = medium.alpha * dt / (h * h);
    // Robin ghost: T_g = T_i + h * coeff * (ambient - T_i), so each boundary
    // face contributes alpha * coeff * (ambient - T_i) / h to dT/dt.
    const double robin_rate = medium.alpha * robin.coeff * dt / h;

    const Eigen::Index n = grid.interior_count();
    next.resize(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const double Tc = field[c];
        double acc = 0.0;
        int n_boundary = 0;
        for (int f = 0; f < 6; ++f) {
            const std::int32_t nb = grid.neighbor(c, f);
            if (nb >= 0) acc += field[nb] - Tc;
            else ++n_boundary;
        }
        next[c] = Tc + mu * acc + robin_rate * n_boundary * (robin.ambient - Tc);
    }

    const double t_mid = t + 0.5 * dt;
    for (const SourceCells& sc : sources) {
        const double q = (*sc.source).signal(t_mid) * sc.density_factor;
        for (std::int32_t c : sc.cells) next[c] += dt * q;
    }
}

StageRunResult run_stages(const HalfBallGrid& grid, const Medium& medium,
                          const RobinBoundary& robin, const std::vector<SourceSpec>& sources,
                          const StageSchedule& schedule, double initial_temperature) {
    medium.validate();
    robin.validate(grid.spec());
    schedule.validate(grid.spec(), medium);

    std::vector<SourceCells> cells;
    cells.reserve(sources.size());
    for (const SourceSpec& s : sources) cells.push_back(collect_source_cells(grid, s));

    StageRunResult out;
    out.final_field = Eigen::ArrayXd::Constant(grid.interior_count(), initial_temperature);
    Eigen::ArrayXd next(grid.interior_count());

    std::vector<Eigen::ArrayXd> frames;
    double stage_start = 0.0;
    for (const Stage& stage : schedule.stages) {
        const long n_steps = std::lround(stage.duration / stage.dt);
        long steps_per_frame = 0;
        if (stage.sample_rate) {
            steps_per_frame = std::lround(1.0 / (*stage.sample_rate * stage.dt));
            out.sample_rate = *stage.sample_rate;
        }
        for (long s = 0; s < n_steps; ++s) {
            const double t = stage_start + s * stage.dt;
            if (steps_per_frame > 0 && s % steps_per_frame == 0) {
                frames.push_back(out.final_field);
                out.frame_times.push_back(t);
            }
            step_heat(grid, medium, robin, cells, t, stage.dt, out.final_field, next);
            out.final_field.swap(next);
        }
        stage_start += n_steps * stage.dt;
    }

    out.frames.resize(grid.interior_count(), static_cast<Eigen::Index>(frames.size()));
    for (std::size_t f = 0; f < frames.size(); ++f)
        out.frames.col(static_cast<Eigen::Index>(f)) = frames[f].matrix();
    return out;
}

MeasurementPatch extract_patch(const HalfBallGrid& grid, const Eigen::ArrayXd& field,
                               const CapGeometry& cap) {
    cap.validate();
    if (!(cap.radius < grid.spec().ball_radius))
        throw ConfigError("extraction: radius must lie strictly inside the ball");
    MeasurementPatch patch;
    patch.positions = cap_points(cap);
    patch.extraction_radius = cap.radius;
    patch.temperatures.resize(patch.positions.cols());
    for (Eigen::Index p = 0; p < patch.positions.cols(); ++p)
        patch.temperatures[p] = grid.interpolate(field, patch.positions.col(p));
    return patch;
}

DynamicPatch extract_patch(const HalfBallGrid& grid, const StageRunResult& run,
                           const CapGeometry& cap) {
    cap.validate();
    if (!(cap.radius < grid.spec().ball_radius))
        throw ConfigError("extraction: radius must lie strictly inside the ball");
    if (!run.sample_rate || run.frames.cols() == 0)
        throw ConfigError("extraction: the schedule collected no frames");
    DynamicPatch patch;
    patch.positions = cap_points(cap);
    patch.extraction_radius = cap.radius;
    patch.sample_rate = *run.sample_rate;
    patch.series.resize(run.frames.cols(), patch.positions.cols());
    Eigen::ArrayXd frame(grid.interior_count());
    for (Eigen::Index f = 0; f < run.frames.cols(); ++f) {
        frame = run.frames.col(f).array();
        for (Eigen::Index p = 0; p < patch.positions.cols(); ++p)
            patch.series(f, p) = grid.interpolate(frame, patch.positions.col(p));
    }
    return patch;
}

namespace {

double noise_sd(double percent, double range, bool literal_variance) {
    if (!(percent >= 0.0)) throw std::domain_error("add_noise: percent must be >= 0");
    const double level = percent * range;
    return literal_variance ? std::sqrt(level) : level;
}

}  // namespace

void add_noise(MeasurementPatch& patch, double percent, std::uint64_t seed,
               bool literal_variance) {
    patch.validate();
    if (percent == 0.0) return;
    const double range = patch.temperatures.maxCoeff() - patch.temperatures.minCoeff();
    const double sd = noise_sd(percent, range, literal_variance);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sd);
    for (Eigen::Index p = 0; p < patch.size(); ++p) patch.temperatures[p] += gauss(rng);
}

void add_noise(DynamicPatch& patch, double percent, std::uint64_t seed, bool literal_variance) {
    patch.validate();
    if (percent == 0.0) return;
    const double range = patch.series.maxCoeff() - patch.series.minCoeff();
    const double sd = noise_sd(percent, range, literal_variance);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sd);
    for (Eigen::Index p = 0; p < patch.size(); ++p)
        for (Eigen::Index k = 0; k < patch.samples(); ++k) patch.series(k, p) += gauss(rng);
}

void detrend(Eigen::Ref<Eigen::VectorXd> series, double sample_rate) {
    const Eigen::Index n = series.size();
    if (n < 3) throw std::domain_error("detrend: needs at least three samples");
    if (!(sample_rate > 0.0)) throw std::domain_error("detrend: sample_rate must be > 0");
    const double dt = 1.0 / sample_rate;
    const double t_mean = 0.5 * dt * static_cast<double>(n - 1);
    double stt = 0.0;
    double sty = 0.0;
    const double y_mean = series.mean();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double tc = k * dt - t_mean;
        stt += tc * tc;
        sty += tc * (series[k] - y_mean);
    }
    const double slope = sty / stt;
    for (Eigen::Index k = 0; k < n; ++k) series[k] -= y_mean + slope * (k * dt - t_mean);
}

void detrend(DynamicPatch& patch) {
    patch.validate();
    for (Eigen::Index p = 0; p < patch.size(); ++p)
        detrend(patch.series.col(p), patch.sample_rate);
}

}  // namespace thermolocate
