#include "thermolocate/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "thermolocate/errors.hpp"
#include "thermolocate/version.hpp"

namespace thermolocate {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing required key '") + key + "'");
    return *it;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& item : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* k) { return item.key() == k; }))
            fail(path, "unknown key '" + item.key() + "'");
    }
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double number_at(const json& obj, const char* key, const std::string& path) {
    return number(require(obj, key, path), path + "." + key);
}

double number_or(const json& obj, const char* key, double fallback, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return number(obj.at(key), path + "." + key);
}

int integer_at(const json& obj, const char* key, const std::string& path) {
    const json& j = require(obj, key, path);
    if (!j.is_number_integer()) fail(path + "." + key, "expected an integer");
    return j.get<int>();
}

int integer_or(const json& obj, const char* key, int fallback, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    if (!obj.at(key).is_number_integer()) fail(path + "." + key, "expected an integer");
    return obj.at(key).get<int>();
}

bool boolean_or(const json& obj, const char* key, bool fallback, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) fail(path + "." + key, "expected a boolean");
    return obj.at(key).get<bool>();
}

Vec3 vec3_at(const json& obj, const char* key, const std::string& path) {
    const json& j = require(obj, key, path);
    const std::string p = path + "." + key;
    if (!j.is_array() || j.size() != 3) fail(p, "expected an array of 3 numbers");
    return Vec3(number(j.at(0), p), number(j.at(1), p), number(j.at(2), p));
}

// Power value: {"total": W} or {"density": W/volume} converted with the
// source ball volume.
double power_at(const json& obj, const char* key, double source_radius, const std::string& path) {
    const json& j = require(obj, key, path);
    const std::string p = path + "." + key;
    check_keys(j, {"total", "density"}, p);
    const bool has_total = j.contains("total");
    const bool has_density = j.contains("density");
    if (has_total == has_density) fail(p, "give exactly one of 'total' or 'density'");
    if (has_total) return number(j.at("total"), p + ".total");
    if (!(source_radius > 0.0)) fail(p, "'density' requires a positive source radius");
    const double volume = 4.0 / 3.0 * kPi * source_radius * source_radius * source_radius;
    return number(j.at("density"), p + ".density") * volume;
}

SourceSpec parse_source(const json& j, const std::string& path) {
    check_keys(j, {"center", "radius", "signal"}, path);
    SourceSpec src;
    src.center = vec3_at(j, "center", path);
    src.radius = number_at(j, "radius", path);
    if (!(src.radius >= 0.0)) fail(path + ".radius", "must be >= 0");
    const json& sig = require(j, "signal", path);
    const std::string sp = path + ".signal";
    check_keys(sig, {"dc", "harmonics"}, sp);
    if (sig.contains("dc")) src.signal.dc_offset = power_at(sig, "dc", src.radius, sp);
    if (sig.contains("harmonics")) {
        const json& hs = sig.at("harmonics");
        if (!hs.is_array()) fail(sp + ".harmonics", "expected an array");
        for (std::size_t i = 0; i < hs.size(); ++i) {
            const std::string hp = sp + ".harmonics[" + std::to_string(i) + "]";
            const json& h = hs.at(i);
            check_keys(h, {"amplitude", "frequency", "phase"}, hp);
            Harmonic harm;
            harm.amplitude = power_at(h, "amplitude", src.radius, hp);
            harm.frequency = number_at(h, "frequency", hp);
            harm.phase = wrap_angle(number_or(h, "phase", 0.0, hp));
            src.signal.harmonics.push_back(harm);
        }
        std::sort(src.signal.harmonics.begin(), src.signal.harmonics.end(),
                  [](const Harmonic& a, const Harmonic& b) { return a.frequency < b.frequency; });
    }
    try {
        src.validate();
    } catch (const std::domain_error& e) {
        fail(path, e.what());
    }
    return src;
}

Axis parse_axis(const std::string& s, const std::string& path) {
    if (s == "+x") return Axis::PosX;
    if (s == "-x") return Axis::NegX;
    if (s == "+y") return Axis::PosY;
    if (s == "-y") return Axis::NegY;
    if (s == "+z") return Axis::PosZ;
    if (s == "-z") return Axis::NegZ;
    fail(path, "expected one of +x,-x,+y,-y,+z,-z");
}

Eigen::VectorXd parse_sweep_axis(const json& j, const std::string& path) {
    if (j.is_array()) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
        for (std::size_t i = 0; i < j.size(); ++i)
            v[static_cast<Eigen::Index>(i)] = number(j.at(i), path);
        if (v.size() == 0) fail(path, "axis must be nonempty");
        return v;
    }
    check_keys(j, {"min", "max", "count"}, path);
    const double lo = number_at(j, "min", path);
    const double hi = number_at(j, "max", path);
    const int count = integer_at(j, "count", path);
    if (count < 1) fail(path + ".count", "must be >= 1");
    if (!(hi >= lo)) fail(path, "max must be >= min");
    Eigen::VectorXd v(count);
    for (int i = 0; i < count; ++i)
        v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    return v;
}

std::string stem_of(const std::string& path) {
    const std::size_t slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    const std::size_t dot = name.find_last_of('.');
    if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
    return name;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& name) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        throw ConfigError(name + ":" + std::to_string(line) + ": " + e.what());
    }
    check_keys(root,
               {"units", "medium", "domain", "boundary", "sources", "schedule", "extraction",
                "noise", "reconstruction", "forward", "distinguishability"},
               name);

    ScenarioConfig cfg;
    cfg.config_hash = hash_hex(text);
    cfg.stem = stem_of(name);

    if (root.contains("units")) {
        if (!root.at("units").is_string()) fail(name + ".units", "expected a string");
        cfg.units = root.at("units").get<std::string>();
    }

    if (root.contains("medium")) {
        const json& j = root.at("medium");
        const std::string p = name + ".medium";
        check_keys(j, {"alpha"}, p);
        Medium medium;
        medium.alpha = number_at(j, "alpha", p);
        if (!(medium.alpha > 0.0)) fail(p + ".alpha", "must be > 0");
        cfg.medium = medium;
    }

    if (root.contains("domain")) {
        const json& j = root.at("domain");
        const std::string p = name + ".domain";
        check_keys(j, {"ball_radius", "grid_spacing", "flat_face_normal"}, p);
        DomainSpec dom;
        dom.ball_radius = number_at(j, "ball_radius", p);
        dom.grid_spacing = number_at(j, "grid_spacing", p);
        if (j.contains("flat_face_normal")) {
            if (!j.at("flat_face_normal").is_string())
                fail(p + ".flat_face_normal", "expected a string");
            dom.flat_face_normal =
                parse_axis(j.at("flat_face_normal").get<std::string>(), p + ".flat_face_normal");
        }
        try {
            dom.validate();
        } catch (const std::exception& e) {
            fail(p, e.what());
        }
        cfg.domain = dom;
    }

    if (root.contains("boundary")) {
        const json& j = root.at("boundary");
        const std::string p = name + ".boundary";
        check_keys(j, {"robin_coeff", "ambient"}, p);
        RobinBoundary rb;
        rb.coeff = number_at(j, "robin_coeff", p);
        rb.ambient = number_at(j, "ambient", p);
        if (!(rb.coeff >= 0.0)) fail(p + ".robin_coeff", "must be >= 0");
        cfg.boundary = rb;
    }

    if (root.contains("sources")) {
        const json& j = root.at("sources");
        if (!j.is_array() || j.empty()) fail(name + ".sources", "expected a nonempty array");
        for (std::size_t i = 0; i < j.size(); ++i)
            cfg.sources.push_back(
                parse_source(j.at(i), name + ".sources[" + std::to_string(i) + "]"));
    }

    if (root.contains("schedule")) {
        const json& j = root.at("schedule");
        const std::string p = name + ".schedule";
        check_keys(j, {"stages", "initial_temperature"}, p);
        const json& stages = require(j, "stages", p);
        if (!stages.is_array() || stages.empty())
            fail(p + ".stages", "expected a nonempty array");
        StageSchedule schedule;
        for (std::size_t i = 0; i < stages.size(); ++i) {
            const std::string sp = p + ".stages[" + std::to_string(i) + "]";
            const json& s = stages.at(i);
            check_keys(s, {"dt", "duration", "sample_rate"}, sp);
            Stage stage;
            stage.dt = number_at(s, "dt", sp);
            stage.duration = number_at(s, "duration", sp);
            if (s.contains("sample_rate")) stage.sample_rate = number(s.at("sample_rate"), sp);
            schedule.stages.push_back(stage);
        }
        cfg.schedule = schedule;
        if (j.contains("initial_temperature"))
            cfg.initial_temperature = number(j.at("initial_temperature"), p);
    }

    if (root.contains("extraction")) {
        const json& j = root.at("extraction");
        const std::string p = name + ".extraction";
        check_keys(j, {"radius", "cap_direction", "cap_angle_deg", "angular_spacing"}, p);
        CapGeometry cap;
        cap.radius = number_at(j, "radius", p);
        cap.cap_direction = vec3_at(j, "cap_direction", p);
        cap.cap_angle = number_at(j, "cap_angle_deg", p) * kPi / 180.0;
        cap.angular_spacing = number_or(j, "angular_spacing", 0.02, p);
        try {
            cap.validate();
        } catch (const std::exception& e) {
            fail(p, e.what());
        }
        cfg.extraction = cap;
    }

    if (root.contains("noise")) {
        const json& j = root.at("noise");
        const std::string p = name + ".noise";
        check_keys(j, {"percent", "seed", "literal_variance"}, p);
        cfg.noise.percent = number_or(j, "percent", 0.0, p);
        if (!(cfg.noise.percent >= 0.0)) fail(p + ".percent", "must be >= 0");
        if (j.contains("seed")) {
            if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
                fail(p + ".seed", "expected an integer");
            cfg.noise.seed = j.at("seed").get<std::uint64_t>();
        }
        cfg.noise.literal_variance = boolean_or(j, "literal_variance", false, p);
    }

    if (root.contains("reconstruction")) {
        const json& j = root.at("reconstruction");
        const std::string p = name + ".reconstruction";
        check_keys(j,
                   {"grid", "nav", "amp_threshold", "min_patch_points", "anchor_k",
                    "phase_normalization", "input_basename"},
                   p);
        ReconstructionSpec rec;
        const json& g = require(j, "grid", p);
        const std::string gp = p + ".grid";
        check_keys(g, {"n_r", "n_theta", "n_phi", "r_min", "r_max"}, gp);
        rec.grid.n_r = integer_at(g, "n_r", gp);
        rec.grid.n_theta = integer_at(g, "n_theta", gp);
        rec.grid.n_phi = integer_at(g, "n_phi", gp);
        rec.grid.r_min = number_at(g, "r_min", gp);
        rec.grid.r_max = number_at(g, "r_max", gp);
        rec.nav = integer_or(j, "nav", 10, p);
        if (rec.nav < 1) fail(p + ".nav", "must be >= 1");
        rec.amp_threshold = number_or(j, "amp_threshold", 0.02, p);
        if (!(rec.amp_threshold >= 0.0)) fail(p + ".amp_threshold", "must be >= 0");
        rec.min_patch_points = integer_or(j, "min_patch_points", 900, p);
        if (rec.min_patch_points < 0) fail(p + ".min_patch_points", "must be >= 0");
        rec.anchor_k = integer_or(j, "anchor_k", 9, p);
        if (rec.anchor_k < 1) fail(p + ".anchor_k", "must be >= 1");
        if (j.contains("phase_normalization")) {
            if (!j.at("phase_normalization").is_string())
                fail(p + ".phase_normalization", "expected a string");
            const std::string mode = j.at("phase_normalization").get<std::string>();
            if (mode == "none") rec.phase_normalization = PhaseNormalization::None;
            else if (mode == "std-match") rec.phase_normalization = PhaseNormalization::StdMatch;
            else fail(p + ".phase_normalization", "expected 'none' or 'std-match'");
        }
        if (j.contains("input_basename")) {
            if (!j.at("input_basename").is_string())
                fail(p + ".input_basename", "expected a string");
            rec.input_basename = j.at("input_basename").get<std::string>();
        }
        cfg.reconstruction = rec;
    }

    if (root.contains("forward")) {
        const json& j = root.at("forward");
        const std::string p = name + ".forward";
        check_keys(j, {"points", "times"}, p);
        ForwardSpec fwd;
        const json& pts = require(j, "points", p);
        if (!pts.is_array() || pts.empty()) fail(p + ".points", "expected a nonempty array");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string pp = p + ".points[" + std::to_string(i) + "]";
            const json& pt = pts.at(i);
            if (!pt.is_array() || pt.size() != 3) fail(pp, "expected an array of 3 numbers");
            fwd.points.emplace_back(number(pt.at(0), pp), number(pt.at(1), pp),
                                    number(pt.at(2), pp));
        }
        const json& ts = require(j, "times", p);
        if (!ts.is_array() || ts.empty()) fail(p + ".times", "expected a nonempty array");
        for (std::size_t i = 0; i < ts.size(); ++i)
            fwd.times.push_back(number(ts.at(i), p + ".times"));
        cfg.forward = fwd;
    }

    if (root.contains("distinguishability")) {
        const json& j = root.at("distinguishability");
        const std::string p = name + ".distinguishability";
        check_keys(j, {"power", "source_radius", "depths", "diffusivities", "frequency", "offset"},
                   p);
        DistinguishabilitySpec d;
        d.source_radius = number_at(j, "source_radius", p);
        if (!(d.source_radius >= 0.0)) fail(p + ".source_radius", "must be >= 0");
        d.total_power = power_at(j, "power", d.source_radius, p);
        d.depths = parse_sweep_axis(require(j, "depths", p), p + ".depths");
        d.diffusivities = parse_sweep_axis(require(j, "diffusivities", p), p + ".diffusivities");
        d.frequency = number_or(j, "frequency", 0.0, p);
        if (!(d.frequency >= 0.0)) fail(p + ".frequency", "must be >= 0");
        d.offset = number_or(j, "offset", 0.05, p);
        if (!(d.offset >= 0.0)) fail(p + ".offset", "must be >= 0");
        cfg.distinguishability = d;
    }

    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in && !in.eof()) throw IoError("failed reading config file: " + path);
    return parse_config(ss.str(), path);
}

}  // namespace thermolocate
