#include "thermolocate/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "thermolocate/errors.hpp"

namespace thermolocate {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

void put_provenance(std::string& buf, const Provenance& prov) {
    buf += "# thermolocate ";
    buf += prov.version;
    buf += "\n# config ";
    buf += prov.config_hash;
    buf += "\n";
}

void put_number(std::string& buf, double v) { buf += format_number(v); }

void finish(std::ofstream& out, const std::string& buf, const std::string& path) {
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

// Splits one CSV data row into doubles; returns false on blank lines.
bool parse_row(const std::string& line, std::vector<double>& row) {
    row.clear();
    const char* p = line.c_str();
    if (*p == '\0') return false;
    while (true) {
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p) throw IoError("malformed CSV number in row: " + line);
        row.push_back(v);
        p = end;
        while (*p == ' ') ++p;
        if (*p == '\0') return true;
        if (*p != ',') throw IoError("malformed CSV separator in row: " + line);
        ++p;
    }
}

// Reads a patch CSV: skips '#' comments, checks the header, returns rows.
std::vector<std::vector<double>> read_csv_rows(const std::string& path,
                                               const std::string& expected_header) {
    std::ifstream in = open_in(path);
    std::string line;
    bool header_seen = false;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != expected_header)
                throw DataMismatchError("unexpected CSV header in " + path + ": got '" + line +
                                        "', expected '" + expected_header + "'");
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        if (parse_row(line, row)) rows.push_back(std::move(row));
    }
    if (!header_seen) throw DataMismatchError("missing CSV header in " + path);
    return rows;
}

json provenance_json(const Provenance& prov) {
    return json{{"version", prov.version}, {"config_hash", prov.config_hash}};
}

Provenance provenance_from(const json& j) {
    Provenance p;
    p.version = j.value("version", "");
    p.config_hash = j.value("config_hash", "");
    return p;
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

void write_static_patch_csv(const std::string& path, const MeasurementPatch& patch,
                            const Provenance& prov) {
    patch.validate();
    std::ofstream out = open_out(path);
    std::string buf;
    buf.reserve(static_cast<std::size_t>(patch.size()) * 64 + 128);
    put_provenance(buf, prov);
    buf += "x,y,z,T\n";
    for (Eigen::Index p = 0; p < patch.size(); ++p) {
        put_number(buf, patch.positions(0, p));
        buf += ',';
        put_number(buf, patch.positions(1, p));
        buf += ',';
        put_number(buf, patch.positions(2, p));
        buf += ',';
        put_number(buf, patch.temperatures[p]);
        buf += '\n';
    }
    finish(out, buf, path);
}

void write_dynamic_patch_csv(const std::string& path, const DynamicPatch& patch,
                             const Provenance& prov) {
    patch.validate();
    std::ofstream out = open_out(path);
    std::string buf;
    buf.reserve(static_cast<std::size_t>(patch.size()) *
                    (static_cast<std::size_t>(patch.samples()) + 3) * 20 +
                128);
    put_provenance(buf, prov);
    buf += "x,y,z";
    for (Eigen::Index k = 0; k < patch.samples(); ++k) {
        buf += ",t";
        buf += std::to_string(k);
    }
    buf += '\n';
    for (Eigen::Index p = 0; p < patch.size(); ++p) {
        put_number(buf, patch.positions(0, p));
        buf += ',';
        put_number(buf, patch.positions(1, p));
        buf += ',';
        put_number(buf, patch.positions(2, p));
        for (Eigen::Index k = 0; k < patch.samples(); ++k) {
            buf += ',';
            put_number(buf, patch.series(k, p));
        }
        buf += '\n';
    }
    finish(out, buf, path);
}

void write_manifest(const std::string& path, const PatchManifest& manifest) {
    json j{{"type", manifest.type},
           {"n_points", manifest.n_points},
           {"extraction_radius", manifest.extraction_radius},
           {"cap_direction", vec3_json(manifest.cap_direction)},
           {"cap_angle", manifest.cap_angle},
           {"provenance", provenance_json(manifest.provenance)}};
    if (manifest.type == "dynamic") {
        j["sample_rate"] = manifest.sample_rate;
        j["n_samples"] = manifest.n_samples;
    }
    std::ofstream out = open_out(path);
    const std::string text = j.dump(2) + "\n";
    finish(out, text, path);
}

PatchManifest read_manifest(const std::string& path) {
    std::ifstream in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataMismatchError("manifest " + path + " is not valid JSON: " + e.what());
    }
    PatchManifest m;
    try {
        m.type = j.at("type").get<std::string>();
        m.n_points = j.at("n_points").get<Eigen::Index>();
        m.extraction_radius = j.at("extraction_radius").get<double>();
        const json& d = j.at("cap_direction");
        m.cap_direction = Vec3(d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>());
        m.cap_angle = j.at("cap_angle").get<double>();
        if (m.type == "dynamic") {
            m.sample_rate = j.at("sample_rate").get<double>();
            m.n_samples = j.at("n_samples").get<Eigen::Index>();
        }
        if (j.contains("provenance")) m.provenance = provenance_from(j.at("provenance"));
    } catch (const json::exception& e) {
        throw DataMismatchError("manifest " + path + " is missing fields: " + e.what());
    }
    if (m.type != "static" && m.type != "dynamic")
        throw DataMismatchError("manifest " + path + ": unknown type '" + m.type + "'");
    return m;
}

MeasurementPatch read_static_patch_csv(const std::string& path, const PatchManifest& manifest) {
    if (manifest.type != "static")
        throw DataMismatchError("manifest declares type '" + manifest.type +
                                "' but a static patch was requested");
    const auto rows = read_csv_rows(path, "x,y,z,T");
    if (static_cast<Eigen::Index>(rows.size()) != manifest.n_points)
        throw DataMismatchError(path + ": row count " + std::to_string(rows.size()) +
                                " does not match manifest n_points " +
                                std::to_string(manifest.n_points));
    MeasurementPatch patch;
    patch.extraction_radius = manifest.extraction_radius;
    patch.positions.resize(3, static_cast<Eigen::Index>(rows.size()));
    patch.temperatures.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 4)
            throw DataMismatchError(path + ": static patch rows need 4 columns");
        const auto p = static_cast<Eigen::Index>(i);
        patch.positions.col(p) = Vec3(rows[i][0], rows[i][1], rows[i][2]);
        patch.temperatures[p] = rows[i][3];
        const double r = patch.positions.col(p).norm();
        if (std::abs(r - manifest.extraction_radius) > 1e-6 * manifest.extraction_radius + 1e-9)
            throw DataMismatchError(path + ": point off the declared extraction sphere");
    }
    return patch;
}

DynamicPatch read_dynamic_patch_csv(const std::string& path, const PatchManifest& manifest) {
    if (manifest.type != "dynamic")
        throw DataMismatchError("manifest declares type '" + manifest.type +
                                "' but a dynamic patch was requested");
    std::string header = "x,y,z";
    for (Eigen::Index k = 0; k < manifest.n_samples; ++k) header += ",t" + std::to_string(k);
    const auto rows = read_csv_rows(path, header);
    if (static_cast<Eigen::Index>(rows.size()) != manifest.n_points)
        throw DataMismatchError(path + ": row count " + std::to_string(rows.size()) +
                                " does not match manifest n_points " +
                                std::to_string(manifest.n_points));
    DynamicPatch patch;
    patch.extraction_radius = manifest.extraction_radius;
    patch.sample_rate = manifest.sample_rate;
    patch.positions.resize(3, static_cast<Eigen::Index>(rows.size()));
    patch.series.resize(manifest.n_samples, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != 3 + manifest.n_samples)
            throw DataMismatchError(path + ": dynamic patch row has wrong frame count");
        const auto p = static_cast<Eigen::Index>(i);
        patch.positions.col(p) = Vec3(rows[i][0], rows[i][1], rows[i][2]);
        for (Eigen::Index k = 0; k < manifest.n_samples; ++k)
            patch.series(k, p) = rows[i][static_cast<std::size_t>(3 + k)];
        const double r = patch.positions.col(p).norm();
        if (std::abs(r - manifest.extraction_radius) > 1e-6 * manifest.extraction_radius + 1e-9)
            throw DataMismatchError(path + ": point off the declared extraction sphere");
    }
    return patch;
}

void write_spectrum_csv(const std::string& path, const SpectrumPatch& spec, double min_amplitude,
                        const Provenance& prov) {
    spec.validate();
    std::vector<Eigen::Index> bins;
    for (Eigen::Index n = 0; n < spec.bins(); ++n)
        if (spec.amplitudes.row(n).maxCoeff() > min_amplitude) bins.push_back(n);
    std::ofstream out = open_out(path);
    std::string buf;
    buf.reserve(bins.size() * static_cast<std::size_t>(spec.size()) * 72 + 128);
    put_provenance(buf, prov);
    buf += "x,y,z,bin,freq,amplitude,phase\n";
    for (Eigen::Index p = 0; p < spec.size(); ++p)
        for (Eigen::Index n : bins) {
            put_number(buf, spec.positions(0, p));
            buf += ',';
            put_number(buf, spec.positions(1, p));
            buf += ',';
            put_number(buf, spec.positions(2, p));
            buf += ',';
            buf += std::to_string(n);
            buf += ',';
            put_number(buf, spec.frequency(n));
            buf += ',';
            put_number(buf, spec.amplitudes(n, p));
            buf += ',';
            put_number(buf, spec.phases(n, p));
            buf += '\n';
        }
    finish(out, buf, path);
}

void write_penalty_field_csv(const std::string& path, const CandidateGrid& grid,
                             const Eigen::VectorXd& penalties, const Provenance& prov) {
    if (penalties.size() != grid.size())
        throw std::domain_error("penalty field size does not match the grid");
    std::ofstream out = open_out(path);
    std::string buf;
    buf.reserve(static_cast<std::size_t>(grid.size()) * 48 + 128);
    put_provenance(buf, prov);
    buf += "r,theta,phi,epsilon\n";
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        double r = 0.0;
        double theta = 0.0;
        double phi = 0.0;
        grid.spherical(i, r, theta, phi);
        put_number(buf, r);
        buf += ',';
        put_number(buf, theta);
        buf += ',';
        put_number(buf, phi);
        buf += ',';
        put_number(buf, penalties[i]);
        buf += '\n';
    }
    finish(out, buf, path);
}

void write_distinguishability_csv(const std::string& path, const DistinguishabilityMap& map,
                                  const Provenance& prov) {
    std::ofstream out = open_out(path);
    std::string buf;
    buf.reserve(static_cast<std::size_t>(map.values.size()) * 48 + 128);
    put_provenance(buf, prov);
    buf += "depth,alpha,freq,deltaT\n";
    for (Eigen::Index i = 0; i < map.depths.size(); ++i)
        for (Eigen::Index j = 0; j < map.diffusivities.size(); ++j) {
            put_number(buf, map.depths[i]);
            buf += ',';
            put_number(buf, map.diffusivities[j]);
            buf += ',';
            put_number(buf, map.frequency);
            buf += ',';
            put_number(buf, map.values(i, j));
            buf += '\n';
        }
    finish(out, buf, path);
}

namespace {

json grid_json(const CandidateGrid& grid, const GridMetadata& meta) {
    return json{{"n_r", meta.n_r},
                {"n_theta", meta.n_theta},
                {"n_phi", meta.n_phi},
                {"r_min", meta.r_min},
                {"r_max", meta.r_max},
                {"count", grid.size()},
                {"cap_direction", vec3_json(grid.cap_direction)}};
}

json spectrum_json(const std::vector<RecoveredBin>& bins) {
    json arr = json::array();
    for (const RecoveredBin& b : bins)
        arr.push_back(json{{"frequency", b.frequency},
                           {"amplitude", b.amplitude},
                           {"phase", b.phase},
                           {"usable_points", b.usable_points}});
    return arr;
}

}  // namespace

void write_static_report(const std::string& path, const StaticReconstruction& result,
                         const CandidateGrid& grid, const GridMetadata& meta,
                         const Provenance& prov) {
    json j{{"provenance", provenance_json(prov)},
           {"type", "static"},
           {"grid", grid_json(grid, meta)},
           {"location", vec3_json(result.location)},
           {"grid_index", result.grid_index},
           {"power", result.power},
           {"baseline", result.baseline},
           {"penalty", result.penalty}};
    std::ofstream out = open_out(path);
    const std::string text = j.dump(2) + "\n";
    finish(out, text, path);
}

void write_dynamic_report(const std::string& path, const DynamicReconstruction& result,
                          const CandidateGrid& grid, const GridMetadata& meta,
                          const Provenance& prov) {
    json j{{"provenance", provenance_json(prov)},
           {"type", "dynamic"},
           {"grid", grid_json(grid, meta)},
           {"amp_threshold", result.amp_threshold},
           {"min_patch_points", result.min_patch_points},
           {"amplitude_criterion",
            json{{"location", vec3_json(result.location_amp)},
                 {"grid_index", result.amp_index},
                 {"sigma", result.sigma_amp},
                 {"spectrum", spectrum_json(result.spectrum_amp)}}},
           {"phase_criterion",
            json{{"location", vec3_json(result.location_phase)},
                 {"grid_index", result.phase_index},
                 {"sigma", result.sigma_phase},
                 {"spectrum", spectrum_json(result.spectrum_phase)}}}};
    std::ofstream out = open_out(path);
    const std::string text = j.dump(2) + "\n";
    finish(out, text, path);
}

}  // namespace thermolocate
