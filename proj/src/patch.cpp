#include "thermolocate/patch.hpp"

#include <cmath>
#include <stdexcept>

namespace thermolocate {

void CapGeometry::validate() const {
    if (!(radius > 0.0)) throw std::domain_error("CapGeometry: radius must be > 0");
    if (!(cap_direction.norm() > 0.0))
        throw std::domain_error("CapGeometry: cap_direction must be nonzero");
    if (!(cap_angle > 0.0 && cap_angle <= kPi))
        throw std::domain_error("CapGeometry: cap_angle must lie in (0, pi]");
    if (!(angular_spacing > 0.0))
        throw std::domain_error("CapGeometry: angular_spacing must be > 0");
}

int cap_point_count(const CapGeometry& cap) {
    cap.validate();
    const double solid_angle = 2.0 * kPi * (1.0 - std::cos(cap.cap_angle));
    const int n = static_cast<int>(std::lround(solid_angle / (cap.angular_spacing * cap.angular_spacing)));
    return std::max(n, 1);
}

Eigen::Matrix3d frame_from_axis(const Vec3& axis) {
    const Vec3 n = axis.normalized();
    Vec3 seed = std::abs(n.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    const Vec3 u = seed.cross(n).normalized();
    const Vec3 v = n.cross(u);
    Eigen::Matrix3d f;
    f.col(0) = u;
    f.col(1) = v;
    f.col(2) = n;
    return f;
}

Eigen::Matrix3Xd cap_points(const CapGeometry& cap) {
    const int n = cap_point_count(cap);
    const Eigen::Matrix3d frame = frame_from_axis(cap.cap_direction);
    const double cos_cap = std::cos(cap.cap_angle);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    Eigen::Matrix3Xd pts(3, n);
    for (int i = 0; i < n; ++i) {
        // Uniform in cos(theta) over [cos_cap, 1]: equal-area rings.
        const double c = 1.0 - (1.0 - cos_cap) * (i + 0.5) / n;
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        const double az = golden * i;
        const Vec3 local(s * std::cos(az), s * std::sin(az), c);
        pts.col(i) = cap.radius * (frame * local);
    }
    return pts;
}

void MeasurementPatch::validate() const {
    if (positions.cols() != temperatures.size())
        throw std::domain_error("MeasurementPatch: positions/temperatures size mismatch");
    if (positions.cols() == 0) throw std::domain_error("MeasurementPatch: empty patch");
    if (!(extraction_radius > 0.0))
        throw std::domain_error("MeasurementPatch: extraction_radius must be > 0");
}

void DynamicPatch::validate() const {
    if (positions.cols() != series.cols())
        throw std::domain_error("DynamicPatch: positions/series size mismatch");
    if (positions.cols() == 0) throw std::domain_error("DynamicPatch: empty patch");
    if (series.rows() < 2) throw std::domain_error("DynamicPatch: needs at least two samples");
    if (!(sample_rate > 0.0)) throw std::domain_error("DynamicPatch: sample_rate must be > 0");
    if (!(extraction_radius > 0.0))
        throw std::domain_error("DynamicPatch: extraction_radius must be > 0");
}

}  // namespace thermolocate
