#include "thermolocate/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "thermolocate/model.hpp"

namespace thermolocate {

namespace {

void check_geometry(double source_radius, double depth, double offset) {
    if (!(source_radius >= 0.0))
        throw std::domain_error("distinguishability: source radius must be >= 0");
    if (!(depth > source_radius))
        throw std::domain_error("distinguishability: depth must exceed the source radius");
    if (!(offset >= 0.0)) throw std::domain_error("distinguishability: offset must be >= 0");
}

}  // namespace

double static_distinguishability(double total_power, double source_radius, double depth,
                                 const Medium& medium, double offset) {
    medium.validate();
    check_geometry(source_radius, depth, offset);
    const double far = std::hypot(depth, offset);
    return total_power / (4.0 * kPi * medium.alpha) * (1.0 / depth - 1.0 / far);
}

double dynamic_distinguishability(double total_amplitude, double source_radius, double depth,
                                  double freq, const Medium& medium, double offset) {
    medium.validate();
    check_geometry(source_radius, depth, offset);
    if (!(freq >= 0.0)) throw std::domain_error("distinguishability: frequency must be >= 0");
    const double far = std::hypot(depth, offset);
    return total_amplitude * (steady_spectral_response(depth, freq, medium).gain -
                              steady_spectral_response(far, freq, medium).gain);
}

DistinguishabilityMap distinguishability_map(double total_power, double source_radius,
                                             const Eigen::VectorXd& depths,
                                             const Eigen::VectorXd& diffusivities, double freq,
                                             double offset) {
    if (depths.size() == 0 || diffusivities.size() == 0)
        throw std::domain_error("distinguishability map: empty axis");
    DistinguishabilityMap map;
    map.depths = depths;
    map.diffusivities = diffusivities;
    map.frequency = freq;
    map.offset = offset;
    map.values.resize(depths.size(), diffusivities.size());
    for (Eigen::Index j = 0; j < diffusivities.size(); ++j) {
        const Medium medium{diffusivities[j]};
        for (Eigen::Index i = 0; i < depths.size(); ++i)
            map.values(i, j) =
                freq > 0.0
                    ? dynamic_distinguishability(total_power, source_radius, depths[i], freq,
                                                 medium, offset)
                    : static_distinguishability(total_power, source_radius, depths[i], medium,
                                                offset);
    }
    return map;
}

}  // namespace thermolocate
