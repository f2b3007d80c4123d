#include "qnet/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace qnet {

bool geo_in_bounds(const GeoPoint& p) {
    return p.latitude >= -90.0 && p.latitude <= 90.0 && p.longitude >= -180.0 &&
           p.longitude <= 180.0;
}

std::vector<PlanarPoint> sample_disk(std::size_t n, double radius_km, RngStream& rng) {
    if (!(radius_km > 0.0))
        throw std::invalid_argument("sample_disk: radius must be positive");
    std::vector<PlanarPoint> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = radius_km * std::sqrt(rng.uniform01());
        const double theta = 2.0 * kPi * rng.uniform01();
        points.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
    return points;
}

double euclidean_distance(const PlanarPoint& a, const PlanarPoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

double geodesic_distance(const GeoPoint& a, const GeoPoint& b) {
    if (!geo_in_bounds(a) || !geo_in_bounds(b))
        throw std::invalid_argument("geodesic_distance: coordinates out of range");
    const double deg = kPi / 180.0;
    const double phi1 = a.latitude * deg;
    const double phi2 = b.latitude * deg;
    const double dphi = (b.latitude - a.latitude) * deg;
    const double dlam = (b.longitude - a.longitude) * deg;
    const double sp = std::sin(0.5 * dphi);
    const double sl = std::sin(0.5 * dlam);
    const double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace qnet
