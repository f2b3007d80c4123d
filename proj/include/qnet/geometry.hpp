#pragma once

#include <cstddef>
#include <vector>

#include "qnet/rng.hpp"

namespace qnet {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEarthRadiusKm = 6371.0;

// Cartesian position, km.
struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;
};

// Latitude/longitude, degrees.
struct GeoPoint {
    double latitude = 0.0;
    double longitude = 0.0;
};

bool geo_in_bounds(const GeoPoint& p);

/// Samples n points uniformly by area from a disk of radius radius_km centred
/// on the origin. Radial inverse CDF r = R*sqrt(u); two draws per point, in
/// (radius, angle) order. Throws std::invalid_argument for radius <= 0.
std::vector<PlanarPoint> sample_disk(std::size_t n, double radius_km, RngStream& rng);

double euclidean_distance(const PlanarPoint& a, const PlanarPoint& b);

/// Great-circle distance via the haversine formula on a sphere of radius
/// 6371 km. Throws std::invalid_argument when either point lies outside
/// [-90, 90] x [-180, 180].
double geodesic_distance(const GeoPoint& a, const GeoPoint& b);

}  // namespace qnet
