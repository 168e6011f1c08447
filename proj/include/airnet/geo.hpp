#pragma once
#include <cmath>
#include <utility>
#include <vector>

namespace airnet {

// Mean earth radius in nautical miles.
inline constexpr double kEarthRadiusNm = 3440.065;
// Nautical miles per degree of latitude (and of longitude at the equator).
inline constexpr double kNmPerDegree = 60.0;

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

inline double deg2rad(double d) { return d * M_PI / 180.0; }

// Great-circle distance in NM (haversine).
double gc_distance_nm(const LatLon& a, const LatLon& b);

// Local flat-earth projection about a reference point: x east, y north, in NM.
// Good for distances well under a few hundred NM, which is all we need for
// grid bookkeeping and cross-track offsets.
struct LocalProjection {
    double lat0, lon0, coslat0;
    explicit LocalProjection(const LatLon& ref)
        : lat0(ref.lat), lon0(ref.lon), coslat0(std::cos(deg2rad(ref.lat))) {}
    std::pair<double, double> to_xy(const LatLon& p) const {
        return {(p.lon - lon0) * coslat0 * kNmPerDegree,
                (p.lat - lat0) * kNmPerDegree};
    }
    LatLon to_latlon(double x, double y) const {
        return {lat0 + y / kNmPerDegree, lon0 + x / (coslat0 * kNmPerDegree)};
    }
};

// Cumulative great-circle arc length along a polyline, in NM. Element i is the
// distance from the start to vertex i; element 0 is 0.
std::vector<double> cumulative_arclength_nm(const std::vector<LatLon>& poly);

// Minimum distance in NM from a point to a polyline, plus the arc-length
// fraction (0..1 of total length) of the closest approach. Uses the local
// projection about the query point, so it is accurate near the polyline.
struct ClosestApproach {
    double distance_nm;
    double arc_fraction;
};
ClosestApproach closest_approach(const std::vector<LatLon>& poly, const LatLon& p);

} // namespace airnet
