#include "airnet/geo.hpp"

#include <algorithm>

namespace airnet {

double gc_distance_nm(const LatLon& a, const LatLon& b) {
    const double phi1 = deg2rad(a.lat), phi2 = deg2rad(b.lat);
    const double dphi = phi2 - phi1;
    const double dlam = deg2rad(b.lon - a.lon);
    const double s = std::sin(dphi / 2), t = std::sin(dlam / 2);
    const double h = s * s + std::cos(phi1) * std::cos(phi2) * t * t;
    return 2.0 * kEarthRadiusNm * std::asin(std::min(1.0, std::sqrt(h)));
}

std::vector<double> cumulative_arclength_nm(const std::vector<LatLon>& poly) {
    std::vector<double> cum(poly.size(), 0.0);
    for (size_t i = 1; i < poly.size(); ++i)
        cum[i] = cum[i - 1] + gc_distance_nm(poly[i - 1], poly[i]);
    return cum;
}

ClosestApproach closest_approach(const std::vector<LatLon>& poly, const LatLon& p) {
    LocalProjection proj(p);
    const auto cum = cumulative_arclength_nm(poly);
    const double total = cum.empty() ? 0.0 : cum.back();

    double best_d2 = std::numeric_limits<double>::infinity();
    double best_arc = 0.0;
    for (size_t i = 0; i + 1 < poly.size(); ++i) {
        auto [ax, ay] = proj.to_xy(poly[i]);
        auto [bx, by] = proj.to_xy(poly[i + 1]);
        const double vx = bx - ax, vy = by - ay;
        const double len2 = vx * vx + vy * vy;
        double u = 0.0;
        if (len2 > 0.0) u = std::clamp(-(ax * vx + ay * vy) / len2, 0.0, 1.0);
        const double cx = ax + u * vx, cy = ay + u * vy;
        const double d2 = cx * cx + cy * cy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best_arc = cum[i] + u * (cum[i + 1] - cum[i]);
        }
    }
    if (poly.size() == 1) {
        auto [x, y] = proj.to_xy(poly[0]);
        best_d2 = x * x + y * y;
        best_arc = 0.0;
    }
    return {std::sqrt(best_d2), total > 0.0 ? best_arc / total : 0.0};
}

} // namespace airnet
