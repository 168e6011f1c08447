#pragma once
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "airnet/geo.hpp"
#include "airnet/ingest.hpp"

namespace airnet {

constexpr int kNoise = -1;

struct ClusterLabeling {
    std::vector<int> labels; // cluster id >= 0 or kNoise, one per input vector
    double epsilon = 0.0;
    size_t minpt = 0;
    int n_clusters = 0;
};

struct Route {
    std::string route_id;
    std::string origin, destination;
    std::vector<LatLon> centroid;        // m points
    std::vector<double> time_offsets;    // minutes from departure at each point
    double usage_prob = 0.0;
    size_t member_count = 0;
    double traffic_load = 0.0;           // members scaled to the observation period
};

using Metric = std::function<double(const std::vector<double>&, const std::vector<double>&)>;

double euclidean(const std::vector<double>& a, const std::vector<double>& b);

// Density-based clustering. Core points have >= minpt neighbors within epsilon
// (self included); clusters are maximal density-connected sets; everything
// else is noise. Expansion order follows input index, so labels are
// deterministic and cluster ids are contiguous from 0.
ClusterLabeling dbscan(const std::vector<std::vector<double>>& vectors, double epsilon,
                       size_t minpt, const Metric& metric = euclidean);

// Epsilon choice from the sorted k-distance curve: compute each point's
// distance to its k-th nearest neighbor, sort descending, and take the value
// at the knee — the point of maximum perpendicular distance from the chord
// of the (normalized) curve. Ties broken by input index.
double kdistance_epsilon(const std::vector<std::vector<double>>& vectors, size_t k,
                         const Metric& metric = euclidean);

struct MiningOptions {
    size_t m = 50;          // resample points per trajectory
    size_t minpt = 5;       // density threshold; k-distance k equals this
    double epsilon_override = 0.0; // > 0 forces epsilon for every OD pair
    double scale_to_daily = 1.0;   // trajectories-per-day factor for traffic load
};

struct MiningWarning {
    std::string od;
    std::string reason;
};

struct MiningResult {
    std::vector<Route> routes;
    std::vector<MiningWarning> warnings;
    // flight id -> cluster id within its OD group (kNoise for outliers)
    std::map<std::string, int> labels_by_flight;
};

// Cluster trajectories per OD pair into operational routes. Trajectories are
// resampled to m points, projected to NM about the OD midpoint, and clustered
// with dbscan at the k-distance epsilon. Route usage splits the OD's non-noise
// members; centroids are pointwise means.
MiningResult mine_routes(const std::vector<Trajectory>& trajectories,
                         const MiningOptions& opt = {});

} // namespace airnet
