#include "airnet/route_mining.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "airnet/errors.hpp"

namespace airnet {

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

ClusterLabeling dbscan(const std::vector<std::vector<double>>& vectors, double epsilon,
                       size_t minpt, const Metric& metric) {
    if (epsilon <= 0.0) throw config_error("dbscan epsilon must be > 0");
    if (minpt < 1) throw config_error("dbscan minpt must be >= 1");
    const size_t n = vectors.size();

    // neighbor lists (self included in the count, as usual)
    std::vector<std::vector<size_t>> nbrs(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j)
            if (metric(vectors[i], vectors[j]) <= epsilon) nbrs[i].push_back(j);
    }
    std::vector<bool> core(n);
    for (size_t i = 0; i < n; ++i) core[i] = nbrs[i].size() >= minpt;

    ClusterLabeling out;
    out.labels.assign(n, kNoise);
    out.epsilon = epsilon;
    out.minpt = minpt;

    std::vector<bool> visited(n, false);
    int next_id = 0;
    for (size_t seed = 0; seed < n; ++seed) {
        if (visited[seed] || !core[seed]) continue;
        // breadth-first expansion from the lowest-index unvisited core point
        const int id = next_id++;
        std::deque<size_t> frontier{seed};
        visited[seed] = true;
        out.labels[seed] = id;
        while (!frontier.empty()) {
            const size_t p = frontier.front();
            frontier.pop_front();
            if (!core[p]) continue; // border point: belongs, but doesn't expand
            for (size_t q : nbrs[p]) {
                if (out.labels[q] == kNoise) out.labels[q] = id;
                if (!visited[q]) {
                    visited[q] = true;
                    frontier.push_back(q);
                }
            }
        }
    }
    out.n_clusters = next_id;
    return out;
}

double kdistance_epsilon(const std::vector<std::vector<double>>& vectors, size_t k,
                         const Metric& metric) {
    const size_t n = vectors.size();
    if (n < k + 1)
        throw input_error("k-distance needs more than k vectors (" + std::to_string(n) +
                          " given, k = " + std::to_string(k) + ")");

    std::vector<double> kdist(n);
    std::vector<double> d(n);
    for (size_t i = 0; i < n; ++i) {
        size_t w = 0;
        for (size_t j = 0; j < n; ++j)
            if (j != i) d[w++] = metric(vectors[i], vectors[j]);
        std::nth_element(d.begin(), d.begin() + (k - 1), d.begin() + w);
        kdist[i] = d[k - 1];
    }
    // sort descending, stable in input index for ties
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return kdist[a] > kdist[b]; });

    const double dmax = kdist[order.front()];
    const double dmin = kdist[order.back()];
    if (dmax <= 0.0)
        throw input_error("k-distance curve is identically zero (all points coincide)");
    if (dmax - dmin <= 0.0) return dmax; // flat curve: any index works

    // knee: farthest point from the chord of the normalized curve
    double best = -1.0;
    size_t best_i = 0;
    const double nm1 = double(n - 1);
    for (size_t i = 0; i < n; ++i) {
        const double x = double(i) / nm1;
        const double y = (kdist[order[i]] - dmin) / (dmax - dmin);
        // chord runs (0,1) -> (1,0); perpendicular distance ~ |x + y - 1|
        const double dist = std::abs(x + y - 1.0);
        if (dist > best) {
            best = dist;
            best_i = i;
        }
    }
    return kdist[order[best_i]];
}

MiningResult mine_routes(const std::vector<Trajectory>& trajectories, const MiningOptions& opt) {
    // group indices by OD pair, preserving input order
    std::map<std::pair<std::string, std::string>, std::vector<size_t>> groups;
    for (size_t i = 0; i < trajectories.size(); ++i)
        groups[{trajectories[i].origin, trajectories[i].destination}].push_back(i);

    MiningResult res;
    for (const auto& [od, idxs] : groups) {
        if (idxs.size() < opt.minpt) {
            res.warnings.push_back({od.first + "-" + od.second,
                                    "only " + std::to_string(idxs.size()) +
                                        " trajectories (< minpt)"});
            continue;
        }
        // resample and project to NM about the OD midpoint
        std::vector<ResampledTrack> tracks;
        tracks.reserve(idxs.size());
        for (size_t i : idxs) tracks.push_back(resample_with_times(trajectories[i], opt.m));

        double mid_lat = 0.0, mid_lon = 0.0;
        for (const auto& t : tracks) {
            mid_lat += (t.coords[0] + t.coords[2 * opt.m - 2]) / 2.0;
            mid_lon += (t.coords[1] + t.coords[2 * opt.m - 1]) / 2.0;
        }
        LocalProjection proj({mid_lat / double(tracks.size()), mid_lon / double(tracks.size())});

        std::vector<std::vector<double>> vectors(tracks.size());
        for (size_t i = 0; i < tracks.size(); ++i) {
            vectors[i].reserve(2 * opt.m);
            for (size_t j = 0; j < opt.m; ++j) {
                auto [x, y] = proj.to_xy({tracks[i].coords[2 * j], tracks[i].coords[2 * j + 1]});
                vectors[i].push_back(x);
                vectors[i].push_back(y);
            }
        }

        double eps = opt.epsilon_override;
        if (eps <= 0.0) {
            try {
                eps = kdistance_epsilon(vectors, opt.minpt);
            } catch (const input_error& e) {
                res.warnings.push_back({od.first + "-" + od.second, e.what()});
                continue;
            }
        }
        const auto labeling = dbscan(vectors, eps, opt.minpt);
        for (size_t i = 0; i < idxs.size(); ++i)
            res.labels_by_flight[trajectories[idxs[i]].flight_id] = labeling.labels[i];

        size_t members_total = 0;
        for (int l : labeling.labels)
            if (l != kNoise) ++members_total;
        if (members_total == 0) {
            res.warnings.push_back({od.first + "-" + od.second, "no dense cluster found"});
            continue;
        }

        for (int c = 0; c < labeling.n_clusters; ++c) {
            Route r;
            r.origin = od.first;
            r.destination = od.second;
            r.route_id = od.first + "-" + od.second + "#" + std::to_string(c);
            r.centroid.assign(opt.m, {});
            r.time_offsets.assign(opt.m, 0.0);
            for (size_t i = 0; i < tracks.size(); ++i) {
                if (labeling.labels[i] != c) continue;
                ++r.member_count;
                for (size_t j = 0; j < opt.m; ++j) {
                    r.centroid[j].lat += tracks[i].coords[2 * j];
                    r.centroid[j].lon += tracks[i].coords[2 * j + 1];
                    r.time_offsets[j] += tracks[i].elapsed_min[j];
                }
            }
            for (size_t j = 0; j < opt.m; ++j) {
                r.centroid[j].lat /= double(r.member_count);
                r.centroid[j].lon /= double(r.member_count);
                r.time_offsets[j] /= double(r.member_count);
            }
            r.usage_prob = double(r.member_count) / double(members_total);
            r.traffic_load = double(r.member_count) * opt.scale_to_daily;
            res.routes.push_back(std::move(r));
        }
    }
    return res;
}

} // namespace airnet
