#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "airnet/errors.hpp"
#include "airnet/route_mining.hpp"
#include "airnet/util.hpp"

using namespace airnet;

// Independent check model: cores by brute-force neighborhood counting,
// clusters as union-find components over core pairs, ids numbered by first
// core appearance, border points joining the lowest-id cluster that can reach
// them. Same contract as the production labeling, different construction.
static std::vector<int> oracle_dbscan(const std::vector<std::vector<double>>& v, double eps,
                                      size_t minpt) {
    const size_t n = v.size();
    auto dist = [&](size_t i, size_t j) {
        double s = 0.0;
        for (size_t d = 0; d < v[i].size(); ++d) {
            const double t = v[i][d] - v[j][d];
            s += t * t;
        }
        return std::sqrt(s);
    };
    std::vector<std::vector<size_t>> within(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (dist(i, j) <= eps) within[i].push_back(j);
    std::vector<bool> core(n);
    for (size_t i = 0; i < n; ++i) core[i] = within[i].size() >= minpt;

    std::vector<size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<size_t(size_t)> find = [&](size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (size_t i = 0; i < n; ++i) {
        if (!core[i]) continue;
        for (size_t j : within[i])
            if (core[j]) parent[find(i)] = find(j);
    }

    std::vector<int> labels(n, kNoise);
    std::map<size_t, int> id_of_root;
    int next = 0;
    for (size_t i = 0; i < n; ++i) {
        if (!core[i]) continue;
        const size_t root = find(i);
        if (!id_of_root.count(root)) id_of_root[root] = next++;
        labels[i] = id_of_root[root];
    }
    for (size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        int best = kNoise;
        for (size_t j : within[i])
            if (core[j] && (best == kNoise || labels[j] < best)) best = labels[j];
        labels[i] = best;
    }
    return labels;
}

TEST_CASE("euclidean metric") {
    CHECK(euclidean({0.0, 0.0}, {3.0, 4.0}) == doctest::Approx(5.0));
    CHECK(euclidean({1.0}, {1.0}) == 0.0);
}

TEST_CASE("dbscan labels two blobs and flags the stray point") {
    std::vector<std::vector<double>> v{
        {0.0, 0.0}, {0.3, 0.0}, {0.0, 0.3},       // blob A
        {5.0, 5.0}, {5.3, 5.0}, {5.0, 5.3},       // blob B
        {20.0, 20.0},                             // stray
    };
    auto lab = dbscan(v, 0.5, 3);
    CHECK(lab.n_clusters == 2);
    CHECK(lab.labels == std::vector<int>{0, 0, 0, 1, 1, 1, kNoise});
}

TEST_CASE("dbscan border points join the first cluster to reach them") {
    // the point at 1.4 is within epsilon of a core on each side (0.6 and 2.2)
    // but has only 3 neighbors including itself, one short of core status
    std::vector<std::vector<double>> v{{0.0}, {0.2}, {0.4}, {0.6},
                                       {2.2}, {2.4}, {2.6}, {2.8}, {1.4}};
    auto lab = dbscan(v, 0.8, 4);
    CHECK(lab.n_clusters == 2);
    CHECK(lab.labels[8] == 0);
    CHECK(lab.labels == oracle_dbscan(v, 0.8, 4));
}

TEST_CASE("dbscan parameter validation") {
    std::vector<std::vector<double>> v{{0.0}, {1.0}};
    CHECK_THROWS_AS(dbscan(v, 0.0, 2), config_error);
    CHECK_THROWS_AS(dbscan(v, 1.0, 0), config_error);
}

TEST_CASE("dbscan agrees with the naive density-connectivity oracle") {
    Rng rng(222);
    for (int trial = 0; trial < 80; ++trial) {
        const size_t n = rng.uniform_int(2, 15);
        std::vector<std::vector<double>> v(n);
        for (auto& p : v) p = {rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)};
        const double eps = rng.uniform(0.5, 3.0);
        const size_t minpt = rng.uniform_int(1, 4);
        const auto got = dbscan(v, eps, minpt).labels;
        const auto want = oracle_dbscan(v, eps, minpt);
        CHECK(got == want);
    }
}

TEST_CASE("k-distance knee lands after the outlier drop") {
    // 2-NN distances: members 2,1,2 | 2,1,2 -> sorted desc 2,2,2,2,1,1;
    // the knee of the normalized curve sits at the last of the 2s
    std::vector<std::vector<double>> v{{0.0}, {1.0}, {2.0}, {10.0}, {11.0}, {12.0}};
    CHECK(kdistance_epsilon(v, 2) == doctest::Approx(2.0));
}

TEST_CASE("k-distance handles flat curves and rejects degenerate input") {
    std::vector<std::vector<double>> even{{0.0}, {1.0}, {2.0}, {3.0}};
    CHECK(kdistance_epsilon(even, 1) == doctest::Approx(1.0)); // flat: all 1-NN equal
    std::vector<std::vector<double>> coincident{{1.0}, {1.0}, {1.0}};
    CHECK_THROWS_AS(kdistance_epsilon(coincident, 1), input_error);
    CHECK_THROWS_AS(kdistance_epsilon(even, 4), input_error); // needs > k vectors
}

// Straight-line trajectory helper: n points between fixed endpoints, displaced
// north by `offset_deg`, flown in `minutes`.
static Trajectory straight(const std::string& id, double offset_deg, size_t n = 12,
                           double minutes = 120.0) {
    Trajectory t;
    t.flight_id = id;
    t.origin = "AAA";
    t.destination = "BBB";
    for (size_t i = 0; i < n; ++i) {
        TrackPoint p;
        p.flight_id = id;
        const double s = double(i) / double(n - 1);
        p.timestamp = s * minutes * 60.0;
        p.lat = 30.0 + offset_deg;
        p.lon = 100.0 + 4.0 * s;
        p.origin = "AAA";
        p.destination = "BBB";
        t.points.push_back(p);
    }
    return t;
}

TEST_CASE("route mining recovers two parallel bundles and flags the stray flight") {
    std::vector<Trajectory> trajs;
    for (int i = 0; i < 8; ++i) trajs.push_back(straight("A" + std::to_string(i), 0.001 * i));
    for (int i = 0; i < 8; ++i)
        trajs.push_back(straight("B" + std::to_string(i), 1.0 + 0.001 * i));
    trajs.push_back(straight("STRAY", 5.0));

    MiningOptions opt;
    opt.m = 16;
    opt.minpt = 3;
    opt.scale_to_daily = 2.0;
    auto res = mine_routes(trajs, opt);

    REQUIRE(res.routes.size() == 2);
    CHECK(res.warnings.empty());
    for (const auto& r : res.routes) {
        CHECK(r.member_count == 8);
        CHECK(r.usage_prob == doctest::Approx(0.5));
        CHECK(r.traffic_load == doctest::Approx(16.0)); // members x scale_to_daily
        REQUIRE(r.centroid.size() == 16);
        REQUIRE(r.time_offsets.size() == 16);
        // equal ground speed: sample j sits at 120 * j / 15 minutes
        for (size_t j = 0; j < 16; ++j)
            CHECK(r.time_offsets[j] == doctest::Approx(120.0 * double(j) / 15.0).epsilon(1e-9));
    }
    CHECK(res.routes[0].route_id == "AAA-BBB#0");
    CHECK(res.routes[1].route_id == "AAA-BBB#1");
    // bundle A's centroid is the mean of its member offsets
    CHECK(res.routes[0].centroid[0].lat == doctest::Approx(30.0 + 0.0035).epsilon(1e-9));
    CHECK(res.routes[1].centroid[0].lat == doctest::Approx(31.0 + 0.0035).epsilon(1e-9));

    CHECK(res.labels_by_flight.at("STRAY") == kNoise);
    for (int i = 0; i < 8; ++i) {
        CHECK(res.labels_by_flight.at("A" + std::to_string(i)) == 0);
        CHECK(res.labels_by_flight.at("B" + std::to_string(i)) == 1);
    }
}

TEST_CASE("thin OD pairs produce a warning instead of a route") {
    std::vector<Trajectory> trajs{straight("A0", 0.0), straight("A1", 0.001)};
    MiningOptions opt;
    opt.m = 8;
    opt.minpt = 3;
    auto res = mine_routes(trajs, opt);
    CHECK(res.routes.empty());
    REQUIRE(res.warnings.size() == 1);
    CHECK(res.warnings[0].od == "AAA-BBB");
}

TEST_CASE("identical trajectories cannot seed an epsilon estimate") {
    std::vector<Trajectory> trajs{straight("A0", 0.0), straight("A1", 0.0),
                                  straight("A2", 0.0), straight("A3", 0.0)};
    MiningOptions opt;
    opt.m = 8;
    opt.minpt = 3;
    auto res = mine_routes(trajs, opt);
    CHECK(res.routes.empty());
    REQUIRE(res.warnings.size() == 1);

    SUBCASE("an explicit epsilon rescues the group") {
        opt.epsilon_override = 1.0;
        auto forced = mine_routes(trajs, opt);
        REQUIRE(forced.routes.size() == 1);
        CHECK(forced.routes[0].usage_prob == doctest::Approx(1.0));
        CHECK(forced.routes[0].member_count == 4);
    }
}
