#include "doctest.h"

#include <string>
#include <vector>

#include "airnet/errors.hpp"
#include "airnet/network.hpp"
#include "airnet/scenario.hpp"
#include "airnet/simulation.hpp"

using namespace airnet;

static const std::string kData = AIRNET_DATA_DIR;

namespace {

NetworkNode node(const std::string& id, NodeKind kind, double mu_per_slot, int k,
                 size_t slots) {
    NetworkNode n;
    n.node_id = id;
    n.kind = kind;
    n.params.k = k;
    n.params.mu = mu_per_slot / 15.0;
    n.params.N = 80;
    n.demand.slot_minutes = 15.0;
    n.demand.rates.assign(slots, 0.0);
    return n;
}

FlightRecord rec(const std::string& fid, const std::string& o, const std::string& d,
                 double dep_min, double arr_min) {
    FlightRecord r;
    r.flight_id = fid;
    r.origin = o;
    r.destination = d;
    r.sched_dep = dep_min * 60.0;
    r.sched_arr = arr_min * 60.0;
    return r;
}

std::vector<Itinerary> singletons(const std::vector<FlightRecord>& recs) {
    std::vector<Itinerary> out;
    for (const auto& r : recs) {
        Itinerary it;
        it.registration = "R-" + r.flight_id;
        it.flights = {r};
        out.push_back(std::move(it));
    }
    return out;
}

} // namespace

TEST_CASE("adding a runway rescales hourly movement capacity exactly") {
    auto tables = load_fixture_tables(kData + "/airport_params.csv",
                                      kData + "/enroute_params.csv");
    auto net = network_from_fixtures(tables);

    CHECK(net.find_node("CTU")->params.mu * 60.0 == 52.0);
    auto expanded = apply_runway_addition(net, "CTU", 2);
    CHECK(expanded.find_node("CTU")->params.mu * 60.0 == 78.0);
    // the source network and every other airport stay untouched
    CHECK(net.find_node("CTU")->params.mu * 60.0 == 52.0);
    CHECK(expanded.find_node("PEK")->params.mu == net.find_node("PEK")->params.mu);
    CHECK(expanded.find_node("CTU")->params.k == net.find_node("CTU")->params.k);

    CHECK_THROWS_AS(apply_runway_addition(net, "CTU", 0), config_error);
    CHECK_THROWS_AS(apply_runway_addition(net, "ZZZ", 2), input_error);
}

TEST_CASE("en-route capacity scaling targets one point or all of them") {
    MultiLayerNetwork net;
    net.slots = 8;
    net.points.push_back(node("P1", NodeKind::enroute, 6, 1, 8));
    net.points.push_back(node("P2", NodeKind::enroute, 4, 1, 8));

    auto one = apply_enroute_scale(net, "P1", 2.0);
    CHECK(one.points[0].params.mu == net.points[0].params.mu * 2.0);
    CHECK(one.points[1].params.mu == net.points[1].params.mu);

    auto all = apply_enroute_scale(net, "*", 0.5);
    CHECK(all.points[0].params.mu == net.points[0].params.mu * 0.5);
    CHECK(all.points[1].params.mu == net.points[1].params.mu * 0.5);

    CHECK_THROWS_AS(apply_enroute_scale(net, "P1", 0.0), config_error);
    CHECK_THROWS_AS(apply_enroute_scale(net, "nope", 2.0), input_error);
}

TEST_CASE("eliminating constraints lifts only the points on routes touching the airport") {
    MultiLayerNetwork net;
    net.slots = 8;
    net.airports.push_back(node("A", NodeKind::airport, 6, 1, 8));
    net.airports.push_back(node("B", NodeKind::airport, 6, 1, 8));
    net.airports.push_back(node("C", NodeKind::airport, 6, 1, 8));
    for (const auto& id : {"P1", "P2", "P3"})
        net.points.push_back(node(id, NodeKind::enroute, 4, 1, 8));

    auto route = [](const std::string& id, const std::string& o, const std::string& d) {
        Route r;
        r.route_id = id;
        r.origin = o;
        r.destination = d;
        r.usage_prob = 1.0;
        return r;
    };
    net.routes = {route("A-B#0", "A", "B"), route("C-B#0", "C", "B"),
                  route("C-A#0", "C", "A")};
    net.crossings = {{"A-B#0", "P1", 10.0}, {"C-A#0", "P3", 12.0}, {"C-B#0", "P2", 9.0}};

    auto lifted = eliminate_points_for_airport(net, "A", 10.0);
    CHECK(lifted.points[0].params.mu == net.points[0].params.mu * 10.0); // P1: A-B
    CHECK(lifted.points[1].params.mu == net.points[1].params.mu);        // P2: C-B only
    CHECK(lifted.points[2].params.mu == net.points[2].params.mu * 10.0); // P3: C-A

    CHECK_THROWS_AS(eliminate_points_for_airport(net, "ZZZ", 10.0), input_error);

    SUBCASE("edit lists compose left to right") {
        ScenarioSpec spec;
        spec.edits = {{"A", EditKind::runway_addition, 1.0},
                      {"*", EditKind::enroute_scale, 2.0},
                      {"A", EditKind::point_elimination_for_airport, 0.0}};
        spec.elimination_multiplier = 10.0;
        auto out = apply_scenario(net, spec);
        CHECK(out.airports[0].params.mu == net.airports[0].params.mu * 2.0);
        CHECK(out.points[0].params.mu == net.points[0].params.mu * 20.0);
        CHECK(out.points[1].params.mu == net.points[1].params.mu * 2.0);
    }
}

namespace {

// A morning rush out of a capacity-starved airport: A turns over 2 movements
// per sub-period while the schedule asks for four to five, so queues build
// well past what the arrival buffer can absorb.
struct RushFixture {
    MultiLayerNetwork net;
    std::vector<Itinerary> its;
};

RushFixture rush() {
    RushFixture f;
    f.net.slots = 16;
    f.net.slot_minutes = 15.0;
    f.net.airports.push_back(node("A", NodeKind::airport, 2, 1, 16));
    f.net.airports.push_back(node("B", NodeKind::airport, 10, 1, 16));
    f.net.points.push_back(node("P", NodeKind::enroute, 6, 1, 16));
    Route r;
    r.route_id = "A-B#0";
    r.origin = "A";
    r.destination = "B";
    r.usage_prob = 1.0;
    f.net.routes = {r};
    f.net.crossings = {{"A-B#0", "P", 20.0}};

    std::vector<FlightRecord> recs;
    for (int i = 0; i < 10; ++i) {
        const double dep = 5.0 + 3.0 * i;
        recs.push_back(rec("F" + std::to_string(i), "A", "B", dep, dep + 60.0));
    }
    f.its = singletons(recs);
    return f;
}

} // namespace

TEST_CASE("a runway addition at the bottleneck lowers network delay") {
    auto f = rush();
    ScenarioSpec spec;
    spec.scenario_id = "more-runways";
    spec.edits = {{"A", EditKind::runway_addition, 1.0}};
    Buffers b;

    auto res = run_scenario(f.net, f.its, b, spec);
    CHECK(res.scenario_id == "more-runways");
    CHECK(res.baseline.flight_count == 10);
    CHECK(res.scenario.flight_count == 10);
    CHECK(res.network_delta ==
          res.baseline.network_avg_delay - res.scenario.network_avg_delay);
    CHECK(res.network_delta > 0.0);

    // B receives every flight; less upstream congestion means less lateness
    bool saw_b = false;
    for (const auto& d : res.node_deltas) {
        if (d.node_id != "B") continue;
        saw_b = true;
        CHECK(d.propagated > 0.0);
        CHECK(d.total == d.local + d.propagated);
    }
    CHECK(saw_b);

    // every flight touches A, so the subset view covers the whole day
    REQUIRE(res.subset_deltas.size() == 1);
    const auto& sd = res.subset_deltas[0];
    CHECK(sd.airport == "A");
    CHECK(sd.flight_count == 10);
    CHECK(sd.delta == sd.baseline_avg - sd.scenario_avg);
    CHECK(sd.baseline_avg ==
          doctest::Approx(res.baseline.network_avg_delay).epsilon(1e-12));
    CHECK(sd.delta > 0.0);

    SUBCASE("identical inputs give identical results") {
        auto res2 = run_scenario(f.net, f.its, b, spec);
        CHECK(res2.network_delta == res.network_delta);
        CHECK(res2.baseline.network_avg_delay == res.baseline.network_avg_delay);
    }

    SUBCASE("pure en-route edits report no airport subset") {
        ScenarioSpec enroute;
        enroute.edits = {{"*", EditKind::enroute_scale, 2.0}};
        auto res3 = run_scenario(f.net, f.its, b, enroute);
        CHECK(res3.subset_deltas.empty());
        CHECK(res3.network_delta >= -1e-9);
    }
}

TEST_CASE("expansion candidates rank by single-addition benefit") {
    // two origins under different pressure feeding one roomy destination
    MultiLayerNetwork net;
    net.slots = 16;
    net.airports.push_back(node("A", NodeKind::airport, 2, 1, 16));
    net.airports.push_back(node("B", NodeKind::airport, 6, 1, 16));
    net.airports.push_back(node("C", NodeKind::airport, 20, 1, 16));

    std::vector<FlightRecord> recs;
    for (int i = 0; i < 8; ++i) {
        const double dep = 5.0 + 3.0 * i;
        recs.push_back(rec("A" + std::to_string(i), "A", "C", dep, dep + 55.0));
    }
    for (int i = 0; i < 4; ++i) {
        const double dep = 10.0 + 12.0 * i;
        recs.push_back(rec("B" + std::to_string(i), "B", "C", dep, dep + 50.0));
    }
    auto its = singletons(recs);
    Buffers b;

    std::vector<ExpansionCandidate> cands{{"C", 4}, {"A", 1}, {"B", 1}};
    auto ranks = rank_cumulative_expansions(net, its, b, cands);
    REQUIRE(ranks.size() == 3);
    CHECK(ranks[0].airport == "A"); // the starved origin gains the most
    CHECK(ranks[0].single_delta > 0.0);
    for (size_t i = 1; i < ranks.size(); ++i)
        CHECK(ranks[i - 1].single_delta >= ranks[i].single_delta);
    // the first cumulative step applies exactly the first single expansion
    CHECK(ranks[0].cumulative_delta == ranks[0].single_delta);
    // capacity additions never hurt (up to day-loop feedback noise)
    for (const auto& r : ranks) {
        CHECK(r.single_delta >= -1e-9);
        CHECK(r.cumulative_delta >= r.single_delta - 0.05);
    }

    CHECK_THROWS_AS(rank_cumulative_expansions(net, its, b, {}), config_error);
}
