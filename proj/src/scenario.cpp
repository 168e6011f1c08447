#include "airnet/scenario.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "airnet/errors.hpp"

namespace airnet {

MultiLayerNetwork apply_runway_addition(const MultiLayerNetwork& net,
                                        const std::string& airport, int n) {
    if (n < 1) throw config_error("existing runway count must be >= 1");
    MultiLayerNetwork out = net;
    bool found = false;
    for (auto& a : out.airports) {
        if (a.node_id != airport) continue;
        a.params.mu *= double(n + 1) / double(n);
        found = true;
    }
    if (!found) throw input_error("unknown airport '" + airport + "'");
    return out;
}

MultiLayerNetwork apply_enroute_scale(const MultiLayerNetwork& net,
                                      const std::string& point_id, double factor) {
    if (factor <= 0.0) throw config_error("capacity factor must be > 0");
    MultiLayerNetwork out = net;
    bool found = point_id == "*";
    for (auto& p : out.points) {
        if (point_id != "*" && p.node_id != point_id) continue;
        p.params.mu *= factor;
        found = true;
    }
    if (!found) throw input_error("unknown en-route point '" + point_id + "'");
    return out;
}

MultiLayerNetwork eliminate_points_for_airport(const MultiLayerNetwork& net,
                                               const std::string& airport,
                                               double multiplier) {
    bool known = false;
    for (const auto& a : net.airports) known = known || a.node_id == airport;
    if (!known) throw input_error("unknown airport '" + airport + "'");

    std::set<std::string> touched;
    for (const auto& r : net.routes) {
        if (r.origin != airport && r.destination != airport) continue;
        for (const auto* cx : net.route_crossings(r.route_id)) touched.insert(cx->point_id);
    }
    MultiLayerNetwork out = net;
    for (auto& p : out.points)
        if (touched.count(p.node_id)) p.params.mu *= multiplier;
    return out;
}

MultiLayerNetwork apply_scenario(const MultiLayerNetwork& net, const ScenarioSpec& spec) {
    MultiLayerNetwork out = net;
    for (const auto& e : spec.edits) {
        switch (e.kind) {
        case EditKind::runway_addition:
            out = apply_runway_addition(out, e.target, int(e.magnitude));
            break;
        case EditKind::enroute_scale:
            out = apply_enroute_scale(out, e.target, e.magnitude);
            break;
        case EditKind::point_elimination_for_airport:
            out = eliminate_points_for_airport(out, e.target, spec.elimination_multiplier);
            break;
        }
    }
    return out;
}

namespace {

// Per-flight (origin, destination, arrival delay) extracted from a report's
// flight table: the "arr" row carries AA - SA, the "dep" row names the origin.
struct FlightDelay {
    std::string origin;
    std::string destination;
    double arrival_delay = 0.0;
};

std::map<std::string, FlightDelay> flight_delays(const DelayReport& rep) {
    std::map<std::string, FlightDelay> out;
    for (const auto& row : rep.per_flight) {
        auto& f = out[row.flight_id];
        if (row.op == "dep") f.origin = row.node_id;
        if (row.op == "arr") {
            f.destination = row.node_id;
            f.arrival_delay = row.propagated;
        }
    }
    return out;
}

} // namespace

ScenarioResult run_scenario(const MultiLayerNetwork& net,
                            const std::vector<Itinerary>& itineraries,
                            const Buffers& buffers, const ScenarioSpec& spec,
                            const SimOptions& opt) {
    ScenarioResult res;
    res.scenario_id = spec.scenario_id;

    // One flight resolution shared by both runs: edits only touch service
    // rates, never routes or crossings.
    const auto flights = make_sim_flights(net, itineraries, opt.epoch_offset_s);
    res.baseline = simulate_flights(net, flights, buffers, opt.guard);
    const MultiLayerNetwork edited = apply_scenario(net, spec);
    res.scenario = simulate_flights(edited, flights, buffers, opt.guard);

    std::map<std::string, NodeDelta> deltas;
    for (const auto& row : res.baseline.per_node) {
        auto& d = deltas[row.node_id];
        d.node_id = row.node_id;
        d.kind = row.kind;
        d.local += row.mean_local;
        d.propagated += row.mean_propagated;
    }
    for (const auto& row : res.scenario.per_node) {
        auto& d = deltas[row.node_id];
        d.node_id = row.node_id;
        d.kind = row.kind;
        d.local -= row.mean_local;
        d.propagated -= row.mean_propagated;
    }
    for (auto& [id, d] : deltas) {
        d.total = d.local + d.propagated;
        res.node_deltas.push_back(d);
    }
    res.network_delta = res.baseline.network_avg_delay - res.scenario.network_avg_delay;

    // Subset view per airport named in the edits.
    std::set<std::string> airports;
    for (const auto& e : spec.edits)
        if (e.kind != EditKind::enroute_scale) airports.insert(e.target);
    const auto base_fd = flight_delays(res.baseline);
    const auto scen_fd = flight_delays(res.scenario);
    for (const auto& ap : airports) {
        ScenarioResult::SubsetDelta sd;
        sd.airport = ap;
        for (const auto& [fid, fd] : base_fd) {
            if (fd.origin != ap && fd.destination != ap) continue;
            sd.flight_count += 1;
            sd.baseline_avg += fd.arrival_delay;
            auto it = scen_fd.find(fid);
            if (it != scen_fd.end()) sd.scenario_avg += it->second.arrival_delay;
        }
        if (sd.flight_count > 0) {
            sd.baseline_avg /= double(sd.flight_count);
            sd.scenario_avg /= double(sd.flight_count);
        }
        sd.delta = sd.baseline_avg - sd.scenario_avg;
        res.subset_deltas.push_back(std::move(sd));
    }
    return res;
}

std::vector<ExpansionRank> rank_cumulative_expansions(
    const MultiLayerNetwork& net, const std::vector<Itinerary>& itineraries,
    const Buffers& buffers, const std::vector<ExpansionCandidate>& candidates,
    const SimOptions& opt) {
    if (candidates.empty()) throw config_error("no expansion candidates given");

    const auto flights = make_sim_flights(net, itineraries, opt.epoch_offset_s);
    const DelayReport baseline = simulate_flights(net, flights, buffers, opt.guard);

    std::vector<ExpansionRank> ranks;
    for (const auto& c : candidates) {
        const auto edited = apply_runway_addition(net, c.airport, c.runways);
        const auto rep = simulate_flights(edited, flights, buffers, opt.guard);
        ranks.push_back({c.airport, baseline.network_avg_delay - rep.network_avg_delay, 0.0});
    }
    std::map<std::string, int> runway_count;
    for (const auto& c : candidates) runway_count[c.airport] = c.runways;
    std::stable_sort(ranks.begin(), ranks.end(), [](const auto& a, const auto& b) {
        if (a.single_delta != b.single_delta) return a.single_delta > b.single_delta;
        return a.airport < b.airport;
    });

    MultiLayerNetwork current = net;
    for (auto& r : ranks) {
        current = apply_runway_addition(current, r.airport, runway_count[r.airport]);
        const auto rep = simulate_flights(current, flights, buffers, opt.guard);
        r.cumulative_delta = baseline.network_avg_delay - rep.network_avg_delay;
    }
    return ranks;
}

} // namespace airnet
