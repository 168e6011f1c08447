#include "airnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "airnet/errors.hpp"
#include "airnet/util.hpp"

namespace airnet {

NetworkNode* MultiLayerNetwork::find_node(const std::string& id) {
    for (auto& n : airports)
        if (n.node_id == id) return &n;
    for (auto& n : points)
        if (n.node_id == id) return &n;
    return nullptr;
}

const NetworkNode* MultiLayerNetwork::find_node(const std::string& id) const {
    return const_cast<MultiLayerNetwork*>(this)->find_node(id);
}

const Route* MultiLayerNetwork::find_route(const std::string& id) const {
    for (const auto& r : routes)
        if (r.route_id == id) return &r;
    return nullptr;
}

std::vector<const RouteCrossing*> MultiLayerNetwork::route_crossings(
    const std::string& route_id) const {
    std::vector<const RouteCrossing*> out;
    for (const auto& c : crossings)
        if (c.route_id == route_id) out.push_back(&c);
    std::sort(out.begin(), out.end(), [](const RouteCrossing* a, const RouteCrossing* b) {
        return a->offset_min < b->offset_min;
    });
    return out;
}

std::vector<RouteCrossing> attach_points_to_routes(const std::vector<Route>& routes,
                                                   const std::vector<CongestionPoint>& points,
                                                   double corridor_nm) {
    if (corridor_nm <= 0.0) throw config_error("corridor width must be > 0");
    std::vector<RouteCrossing> crossings;
    for (const auto& r : routes) {
        if (r.centroid.size() < 2) continue;
        std::vector<RouteCrossing> per_route;
        for (const auto& p : points) {
            const double reach = std::max(corridor_nm, p.radius_nm);
            const auto ca = closest_approach(r.centroid, p.centroid);
            if (ca.distance_nm > reach) continue;
            // elapsed time at the closest-approach arc fraction, interpolated
            // over the centerline's per-vertex timing
            const double s = ca.arc_fraction * double(r.centroid.size() - 1);
            const size_t i = std::min(size_t(s), r.centroid.size() - 2);
            const double u = s - double(i);
            const double offset =
                r.time_offsets[i] + u * (r.time_offsets[i + 1] - r.time_offsets[i]);
            per_route.push_back({r.route_id, p.point_id, offset});
        }
        std::sort(per_route.begin(), per_route.end(),
                  [](const RouteCrossing& a, const RouteCrossing& b) {
                      if (a.offset_min != b.offset_min) return a.offset_min < b.offset_min;
                      return a.point_id < b.point_id;
                  });
        crossings.insert(crossings.end(), per_route.begin(), per_route.end());
    }
    return crossings;
}

DemandProfile estimate_airport_demand(const std::vector<FlightRecord>& schedule,
                                      const std::string& airport, double t0_min,
                                      double slot_minutes, size_t slots,
                                      double epoch_offset_s) {
    DemandProfile d;
    d.t0 = t0_min;
    d.slot_minutes = slot_minutes;
    d.rates.assign(slots, 0.0);
    auto add = [&](double epoch_s) {
        const double t = (epoch_s - epoch_offset_s) / 60.0;
        if (t < t0_min || t >= t0_min + slot_minutes * double(slots)) return;
        d.rates[size_t((t - t0_min) / slot_minutes)] += 1.0;
    };
    for (const auto& f : schedule) {
        if (f.origin == airport) add(f.sched_dep);
        if (f.destination == airport) add(f.sched_arr);
    }
    return d;
}

int estimate_service_rate(const std::vector<int>& throughput_counts, double coverage) {
    if (throughput_counts.empty()) throw config_error("no throughput counts given");
    if (!(coverage > 0.0 && coverage < 1.0))
        throw config_error("coverage must be in (0, 1)");
    std::vector<int> sorted = throughput_counts;
    std::sort(sorted.begin(), sorted.end());
    // smallest v with fraction(counts <= v) >= coverage; that is the
    // ceil(coverage * n)-th smallest observation
    size_t need = size_t(std::ceil(coverage * double(sorted.size()) - 1e-12));
    need = std::clamp<size_t>(need, 1, sorted.size());
    return sorted[need - 1];
}

void derive_enroute_demand(MultiLayerNetwork& net, const std::vector<FlightRecord>& schedule,
                           double epoch_offset_s) {
    // scheduled departures per (origin, destination, slot)
    std::map<std::pair<std::string, std::string>, std::vector<double>> dep_by_od;
    const double horizon = net.slot_minutes * double(net.slots);
    for (const auto& f : schedule) {
        const double t = (f.sched_dep - epoch_offset_s) / 60.0;
        if (t < net.t0 || t >= net.t0 + horizon) continue;
        auto& v = dep_by_od[{f.origin, f.destination}];
        if (v.empty()) v.assign(net.slots, 0.0);
        v[size_t((t - net.t0) / net.slot_minutes)] += 1.0;
    }

    for (auto& p : net.points) {
        p.demand.t0 = net.t0;
        p.demand.slot_minutes = net.slot_minutes;
        p.demand.rates.assign(net.slots, 0.0);
    }

    for (const auto& r : net.routes) {
        auto it = dep_by_od.find({r.origin, r.destination});
        if (it == dep_by_od.end()) continue;
        for (const auto* cx : net.route_crossings(r.route_id)) {
            NetworkNode* point = net.find_node(cx->point_id);
            if (!point) continue;
            for (size_t i = 0; i < net.slots; ++i) {
                const double deps = it->second[i];
                if (deps == 0.0) continue;
                // departures at slot start, shifted by the crossing offset
                const double t = net.t0 + double(i) * net.slot_minutes + cx->offset_min;
                size_t j = size_t((t - net.t0) / net.slot_minutes);
                if (j >= net.slots) j = net.slots - 1; // horizon truncation
                point->demand.rates[j] += deps * r.usage_prob;
            }
        }
    }
}

const FixtureTables::AirportRow& FixtureTables::airport(const std::string& code) const {
    for (const auto& r : airports)
        if (r.code == code) return r;
    throw input_error("unknown airport code '" + code + "'");
}

const FixtureTables::PointRow& FixtureTables::point(const std::string& id) const {
    for (const auto& r : points)
        if (r.point_id == id) return r;
    throw input_error("unknown en-route point '" + id + "'");
}

FixtureTables load_fixture_tables(const std::string& airports_csv,
                                  const std::string& points_csv) {
    FixtureTables t;
    auto open = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw input_error("cannot open fixture file " + path);
        return in;
    };
    {
        auto in = open(airports_csv);
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            if (header) {
                header = false;
                continue;
            }
            auto c = split(line, ',');
            if (c.size() < 5) throw input_error("malformed airport fixture row: " + line);
            t.airports.push_back({trim(c[0]), std::stoi(c[1]), std::stoi(c[2]),
                                  {std::stod(c[3]), std::stod(c[4])}});
        }
    }
    {
        auto in = open(points_csv);
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            if (header) {
                header = false;
                continue;
            }
            auto c = split(line, ',');
            if (c.size() < 5) throw input_error("malformed point fixture row: " + line);
            t.points.push_back({trim(c[0]), std::stoi(c[1]), std::stoi(c[2]),
                                {std::stod(c[3]), std::stod(c[4])}});
        }
    }
    return t;
}

MultiLayerNetwork network_from_fixtures(const FixtureTables& tables, size_t slots,
                                        double slot_minutes, int truncation) {
    MultiLayerNetwork net;
    net.slots = slots;
    net.slot_minutes = slot_minutes;
    for (const auto& a : tables.airports) {
        NetworkNode n;
        n.node_id = a.code;
        n.kind = NodeKind::airport;
        n.location = a.location;
        n.params.k = a.k;
        n.params.mu = double(a.mu_per_slot) / slot_minutes;
        n.params.N = truncation;
        n.demand.t0 = net.t0;
        n.demand.slot_minutes = slot_minutes;
        n.demand.rates.assign(slots, 0.0);
        net.airports.push_back(std::move(n));
    }
    for (const auto& p : tables.points) {
        NetworkNode n;
        n.node_id = p.point_id;
        n.kind = NodeKind::enroute;
        n.location = p.location;
        n.params.k = p.k;
        n.params.mu = double(p.mu_per_slot) / slot_minutes;
        n.params.N = truncation;
        n.demand.t0 = net.t0;
        n.demand.slot_minutes = slot_minutes;
        n.demand.rates.assign(slots, 0.0);
        net.points.push_back(std::move(n));
    }
    return net;
}

} // namespace airnet
