#include "airnet/artifacts.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "airnet/errors.hpp"
#include "airnet/util.hpp"

namespace airnet {

namespace {

std::ofstream open_out(const std::string& path, const std::string& kind,
                       const std::string& config_hash) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path);
    out << "# " << kind << " v1\n";
    out << "# config_hash " << (config_hash.empty() ? "none" : config_hash) << "\n";
    return out;
}

// Data lines of the file, comments stripped, hash captured.
std::vector<std::string> read_lines(const std::string& path, ArtifactInfo* info) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    bool first_comment = true;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty()) continue;
        if (s[0] == '#') {
            if (info) {
                if (first_comment && s.size() > 2) {
                    const auto fields = split(s.substr(2), ' ');
                    if (!fields.empty()) info->kind = fields[0];
                }
                const std::string tag = "# config_hash ";
                if (s.rfind(tag, 0) == 0) info->config_hash = trim(s.substr(tag.size()));
            }
            first_comment = false;
            continue;
        }
        first_comment = false;
        lines.push_back(s);
    }
    return lines;
}

std::string f12(double v) { return fmt_double(v, 12); }

// key=value tokens of a structured-text line ("airport id=PEK lat=40.08 ...")
std::map<std::string, std::string> kv_tokens(const std::string& line) {
    std::map<std::string, std::string> out;
    for (const auto& tok : split(line, ' ')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        out[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return out;
}

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key,
              const std::string& context) {
    auto it = kv.find(key);
    if (it == kv.end()) throw input_error("missing field '" + key + "' in " + context);
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw input_error("bad number for '" + key + "' in " + context);
    }
}

std::string kv_str(const std::map<std::string, std::string>& kv, const std::string& key,
                   const std::string& context) {
    auto it = kv.find(key);
    if (it == kv.end()) throw input_error("missing field '" + key + "' in " + context);
    return it->second;
}

} // namespace

// ---------------------------------------------------------------------------
// routes

void write_routes(const std::string& path, const std::vector<Route>& routes,
                  const std::string& config_hash) {
    auto out = open_out(path, "routes", config_hash);
    out << "route_id,origin,destination,usage_prob,member_count,traffic_load,idx,lat,lon,"
           "offset_min\n";
    for (const auto& r : routes) {
        for (size_t j = 0; j < r.centroid.size(); ++j) {
            out << r.route_id << ',' << r.origin << ',' << r.destination << ','
                << f12(r.usage_prob) << ',' << r.member_count << ',' << f12(r.traffic_load)
                << ',' << j << ',' << f12(r.centroid[j].lat) << ',' << f12(r.centroid[j].lon)
                << ',' << f12(r.time_offsets[j]) << "\n";
        }
    }
}

std::vector<Route> read_routes(const std::string& path, ArtifactInfo* info) {
    std::vector<Route> routes;
    std::map<std::string, size_t> by_id;
    bool header = true;
    for (const auto& line : read_lines(path, info)) {
        if (header) {
            header = false;
            continue;
        }
        const auto c = split(line, ',');
        if (c.size() < 10) throw input_error("malformed route row: " + line);
        auto it = by_id.find(c[0]);
        if (it == by_id.end()) {
            Route r;
            r.route_id = c[0];
            r.origin = c[1];
            r.destination = c[2];
            r.usage_prob = std::stod(c[3]);
            r.member_count = size_t(std::stoul(c[4]));
            r.traffic_load = std::stod(c[5]);
            it = by_id.emplace(c[0], routes.size()).first;
            routes.push_back(std::move(r));
        }
        Route& r = routes[it->second];
        r.centroid.push_back({std::stod(c[7]), std::stod(c[8])});
        r.time_offsets.push_back(std::stod(c[9]));
    }
    return routes;
}

// ---------------------------------------------------------------------------
// congestion points

void write_congestion_points(const std::string& path,
                             const std::vector<CongestionPoint>& points,
                             const std::string& config_hash) {
    auto out = open_out(path, "congestion", config_hash);
    out << "point_id,lat,lon,radius_nm,total_load,member_cells\n";
    for (const auto& p : points) {
        out << p.point_id << ',' << f12(p.centroid.lat) << ',' << f12(p.centroid.lon) << ','
            << f12(p.radius_nm) << ',' << f12(p.total_load) << ',';
        for (size_t i = 0; i < p.members.size(); ++i) {
            if (i) out << ';';
            out << p.members[i].row << ':' << p.members[i].col;
        }
        out << "\n";
    }
}

std::vector<CongestionPoint> read_congestion_points(const std::string& path,
                                                    ArtifactInfo* info) {
    std::vector<CongestionPoint> points;
    bool header = true;
    for (const auto& line : read_lines(path, info)) {
        if (header) {
            header = false;
            continue;
        }
        const auto c = split(line, ',');
        if (c.size() < 6) throw input_error("malformed congestion row: " + line);
        CongestionPoint p;
        p.point_id = c[0];
        p.centroid = {std::stod(c[1]), std::stod(c[2])};
        p.radius_nm = std::stod(c[3]);
        p.total_load = std::stod(c[4]);
        if (!c[5].empty()) {
            for (const auto& cell : split(c[5], ';')) {
                const auto rc = split(cell, ':');
                if (rc.size() == 2) p.members.push_back({std::stoi(rc[0]), std::stoi(rc[1])});
            }
        }
        points.push_back(std::move(p));
    }
    return points;
}

// ---------------------------------------------------------------------------
// heat map

void write_heatmap(const std::string& path, const std::vector<Grid>& grids,
                   const GridFrame& frame, const std::string& config_hash) {
    auto out = open_out(path, "heatmap", config_hash);
    out << "row,col,center_lat,center_lon,traffic,route_count,entropy,score\n";
    for (const auto& g : grids) {
        const LatLon c = frame.center_of(g.idx);
        out << g.idx.row << ',' << g.idx.col << ',' << f12(c.lat) << ',' << f12(c.lon) << ','
            << f12(g.traffic) << ',' << g.route_count << ',' << f12(g.entropy) << ','
            << f12(g.score) << "\n";
    }
}

// ---------------------------------------------------------------------------
// network

void write_network(const std::string& path, const MultiLayerNetwork& net,
                   const std::string& config_hash) {
    auto out = open_out(path, "network", config_hash);
    out << "horizon t0=" << f12(net.t0) << " slot_minutes=" << f12(net.slot_minutes)
        << " slots=" << net.slots << " epoch0=" << f12(net.epoch0_s) << "\n";
    auto emit_node = [&](const char* tag, const NetworkNode& n) {
        out << tag << " id=" << n.node_id << " lat=" << f12(n.location.lat)
            << " lon=" << f12(n.location.lon) << " mu=" << f12(n.params.mu)
            << " k=" << n.params.k << " N=" << n.params.N << "\n";
    };
    for (const auto& a : net.airports) emit_node("airport", a);
    for (const auto& p : net.points) emit_node("point", p);
    auto emit_demand = [&](const NetworkNode& n) {
        out << "demand id=" << n.node_id << " rates=";
        for (size_t i = 0; i < n.demand.rates.size(); ++i) {
            if (i) out << ',';
            out << f12(n.demand.rates[i]);
        }
        out << "\n";
    };
    for (const auto& a : net.airports) emit_demand(a);
    for (const auto& p : net.points) emit_demand(p);
    for (const auto& r : net.routes) {
        out << "route id=" << r.route_id << " origin=" << r.origin
            << " destination=" << r.destination << " usage=" << f12(r.usage_prob)
            << " members=" << r.member_count << " load=" << f12(r.traffic_load) << "\n";
        for (size_t j = 0; j < r.centroid.size(); ++j)
            out << "routepoint id=" << r.route_id << " idx=" << j
                << " lat=" << f12(r.centroid[j].lat) << " lon=" << f12(r.centroid[j].lon)
                << " offset=" << f12(r.time_offsets[j]) << "\n";
    }
    for (const auto& c : net.crossings)
        out << "crossing route=" << c.route_id << " point=" << c.point_id
            << " offset=" << f12(c.offset_min) << "\n";
}

MultiLayerNetwork read_network(const std::string& path, ArtifactInfo* info) {
    MultiLayerNetwork net;
    net.slots = 0;
    for (const auto& line : read_lines(path, info)) {
        const auto sp = line.find(' ');
        const std::string tag = line.substr(0, sp);
        const auto kv = kv_tokens(sp == std::string::npos ? "" : line.substr(sp + 1));
        if (tag == "horizon") {
            net.t0 = kv_num(kv, "t0", "horizon");
            net.slot_minutes = kv_num(kv, "slot_minutes", "horizon");
            net.slots = size_t(kv_num(kv, "slots", "horizon"));
            if (kv.count("epoch0")) net.epoch0_s = kv_num(kv, "epoch0", "horizon");
        } else if (tag == "airport" || tag == "point") {
            NetworkNode n;
            n.node_id = kv_str(kv, "id", tag);
            n.kind = tag == "airport" ? NodeKind::airport : NodeKind::enroute;
            n.location = {kv_num(kv, "lat", tag), kv_num(kv, "lon", tag)};
            n.params.mu = kv_num(kv, "mu", tag);
            n.params.k = int(kv_num(kv, "k", tag));
            n.params.N = int(kv_num(kv, "N", tag));
            n.demand.t0 = net.t0;
            n.demand.slot_minutes = net.slot_minutes;
            n.demand.rates.assign(net.slots, 0.0);
            (tag == "airport" ? net.airports : net.points).push_back(std::move(n));
        } else if (tag == "demand") {
            NetworkNode* n = net.find_node(kv_str(kv, "id", "demand"));
            if (!n) throw input_error("demand for unknown node in " + path);
            n->demand.rates.clear();
            for (const auto& v : split(kv_str(kv, "rates", "demand"), ','))
                n->demand.rates.push_back(std::stod(v));
            n->demand.t0 = net.t0;
            n->demand.slot_minutes = net.slot_minutes;
        } else if (tag == "route") {
            Route r;
            r.route_id = kv_str(kv, "id", "route");
            r.origin = kv_str(kv, "origin", "route");
            r.destination = kv_str(kv, "destination", "route");
            r.usage_prob = kv_num(kv, "usage", "route");
            r.member_count = size_t(kv_num(kv, "members", "route"));
            r.traffic_load = kv_num(kv, "load", "route");
            net.routes.push_back(std::move(r));
        } else if (tag == "routepoint") {
            const std::string id = kv_str(kv, "id", "routepoint");
            Route* r = nullptr;
            for (auto& cand : net.routes)
                if (cand.route_id == id) r = &cand;
            if (!r) throw input_error("routepoint for unknown route " + id);
            r->centroid.push_back({kv_num(kv, "lat", "routepoint"),
                                   kv_num(kv, "lon", "routepoint")});
            r->time_offsets.push_back(kv_num(kv, "offset", "routepoint"));
        } else if (tag == "crossing") {
            net.crossings.push_back({kv_str(kv, "route", "crossing"),
                                     kv_str(kv, "point", "crossing"),
                                     kv_num(kv, "offset", "crossing")});
        } else {
            throw input_error("unknown network record '" + tag + "' in " + path);
        }
    }
    if (net.slots == 0) throw input_error("network file has no horizon record: " + path);
    return net;
}

// ---------------------------------------------------------------------------
// reports

void write_delay_report(const std::string& nodes_path, const std::string& flights_path,
                        const DelayReport& report, const std::string& config_hash) {
    {
        auto out = open_out(nodes_path, "delay-nodes", config_hash);
        out << "node,kind,mean_local,mean_propagated,flight_count\n";
        for (const auto& r : report.per_node)
            out << r.node_id << ',' << (r.kind == NodeKind::airport ? "airport" : "enroute")
                << ',' << f12(r.mean_local) << ',' << f12(r.mean_propagated) << ','
                << r.flight_count << "\n";
        out << "network,avg_delay," << f12(report.network_avg_delay) << ",,"
            << report.flight_count << "\n";
    }
    {
        auto out = open_out(flights_path, "delay-flights", config_hash);
        out << "flight,node,op,scheduled,adjusted,local,propagated\n";
        for (const auto& r : report.per_flight)
            out << r.flight_id << ',' << r.node_id << ',' << r.op << ',' << f12(r.scheduled)
                << ',' << f12(r.adjusted) << ',' << f12(r.local) << ',' << f12(r.propagated)
                << "\n";
    }
}

void write_scenario_result(const std::string& path, const ScenarioResult& result,
                           const std::string& config_hash) {
    auto out = open_out(path, "scenario", config_hash);
    out << "scenario,scope,id,metric,baseline,scenario_value,delta\n";
    const std::string& sid = result.scenario_id;
    out << sid << ",network,all,avg_delay," << f12(result.baseline.network_avg_delay) << ','
        << f12(result.scenario.network_avg_delay) << ',' << f12(result.network_delta)
        << "\n";
    auto find_node = [](const DelayReport& rep, const std::string& id) {
        for (const auto& r : rep.per_node)
            if (r.node_id == id) return std::pair<double, double>{r.mean_local,
                                                                  r.mean_propagated};
        return std::pair<double, double>{0.0, 0.0};
    };
    for (const auto& d : result.node_deltas) {
        const auto base = find_node(result.baseline, d.node_id);
        const auto scen = find_node(result.scenario, d.node_id);
        out << sid << ",node," << d.node_id << ",local," << f12(base.first) << ','
            << f12(scen.first) << ',' << f12(d.local) << "\n";
        out << sid << ",node," << d.node_id << ",propagated," << f12(base.second) << ','
            << f12(scen.second) << ',' << f12(d.propagated) << "\n";
    }
    for (const auto& s : result.subset_deltas)
        out << sid << ",subset," << s.airport << ",avg_delay," << f12(s.baseline_avg) << ','
            << f12(s.scenario_avg) << ',' << f12(s.delta) << "\n";
}

void write_expansion_ranking(const std::string& path,
                             const std::vector<ExpansionRank>& ranks,
                             const std::string& config_hash) {
    auto out = open_out(path, "ranking", config_hash);
    out << "rank,airport,single_delta,cumulative_delta\n";
    for (size_t i = 0; i < ranks.size(); ++i)
        out << (i + 1) << ',' << ranks[i].airport << ',' << f12(ranks[i].single_delta) << ','
            << f12(ranks[i].cumulative_delta) << "\n";
}

} // namespace airnet
