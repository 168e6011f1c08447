// Pipeline driver: mine-routes, find-congestion, build-network, simulate,
// scenario, report. Every command reads a flat key=value config (flags win
// over file values), stamps its outputs with the resolved config hash, and is
// deterministic for a given config and seed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "airnet/artifacts.hpp"
#include "airnet/config.hpp"
#include "airnet/congestion_map.hpp"
#include "airnet/errors.hpp"
#include "airnet/ingest.hpp"
#include "airnet/network.hpp"
#include "airnet/route_mining.hpp"
#include "airnet/scenario.hpp"
#include "airnet/simulation.hpp"
#include "airnet/synth.hpp"
#include "airnet/util.hpp"

using namespace airnet;

namespace {

struct Cli {
    RunConfig cfg;
    std::string out_dir = "out";

    std::string path(const std::string& name) const { return out_dir + "/" + name; }

    std::string input(const std::string& key, const std::string& fallback_name) const {
        // explicit config path, else the conventional name in the output dir
        const std::string v = cfg.get_str(key);
        return v.empty() ? path(fallback_name) : v;
    }

    void check_hash(const ArtifactInfo& info, const std::string& what) const {
        if (!info.config_hash.empty() && info.config_hash != "none" &&
            info.config_hash != cfg.hash())
            std::cerr << "warning: " << what
                      << " was produced by a different config (hash " << info.config_hash
                      << ", current " << cfg.hash() << ")\n";
    }
};

std::vector<FlightRecord> load_schedule(const Cli& cli) {
    const std::string p = cli.cfg.require("schedule");
    std::ifstream in(p);
    if (!in) throw input_error("cannot open schedule file " + p);
    auto parsed = parse_schedule(in);
    if (!parsed.errors.empty())
        std::cerr << "warning: " << parsed.errors.size() << " schedule rows rejected (first: line "
                  << parsed.errors.front().line_no << ", " << parsed.errors.front().reason
                  << ")\n";
    return std::move(parsed.records);
}

double resolve_day_start(const Cli& cli, const std::vector<FlightRecord>& schedule) {
    const std::string v = cli.cfg.get_str("day_start");
    if (!v.empty()) return parse_time_value(v);
    double first = 0.0;
    bool any = false;
    for (const auto& f : schedule)
        if (!any || f.sched_dep < first) first = f.sched_dep, any = true;
    if (!any) return 0.0;
    return std::floor(first / 86400.0) * 86400.0; // midnight of the first departure
}

Buffers resolve_buffers(const Cli& cli) {
    Buffers b;
    if (cli.cfg.strict) {
        b.a_buffer = std::stod(cli.cfg.require("a_buffer"));
        b.e_buffer = std::stod(cli.cfg.require("e_buffer"));
    } else {
        b.a_buffer = cli.cfg.get_num("a_buffer", 15.0);
        b.e_buffer = cli.cfg.get_num("e_buffer", 10.0);
    }
    if (b.a_buffer < 0.0 || b.e_buffer < 0.0) throw config_error("buffers must be >= 0");
    return b;
}

void print_report_summary(const DelayReport& rep) {
    std::printf("network average delay per flight: %.3f min over %zu flights\n",
                rep.network_avg_delay, rep.flight_count);
    auto rows = rep.per_node;
    std::sort(rows.begin(), rows.end(), [](const NodeDelayRow& a, const NodeDelayRow& b) {
        if (a.mean_local != b.mean_local) return a.mean_local > b.mean_local;
        return a.node_id < b.node_id;
    });
    std::printf("top nodes by local delay:\n");
    for (size_t i = 0; i < rows.size() && i < 5; ++i)
        std::printf("  %-8s %-8s local %8.3f  propagated %8.3f  flights %zu\n",
                    rows[i].node_id.c_str(),
                    rows[i].kind == NodeKind::airport ? "airport" : "enroute",
                    rows[i].mean_local, rows[i].mean_propagated, rows[i].flight_count);
}

// ---------------------------------------------------------------------------

int cmd_mine_routes(const Cli& cli) {
    const std::string tracks_path = cli.cfg.require("tracks");
    std::ifstream in(tracks_path);
    if (!in) throw input_error("cannot open track file " + tracks_path);
    auto parsed = parse_tracks(in);
    if (!parsed.errors.empty())
        std::cerr << "warning: " << parsed.errors.size() << " track rows rejected\n";

    auto trajectories =
        assemble_trajectories(std::move(parsed.points),
                              size_t(cli.cfg.get_int("min_points", 10)),
                              cli.cfg.get_num("max_gap_s", 1800.0));

    const int min_traffic = cli.cfg.get_int("min_traffic", 0);
    if (min_traffic > 0) {
        std::map<std::pair<std::string, std::string>, int> per_od;
        for (const auto& t : trajectories) per_od[{t.origin, t.destination}] += 1;
        std::vector<Trajectory> kept;
        for (auto& t : trajectories)
            if (per_od[{t.origin, t.destination}] >= min_traffic) kept.push_back(std::move(t));
        trajectories = std::move(kept);
        if (trajectories.empty())
            std::cerr << "warning: min_traffic=" << min_traffic
                      << " filtered out every OD pair; writing an empty artifact\n";
    }

    MiningOptions opt;
    opt.m = size_t(cli.cfg.get_int("m", 50));
    opt.minpt = size_t(cli.cfg.get_int("minpt", 5));
    opt.epsilon_override = cli.cfg.get_num("epsilon", 0.0);
    opt.scale_to_daily = cli.cfg.get_num("scale_to_daily", 1.0);
    const auto mined = mine_routes(trajectories, opt);
    for (const auto& w : mined.warnings)
        std::cerr << "warning: " << w.od << ": " << w.reason << "\n";

    write_routes(cli.path("routes.csv"), mined.routes, cli.cfg.hash());

    std::map<std::string, int> per_od;
    for (const auto& r : mined.routes) per_od[r.origin + "-" + r.destination] += 1;
    std::printf("%zu trajectories -> %zu routes over %zu OD pairs\n", trajectories.size(),
                mined.routes.size(), per_od.size());
    for (const auto& [od, n] : per_od) std::printf("  %-12s %d routes\n", od.c_str(), n);
    return 0;
}

int cmd_find_congestion(const Cli& cli) {
    ArtifactInfo info;
    const auto routes = read_routes(cli.input("routes", "routes.csv"), &info);
    cli.check_hash(info, "route artifact");
    if (routes.empty()) {
        std::cerr << "warning: no routes; writing empty congestion artifacts\n";
        write_heatmap(cli.path("heatmap.csv"), {}, GridFrame{}, cli.cfg.hash());
        write_congestion_points(cli.path("congestion.csv"), {}, cli.cfg.hash());
        return 0;
    }

    LatLon sw{1e9, 1e9}, ne{-1e9, -1e9};
    for (const auto& r : routes)
        for (const auto& p : r.centroid) {
            sw.lat = std::min(sw.lat, p.lat), sw.lon = std::min(sw.lon, p.lon);
            ne.lat = std::max(ne.lat, p.lat), ne.lon = std::max(ne.lon, p.lon);
        }
    const auto frame = GridFrame::make(sw, ne, cli.cfg.get_num("grid_nm", 20.0));
    auto metrics = accumulate_grid_metrics(routes, frame);

    ScoreWeights w{cli.cfg.get_num("w1", 1.0), cli.cfg.get_num("w2", 1.0),
                   cli.cfg.get_num("w3", 2.0)};
    score_grids(metrics.grids, w);

    HotSelection sel;
    sel.mode = cli.cfg.get_str("hot_mode", "threshold") == "top_n" ? HotSelection::top_n
                                                                   : HotSelection::threshold;
    sel.score_threshold = cli.cfg.get_num("threshold", 0.6);
    sel.n = size_t(cli.cfg.get_int("top_n", 75));
    const auto hot = select_hot_grids(metrics.grids, sel, w);
    if (hot.empty()) std::cerr << "warning: selection rule matched no grids\n";

    const auto points = cluster_hot_grids(hot, frame, cli.cfg.get_num("cluster_eps_nm", 50.0),
                                          size_t(cli.cfg.get_int("cluster_minpt", 2)));

    std::vector<Grid> occupied;
    for (const auto& g : metrics.grids)
        if (g.traffic > 0.0) occupied.push_back(g);
    write_heatmap(cli.path("heatmap.csv"), occupied, frame, cli.cfg.hash());
    write_congestion_points(cli.path("congestion.csv"), points, cli.cfg.hash());

    const std::string sweep = cli.cfg.get_str("sweep_weights");
    if (!sweep.empty()) {
        std::vector<double> weights;
        for (const auto& tok : split(sweep, ',')) weights.push_back(std::stod(tok));
        const auto rep = sensitivity_sweep(metrics.grids, weights, w, sel);
        std::ofstream out(cli.path("sensitivity.csv"));
        out << "# sensitivity v1\n# config_hash " << cli.cfg.hash() << "\n";
        out << "w_entropy,selected_cells\n";
        for (const auto& e : rep.entries) {
            out << fmt_double(e.w_entropy, 12) << ',';
            for (size_t i = 0; i < e.selected.size(); ++i) {
                if (i) out << ';';
                out << e.selected[i].row << ':' << e.selected[i].col;
            }
            out << "\n";
        }
        out << "# stable cells: " << rep.intersection.size()
            << ", weight-sensitive: " << rep.weight_sensitive.size() << "\n";
    }

    std::printf("grid %dx%d (%.0f NM cells), weights (%.2g, %.2g, %.2g)\n", frame.rows,
                frame.cols, frame.cell_nm, w.w_traffic, w.w_routes, w.w_entropy);
    std::printf("%zu occupied cells, %zu hot, %zu congestion points\n", occupied.size(),
                hot.size(), points.size());
    return 0;
}

int cmd_build_network(const Cli& cli) {
    const auto tables = load_fixture_tables(cli.cfg.require("airports"),
                                            cli.cfg.require("points"));
    const size_t slots = size_t(cli.cfg.get_int("slots", 96));
    const double slot_minutes = cli.cfg.get_num("slot_minutes", 15.0);
    auto net = network_from_fixtures(tables, slots, slot_minutes,
                                     cli.cfg.get_int("truncation", 120));

    // Optional: replace fixture point locations with discovered congestion
    // points (service parameters still come from the fixture, matched by id).
    std::vector<CongestionPoint> cpoints;
    const std::string congestion = cli.cfg.get_str("congestion");
    if (!congestion.empty()) {
        ArtifactInfo info;
        cpoints = read_congestion_points(congestion, &info);
        cli.check_hash(info, "congestion artifact");
        net.points.clear();
        for (const auto& cp : cpoints) {
            const auto& row = tables.point(cp.point_id);
            NetworkNode n;
            n.node_id = cp.point_id;
            n.kind = NodeKind::enroute;
            n.location = cp.centroid;
            n.params.k = row.k;
            n.params.mu = double(row.mu_per_slot) / slot_minutes;
            n.params.N = cli.cfg.get_int("truncation", 120);
            n.demand.slot_minutes = slot_minutes;
            n.demand.rates.assign(slots, 0.0);
            net.points.push_back(std::move(n));
        }
    } else {
        for (const auto& p : net.points)
            cpoints.push_back({p.node_id, {}, p.location, 0.0, 0.0});
    }

    const std::string routes_path = cli.cfg.get_str("routes");
    if (!routes_path.empty()) {
        ArtifactInfo info;
        net.routes = read_routes(routes_path, &info);
        cli.check_hash(info, "route artifact");
        net.crossings = attach_points_to_routes(net.routes, cpoints,
                                                cli.cfg.get_num("corridor_nm", 30.0));
    } else {
        std::cerr << "warning: no route artifact given; network has no crossings\n";
    }

    const auto schedule = load_schedule(cli);
    net.epoch0_s = resolve_day_start(cli, schedule);
    for (auto& a : net.airports)
        a.demand = estimate_airport_demand(schedule, a.node_id, net.t0, slot_minutes, slots,
                                           net.epoch0_s);
    derive_enroute_demand(net, schedule, net.epoch0_s);

    write_network(cli.path("network.txt"), net, cli.cfg.hash());
    std::printf("network: %zu airports, %zu points, %zu routes, %zu crossings\n",
                net.airports.size(), net.points.size(), net.routes.size(),
                net.crossings.size());
    return 0;
}

int cmd_simulate(const Cli& cli) {
    ArtifactInfo info;
    const auto net = read_network(cli.input("network", "network.txt"), &info);
    cli.check_hash(info, "network artifact");
    const auto schedule = load_schedule(cli);
    const auto itineraries = build_itineraries(schedule);
    const Buffers buffers = resolve_buffers(cli);

    SimOptions opt;
    opt.epoch_offset_s = net.epoch0_s;
    opt.guard = cli.cfg.get_int("guard", 50);
    const auto report = simulate_day(net, itineraries, buffers, opt);
    if (report.truncation_warning)
        std::cerr << "warning: queue truncation or horizon spill observed\n";

    write_delay_report(cli.path("report_nodes.csv"), cli.path("report_flights.csv"), report,
                       cli.cfg.hash());
    print_report_summary(report);
    return 0;
}

ScenarioSpec parse_edits(const Cli& cli) {
    ScenarioSpec spec;
    spec.scenario_id = cli.cfg.get_str("scenario_id", "scenario");
    spec.elimination_multiplier = cli.cfg.get_num("elimination_multiplier", 100.0);
    const std::string edits = cli.cfg.get_str("edits");
    if (edits.empty()) return spec;
    for (const auto& item : split(edits, ';')) {
        const auto f = split(trim(item), ':');
        if (f.empty() || f[0].empty()) continue;
        ScenarioEdit e;
        if (f[0] == "runway") {
            if (f.size() != 3) throw config_error("runway edit needs runway:<airport>:<n>");
            e.kind = EditKind::runway_addition;
            e.target = f[1];
            e.magnitude = std::stod(f[2]);
        } else if (f[0] == "scale") {
            if (f.size() != 3) throw config_error("scale edit needs scale:<point|*>:<factor>");
            e.kind = EditKind::enroute_scale;
            e.target = f[1];
            e.magnitude = std::stod(f[2]);
        } else if (f[0] == "eliminate") {
            if (f.size() != 2) throw config_error("eliminate edit needs eliminate:<airport>");
            e.kind = EditKind::point_elimination_for_airport;
            e.target = f[1];
        } else {
            throw config_error("unknown edit kind '" + f[0] + "'");
        }
        spec.edits.push_back(std::move(e));
    }
    return spec;
}

int cmd_scenario(const Cli& cli) {
    ArtifactInfo info;
    const auto net = read_network(cli.input("network", "network.txt"), &info);
    cli.check_hash(info, "network artifact");
    const auto schedule = load_schedule(cli);
    const auto itineraries = build_itineraries(schedule);
    const Buffers buffers = resolve_buffers(cli);
    SimOptions opt;
    opt.epoch_offset_s = net.epoch0_s;
    opt.guard = cli.cfg.get_int("guard", 50);

    const ScenarioSpec spec = parse_edits(cli);
    const std::string rank = cli.cfg.get_str("rank_airports");
    if (spec.edits.empty() && rank.empty())
        throw config_error("scenario needs 'edits' or 'rank_airports'");

    if (!spec.edits.empty()) {
        // echo the capacity arithmetic of runway edits before the long run
        for (const auto& e : spec.edits) {
            if (e.kind != EditKind::runway_addition) continue;
            const NetworkNode* a = net.find_node(e.target);
            if (!a) continue;
            const double before = a->params.mu * 60.0;
            const double after = before * (e.magnitude + 1.0) / e.magnitude;
            std::printf("%s: runway addition, capacity %.0f -> %.0f per hour\n",
                        e.target.c_str(), before, after);
        }
        const auto result = run_scenario(net, itineraries, buffers, spec, opt);
        write_scenario_result(cli.path("scenario.csv"), result, cli.cfg.hash());
        std::printf("scenario '%s': network delta %.3f min per flight\n",
                    result.scenario_id.c_str(), result.network_delta);
        for (const auto& s : result.subset_deltas)
            std::printf("  flights to/from %s: %.3f -> %.3f min (delta %.3f)\n",
                        s.airport.c_str(), s.baseline_avg, s.scenario_avg, s.delta);
    }

    if (!rank.empty()) {
        std::vector<ExpansionCandidate> candidates;
        const auto names = split(rank, ',');
        const auto runways = split(cli.cfg.get_str("rank_runways"), ',');
        for (size_t i = 0; i < names.size(); ++i) {
            ExpansionCandidate c;
            c.airport = trim(names[i]);
            c.runways = i < runways.size() && !runways[i].empty() ? std::stoi(runways[i]) : 2;
            candidates.push_back(std::move(c));
        }
        const auto ranks =
            rank_cumulative_expansions(net, itineraries, buffers, candidates, opt);
        write_expansion_ranking(cli.path("ranking.csv"), ranks, cli.cfg.hash());
        std::printf("expansion ranking:\n");
        for (size_t i = 0; i < ranks.size(); ++i)
            std::printf("  %zu. %-6s single %.4f  cumulative %.4f\n", i + 1,
                        ranks[i].airport.c_str(), ranks[i].single_delta,
                        ranks[i].cumulative_delta);
    }
    return 0;
}

int cmd_report(const Cli& cli) {
    const std::string nodes_path = cli.input("nodes", "report_nodes.csv");
    std::ifstream in(nodes_path);
    if (!in) throw input_error("cannot open report " + nodes_path);
    DelayReport rep;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        const auto c = split(s, ',');
        if (c.size() < 5) continue;
        if (c[0] == "network") {
            rep.network_avg_delay = std::stod(c[2]);
            rep.flight_count = size_t(std::stoul(c[4]));
            continue;
        }
        NodeDelayRow row;
        row.node_id = c[0];
        row.kind = c[1] == "airport" ? NodeKind::airport : NodeKind::enroute;
        row.mean_local = std::stod(c[2]);
        row.mean_propagated = std::stod(c[3]);
        row.flight_count = size_t(std::stoul(c[4]));
        rep.per_node.push_back(std::move(row));
    }
    print_report_summary(rep);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-layer air-traffic network delay pipeline"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", seed;
    bool strict = false;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--out", out_dir, "output directory (default: out)");
    app.add_option("--seed", seed, "random seed override");
    app.add_flag("--strict", strict, "require explicit buffers and parameters");
    app.add_option("--set", overrides, "extra key=value config override (repeatable)")
        ->allow_extra_args(false);

    // per-command convenience flags, each mapped onto a config key
    std::map<std::string, std::string> flag_values;
    auto cfg_opt = [&](CLI::App* cmd, const std::string& flag, const std::string& key,
                       const std::string& help) {
        cmd->add_option(flag, flag_values[key], help);
    };

    auto* mine = app.add_subcommand("mine-routes", "cluster trajectories into routes");
    cfg_opt(mine, "--tracks", "tracks", "track point file");
    cfg_opt(mine, "--min-traffic", "min_traffic", "minimum trajectories per OD pair");
    cfg_opt(mine, "--minpt", "minpt", "density threshold");
    cfg_opt(mine, "--epsilon", "epsilon", "fixed clustering radius (NM)");

    auto* cong = app.add_subcommand("find-congestion", "score grids and extract hot points");
    cfg_opt(cong, "--routes", "routes", "route artifact");
    cfg_opt(cong, "--grid-nm", "grid_nm", "cell size in NM");
    cfg_opt(cong, "--threshold", "threshold", "normalized score threshold");
    cfg_opt(cong, "--top-n", "top_n", "select the n best-scoring grids");
    cfg_opt(cong, "--hot-mode", "hot_mode", "threshold or top_n");

    auto* build = app.add_subcommand("build-network", "assemble the queueing network");
    cfg_opt(build, "--airports", "airports", "airport parameter fixture");
    cfg_opt(build, "--points", "points", "en-route parameter fixture");
    cfg_opt(build, "--routes", "routes", "route artifact");
    cfg_opt(build, "--congestion", "congestion", "congestion point artifact");
    cfg_opt(build, "--schedule", "schedule", "schedule file");
    cfg_opt(build, "--corridor-nm", "corridor_nm", "route-point attachment corridor");

    auto* sim = app.add_subcommand("simulate", "run the day loop and report delays");
    cfg_opt(sim, "--network", "network", "network artifact");
    cfg_opt(sim, "--schedule", "schedule", "schedule file");
    cfg_opt(sim, "--a-buffer", "a_buffer", "ground turnaround slack (min)");
    cfg_opt(sim, "--e-buffer", "e_buffer", "flight-time padding (min)");

    auto* scen = app.add_subcommand("scenario", "what-if capacity edits and rankings");
    cfg_opt(scen, "--network", "network", "network artifact");
    cfg_opt(scen, "--schedule", "schedule", "schedule file");
    cfg_opt(scen, "--edits", "edits", "runway:<ap>:<n>;scale:<pt|*>:<f>;eliminate:<ap>");
    cfg_opt(scen, "--rank", "rank_airports", "comma-separated expansion candidates");
    cfg_opt(scen, "--a-buffer", "a_buffer", "ground turnaround slack (min)");
    cfg_opt(scen, "--e-buffer", "e_buffer", "flight-time padding (min)");

    auto* rept = app.add_subcommand("report", "print the summary of a delay report");
    cfg_opt(rept, "--nodes", "nodes", "per-node report artifact");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1; // --help exits clean; bad usage is an input problem
    }

    try {
        Cli cli;
        if (!config_path.empty()) cli.cfg = load_config(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw config_error("--set expects key=value, got '" + kv + "'");
            cli.cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        for (const auto& [key, value] : flag_values)
            if (!value.empty()) cli.cfg.set(key, value);
        if (!seed.empty()) cli.cfg.set("seed", seed);
        cli.cfg.strict = strict;
        cli.out_dir = out_dir;
        std::filesystem::create_directories(cli.out_dir);

        if (app.got_subcommand(mine)) return cmd_mine_routes(cli);
        if (app.got_subcommand(cong)) return cmd_find_congestion(cli);
        if (app.got_subcommand(build)) return cmd_build_network(cli);
        if (app.got_subcommand(sim)) return cmd_simulate(cli);
        if (app.got_subcommand(scen)) return cmd_scenario(cli);
        if (app.got_subcommand(rept)) return cmd_report(cli);
        return 1;
    } catch (const numeric_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
