#include "airnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "airnet/errors.hpp"
#include "airnet/util.hpp"

namespace airnet {

namespace {

constexpr double kPi = 3.14159265358979323846;

const SynthAirport& airport_of(const std::vector<SynthAirport>& airports,
                               const std::string& code) {
    for (const auto& a : airports)
        if (a.code == code) return a;
    throw config_error("bundle references unknown airport '" + code + "'");
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

// Lateral displacement is tapered with sin(pi*s) so every flight starts and
// ends exactly at its airports regardless of bundle offset or noise.
struct BundleFrame {
    LocalProjection proj;
    double ox, oy, dx, dy; // endpoint coordinates, NM
    double nx, ny;         // unit normal to the OD direction

    BundleFrame(const LatLon& o, const LatLon& d)
        : proj({(o.lat + d.lat) / 2.0, (o.lon + d.lon) / 2.0}) {
        auto [x0, y0] = proj.to_xy(o);
        auto [x1, y1] = proj.to_xy(d);
        ox = x0, oy = y0, dx = x1, dy = y1;
        const double len = std::hypot(dx - ox, dy - oy);
        if (len <= 0.0) throw config_error("bundle endpoints coincide");
        nx = -(dy - oy) / len;
        ny = (dx - ox) / len;
    }

    LatLon at(double s, double lateral_nm) const {
        const double x = ox + s * (dx - ox) + nx * lateral_nm * std::sin(kPi * s);
        const double y = oy + s * (dy - oy) + ny * lateral_nm * std::sin(kPi * s);
        return proj.to_latlon(x, y);
    }
};

std::vector<LatLon> sample_path(const BundleFrame& frame, int n, double base_nm,
                                double wobble_nm, Rng& rng) {
    std::vector<LatLon> pts;
    pts.reserve(size_t(n));
    for (int j = 0; j < n; ++j) {
        const double s = double(j) / double(n - 1);
        const double jitter = wobble_nm > 0.0 ? wobble_nm * rng.normal() * std::sin(kPi * s)
                                              : 0.0;
        pts.push_back(frame.at(s, base_nm + jitter));
    }
    return pts;
}

// Greedy airframe chaining: reuse a parked aircraft when one is at the right
// airport in time, otherwise introduce a new tail number.
void assign_registrations(std::vector<FlightRecord>& schedule, int chain_max,
                          double turnaround_s) {
    std::vector<size_t> order(schedule.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return schedule[a].sched_dep < schedule[b].sched_dep;
    });
    struct Tail {
        std::string reg;
        std::string at;
        double free_from;
        int legs;
    };
    std::vector<Tail> fleet;
    int next_tail = 1;
    for (size_t idx : order) {
        auto& f = schedule[idx];
        Tail* pick = nullptr;
        if (chain_max > 1) {
            for (auto& t : fleet) {
                if (t.at != f.origin || t.legs >= chain_max) continue;
                if (t.free_from > f.sched_dep) continue;
                if (!pick || t.free_from < pick->free_from) pick = &t;
            }
        }
        if (!pick) {
            char reg[16];
            std::snprintf(reg, sizeof reg, "AC%04d", next_tail++);
            fleet.push_back({reg, f.origin, 0.0, 0});
            pick = &fleet.back();
        }
        f.registration = pick->reg;
        pick->at = f.destination;
        pick->free_from = f.sched_arr + turnaround_s;
        pick->legs += 1;
    }
}

} // namespace

SynthResult generate_day(const SynthSpec& spec) {
    if (spec.points_per_track < 2) throw config_error("need at least 2 points per track");
    SynthResult out;
    Rng rng(spec.seed);
    std::string manifest;
    manifest += "# ground truth for the synthetic day\n";
    manifest += "seed=" + std::to_string(spec.seed) + "\n";

    std::map<std::string, int> bundles_per_od;
    std::map<std::string, int> bundle_index;
    int flight_no = 1;
    double max_abs_offset = 0.0;

    auto emit_flight = [&](const std::string& id, const SynthBundle& b,
                           const std::vector<LatLon>& path, double dep_min) {
        const auto cum = cumulative_arclength_nm(path);
        FlightRecord rec;
        rec.flight_id = id;
        rec.origin = b.origin;
        rec.destination = b.destination;
        // schedules are whole-second granular, matching what the writer emits
        rec.sched_dep = std::round(spec.day_start_epoch + dep_min * 60.0);
        rec.sched_arr = std::round(spec.day_start_epoch +
                                   (dep_min + cum.back() / b.speed_kn * 60.0) * 60.0);
        for (size_t j = 0; j < path.size(); ++j) {
            TrackPoint p;
            p.flight_id = id;
            p.timestamp =
                std::round(spec.day_start_epoch + (dep_min + cum[j] / b.speed_kn * 60.0) * 60.0);
            p.lat = path[j].lat;
            p.lon = path[j].lon;
            const double s = double(j) / double(path.size() - 1);
            p.alt_ft = 32000.0 * std::sin(kPi * s);
            p.speed_kn = b.speed_kn;
            p.origin = b.origin;
            p.destination = b.destination;
            out.tracks.push_back(std::move(p));
        }
        out.schedule.push_back(std::move(rec));
    };

    for (const auto& b : spec.bundles) {
        const auto& o = airport_of(spec.airports, b.origin);
        const auto& d = airport_of(spec.airports, b.destination);
        const BundleFrame frame(o.location, d.location);
        const std::string od = b.origin + "-" + b.destination;
        const int bi = bundle_index[od]++;
        bundles_per_od[od] += 1;
        max_abs_offset = std::max(max_abs_offset, std::abs(b.offset_nm));

        manifest += "bundle=" + od + "#" + std::to_string(bi) +
                    " flights=" + std::to_string(b.flights) +
                    " offset_nm=" + fmt("%.1f", b.offset_nm) +
                    " spread_nm=" + fmt("%.1f", b.spread_nm) + "\n";

        // true crossing offsets along the noise-free centerline
        std::vector<LatLon> center;
        std::vector<double> elapsed;
        for (int j = 0; j < spec.points_per_track; ++j)
            center.push_back(frame.at(double(j) / double(spec.points_per_track - 1),
                                      b.offset_nm));
        const auto ccum = cumulative_arclength_nm(center);
        for (const auto& [pid, loc] : spec.probe_points) {
            const auto ca = closest_approach(center, loc);
            if (ca.distance_nm > spec.probe_corridor_nm) continue;
            const double off = ca.arc_fraction * ccum.back() / b.speed_kn * 60.0;
            manifest += "crossing=" + od + "#" + std::to_string(bi) + " point=" + pid +
                        " offset_min=" + fmt("%.3f", off) + "\n";
        }

        for (int i = 0; i < b.flights; ++i) {
            const double dep_min = rng.uniform(spec.dep_start_min, spec.dep_end_min);
            const double delta = b.spread_nm * rng.normal();
            char id[16];
            std::snprintf(id, sizeof id, "F%04d", flight_no++);
            emit_flight(id, b,
                        sample_path(frame, spec.points_per_track, b.offset_nm + delta,
                                    0.3, rng),
                        dep_min);
        }
    }

    // Wandering flights on the first bundle's OD pair, far from every bundle
    // and from each other, to exercise noise labeling.
    if (spec.outliers > 0) {
        if (spec.bundles.empty()) throw config_error("outliers need at least one bundle");
        const auto& b = spec.bundles.front();
        const auto& o = airport_of(spec.airports, b.origin);
        const auto& d = airport_of(spec.airports, b.destination);
        const BundleFrame frame(o.location, d.location);
        for (int i = 0; i < spec.outliers; ++i) {
            const double side = (i % 2 == 0) ? 1.0 : -1.0;
            const double magnitude = 3.0 * max_abs_offset + 60.0 * double(i + 1);
            const double dep_min = rng.uniform(spec.dep_start_min, spec.dep_end_min);
            char id[16];
            std::snprintf(id, sizeof id, "OUT%02d", i + 1);
            emit_flight(id, b,
                        sample_path(frame, spec.points_per_track, side * magnitude, 0.3,
                                    rng),
                        dep_min);
        }
    }

    assign_registrations(out.schedule, spec.chain_max, spec.turnaround_min * 60.0);
    {
        std::map<std::string, std::string> reg_of;
        for (const auto& f : out.schedule) reg_of[f.flight_id] = f.registration;
        for (auto& p : out.tracks) p.registration = reg_of[p.flight_id];
    }

    manifest += "flights=" + std::to_string(out.schedule.size()) + "\n";
    manifest += "outliers=" + std::to_string(spec.outliers) + "\n";
    for (const auto& [od, n] : bundles_per_od)
        manifest += "od=" + od + " bundles=" + std::to_string(n) + "\n";

    // true per-airport demand: scheduled movements per 15-minute slot
    std::map<std::string, std::map<int, int>> demand;
    for (const auto& f : out.schedule) {
        demand[f.origin][int((f.sched_dep - spec.day_start_epoch) / 60.0 / 15.0)] += 1;
        demand[f.destination][int((f.sched_arr - spec.day_start_epoch) / 60.0 / 15.0)] += 1;
    }
    for (const auto& [code, slots] : demand)
        for (const auto& [slot, ops] : slots)
            manifest += "demand=" + code + " slot=" + std::to_string(slot) +
                        " ops=" + std::to_string(ops) + "\n";

    out.manifest = std::move(manifest);
    return out;
}

std::vector<FlightRecord> generate_fleet_schedule(const FleetSpec& spec) {
    if (spec.airports.size() < 2) throw config_error("fleet needs at least two airports");
    if (spec.chain_min < 1 || spec.chain_max < spec.chain_min)
        throw config_error("bad chain length bounds");
    const bool weighted = !spec.airport_weights.empty();
    double weight_total = 0.0;
    if (weighted) {
        if (spec.airport_weights.size() != spec.airports.size())
            throw config_error("airport_weights must match the airport list");
        for (double w : spec.airport_weights) {
            if (w < 0.0) throw config_error("airport weights must be nonnegative");
            weight_total += w;
        }
        if (weight_total <= 0.0) throw config_error("airport weights sum to zero");
    }
    // draw an airport index by weight, optionally excluding one
    auto draw = [&](Rng& rng, size_t excluded) {
        const double skip = excluded < spec.airports.size() ? spec.airport_weights[excluded] : 0.0;
        double u = rng.uniform() * (weight_total - skip);
        for (size_t i = 0; i < spec.airports.size(); ++i) {
            if (i == excluded) continue;
            u -= spec.airport_weights[i];
            if (u < 0.0) return i;
        }
        for (size_t i = spec.airports.size(); i-- > 0;)
            if (i != excluded && spec.airport_weights[i] > 0.0) return i;
        return excluded == 0 ? size_t(1) : size_t(0);
    };
    std::vector<FlightRecord> schedule;
    Rng rng(spec.seed);
    int tail_no = 1, flight_no = 1;
    const size_t none = spec.airports.size();
    while (int(schedule.size()) < spec.flights) {
        char reg[16];
        std::snprintf(reg, sizeof reg, "AC%05d", tail_no++);
        size_t at = weighted ? draw(rng, none)
                             : size_t(rng.uniform_int(0, int(spec.airports.size()) - 1));
        const int legs = rng.uniform_int(spec.chain_min, spec.chain_max);
        double dep_min = rng.uniform(spec.dep_start_min, spec.dep_end_min);
        for (int l = 0; l < legs && int(schedule.size()) < spec.flights; ++l) {
            size_t to;
            if (weighted) {
                to = draw(rng, at);
            } else {
                to = size_t(rng.uniform_int(0, int(spec.airports.size()) - 2));
                if (to >= at) ++to; // anywhere but here
            }
            const double dist =
                gc_distance_nm(spec.airports[at].location, spec.airports[to].location);
            const double flight_min = dist / spec.speed_kn * 60.0;
            const double arr_min = dep_min + flight_min;
            if (arr_min > 1435.0) break; // keep the whole chain inside the day
            FlightRecord f;
            char fid[16];
            std::snprintf(fid, sizeof fid, "F%05d", flight_no++);
            f.flight_id = fid;
            f.registration = reg;
            f.origin = spec.airports[at].code;
            f.destination = spec.airports[to].code;
            f.sched_dep = std::round(spec.day_start_epoch + dep_min * 60.0);
            f.sched_arr = std::round(spec.day_start_epoch + arr_min * 60.0);
            schedule.push_back(std::move(f));
            at = to;
            dep_min = arr_min + spec.turnaround_min + rng.uniform(0.0, 20.0);
        }
    }
    return schedule;
}

void write_synth_files(const SynthResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir + "/tracks.csv");
        out << "flight_id,timestamp,lat,lon,alt,speed,origin,destination,registration\n";
        for (const auto& p : result.tracks) {
            char line[256];
            std::snprintf(line, sizeof line, "%s,%.0f,%.6f,%.6f,%.0f,%.1f,%s,%s,%s\n",
                          p.flight_id.c_str(), p.timestamp, p.lat, p.lon, p.alt_ft,
                          p.speed_kn, p.origin.c_str(), p.destination.c_str(),
                          p.registration.c_str());
            out << line;
        }
    }
    {
        std::ofstream out(dir + "/schedule.csv");
        out << "flight_id,origin,destination,sched_dep,sched_arr,registration\n";
        for (const auto& f : result.schedule) {
            char line[256];
            std::snprintf(line, sizeof line, "%s,%s,%s,%.0f,%.0f,%s\n",
                          f.flight_id.c_str(), f.origin.c_str(), f.destination.c_str(),
                          f.sched_dep, f.sched_arr, f.registration.c_str());
            out << line;
        }
    }
    {
        std::ofstream out(dir + "/manifest.txt");
        out << result.manifest;
    }
}

} // namespace airnet
