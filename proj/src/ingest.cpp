#include "airnet/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <set>
#include <sstream>

#include "airnet/errors.hpp"
#include "airnet/util.hpp"

namespace airnet {

namespace {

bool parse_number(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

// days since civil epoch 1970-01-01 (Howard Hinnant's algorithm)
int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

bool parse_iso8601(const std::string& raw, double& out) {
    // YYYY-MM-DD[T ]HH:MM[:SS[.frac]][Z|+hh:mm|-hh:mm]
    const std::string s = trim(raw);
    int y, mo, d, h, mi;
    double sec = 0.0;
    int n = 0;
    char sep;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi, &n) != 6)
        return false;
    if (sep != 'T' && sep != ' ') return false;
    size_t pos = size_t(n);
    if (pos < s.size() && s[pos] == ':') {
        size_t used = 0;
        try {
            sec = std::stod(s.substr(pos + 1), &used);
        } catch (...) {
            return false;
        }
        pos += 1 + used;
    }
    double tz_offset_s = 0.0;
    if (pos < s.size()) {
        if (s[pos] == 'Z') {
            pos += 1;
        } else if (s[pos] == '+' || s[pos] == '-') {
            int th = 0, tm = 0;
            int consumed = 0;
            if (std::sscanf(s.c_str() + pos + 1, "%2d:%2d%n", &th, &tm, &consumed) == 2 ||
                std::sscanf(s.c_str() + pos + 1, "%2d%2d%n", &th, &tm, &consumed) == 2) {
                tz_offset_s = (th * 3600 + tm * 60) * (s[pos] == '+' ? 1.0 : -1.0);
                pos += 1 + size_t(consumed);
            } else {
                return false;
            }
        }
    }
    if (pos != s.size()) return false;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec >= 61.0)
        return false;
    out = double(days_from_civil(y, mo, d)) * 86400.0 + h * 3600.0 + mi * 60.0 + sec -
          tz_offset_s;
    return true;
}

// Per-column time convention, latched from the first row that parses.
struct TimeFormat {
    enum Kind { unknown, epoch, iso } kind = unknown;
    bool parse(const std::string& raw, double& out) {
        double num;
        switch (kind) {
        case epoch:
            return parse_number(raw, out);
        case iso:
            return parse_iso8601(raw, out);
        case unknown:
            if (parse_number(raw, num)) {
                kind = epoch;
                out = num;
                return true;
            }
            if (parse_iso8601(raw, out)) {
                kind = iso;
                return true;
            }
            return false;
        }
        return false;
    }
};

struct Header {
    std::map<std::string, size_t> index;
    size_t require(const std::string& logical, const ColumnMap& columns) const {
        auto mapped = columns.count(logical) ? columns.at(logical) : logical;
        auto it = index.find(mapped);
        if (it == index.end())
            throw input_error("missing mandatory column '" + mapped + "'");
        return it->second;
    }
    std::optional<size_t> optional(const std::string& logical, const ColumnMap& columns) const {
        auto mapped = columns.count(logical) ? columns.at(logical) : logical;
        auto it = index.find(mapped);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }
};

Header read_header(std::istream& in, char delim, size_t& line_no) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (!line.empty() && line[0] != '#') break;
        line.clear();
    }
    if (line.empty()) throw input_error("empty input: no header row");
    Header h;
    auto cells = split(line, delim);
    for (size_t i = 0; i < cells.size(); ++i) h.index[trim(cells[i])] = i;
    return h;
}

const std::string& cell(const std::vector<std::string>& cells, size_t i) {
    static const std::string empty;
    return i < cells.size() ? cells[i] : empty;
}

} // namespace

double parse_time_value(const std::string& raw) {
    TimeFormat fmt;
    double out;
    if (!fmt.parse(raw, out)) throw input_error("unparseable time value '" + raw + "'");
    return out;
}

TrackParseResult parse_tracks(std::istream& in, const ColumnMap& columns, char delim) {
    TrackParseResult res;
    size_t line_no = 0;
    const Header h = read_header(in, delim, line_no);
    const size_t c_id = h.require("flight_id", columns);
    const size_t c_ts = h.require("timestamp", columns);
    const size_t c_lat = h.require("lat", columns);
    const size_t c_lon = h.require("lon", columns);
    const size_t c_alt = h.require("alt", columns);
    const size_t c_spd = h.require("speed", columns);
    const size_t c_org = h.require("origin", columns);
    const size_t c_dst = h.require("destination", columns);
    const size_t c_reg = h.require("registration", columns);

    TimeFormat ts_fmt;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line, delim);
        TrackPoint p;
        p.flight_id = trim(cell(cells, c_id));
        p.origin = trim(cell(cells, c_org));
        p.destination = trim(cell(cells, c_dst));
        p.registration = trim(cell(cells, c_reg));
        std::string reason;
        if (p.flight_id.empty()) reason = "empty flight_id";
        if (reason.empty() && !ts_fmt.parse(cell(cells, c_ts), p.timestamp))
            reason = "unparseable timestamp '" + cell(cells, c_ts) + "'";
        if (reason.empty() && !parse_number(cell(cells, c_lat), p.lat))
            reason = "unparseable latitude '" + cell(cells, c_lat) + "'";
        if (reason.empty() && !parse_number(cell(cells, c_lon), p.lon))
            reason = "unparseable longitude '" + cell(cells, c_lon) + "'";
        if (reason.empty() && (p.lat < -90.0 || p.lat > 90.0))
            reason = "latitude out of range";
        if (reason.empty() && (p.lon < -180.0 || p.lon > 180.0))
            reason = "longitude out of range";
        if (reason.empty()) {
            if (!parse_number(cell(cells, c_alt), p.alt_ft)) p.alt_ft = 0.0;
            if (!parse_number(cell(cells, c_spd), p.speed_kn)) p.speed_kn = 0.0;
            res.points.push_back(std::move(p));
        } else {
            res.errors.push_back({line_no, std::move(reason)});
        }
    }
    return res;
}

ScheduleParseResult parse_schedule(std::istream& in, const ColumnMap& columns, char delim) {
    ScheduleParseResult res;
    size_t line_no = 0;
    const Header h = read_header(in, delim, line_no);
    const size_t c_id = h.require("flight_id", columns);
    const size_t c_org = h.require("origin", columns);
    const size_t c_dst = h.require("destination", columns);
    const size_t c_sd = h.require("sched_dep", columns);
    const size_t c_sa = h.require("sched_arr", columns);
    const auto c_ad = h.optional("actual_dep", columns);
    const auto c_aa = h.optional("actual_arr", columns);
    const size_t c_reg = h.require("registration", columns);

    TimeFormat fmt_sd, fmt_sa, fmt_ad, fmt_aa;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line, delim);
        FlightRecord r;
        r.flight_id = trim(cell(cells, c_id));
        r.origin = trim(cell(cells, c_org));
        r.destination = trim(cell(cells, c_dst));
        r.registration = trim(cell(cells, c_reg));
        std::string reason;
        if (r.flight_id.empty()) reason = "empty flight_id";
        if (reason.empty() && !fmt_sd.parse(cell(cells, c_sd), r.sched_dep))
            reason = "unparseable sched_dep";
        if (reason.empty() && !fmt_sa.parse(cell(cells, c_sa), r.sched_arr))
            reason = "unparseable sched_arr";
        if (reason.empty() && !(r.sched_dep < r.sched_arr))
            reason = "sched_dep not before sched_arr";
        if (reason.empty()) {
            double v;
            if (c_ad && !trim(cell(cells, *c_ad)).empty() && fmt_ad.parse(cell(cells, *c_ad), v))
                r.actual_dep = v;
            if (c_aa && !trim(cell(cells, *c_aa)).empty() && fmt_aa.parse(cell(cells, *c_aa), v))
                r.actual_arr = v;
            res.records.push_back(std::move(r));
        } else {
            res.errors.push_back({line_no, std::move(reason)});
        }
    }
    return res;
}

std::vector<Trajectory> assemble_trajectories(std::vector<TrackPoint> points,
                                              size_t min_points, double max_gap_s) {
    if (min_points < 2) throw config_error("min_points must be >= 2");
    std::stable_sort(points.begin(), points.end(), [](const TrackPoint& a, const TrackPoint& b) {
        if (a.flight_id != b.flight_id) return a.flight_id < b.flight_id;
        if (a.origin != b.origin) return a.origin < b.origin;
        if (a.destination != b.destination) return a.destination < b.destination;
        return a.timestamp < b.timestamp;
    });

    std::vector<Trajectory> out;
    Trajectory cur;
    auto flush = [&]() {
        if (cur.points.size() >= min_points) out.push_back(cur);
        cur.points.clear();
    };
    for (auto& p : points) {
        const bool same_group = !cur.points.empty() && cur.flight_id == p.flight_id &&
                                cur.origin == p.origin && cur.destination == p.destination;
        const bool gap = same_group && p.timestamp - cur.points.back().timestamp > max_gap_s;
        if (!same_group || gap) {
            flush();
            cur.flight_id = p.flight_id;
            cur.origin = p.origin;
            cur.destination = p.destination;
        }
        // drop exact-duplicate timestamps to keep ordering strict
        if (!cur.points.empty() && p.timestamp <= cur.points.back().timestamp) continue;
        cur.points.push_back(std::move(p));
    }
    flush();
    return out;
}

ResampledTrack resample_with_times(const Trajectory& traj, size_t m) {
    if (traj.points.size() < 2) throw config_error("trajectory needs at least 2 points");
    if (m < 2) throw config_error("resample count must be >= 2");

    std::vector<LatLon> poly;
    poly.reserve(traj.points.size());
    for (const auto& p : traj.points) poly.push_back({p.lat, p.lon});
    const auto cum = cumulative_arclength_nm(poly);
    const double total = cum.back();
    if (total <= 0.0) throw input_error("degenerate trajectory: zero-length path");

    ResampledTrack out;
    out.coords.reserve(2 * m);
    out.elapsed_min.reserve(m);
    const double t_dep = traj.points.front().timestamp;

    size_t seg = 0;
    for (size_t i = 0; i < m; ++i) {
        const double target = total * double(i) / double(m - 1);
        while (seg + 2 < cum.size() && cum[seg + 1] < target) ++seg;
        const double seg_len = cum[seg + 1] - cum[seg];
        const double u = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
        const auto& a = traj.points[seg];
        const auto& b = traj.points[seg + 1];
        out.coords.push_back(a.lat + u * (b.lat - a.lat));
        out.coords.push_back(a.lon + u * (b.lon - a.lon));
        out.elapsed_min.push_back((a.timestamp + u * (b.timestamp - a.timestamp) - t_dep) / 60.0);
    }
    // guard against arithmetic drift at the endpoints
    out.coords[0] = traj.points.front().lat;
    out.coords[1] = traj.points.front().lon;
    out.coords[2 * m - 2] = traj.points.back().lat;
    out.coords[2 * m - 1] = traj.points.back().lon;
    out.elapsed_min.back() = (traj.points.back().timestamp - t_dep) / 60.0;
    return out;
}

std::vector<double> resample_trajectory(const Trajectory& traj, size_t m) {
    return resample_with_times(traj, m).coords;
}

std::vector<Itinerary> build_itineraries(std::vector<FlightRecord> records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const FlightRecord& a, const FlightRecord& b) {
                         if (a.registration != b.registration)
                             return a.registration < b.registration;
                         return a.sched_dep < b.sched_dep;
                     });
    // duplicate (registration, sched_dep) is unresolvable ordering ambiguity
    std::string offenders;
    for (size_t i = 1; i < records.size(); ++i) {
        if (records[i].registration == records[i - 1].registration &&
            records[i].sched_dep == records[i - 1].sched_dep) {
            offenders += (offenders.empty() ? "" : ", ") + records[i].registration + "/" +
                         records[i].flight_id + "+" + records[i - 1].flight_id;
        }
    }
    if (!offenders.empty())
        throw input_error("ambiguous schedule: duplicate departure times for " + offenders);

    std::vector<Itinerary> out;
    Itinerary cur;
    auto flush = [&]() {
        if (!cur.flights.empty()) out.push_back(cur);
        cur.flights.clear();
    };
    for (auto& r : records) {
        const bool chains = !cur.flights.empty() && cur.registration == r.registration &&
                            cur.flights.back().destination == r.origin &&
                            cur.flights.back().sched_arr <= r.sched_dep;
        if (!chains) {
            flush();
            cur.registration = r.registration;
        }
        cur.flights.push_back(std::move(r));
    }
    flush();
    return out;
}

} // namespace airnet
