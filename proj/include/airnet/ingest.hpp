#pragma once
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airnet/geo.hpp"

namespace airnet {

struct TrackPoint {
    std::string flight_id;
    double timestamp = 0.0; // seconds since epoch
    double lat = 0.0, lon = 0.0;
    double alt_ft = 0.0;
    double speed_kn = 0.0;
    std::string origin, destination;
    std::string registration;
};

struct Trajectory {
    std::string flight_id;
    std::string origin, destination;
    std::vector<TrackPoint> points; // strictly ascending timestamps
};

struct FlightRecord {
    std::string flight_id;
    std::string origin, destination;
    double sched_dep = 0.0, sched_arr = 0.0; // seconds since epoch
    std::optional<double> actual_dep, actual_arr;
    std::string registration;
};

struct Itinerary {
    std::string registration;
    std::vector<FlightRecord> flights; // sorted by sched_dep, chained o/d
};

// One rejected input row and why.
struct RowError {
    size_t line_no;
    std::string reason;
};

// Column-name remapping: logical name -> header name in the file. Logical
// names for tracks: flight_id timestamp lat lon alt speed origin destination
// registration; for schedules: flight_id origin destination sched_dep
// sched_arr actual_dep actual_arr registration.
using ColumnMap = std::map<std::string, std::string>;

struct TrackParseResult {
    std::vector<TrackPoint> points;
    std::vector<RowError> errors;
};
struct ScheduleParseResult {
    std::vector<FlightRecord> records;
    std::vector<RowError> errors;
};

// Delimited text with a header row. Rows failing validation (bad coordinates,
// unparseable fields) are recorded, not dropped silently. Lines starting with
// '#' are skipped (artifact headers). Times may be epoch seconds or ISO-8601;
// the format is detected per column from the first parsed row.
TrackParseResult parse_tracks(std::istream& in, const ColumnMap& columns = {},
                              char delim = ',');
ScheduleParseResult parse_schedule(std::istream& in, const ColumnMap& columns = {},
                                   char delim = ',');

// Group points by (flight_id, origin, destination), sort by time, split at
// gaps larger than max_gap_s, and keep groups of at least min_points.
std::vector<Trajectory> assemble_trajectories(std::vector<TrackPoint> points,
                                              size_t min_points = 10,
                                              double max_gap_s = 1800.0);

// m points at equal great-circle arc-length fractions along the track,
// endpoints preserved. Returns (lat1, lon1, ..., lat_m, lon_m).
std::vector<double> resample_trajectory(const Trajectory& traj, size_t m = 50);

// Same resampling, but also reporting the elapsed minutes from departure at
// each resampled point (interpolated from the original timestamps).
struct ResampledTrack {
    std::vector<double> coords;       // 2m values
    std::vector<double> elapsed_min;  // m values
};
ResampledTrack resample_with_times(const Trajectory& traj, size_t m = 50);

// Chain flight records into per-aircraft itineraries. A chain breaks where
// the previous destination is not the next origin or times overlap.
std::vector<Itinerary> build_itineraries(std::vector<FlightRecord> records);

double parse_time_value(const std::string& raw); // epoch seconds or ISO-8601

} // namespace airnet
