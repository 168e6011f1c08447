#pragma once
// Seeded synthetic-data generators. They emit the exact file formats the
// ingest module reads, plus a ground-truth manifest, so pipeline tests can
// check what the miners and estimators recover against what was planted.

#include <cstdint>
#include <string>
#include <vector>

#include "airnet/geo.hpp"
#include "airnet/ingest.hpp"

namespace airnet {

struct SynthAirport {
    std::string code;
    LatLon location;
};

// One planted traffic bundle: flights fly the OD great-circle displaced
// laterally by offset_nm (tapered to zero at the endpoints), with Gaussian
// cross-track noise of sigma spread_nm around the bundle centerline.
struct SynthBundle {
    std::string origin, destination;
    int flights = 20;
    double offset_nm = 0.0;
    double spread_nm = 5.0;
    double speed_kn = 450.0;
};

struct SynthSpec {
    std::vector<SynthAirport> airports;
    std::vector<SynthBundle> bundles;
    int outliers = 0;             // wandering flights on the first bundle's OD
    int points_per_track = 24;
    double day_start_epoch = 0.0; // epoch seconds at 00:00 of the synthetic day
    double dep_start_min = 360.0; // departure window within the day
    double dep_end_min = 1080.0;
    int chain_max = 1;            // max itinerary length when chaining airframes
    double turnaround_min = 45.0;
    // probe locations whose true crossing offsets go into the manifest
    std::vector<std::pair<std::string, LatLon>> probe_points;
    double probe_corridor_nm = 30.0;
    std::uint64_t seed = 1;
};

struct SynthResult {
    std::vector<TrackPoint> tracks;
    std::vector<FlightRecord> schedule;
    std::string manifest; // key=value text: planted bundles, offsets, demand
};

SynthResult generate_day(const SynthSpec& spec);

// Schedule-only generator for load tests: airframes random-walk across the
// airport set in chains, no trajectories. When airport_weights is set (one
// weight per airport, e.g. movement capacity), origins and destinations are
// drawn proportionally, so hubs see hub-sized traffic; empty means uniform.
struct FleetSpec {
    std::vector<SynthAirport> airports;
    std::vector<double> airport_weights;
    int flights = 5000;
    int chain_min = 2, chain_max = 5;
    double speed_kn = 450.0;
    double day_start_epoch = 0.0;
    double dep_start_min = 300.0, dep_end_min = 1150.0;
    double turnaround_min = 45.0;
    std::uint64_t seed = 1;
};

std::vector<FlightRecord> generate_fleet_schedule(const FleetSpec& spec);

// Write tracks.csv, schedule.csv, and manifest.txt under dir (fixed number
// formatting, so equal seeds give byte-identical files).
void write_synth_files(const SynthResult& result, const std::string& dir);

} // namespace airnet
