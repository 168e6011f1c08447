#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "airnet/errors.hpp"
#include "airnet/geo.hpp"
#include "airnet/ingest.hpp"
#include "airnet/synth.hpp"

using namespace airnet;
namespace fs = std::filesystem;

namespace {

SynthSpec two_bundle_spec() {
    SynthSpec spec;
    spec.airports = {{"AAA", {30.0, 100.0}}, {"BBB", {30.0, 104.0}}};
    SynthBundle north;
    north.origin = "AAA";
    north.destination = "BBB";
    north.flights = 20;
    north.offset_nm = 40.0;
    north.spread_nm = 5.0;
    SynthBundle south = north;
    south.offset_nm = -40.0;
    spec.bundles = {north, south};
    spec.outliers = 2;
    spec.points_per_track = 24;
    spec.seed = 7;
    return spec;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("a planted day is reproducible and seed-sensitive") {
    const auto spec = two_bundle_spec();
    const auto r1 = generate_day(spec);
    const auto r2 = generate_day(spec);

    CHECK(r1.manifest == r2.manifest);
    REQUIRE(r1.tracks.size() == r2.tracks.size());
    REQUIRE(r1.schedule.size() == r2.schedule.size());
    for (size_t i = 0; i < r1.tracks.size(); ++i) {
        CHECK(r1.tracks[i].timestamp == r2.tracks[i].timestamp);
        CHECK(r1.tracks[i].lat == r2.tracks[i].lat);
        CHECK(r1.tracks[i].lon == r2.tracks[i].lon);
    }
    for (size_t i = 0; i < r1.schedule.size(); ++i) {
        CHECK(r1.schedule[i].sched_dep == r2.schedule[i].sched_dep);
        CHECK(r1.schedule[i].registration == r2.schedule[i].registration);
    }

    auto other = spec;
    other.seed = 8;
    const auto r3 = generate_day(other);
    CHECK(r1.tracks[0].timestamp != r3.tracks[0].timestamp);
}

TEST_CASE("planted bundles produce well-formed tracks and schedule") {
    const auto spec = two_bundle_spec();
    const auto r = generate_day(spec);

    REQUIRE(r.schedule.size() == 42); // 20 + 20 + 2 wanderers
    CHECK(r.tracks.size() == 42u * 24u);

    std::set<std::string> ids;
    for (const auto& f : r.schedule) {
        ids.insert(f.flight_id);
        CHECK(f.origin == "AAA");
        CHECK(f.destination == "BBB");
        CHECK(f.sched_dep >= spec.day_start_epoch + 360.0 * 60.0);
        CHECK(f.sched_dep <= spec.day_start_epoch + 1080.0 * 60.0);
        CHECK(f.sched_arr > f.sched_dep);
        CHECK(f.sched_arr - f.sched_dep < 3.0 * 3600.0);
        CHECK_FALSE(f.registration.empty());
    }
    CHECK(ids.size() == 42);
    CHECK(ids.count("OUT01") == 1);
    CHECK(ids.count("OUT02") == 1);

    // every flight starts and ends exactly on its airports, offsets included
    for (size_t i = 0; i < r.tracks.size(); i += 24) {
        const auto& first = r.tracks[i];
        const auto& last = r.tracks[i + 23];
        CHECK(first.lat == doctest::Approx(30.0).epsilon(1e-6));
        CHECK(first.lon == doctest::Approx(100.0).epsilon(1e-6));
        CHECK(last.lat == doctest::Approx(30.0).epsilon(1e-6));
        CHECK(last.lon == doctest::Approx(104.0).epsilon(1e-6));
        for (size_t j = i + 1; j < i + 24; ++j)
            CHECK(r.tracks[j].timestamp > r.tracks[j - 1].timestamp);
    }
}

TEST_CASE("the manifest records what was planted") {
    auto spec = two_bundle_spec();
    // a probe sitting on the northern bundle's midpoint: 40 NM north of the
    // direct line at its halfway point
    spec.probe_points = {{"PX", {30.0 + 40.0 / 60.0, 102.0}}};
    const auto r = generate_day(spec);

    CHECK(r.manifest.find("seed=7") != std::string::npos);
    CHECK(r.manifest.find("bundle=AAA-BBB#0 flights=20 offset_nm=40.0 spread_nm=5.0") !=
          std::string::npos);
    CHECK(r.manifest.find("bundle=AAA-BBB#1 flights=20 offset_nm=-40.0 spread_nm=5.0") !=
          std::string::npos);
    CHECK(r.manifest.find("flights=42") != std::string::npos);
    CHECK(r.manifest.find("outliers=2") != std::string::npos);
    CHECK(r.manifest.find("od=AAA-BBB bundles=2") != std::string::npos);

    // the probe crosses the northern bundle only, near its halfway time
    CHECK(r.manifest.find("crossing=AAA-BBB#0 point=PX") != std::string::npos);
    CHECK(r.manifest.find("crossing=AAA-BBB#1") == std::string::npos);
    std::istringstream lines(r.manifest);
    std::string line;
    double crossing_off = -1.0;
    int demand_ops = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("crossing=", 0) == 0) {
            const auto pos = line.find("offset_min=");
            crossing_off = std::stod(line.substr(pos + 11));
        }
        if (line.rfind("demand=", 0) == 0) {
            const auto pos = line.find("ops=");
            demand_ops += std::stoi(line.substr(pos + 4));
        }
    }
    CHECK(crossing_off > 10.0);
    CHECK(crossing_off < 25.0);
    CHECK(demand_ops == 84); // one departure and one arrival per flight
}

TEST_CASE("generated files round-trip through the ingest parsers") {
    const auto spec = two_bundle_spec();
    const auto r = generate_day(spec);
    const fs::path dir = fs::temp_directory_path() / "airnet_synth_roundtrip";
    fs::remove_all(dir);
    write_synth_files(r, dir.string());

    {
        std::ifstream in(dir / "tracks.csv");
        const auto parsed = parse_tracks(in);
        CHECK(parsed.errors.empty());
        REQUIRE(parsed.points.size() == r.tracks.size());
        const auto trajs = assemble_trajectories(parsed.points, 10, 1800.0);
        CHECK(trajs.size() == 42);
    }
    {
        std::ifstream in(dir / "schedule.csv");
        const auto parsed = parse_schedule(in);
        CHECK(parsed.errors.empty());
        REQUIRE(parsed.records.size() == 42);
        for (size_t i = 0; i < parsed.records.size(); ++i) {
            CHECK(parsed.records[i].flight_id == r.schedule[i].flight_id);
            CHECK(parsed.records[i].registration == r.schedule[i].registration);
            // times were written with whole-second precision
            CHECK(parsed.records[i].sched_dep ==
                  doctest::Approx(r.schedule[i].sched_dep).epsilon(1e-9));
        }
    }
    CHECK(slurp(dir / "manifest.txt") == r.manifest);

    SUBCASE("equal seeds write byte-identical files") {
        const fs::path again = fs::temp_directory_path() / "airnet_synth_roundtrip2";
        fs::remove_all(again);
        write_synth_files(generate_day(spec), again.string());
        CHECK(slurp(dir / "tracks.csv") == slurp(again / "tracks.csv"));
        CHECK(slurp(dir / "schedule.csv") == slurp(again / "schedule.csv"));
        CHECK(slurp(dir / "manifest.txt") == slurp(again / "manifest.txt"));
        fs::remove_all(again);
    }
    fs::remove_all(dir);
}

TEST_CASE("airframe chaining respects turnaround and chain length") {
    SynthSpec spec;
    spec.airports = {{"AAA", {30.0, 100.0}}, {"BBB", {30.0, 104.0}}};
    SynthBundle out;
    out.origin = "AAA";
    out.destination = "BBB";
    out.flights = 12;
    SynthBundle back = out;
    back.origin = "BBB";
    back.destination = "AAA";
    spec.bundles = {out, back};
    spec.chain_max = 3;
    spec.turnaround_min = 45.0;
    spec.seed = 21;

    const auto r = generate_day(spec);
    auto its = build_itineraries(r.schedule);

    size_t total = 0, multi = 0;
    for (const auto& it : its) {
        total += it.flights.size();
        CHECK(it.flights.size() <= 3);
        if (it.flights.size() > 1) multi += 1;
        for (size_t i = 1; i < it.flights.size(); ++i) {
            CHECK(it.flights[i].origin == it.flights[i - 1].destination);
            CHECK(it.flights[i].sched_dep >=
                  it.flights[i - 1].sched_arr + 45.0 * 60.0 - 1e-6);
        }
    }
    CHECK(total == 24);
    CHECK(multi >= 1); // the day is long enough that some tails fly again
    CHECK(its.size() < 24);
}

TEST_CASE("degenerate generator configurations are rejected") {
    SynthSpec spec = two_bundle_spec();
    spec.points_per_track = 1;
    CHECK_THROWS_AS(generate_day(spec), config_error);

    spec = two_bundle_spec();
    spec.bundles[0].origin = "XXX";
    CHECK_THROWS_AS(generate_day(spec), config_error);

    spec = two_bundle_spec();
    spec.bundles.clear();
    CHECK_THROWS_AS(generate_day(spec), config_error); // outliers need a bundle

    spec = two_bundle_spec();
    spec.airports[1].location = spec.airports[0].location;
    CHECK_THROWS_AS(generate_day(spec), config_error); // coincident endpoints
}

TEST_CASE("fleet schedules fill the requested flight count with legal chains") {
    FleetSpec spec;
    spec.airports = {{"AAA", {30.0, 100.0}}, {"BBB", {30.0, 104.0}},
                     {"CCC", {32.0, 102.0}}};
    spec.flights = 200;
    spec.chain_min = 2;
    spec.chain_max = 4;
    spec.seed = 11;

    const auto schedule = generate_fleet_schedule(spec);
    REQUIRE(schedule.size() == 200);

    std::set<std::string> ids;
    std::map<std::string, std::vector<const FlightRecord*>> by_reg;
    for (const auto& f : schedule) {
        ids.insert(f.flight_id);
        CHECK(f.origin != f.destination);
        CHECK(f.sched_dep >= spec.day_start_epoch + 300.0 * 60.0);
        CHECK(f.sched_arr <= spec.day_start_epoch + 1435.0 * 60.0);
        by_reg[f.registration].push_back(&f);
    }
    CHECK(ids.size() == 200);
    for (auto& [reg, legs] : by_reg) {
        CHECK(legs.size() <= 4);
        for (size_t i = 1; i < legs.size(); ++i) {
            CHECK(legs[i]->origin == legs[i - 1]->destination);
            CHECK(legs[i]->sched_dep >= legs[i - 1]->sched_arr + 45.0 * 60.0 - 1e-6);
        }
    }
    // the consistency above means itinerary assembly recovers every tail whole
    CHECK(build_itineraries(schedule).size() == by_reg.size());

    FleetSpec bad = spec;
    bad.airports.resize(1);
    CHECK_THROWS_AS(generate_fleet_schedule(bad), config_error);
    bad = spec;
    bad.chain_min = 0;
    CHECK_THROWS_AS(generate_fleet_schedule(bad), config_error);
    bad = spec;
    bad.chain_max = 1;
    CHECK_THROWS_AS(generate_fleet_schedule(bad), config_error);
}
