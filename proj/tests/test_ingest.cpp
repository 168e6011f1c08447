#include "doctest.h"

#include <cmath>
#include <sstream>

#include "airnet/errors.hpp"
#include "airnet/ingest.hpp"

using namespace airnet;

TEST_CASE("time values accept epoch seconds and ISO-8601") {
    CHECK(parse_time_value("600") == doctest::Approx(600.0));
    CHECK(parse_time_value("  600.5 ") == doctest::Approx(600.5));
    CHECK(parse_time_value("1970-01-01T00:10:00Z") == doctest::Approx(600.0));
    CHECK(parse_time_value("1970-01-02T00:00:00Z") == doctest::Approx(86400.0));
    CHECK(parse_time_value("1970-01-01 00:10") == doctest::Approx(600.0));
    CHECK(parse_time_value("1970-01-01T08:00:00+08:00") == doctest::Approx(0.0));
    CHECK(parse_time_value("1970-01-01T00:00:30.5Z") == doctest::Approx(30.5));
    // a known round trip away from the epoch: 2023-05-01 12:00:00 UTC
    CHECK(parse_time_value("2023-05-01T12:00:00Z") == doctest::Approx(1682942400.0));
    CHECK_THROWS_AS(parse_time_value("yesterday"), input_error);
    CHECK_THROWS_AS(parse_time_value("1970-13-01T00:00:00Z"), input_error);
}

TEST_CASE("track parsing keeps good rows and records bad ones") {
    std::istringstream in(
        "# produced upstream\n"
        "flight_id,timestamp,lat,lon,alt,speed,origin,destination,registration\n"
        "F1,0,30.0,100.0,31000,450,AAA,BBB,R1\n"
        "F1,60,30.1,100.1,31000,450,AAA,BBB,R1\n"
        "F1,120,95.0,100.2,31000,450,AAA,BBB,R1\n"   // latitude out of range
        "F1,xyz,30.3,100.3,31000,450,AAA,BBB,R1\n"   // bad timestamp
        ",180,30.4,100.4,31000,450,AAA,BBB,R1\n"     // empty flight id
        "F1,240,30.5,100.5,,,AAA,BBB,R1\n");         // missing alt/speed is fine
    auto res = parse_tracks(in);
    REQUIRE(res.points.size() == 3);
    CHECK(res.points[2].alt_ft == 0.0);
    CHECK(res.points[2].speed_kn == 0.0);
    REQUIRE(res.errors.size() == 3);
    CHECK(res.errors[0].line_no == 5);
    CHECK(res.errors[0].reason == "latitude out of range");
    CHECK(res.errors[1].line_no == 6);
    CHECK(res.errors[2].line_no == 7);
}

TEST_CASE("column remapping resolves nonstandard headers") {
    std::istringstream in(
        "callsign,ts,latitude,longitude,alt,speed,from,to,tail\n"
        "F9,0,30,100,31000,450,AAA,BBB,R9\n");
    ColumnMap cols{{"flight_id", "callsign"}, {"timestamp", "ts"},   {"lat", "latitude"},
                   {"lon", "longitude"},      {"origin", "from"},    {"destination", "to"},
                   {"registration", "tail"}};
    auto res = parse_tracks(in, cols);
    REQUIRE(res.points.size() == 1);
    CHECK(res.points[0].flight_id == "F9");
    CHECK(res.points[0].registration == "R9");
}

TEST_CASE("missing mandatory column is an input error") {
    std::istringstream in("flight_id,timestamp,lat,lon,alt,speed,origin,destination\nx\n");
    CHECK_THROWS_AS(parse_tracks(in), input_error);
}

TEST_CASE("schedule parsing validates ordering and optional actuals") {
    std::istringstream in(
        "flight_id,origin,destination,sched_dep,sched_arr,actual_dep,actual_arr,registration\n"
        "F1,AAA,BBB,1000,2000,1005,,R1\n"
        "F2,BBB,AAA,3000,2500,,,R1\n" // arrives before departing
        "F3,AAA,BBB,4000,6000,,,R2\n");
    auto res = parse_schedule(in);
    REQUIRE(res.records.size() == 2);
    CHECK(res.records[0].actual_dep.has_value());
    CHECK(res.records[0].actual_dep.value() == doctest::Approx(1005.0));
    CHECK(!res.records[0].actual_arr.has_value());
    REQUIRE(res.errors.size() == 1);
    CHECK(res.errors[0].reason == "sched_dep not before sched_arr");
}

TEST_CASE("time columns latch their format from the first parsed row") {
    std::istringstream iso(
        "flight_id,origin,destination,sched_dep,sched_arr,actual_dep,actual_arr,registration\n"
        "F1,AAA,BBB,2023-05-01T10:00:00Z,2023-05-01T12:00:00Z,,,R2\n"
        "F2,BBB,AAA,2023-05-01T13:00:00+01:00,2023-05-01T15:00:00+01:00,,,R2\n");
    auto res = parse_schedule(iso);
    REQUIRE(res.records.size() == 2);
    CHECK(res.records[0].sched_arr - res.records[0].sched_dep == doctest::Approx(7200.0));
    // +01:00 means an hour earlier in UTC
    CHECK(res.records[1].sched_dep - res.records[0].sched_dep == doctest::Approx(2.0 * 3600.0));

    // a column locked to one convention rejects rows written in the other
    std::istringstream mixed(
        "flight_id,origin,destination,sched_dep,sched_arr,actual_dep,actual_arr,registration\n"
        "F1,AAA,BBB,1000,2000,,,R1\n"
        "F2,BBB,AAA,2023-05-01T10:00:00Z,2023-05-01T12:00:00Z,,,R1\n");
    auto res2 = parse_schedule(mixed);
    CHECK(res2.records.size() == 1);
    REQUIRE(res2.errors.size() == 1);
}

static TrackPoint tp(const std::string& id, double ts, double lat, double lon) {
    TrackPoint p;
    p.flight_id = id;
    p.timestamp = ts;
    p.lat = lat;
    p.lon = lon;
    p.origin = "AAA";
    p.destination = "BBB";
    return p;
}

TEST_CASE("trajectory assembly splits on gaps and drops short fragments") {
    std::vector<TrackPoint> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(tp("F1", i * 60.0, 30.0 + i * 0.1, 100.0));
    // a 2-hour hole, then three more points: too short to keep at min_points=4
    for (int i = 0; i < 3; ++i) pts.push_back(tp("F1", 7500.0 + i * 60.0, 31.0 + i * 0.1, 100.0));
    for (int i = 0; i < 4; ++i) pts.push_back(tp("F2", i * 60.0, 30.0, 100.0 + i * 0.1));

    auto trajs = assemble_trajectories(pts, 4, 1800.0);
    REQUIRE(trajs.size() == 2);
    CHECK(trajs[0].flight_id == "F1");
    CHECK(trajs[0].points.size() == 5);
    CHECK(trajs[1].flight_id == "F2");

    SUBCASE("shuffled input reaches the same result") {
        std::vector<TrackPoint> shuffled{pts[7], pts[2], pts[9], pts[0], pts[5], pts[1],
                                         pts[3],  pts[8], pts[4], pts[6], pts[10], pts[11]};
        auto again = assemble_trajectories(shuffled, 4, 1800.0);
        REQUIRE(again.size() == 2);
        CHECK(again[0].points.size() == 5);
        for (size_t i = 1; i < again[0].points.size(); ++i)
            CHECK(again[0].points[i].timestamp > again[0].points[i - 1].timestamp);
    }
}

TEST_CASE("duplicate timestamps collapse to the first occurrence") {
    std::vector<TrackPoint> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(tp("F1", i * 60.0, 30.0 + i * 0.1, 100.0));
    pts.push_back(tp("F1", 120.0, 99.0, 99.0)); // same stamp as index 2
    auto trajs = assemble_trajectories(pts, 2, 1800.0);
    REQUIRE(trajs.size() == 1);
    CHECK(trajs[0].points.size() == 4);
    CHECK(trajs[0].points[2].lat == doctest::Approx(30.2));
}

TEST_CASE("resampling a straight track is uniform in arc length and time") {
    Trajectory t;
    t.flight_id = "F1";
    // equator track: segments of 1 and 2 degrees, flown at constant speed
    t.points = {tp("F1", 0.0, 0.0, 0.0), tp("F1", 600.0, 0.0, 1.0), tp("F1", 1800.0, 0.0, 3.0)};
    auto rs = resample_with_times(t, 4);
    REQUIRE(rs.coords.size() == 8);
    REQUIRE(rs.elapsed_min.size() == 4);
    const double expect_lon[4] = {0.0, 1.0, 2.0, 3.0};
    const double expect_min[4] = {0.0, 10.0, 20.0, 30.0};
    for (int i = 0; i < 4; ++i) {
        CHECK(rs.coords[2 * i] == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(rs.coords[2 * i + 1] == doctest::Approx(expect_lon[i]).epsilon(1e-9));
        CHECK(rs.elapsed_min[i] == doctest::Approx(expect_min[i]).epsilon(1e-9));
    }

    SUBCASE("endpoints are preserved exactly") {
        CHECK(rs.coords[0] == 0.0);
        CHECK(rs.coords[1] == 0.0);
        CHECK(rs.coords[6] == 0.0);
        CHECK(rs.coords[7] == 3.0);
    }

    SUBCASE("consecutive samples are equidistant") {
        auto rs9 = resample_with_times(t, 9);
        std::vector<double> gaps;
        for (int i = 0; i + 1 < 9; ++i) {
            LatLon a{rs9.coords[2 * i], rs9.coords[2 * i + 1]};
            LatLon b{rs9.coords[2 * i + 2], rs9.coords[2 * i + 3]};
            gaps.push_back(gc_distance_nm(a, b));
        }
        for (double g : gaps) CHECK(g == doctest::Approx(gaps[0]).epsilon(1e-6));
    }
}

TEST_CASE("resampling rejects degenerate input") {
    Trajectory t;
    t.points = {tp("F1", 0.0, 30.0, 100.0)};
    CHECK_THROWS_AS(resample_with_times(t, 4), config_error);
    t.points.push_back(tp("F1", 60.0, 30.0, 100.0)); // zero length
    CHECK_THROWS_AS(resample_with_times(t, 4), input_error);
    t.points[1].lat = 31.0;
    CHECK_THROWS_AS(resample_with_times(t, 1), config_error);
}

static FlightRecord fr(const std::string& id, const std::string& o, const std::string& d,
                       double dep, double arr, const std::string& reg) {
    FlightRecord r;
    r.flight_id = id;
    r.origin = o;
    r.destination = d;
    r.sched_dep = dep;
    r.sched_arr = arr;
    r.registration = reg;
    return r;
}

TEST_CASE("itineraries chain on registration, airport continuity, and time") {
    std::vector<FlightRecord> recs{
        fr("F3", "EEE", "DDD", 9000, 10000, "R1"), // o/d break: CCC != EEE
        fr("F1", "AAA", "BBB", 1000, 2000, "R1"),
        fr("F2", "BBB", "CCC", 3000, 4000, "R1"),
        fr("G1", "AAA", "BBB", 1000, 2000, "R2"),
        fr("G2", "BBB", "AAA", 1500, 2500, "R2"), // overlaps G1's arrival
    };
    auto its = build_itineraries(recs);
    REQUIRE(its.size() == 4);
    CHECK(its[0].registration == "R1");
    REQUIRE(its[0].flights.size() == 2);
    CHECK(its[0].flights[0].flight_id == "F1");
    CHECK(its[0].flights[1].flight_id == "F2");
    CHECK(its[1].flights.size() == 1); // F3 starts fresh
    CHECK(its[2].flights.size() == 1);
    CHECK(its[3].flights.size() == 1);
}

TEST_CASE("back-to-back turnarounds with zero slack still chain") {
    std::vector<FlightRecord> recs{
        fr("F1", "AAA", "BBB", 1000, 2000, "R1"),
        fr("F2", "BBB", "AAA", 2000, 3000, "R1"), // departs the minute it lands
    };
    auto its = build_itineraries(recs);
    REQUIRE(its.size() == 1);
    CHECK(its[0].flights.size() == 2);
}

TEST_CASE("duplicate departure times for one airframe are rejected") {
    std::vector<FlightRecord> recs{
        fr("F1", "AAA", "BBB", 1000, 2000, "R1"),
        fr("F2", "AAA", "CCC", 1000, 2500, "R1"),
    };
    CHECK_THROWS_AS(build_itineraries(recs), input_error);
}
