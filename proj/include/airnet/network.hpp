#pragma once
#include <map>
#include <string>
#include <vector>

#include "airnet/congestion_map.hpp"
#include "airnet/geo.hpp"
#include "airnet/ingest.hpp"
#include "airnet/queue_engine.hpp"
#include "airnet/route_mining.hpp"

namespace airnet {

enum class NodeKind { airport, enroute };

// A queueing node of the layered network. Airports serve arrivals and
// departures as one stream; en-route points serve crossing traffic.
struct NetworkNode {
    std::string node_id;
    NodeKind kind = NodeKind::airport;
    LatLon location;
    QueueParams params;   // mu is per minute internally
    DemandProfile demand; // expected operations per sub-period
};

struct RouteCrossing {
    std::string route_id;
    std::string point_id;
    double offset_min = 0.0; // mean minutes from departure to point passage
};

struct MultiLayerNetwork {
    std::vector<NetworkNode> airports;
    std::vector<NetworkNode> points;
    std::vector<Route> routes;
    std::vector<RouteCrossing> crossings; // sorted by (route_id, offset)

    double t0 = 0.0;            // horizon start, minutes
    double slot_minutes = 15.0; // sub-period length
    size_t slots = 96;
    double epoch0_s = 0.0;      // epoch seconds at clock zero (for schedule times)

    NetworkNode* find_node(const std::string& id);
    const NetworkNode* find_node(const std::string& id) const;
    const Route* find_route(const std::string& id) const;
    // crossings of one route, offset order
    std::vector<const RouteCrossing*> route_crossings(const std::string& route_id) const;
};

// Attach congestion points to routes: a crossing exists where the route
// centerline passes within max(corridor, point radius) NM of the point; its
// offset is the centerline's elapsed time at closest approach.
std::vector<RouteCrossing> attach_points_to_routes(const std::vector<Route>& routes,
                                                   const std::vector<CongestionPoint>& points,
                                                   double corridor_nm = 30.0);

/// Scheduled operations per sub-period at one airport: departures by sched_dep
// plus arrivals by sched_arr (boundary times count toward the later slot).
DemandProfile estimate_airport_demand(const std::vector<FlightRecord>& schedule,
                                      const std::string& airport, double t0_min,
                                      double slot_minutes, size_t slots,
                                      double epoch_offset_s = 0.0);

// Smallest integer capacity covering at least `coverage` of the observed
// per-sub-period throughput counts.
int estimate_service_rate(const std::vector<int>& throughput_counts, double coverage = 0.9);

// Expected crossings per sub-period at each en-route point: scheduled
// departures apportioned to routes by usage probability and shifted by the
// route's crossing offset. Fills each point node's demand in place.
void derive_enroute_demand(MultiLayerNetwork& net,
                           const std::vector<FlightRecord>& schedule,
                           double epoch_offset_s = 0.0);

// Node parameter fixtures: airports (code, service per 15 min, Erlang order,
// location) and en-route points. Throws on unknown codes on lookup.
struct FixtureTables {
    struct AirportRow {
        std::string code;
        int mu_per_slot;
        int k;
        LatLon location;
    };
    struct PointRow {
        std::string point_id;
        int mu_per_slot;
        int k;
        LatLon location;
    };
    std::vector<AirportRow> airports;
    std::vector<PointRow> points;

    const AirportRow& airport(const std::string& code) const;
    const PointRow& point(const std::string& id) const;
};

FixtureTables load_fixture_tables(const std::string& airports_csv,
                                  const std::string& points_csv);

// Assemble a network skeleton from fixture parameters (empty demand profiles,
// sized to the horizon).
MultiLayerNetwork network_from_fixtures(const FixtureTables& tables, size_t slots = 96,
                                        double slot_minutes = 15.0, int truncation = 120);

} // namespace airnet
