#pragma once
// What-if capacity analysis: apply capacity edits to a copy of the network,
// re-run the day simulation on identical inputs, and report delay deltas
// (baseline minus scenario, so positive means the edit helped).

#include <string>
#include <vector>

#include "airnet/network.hpp"
#include "airnet/simulation.hpp"

namespace airnet {

enum class EditKind {
    runway_addition,                // target = airport, magnitude = existing runway count n
    enroute_scale,                  // target = point id ("*" = every point), magnitude = factor
    point_elimination_for_airport,  // target = airport, magnitude unused
};

struct ScenarioEdit {
    std::string target;
    EditKind kind = EditKind::enroute_scale;
    double magnitude = 1.0;
};

struct ScenarioSpec {
    std::string scenario_id = "scenario";
    std::vector<ScenarioEdit> edits;
    double elimination_multiplier = 100.0; // "unbounded" capacity stand-in
};

// Adding one runway to an airport with n spreads the same movement capacity
// over n+1 runways: mu <- mu * (n+1)/n.
MultiLayerNetwork apply_runway_addition(const MultiLayerNetwork& net,
                                        const std::string& airport, int n);

// Scale one point's service rate ("*" scales all points).
MultiLayerNetwork apply_enroute_scale(const MultiLayerNetwork& net,
                                      const std::string& point_id, double factor);

// Lift the capacity of every point crossed by a route whose OD pair includes
// the airport. Capacity is physical, so other traffic through those points is
// unconstrained too.
MultiLayerNetwork eliminate_points_for_airport(const MultiLayerNetwork& net,
                                               const std::string& airport,
                                               double multiplier = 100.0);

MultiLayerNetwork apply_scenario(const MultiLayerNetwork& net, const ScenarioSpec& spec);

struct NodeDelta {
    std::string node_id;
    NodeKind kind = NodeKind::airport;
    double local = 0.0;      // baseline mean local - scenario mean local
    double propagated = 0.0;
    double total = 0.0;
};

struct ScenarioResult {
    std::string scenario_id;
    DelayReport baseline;
    DelayReport scenario;
    std::vector<NodeDelta> node_deltas; // union of nodes seen in either report
    double network_delta = 0.0;         // avg delay per flight, baseline - scenario

    // Delay experienced by flights to/from an airport named in the edits.
    // (Delay those flights cause others is counted at the other flights.)
    struct SubsetDelta {
        std::string airport;
        size_t flight_count = 0;
        double baseline_avg = 0.0;
        double scenario_avg = 0.0;
        double delta = 0.0;
    };
    std::vector<SubsetDelta> subset_deltas;
};

ScenarioResult run_scenario(const MultiLayerNetwork& net,
                            const std::vector<Itinerary>& itineraries,
                            const Buffers& buffers, const ScenarioSpec& spec,
                            const SimOptions& opt = {});

struct ExpansionCandidate {
    std::string airport;
    int runways = 2; // existing runway count
};

struct ExpansionRank {
    std::string airport;
    double single_delta = 0.0;     // network delta of expanding this airport alone
    double cumulative_delta = 0.0; // network delta with all higher-ranked ones applied too
};

// Rank candidates by single-expansion network delta (descending, ties by
// airport id), then apply the expansions cumulatively in rank order with a
// full re-simulation after each addition.
std::vector<ExpansionRank> rank_cumulative_expansions(
    const MultiLayerNetwork& net, const std::vector<Itinerary>& itineraries,
    const Buffers& buffers, const std::vector<ExpansionCandidate>& candidates,
    const SimOptions& opt = {});

} // namespace airnet
