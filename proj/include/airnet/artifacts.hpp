#pragma once
// Readers and writers for the pipeline's on-disk artifacts. Every file starts
// with two comment lines — "# <kind> v1" and "# config_hash <hex>" — followed
// by delimited data. Writers use fixed number formatting so identical inputs
// give identical bytes; readers skip comment lines but surface the embedded
// hash so callers can warn when stages were produced by different configs.

#include <string>
#include <vector>

#include "airnet/congestion_map.hpp"
#include "airnet/network.hpp"
#include "airnet/route_mining.hpp"
#include "airnet/scenario.hpp"
#include "airnet/simulation.hpp"

namespace airnet {

struct ArtifactInfo {
    std::string kind;
    std::string config_hash;
};

// routes: one row per centerline vertex, grouped by route id
void write_routes(const std::string& path, const std::vector<Route>& routes,
                  const std::string& config_hash);
std::vector<Route> read_routes(const std::string& path, ArtifactInfo* info = nullptr);

// congestion points: id, centroid, radius, load, member cells
void write_congestion_points(const std::string& path,
                             const std::vector<CongestionPoint>& points,
                             const std::string& config_hash);
std::vector<CongestionPoint> read_congestion_points(const std::string& path,
                                                    ArtifactInfo* info = nullptr);

// heat map: one row per cell with metrics and score (plot data)
void write_heatmap(const std::string& path, const std::vector<Grid>& grids,
                   const GridFrame& frame, const std::string& config_hash);

// the whole multi-layer network: nodes, demand, routes, crossings
void write_network(const std::string& path, const MultiLayerNetwork& net,
                   const std::string& config_hash);
MultiLayerNetwork read_network(const std::string& path, ArtifactInfo* info = nullptr);

// delay report: a per-node table and a per-flight table
void write_delay_report(const std::string& nodes_path, const std::string& flights_path,
                        const DelayReport& report, const std::string& config_hash);

void write_scenario_result(const std::string& path, const ScenarioResult& result,
                           const std::string& config_hash);

void write_expansion_ranking(const std::string& path,
                             const std::vector<ExpansionRank>& ranks,
                             const std::string& config_hash);

} // namespace airnet
