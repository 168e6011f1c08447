#pragma once
#include <array>
#include <compare>
#include <map>
#include <string>
#include <vector>

#include "airnet/geo.hpp"
#include "airnet/route_mining.hpp"

namespace airnet {

struct CellIdx {
    int row = 0, col = 0;
    auto operator<=>(const CellIdx&) const = default;
};

// A rectangular tiling of a lat/lon bounding box into square cells of
// `cell_nm` per side (the last row/column may be partial). Coordinates are
// projected about the box's south-west corner; an exact boundary point
// belongs to the lower-index cell.
struct GridFrame {
    LatLon sw;
    double cell_nm = 20.0;
    int rows = 0, cols = 0;
    double coslat = 1.0; // cos of the box's mid latitude

    static GridFrame make(const LatLon& sw, const LatLon& ne, double cell_nm);

    std::pair<double, double> to_xy(const LatLon& p) const;
    CellIdx cell_of(const LatLon& p) const;
    LatLon center_of(const CellIdx& c) const;
    size_t flat(const CellIdx& c) const { return size_t(c.row) * size_t(cols) + size_t(c.col); }
    size_t cell_count() const { return size_t(rows) * size_t(cols); }
};

struct DirectionHistogram {
    // load by (entry neighbor, exit neighbor) direction label
    std::map<std::pair<CellIdx, CellIdx>, double> load;
    double total() const;
};

struct Grid {
    CellIdx idx;
    double traffic = 0.0;   // summed route loads
    int route_count = 0;    // distinct routes through the cell
    double entropy = 0.0;
    double score = 0.0;
};

struct ScoreWeights {
    double w_traffic = 1.0, w_routes = 1.0, w_entropy = 2.0;
    double sum() const { return w_traffic + w_routes + w_entropy; }
};

struct CongestionPoint {
    std::string point_id;
    std::vector<CellIdx> members;
    LatLon centroid;       // load-weighted mean of member cell centers
    double radius_nm = 0.0;
    double total_load = 0.0;
};

// The ordered sequence of cells a polyline passes through (4-neighbor steps,
// exact boundary crossings; at a corner the column advances first).
std::vector<CellIdx> traverse_cells(const GridFrame& frame, const std::vector<LatLon>& poly);

struct GridMetrics {
    std::vector<Grid> grids; // one per frame cell, row-major
    std::map<CellIdx, DirectionHistogram> histograms;
};

// Accumulate per-cell traffic, route incidence, and direction histograms from
// route centerlines; entropy is filled in from the histograms.
GridMetrics accumulate_grid_metrics(const std::vector<Route>& routes, const GridFrame& frame);

// Base-2 entropy of the direction distribution; 0 for empty or single-label.
double grid_entropy(const DirectionHistogram& hist);

// Min-max standardize each metric over the given grids (a constant column
// standardizes to zero), then score = w1*T + w2*R + w3*E on the standardized
// values.
void score_grids(std::vector<Grid>& grids, const ScoreWeights& w);

struct HotSelection {
    enum Mode { threshold, top_n } mode = threshold;
    double score_threshold = 0.6; // applied to score / sum(w): scale-free
    size_t n = 75;                // boundary ties are all included
};

// Grids meeting the selection rule, sorted by descending score (ties by cell
// index).
std::vector<Grid> select_hot_grids(const std::vector<Grid>& grids, const HotSelection& sel,
                                   const ScoreWeights& w);

// Cluster hot cells into conceptual congestion points: dbscan over cell
// centers with great-circle distance; noise cells become singleton points.
std::vector<CongestionPoint> cluster_hot_grids(const std::vector<Grid>& hot,
                                               const GridFrame& frame, double epsilon_nm = 50.0,
                                               size_t minpt = 2);

struct SweepEntry {
    double w_entropy;
    std::vector<CellIdx> selected;
};
struct SensitivityReport {
    std::vector<SweepEntry> entries;
    std::vector<std::vector<double>> jaccard; // pairwise, entries x entries
    std::vector<CellIdx> intersection;        // stable across all settings
    std::vector<CellIdx> weight_sensitive;    // in some selections, not all
};

// Re-score and re-select under each entropy weight; report selection overlap.
SensitivityReport sensitivity_sweep(const std::vector<Grid>& grids,
                                    const std::vector<double>& entropy_weights,
                                    const ScoreWeights& base, const HotSelection& sel);

} // namespace airnet
