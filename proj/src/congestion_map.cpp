#include "airnet/congestion_map.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "airnet/errors.hpp"

namespace airnet {

GridFrame GridFrame::make(const LatLon& sw, const LatLon& ne, double cell_nm) {
    if (cell_nm <= 0.0) throw config_error("grid cell size must be > 0");
    if (!(ne.lat > sw.lat) || !(ne.lon > sw.lon))
        throw config_error("degenerate bounding box");
    GridFrame f;
    f.sw = sw;
    f.cell_nm = cell_nm;
    f.coslat = std::cos(deg2rad((sw.lat + ne.lat) / 2.0));
    const double width = (ne.lon - sw.lon) * f.coslat * kNmPerDegree;
    const double height = (ne.lat - sw.lat) * kNmPerDegree;
    f.cols = std::max(1, int(std::ceil(width / cell_nm - 1e-9)));
    f.rows = std::max(1, int(std::ceil(height / cell_nm - 1e-9)));
    return f;
}

std::pair<double, double> GridFrame::to_xy(const LatLon& p) const {
    return {(p.lon - sw.lon) * coslat * kNmPerDegree, (p.lat - sw.lat) * kNmPerDegree};
}

namespace {
// index of coordinate u in a cell row; an exact boundary belongs to the cell
// below it
int axis_index(double u, double cell, int count) {
    int i = int(std::floor(u / cell));
    if (i > 0 && u == double(i) * cell) --i;
    return std::clamp(i, 0, count - 1);
}
} // namespace

CellIdx GridFrame::cell_of(const LatLon& p) const {
    auto [x, y] = to_xy(p);
    return {axis_index(y, cell_nm, rows), axis_index(x, cell_nm, cols)};
}

LatLon GridFrame::center_of(const CellIdx& c) const {
    const double x = (double(c.col) + 0.5) * cell_nm;
    const double y = (double(c.row) + 0.5) * cell_nm;
    return {sw.lat + y / kNmPerDegree, sw.lon + x / (coslat * kNmPerDegree)};
}

double DirectionHistogram::total() const {
    double s = 0.0;
    for (const auto& [label, l] : load) s += l;
    return s;
}

std::vector<CellIdx> traverse_cells(const GridFrame& frame, const std::vector<LatLon>& poly) {
    std::vector<CellIdx> path;
    if (poly.empty()) return path;
    CellIdx cur = frame.cell_of(poly[0]);
    path.push_back(cur);

    for (size_t s = 0; s + 1 < poly.size(); ++s) {
        auto [ax, ay] = frame.to_xy(poly[s]);
        auto [bx, by] = frame.to_xy(poly[s + 1]);
        const CellIdx target = frame.cell_of(poly[s + 1]);
        const double dx = bx - ax, dy = by - ay;
        // step cell-by-cell toward the segment end; each crossing moves one
        // column or one row, so the walk is bounded
        int guard = std::abs(target.col - cur.col) + std::abs(target.row - cur.row) + 4;
        while (cur != target && guard-- > 0) {
            double tx = std::numeric_limits<double>::infinity();
            double ty = std::numeric_limits<double>::infinity();
            if (dx > 0 && cur.col < frame.cols - 1)
                tx = (double(cur.col + 1) * frame.cell_nm - ax) / dx;
            else if (dx < 0 && cur.col > 0)
                tx = (double(cur.col) * frame.cell_nm - ax) / dx;
            if (dy > 0 && cur.row < frame.rows - 1)
                ty = (double(cur.row + 1) * frame.cell_nm - ay) / dy;
            else if (dy < 0 && cur.row > 0)
                ty = (double(cur.row) * frame.cell_nm - ay) / dy;
            if (!std::isfinite(tx) && !std::isfinite(ty)) break;
            // corner hit: advance the column first (fixed, documented order)
            if (tx <= ty)
                cur.col += dx > 0 ? 1 : -1;
            else
                cur.row += dy > 0 ? 1 : -1;
            if (path.empty() || path.back() != cur) path.push_back(cur);
        }
        if (cur != target) {
            cur = target; // numerically stubborn corner: jump and continue
            if (path.empty() || path.back() != cur) path.push_back(cur);
        }
    }
    return path;
}

GridMetrics accumulate_grid_metrics(const std::vector<Route>& routes, const GridFrame& frame) {
    GridMetrics gm;
    gm.grids.resize(frame.cell_count());
    for (int r = 0; r < frame.rows; ++r)
        for (int c = 0; c < frame.cols; ++c) gm.grids[frame.flat({r, c})].idx = {r, c};

    for (const auto& route : routes) {
        const auto path = traverse_cells(frame, route.centroid);
        if (path.empty()) continue;
        std::set<CellIdx> seen;
        for (size_t i = 0; i < path.size(); ++i) {
            Grid& g = gm.grids[frame.flat(path[i])];
            if (seen.insert(path[i]).second) {
                g.traffic += route.traffic_load;
                g.route_count += 1;
            }
            // direction label needs both an entry and an exit neighbor
            if (i > 0 && i + 1 < path.size())
                gm.histograms[path[i]].load[{path[i - 1], path[i + 1]}] += route.traffic_load;
        }
    }
    for (auto& [cell, hist] : gm.histograms)
        gm.grids[frame.flat(cell)].entropy = grid_entropy(hist);
    return gm;
}

double grid_entropy(const DirectionHistogram& hist) {
    const double total = hist.total();
    if (total <= 0.0 || hist.load.size() < 2) return 0.0;
    double e = 0.0;
    for (const auto& [label, l] : hist.load) {
        if (l <= 0.0) continue;
        const double p = l / total;
        e -= p * std::log2(p);
    }
    return e;
}

void score_grids(std::vector<Grid>& grids, const ScoreWeights& w) {
    if (grids.empty()) return;
    auto minmax = [&](auto get) {
        double lo = get(grids[0]), hi = lo;
        for (const auto& g : grids) {
            lo = std::min(lo, get(g));
            hi = std::max(hi, get(g));
        }
        return std::pair{lo, hi};
    };
    auto [t_lo, t_hi] = minmax([](const Grid& g) { return g.traffic; });
    auto [r_lo, r_hi] = minmax([](const Grid& g) { return double(g.route_count); });
    auto [e_lo, e_hi] = minmax([](const Grid& g) { return g.entropy; });
    auto norm = [](double v, double lo, double hi) {
        return hi > lo ? (v - lo) / (hi - lo) : 0.0;
    };
    for (auto& g : grids) {
        g.score = w.w_traffic * norm(g.traffic, t_lo, t_hi) +
                  w.w_routes * norm(double(g.route_count), r_lo, r_hi) +
                  w.w_entropy * norm(g.entropy, e_lo, e_hi);
    }
}

std::vector<Grid> select_hot_grids(const std::vector<Grid>& grids, const HotSelection& sel,
                                   const ScoreWeights& w) {
    std::vector<Grid> sorted = grids;
    std::sort(sorted.begin(), sorted.end(), [](const Grid& a, const Grid& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.idx < b.idx;
    });
    std::vector<Grid> hot;
    if (sel.mode == HotSelection::threshold) {
        const double cut = sel.score_threshold * w.sum();
        for (const auto& g : sorted)
            if (g.score >= cut) hot.push_back(g);
    } else {
        for (const auto& g : sorted) {
            if (hot.size() < sel.n || g.score == hot.back().score)
                hot.push_back(g); // boundary ties all make the cut
            else
                break;
        }
    }
    return hot;
}

std::vector<CongestionPoint> cluster_hot_grids(const std::vector<Grid>& hot,
                                               const GridFrame& frame, double epsilon_nm,
                                               size_t minpt) {
    std::vector<std::vector<double>> centers;
    centers.reserve(hot.size());
    for (const auto& g : hot) {
        const auto c = frame.center_of(g.idx);
        centers.push_back({c.lat, c.lon});
    }
    Metric gc = [](const std::vector<double>& a, const std::vector<double>& b) {
        return gc_distance_nm({a[0], a[1]}, {b[0], b[1]});
    };
    std::vector<int> labels;
    int n_clusters = 0;
    if (!hot.empty()) {
        auto lab = dbscan(centers, epsilon_nm, minpt, gc);
        labels = lab.labels;
        n_clusters = lab.n_clusters;
    }
    // noise cells are promoted to singleton points after the real clusters
    std::vector<std::vector<size_t>> groups(static_cast<size_t>(n_clusters));
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == kNoise)
            groups.push_back({i});
        else
            groups[size_t(labels[i])].push_back(i);
    }

    std::vector<CongestionPoint> points;
    for (size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& idxs = groups[gi];
        if (idxs.empty()) continue;
        CongestionPoint cp;
        cp.point_id = "E" + std::to_string(points.size() + 1);
        double wsum = 0.0, lat = 0.0, lon = 0.0;
        for (size_t i : idxs) {
            cp.members.push_back(hot[i].idx);
            const auto c = frame.center_of(hot[i].idx);
            const double wgt = hot[i].traffic > 0.0 ? hot[i].traffic : 1.0;
            lat += wgt * c.lat;
            lon += wgt * c.lon;
            wsum += wgt;
            cp.total_load += hot[i].traffic;
        }
        cp.centroid = {lat / wsum, lon / wsum};
        for (size_t i : idxs)
            cp.radius_nm =
                std::max(cp.radius_nm, gc_distance_nm(cp.centroid, frame.center_of(hot[i].idx)));
        points.push_back(std::move(cp));
    }
    return points;
}

SensitivityReport sensitivity_sweep(const std::vector<Grid>& grids,
                                    const std::vector<double>& entropy_weights,
                                    const ScoreWeights& base, const HotSelection& sel) {
    if (entropy_weights.size() < 2)
        throw config_error("sensitivity sweep needs at least 2 weight settings");
    SensitivityReport rep;
    std::vector<std::set<CellIdx>> sets;
    for (double w3 : entropy_weights) {
        ScoreWeights w = base;
        w.w_entropy = w3;
        std::vector<Grid> scored = grids;
        score_grids(scored, w);
        auto hot = select_hot_grids(scored, sel, w);
        SweepEntry e;
        e.w_entropy = w3;
        for (const auto& g : hot) e.selected.push_back(g.idx);
        std::sort(e.selected.begin(), e.selected.end());
        sets.emplace_back(e.selected.begin(), e.selected.end());
        rep.entries.push_back(std::move(e));
    }
    const size_t n = sets.size();
    rep.jaccard.assign(n, std::vector<double>(n, 1.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            std::vector<CellIdx> inter, uni;
            std::set_intersection(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(),
                                  std::back_inserter(inter));
            std::set_union(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(),
                           std::back_inserter(uni));
            const double jac = uni.empty() ? 1.0 : double(inter.size()) / double(uni.size());
            rep.jaccard[i][j] = rep.jaccard[j][i] = jac;
        }
    // intersection across all settings, and cells that come and go
    std::set<CellIdx> inter = sets[0], uni = sets[0];
    for (size_t i = 1; i < n; ++i) {
        std::set<CellIdx> tmp;
        std::set_intersection(inter.begin(), inter.end(), sets[i].begin(), sets[i].end(),
                              std::inserter(tmp, tmp.begin()));
        inter.swap(tmp);
        uni.insert(sets[i].begin(), sets[i].end());
    }
    rep.intersection.assign(inter.begin(), inter.end());
    for (const auto& c : uni)
        if (!inter.count(c)) rep.weight_sensitive.push_back(c);
    return rep;
}

} // namespace airnet
