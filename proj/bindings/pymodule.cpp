// Python bindings for the analysis core. Thin data-in/data-out wrappers:
// plain lists and dicts in, no wrapped object graphs, so the module stays
// usable from notebooks without learning the C++ types.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "airnet/congestion_map.hpp"
#include "airnet/geo.hpp"
#include "airnet/ingest.hpp"
#include "airnet/queue_engine.hpp"
#include "airnet/route_mining.hpp"

namespace py = pybind11;
using namespace airnet;

namespace {

py::dict py_run_profile(int k, double mu, int n, const std::vector<double>& rates,
                        double slot_minutes, double t0, double terminal_bound) {
    QueueParams params{k, mu, n};
    DemandProfile demand;
    demand.rates = rates;
    demand.slot_minutes = slot_minutes;
    demand.t0 = t0;
    const WaitCurve curve = run_profile(params, demand, terminal_bound);
    py::dict out;
    out["t"] = curve.t;
    out["W"] = curve.W;
    out["L"] = curve.L;
    out["max_terminal_mass"] = curve.max_terminal_mass;
    out["truncation_warning"] = curve.truncation_warning;
    return out;
}

std::vector<int> py_dbscan(const std::vector<std::vector<double>>& vectors, double epsilon,
                           size_t minpt) {
    return dbscan(vectors, epsilon, minpt).labels;
}

double py_entropy(const std::vector<double>& loads) {
    DirectionHistogram hist;
    for (size_t i = 0; i < loads.size(); ++i)
        hist.load[{CellIdx{int(i), 0}, CellIdx{0, 0}}] = loads[i];
    return grid_entropy(hist);
}

std::vector<double> py_score(const std::vector<double>& traffic,
                             const std::vector<int>& route_count,
                             const std::vector<double>& entropy, double w_traffic,
                             double w_routes, double w_entropy) {
    if (route_count.size() != traffic.size() || entropy.size() != traffic.size())
        throw py::value_error("traffic, route_count, and entropy must align");
    std::vector<Grid> grids(traffic.size());
    for (size_t i = 0; i < traffic.size(); ++i) {
        grids[i].idx = {int(i), 0};
        grids[i].traffic = traffic[i];
        grids[i].route_count = route_count[i];
        grids[i].entropy = entropy[i];
    }
    score_grids(grids, ScoreWeights{w_traffic, w_routes, w_entropy});
    std::vector<double> scores;
    scores.reserve(grids.size());
    for (const auto& g : grids) scores.push_back(g.score);
    return scores;
}

// points: (lat, lon, elapsed_seconds) triples along one flight.
std::vector<std::pair<double, double>> py_resample(
    const std::vector<std::tuple<double, double, double>>& points, size_t m) {
    Trajectory traj;
    traj.flight_id = "py";
    for (const auto& [lat, lon, t] : points) {
        TrackPoint p;
        p.flight_id = traj.flight_id;
        p.lat = lat;
        p.lon = lon;
        p.timestamp = t;
        traj.points.push_back(std::move(p));
    }
    const auto coords = resample_trajectory(traj, m);
    std::vector<std::pair<double, double>> out;
    for (size_t i = 0; i + 1 < coords.size(); i += 2) out.push_back({coords[i], coords[i + 1]});
    return out;
}

} // namespace

PYBIND11_MODULE(_airnet, m) {
    m.doc() = "Queueing-network delay analysis core";
    m.attr("__version__") = "0.1.0";

    m.def("run_profile", &py_run_profile, py::arg("k"), py::arg("mu"), py::arg("n"),
          py::arg("rates"), py::arg("slot_minutes") = 15.0, py::arg("t0") = 0.0,
          py::arg("terminal_bound") = 1e-6,
          "Transient wait curve of an Erlang-k service queue under a piecewise-"
          "constant demand profile. Returns dict with t, W, L samples.");

    m.def("dbscan", &py_dbscan, py::arg("vectors"), py::arg("epsilon"), py::arg("minpt"),
          "Density-based cluster labels (-1 = noise), deterministic in input order.");

    m.def("kdistance_epsilon", [](const std::vector<std::vector<double>>& v, size_t k) {
              return kdistance_epsilon(v, k);
          },
          py::arg("vectors"), py::arg("k"),
          "Epsilon at the knee of the sorted k-distance curve.");

    m.def("entropy", &py_entropy, py::arg("loads"),
          "Base-2 entropy of a load distribution (0 for empty or single-label).");

    m.def("score", &py_score, py::arg("traffic"), py::arg("route_count"), py::arg("entropy"),
          py::arg("w_traffic") = 1.0, py::arg("w_routes") = 1.0, py::arg("w_entropy") = 2.0,
          "Min-max standardized weighted scores over parallel metric columns.");

    m.def("resample", &py_resample, py::arg("points"), py::arg("m") = 50,
          "Resample (lat, lon, elapsed_s) triples to m points at equal arc-length "
          "fractions; returns (lat, lon) pairs.");

    m.def("gc_distance_nm", [](double lat1, double lon1, double lat2, double lon2) {
              return gc_distance_nm({lat1, lon1}, {lat2, lon2});
          },
          py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"),
          "Great-circle distance in nautical miles.");
}
