#pragma once
// Day-loop delay simulation. The loop walks the horizon one sub-period at a
// time; within a sub-period it alternates between evaluating flight timelines
// against the current waiting-time curves and moving queue demand to the
// adjusted operation times, until the sub-period reaches a fixed point. Delays
// are then decomposed into a local (own-queue) and a propagated (upstream)
// component per node.

#include <map>
#include <string>
#include <vector>

#include "airnet/ingest.hpp"
#include "airnet/network.hpp"
#include "airnet/queue_engine.hpp"

namespace airnet {

struct Buffers {
    double a_buffer = 15.0; // ground turnaround slack, minutes
    double e_buffer = 10.0; // schedule padding over nominal flight time, minutes
};

// One flight in simulation clock (minutes from horizon start), with its route
// crossings already resolved to (point, offset-from-departure) pairs.
struct SimFlight {
    std::string flight_id;
    std::string origin;
    std::string destination;
    double sched_dep = 0.0;
    double sched_arr = 0.0;
    int pred = -1; // index of the previous flight flown by the same airframe
    struct Crossing {
        std::string point_id;
        double offset_min;
    };
    std::vector<Crossing> crossings;
};

// Seam between the day loop and the queue engine: the loop only ever asks for
// the expected wait of an operation joining a node at time t, and reports
// operations added to or moved between times. Tests inject fixed waits here.
class WaitProvider {
public:
    virtual ~WaitProvider() = default;
    virtual double wait_at(const std::string& node_id, double t) = 0;
    virtual void add_op(const std::string& /*node_id*/, double /*t*/) {}
    virtual void move_op(const std::string& /*node_id*/, double /*from_t*/, double /*to_t*/) {}
    virtual bool truncation_seen() const { return false; }
};

// Queue-engine-backed provider. Each node keeps per-slot state snapshots and
// per-minute wait stamps, computed lazily up to the latest queried slot; a
// demand edit at slot s invalidates curves from s onward only.
class EngineWaitProvider : public WaitProvider {
public:
    explicit EngineWaitProvider(const MultiLayerNetwork& net);

    double wait_at(const std::string& node_id, double t) override;
    void add_op(const std::string& node_id, double t) override;
    void move_op(const std::string& node_id, double from_t, double to_t) override;
    bool truncation_seen() const override { return truncation_; }

    void remove_op(const std::string& node_id, double t);
    // Drop all demand (used when re-stamping from a schedule).
    void clear_demand();
    const std::vector<double>& demand_rates(const std::string& node_id) const;

private:
    struct NodeState {
        QueueParams params;
        std::vector<double> rates;               // operations per slot
        std::vector<QueueState> snaps;           // snaps[s] = state at slot-s start
        std::vector<std::vector<double>> stamps; // per-slot wait samples
        size_t valid_slots = 0;                  // slots with fresh snaps+stamps
    };
    NodeState& node(const std::string& node_id);
    const NodeState& node(const std::string& node_id) const;
    void ensure(NodeState& n, size_t slot);
    size_t slot_of(double t) const;

    std::vector<NodeState> nodes_;
    std::map<std::string, size_t> index_;
    double t0_;
    double slot_minutes_;
    size_t slots_;
    int stamps_per_slot_;
    bool truncation_ = false;
};

// Adjusted times and experienced waits for one flight. Adjusted times stamp
// when the operation joins the node's queue; the wait is served after it.
struct FlightTimeline {
    double adj_dep = 0.0;            // AD: adjusted departure (>= scheduled)
    double adj_arr = 0.0;            // AA: adjusted arrival (>= scheduled)
    std::vector<double> adj_cross;   // AE_e: adjusted passage per crossing
    double w_origin = 0.0;           // departure-queue wait at AD
    double w_dest = 0.0;             // arrival-queue wait at AA
    std::vector<double> w_cross;     // en-route wait per crossing
    bool processed = false;
    bool evaluated = false;
};

struct SimOptions {
    double epoch_offset_s = 0.0; // epoch seconds corresponding to clock zero
    int guard = 50;              // inner-loop iteration cap per sub-period
};

// Resolve itineraries into simulation flights: convert times to minutes from
// the clock origin, link airframe predecessors, and assign each OD pair its
// highest-usage route's crossings (ties broken by route id; ODs without a
// mined route fly direct).
std::vector<SimFlight> make_sim_flights(const MultiLayerNetwork& net,
                                        const std::vector<Itinerary>& itineraries,
                                        double epoch_offset_s);

// The day loop proper. Demand must already be stamped into the provider at
// the scheduled operation times. Throws numeric_error if a sub-period fails
// to reach a fixed point within `guard` iterations.
std::vector<FlightTimeline> run_day_loop(const std::vector<SimFlight>& flights,
                                         WaitProvider& waits, const Buffers& buffers,
                                         double t0, double slot_minutes, size_t slots,
                                         int guard = 50);

struct NodeDelayRow {
    std::string node_id;
    NodeKind kind = NodeKind::airport;
    double mean_local = 0.0;
    double mean_propagated = 0.0;
    size_t flight_count = 0;
};

struct FlightNodeRow {
    std::string flight_id;
    std::string node_id;
    std::string op; // "dep", "cross", or "arr"
    double scheduled = 0.0;
    double adjusted = 0.0;
    double local = 0.0;      // raw wait at the adjusted time (no buffer applied)
    double propagated = 0.0; // adjusted - scheduled
};

struct DelayReport {
    std::vector<NodeDelayRow> per_node;    // nodes with contributing flights only
    std::vector<FlightNodeRow> per_flight; // flight order, then leg order
    double network_avg_delay = 0.0;        // mean over flights of AA - SA
    size_t flight_count = 0;
    bool truncation_warning = false;
};

// Build the report from final curves: airport rows aggregate arrivals
// (local = wait at AA, propagated = AA - SA); point rows aggregate crossings
// (local = mean wait minus e_buffer floored at zero, propagated = AE - SE).
// Nodes without contributing operations are omitted rather than reported as
// zero. Per-flight rows carry the same wait values the node means are built
// from, so recomputing a mean from the table reproduces the node row exactly.
DelayReport decompose_delays(const std::vector<SimFlight>& flights,
                             const std::vector<FlightTimeline>& timelines,
                             WaitProvider& waits, const Buffers& buffers);

// Convenience wrapper: stamp scheduled demand, run the loop with the
// queue-engine provider, decompose.
DelayReport simulate_day(const MultiLayerNetwork& net,
                         const std::vector<Itinerary>& itineraries,
                         const Buffers& buffers, const SimOptions& opt = {});

// Same, over pre-resolved flights (scenario runs reuse the resolution).
DelayReport simulate_flights(const MultiLayerNetwork& net,
                             const std::vector<SimFlight>& flights,
                             const Buffers& buffers, int guard = 50);

} // namespace airnet
