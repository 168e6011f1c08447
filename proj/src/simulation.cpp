#include "airnet/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "airnet/errors.hpp"

namespace airnet {

// ---------------------------------------------------------------------------
// EngineWaitProvider

EngineWaitProvider::EngineWaitProvider(const MultiLayerNetwork& net)
    : t0_(net.t0), slot_minutes_(net.slot_minutes), slots_(net.slots) {
    if (slots_ == 0 || slot_minutes_ <= 0.0)
        throw config_error("wait provider needs a positive horizon");
    stamps_per_slot_ = std::max(1, int(std::ceil(slot_minutes_)));
    auto take = [&](const NetworkNode& n) {
        NodeState st;
        st.params = n.params;
        st.rates = n.demand.rates;
        st.rates.resize(slots_, 0.0);
        st.snaps.assign(slots_ + 1, QueueState{});
        st.snaps[0] = init_state(st.params, t0_);
        st.stamps.assign(slots_, {});
        index_[n.node_id] = nodes_.size();
        nodes_.push_back(std::move(st));
    };
    for (const auto& n : net.airports) take(n);
    for (const auto& n : net.points) take(n);
}

EngineWaitProvider::NodeState& EngineWaitProvider::node(const std::string& node_id) {
    auto it = index_.find(node_id);
    if (it == index_.end()) throw input_error("unknown network node '" + node_id + "'");
    return nodes_[it->second];
}

const EngineWaitProvider::NodeState& EngineWaitProvider::node(
    const std::string& node_id) const {
    auto it = index_.find(node_id);
    if (it == index_.end()) throw input_error("unknown network node '" + node_id + "'");
    return nodes_[it->second];
}

size_t EngineWaitProvider::slot_of(double t) const {
    if (t <= t0_) return 0;
    const size_t s = size_t((t - t0_) / slot_minutes_);
    return std::min(s, slots_ - 1);
}

void EngineWaitProvider::ensure(NodeState& n, size_t slot) {
    while (n.valid_slots <= slot) {
        const size_t s = n.valid_slots;
        QueueState st = n.snaps[s];
        const double lam = std::max(0.0, n.rates[s]) / slot_minutes_;
        auto& row = n.stamps[s];
        row.assign(size_t(stamps_per_slot_) + 1, 0.0);
        row[0] = expected_wait(st, n.params);
        const double step = slot_minutes_ / double(stamps_per_slot_);
        for (int i = 1; i <= stamps_per_slot_; ++i) {
            advance(st, n.params, lam, step);
            row[size_t(i)] = expected_wait(st, n.params);
        }
        const auto marginal = st.customer_marginal();
        if (marginal.back() > 1e-6) truncation_ = true;
        n.snaps[s + 1] = std::move(st);
        n.valid_slots = s + 1;
    }
}

double EngineWaitProvider::wait_at(const std::string& node_id, double t) {
    NodeState& n = node(node_id);
    const double hi = t0_ + slot_minutes_ * double(slots_);
    const double tt = std::clamp(t, t0_, hi);
    const size_t s = slot_of(tt);
    ensure(n, s);
    const double step = slot_minutes_ / double(stamps_per_slot_);
    const double u = (tt - t0_ - double(s) * slot_minutes_) / step;
    const size_t i = std::min(size_t(std::max(0.0, u)), size_t(stamps_per_slot_) - 1);
    const double frac = u - double(i);
    const auto& row = n.stamps[s];
    return row[i] + frac * (row[i + 1] - row[i]);
}

void EngineWaitProvider::add_op(const std::string& node_id, double t) {
    NodeState& n = node(node_id);
    if (t >= t0_ + slot_minutes_ * double(slots_)) truncation_ = true;
    const size_t s = slot_of(t);
    n.rates[s] += 1.0;
    n.valid_slots = std::min(n.valid_slots, s);
}

void EngineWaitProvider::remove_op(const std::string& node_id, double t) {
    NodeState& n = node(node_id);
    const size_t s = slot_of(t);
    n.rates[s] = std::max(0.0, n.rates[s] - 1.0);
    n.valid_slots = std::min(n.valid_slots, s);
}

void EngineWaitProvider::move_op(const std::string& node_id, double from_t, double to_t) {
    NodeState& n = node(node_id);
    if (to_t >= t0_ + slot_minutes_ * double(slots_)) truncation_ = true;
    const size_t s0 = slot_of(from_t);
    const size_t s1 = slot_of(to_t);
    if (s0 == s1) return;
    n.rates[s0] = std::max(0.0, n.rates[s0] - 1.0);
    n.rates[s1] += 1.0;
    n.valid_slots = std::min(n.valid_slots, std::min(s0, s1));
}

void EngineWaitProvider::clear_demand() {
    for (auto& n : nodes_) {
        std::fill(n.rates.begin(), n.rates.end(), 0.0);
        n.valid_slots = 0;
    }
}

const std::vector<double>& EngineWaitProvider::demand_rates(
    const std::string& node_id) const {
    return node(node_id).rates;
}

// ---------------------------------------------------------------------------
// Flight resolution

std::vector<SimFlight> make_sim_flights(const MultiLayerNetwork& net,
                                        const std::vector<Itinerary>& itineraries,
                                        double epoch_offset_s) {
    std::map<std::pair<std::string, std::string>, const Route*> best;
    for (const auto& r : net.routes) {
        auto& slot = best[{r.origin, r.destination}];
        if (!slot || r.usage_prob > slot->usage_prob ||
            (r.usage_prob == slot->usage_prob && r.route_id < slot->route_id))
            slot = &r;
    }
    std::vector<SimFlight> flights;
    for (const auto& itin : itineraries) {
        int prev = -1;
        for (const auto& rec : itin.flights) {
            SimFlight f;
            f.flight_id = rec.flight_id;
            f.origin = rec.origin;
            f.destination = rec.destination;
            f.sched_dep = (rec.sched_dep - epoch_offset_s) / 60.0;
            f.sched_arr = (rec.sched_arr - epoch_offset_s) / 60.0;
            f.pred = prev;
            auto it = best.find({rec.origin, rec.destination});
            if (it != best.end()) {
                for (const auto* cx : net.route_crossings(it->second->route_id))
                    f.crossings.push_back({cx->point_id, cx->offset_min});
            }
            prev = int(flights.size());
            flights.push_back(std::move(f));
        }
    }
    return flights;
}

// ---------------------------------------------------------------------------
// Day loop

namespace {

// Canonical processing order: by scheduled departure, then flight id. This
// also places every flight after its airframe predecessor.
std::vector<size_t> evaluation_order(const std::vector<SimFlight>& flights) {
    std::vector<size_t> order(flights.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (flights[a].sched_dep != flights[b].sched_dep)
            return flights[a].sched_dep < flights[b].sched_dep;
        return flights[a].flight_id < flights[b].flight_id;
    });
    return order;
}

} // namespace

std::vector<FlightTimeline> run_day_loop(const std::vector<SimFlight>& flights,
                                         WaitProvider& waits, const Buffers& buffers,
                                         double t0, double slot_minutes, size_t slots,
                                         int guard) {
    if (buffers.a_buffer < 0.0 || buffers.e_buffer < 0.0)
        throw config_error("buffers must be nonnegative");

    std::vector<FlightTimeline> tl(flights.size());
    for (size_t i = 0; i < flights.size(); ++i) {
        tl[i].adj_dep = flights[i].sched_dep;
        tl[i].adj_arr = flights[i].sched_arr;
        tl[i].adj_cross.resize(flights[i].crossings.size());
        tl[i].w_cross.assign(flights[i].crossings.size(), 0.0);
        for (size_t e = 0; e < flights[i].crossings.size(); ++e)
            tl[i].adj_cross[e] = flights[i].sched_dep + flights[i].crossings[e].offset_min;
    }

    const auto order = evaluation_order(flights);
    constexpr double tol = 1e-9;

    // Where each flight's queue ops are currently stamped. Ops normally follow
    // the timeline, but once reassignment is pinned (see the cycle break below)
    // the timeline may settle a short step away from the stamp; later moves
    // must start from the stamp, not the timeline, or demand would leak.
    struct OpStamp {
        double dep;
        std::vector<double> cross;
        double arr;
    };
    std::vector<OpStamp> stamp(flights.size());
    for (size_t i = 0; i < flights.size(); ++i)
        stamp[i] = {flights[i].sched_dep, tl[i].adj_cross, flights[i].sched_arr};

    bool reassign = true; // queue ops follow timeline changes

    // Recompute one flight's timeline against the current curves; apply it and
    // move its queue demand if anything shifted. Returns whether it shifted.
    auto evaluate = [&](size_t i) -> bool {
        const SimFlight& f = flights[i];
        FlightTimeline& cur = tl[i];

        double lateness = 0.0;
        if (f.pred >= 0) {
            const auto& p = tl[size_t(f.pred)];
            lateness = (p.adj_arr - flights[size_t(f.pred)].sched_arr) + p.w_dest;
        }

        FlightTimeline next = cur;
        const double ground_push = std::max(0.0, lateness - buffers.a_buffer);
        next.adj_dep = f.sched_dep + ground_push;
        next.w_origin = waits.wait_at(f.origin, next.adj_dep);
        double en_route = 0.0;
        for (size_t e = 0; e < f.crossings.size(); ++e) {
            next.adj_cross[e] =
                next.adj_dep + next.w_origin + f.crossings[e].offset_min + en_route;
            next.w_cross[e] = waits.wait_at(f.crossings[e].point_id, next.adj_cross[e]);
            en_route += next.w_cross[e];
        }
        const double dep_delay = ground_push + next.w_origin;
        const double arrival_push =
            std::max(0.0, dep_delay + en_route - buffers.e_buffer);
        next.adj_arr = f.sched_arr + arrival_push;
        next.w_dest = waits.wait_at(f.destination, next.adj_arr);
        next.evaluated = true;

        if (next.adj_dep < f.sched_dep - 1e-12 || next.adj_arr < f.sched_arr - 1e-12)
            throw numeric_error("schedule feasibility violated for flight " + f.flight_id);

        bool changed = !cur.evaluated || std::abs(next.adj_dep - cur.adj_dep) > tol ||
                       std::abs(next.adj_arr - cur.adj_arr) > tol ||
                       std::abs(next.w_dest - cur.w_dest) > tol;
        for (size_t e = 0; e < f.crossings.size() && !changed; ++e)
            changed = std::abs(next.adj_cross[e] - cur.adj_cross[e]) > tol;

        if (changed) {
            if (reassign) {
                waits.move_op(f.origin, stamp[i].dep, next.adj_dep);
                stamp[i].dep = next.adj_dep;
                for (size_t e = 0; e < f.crossings.size(); ++e) {
                    waits.move_op(f.crossings[e].point_id, stamp[i].cross[e],
                                  next.adj_cross[e]);
                    stamp[i].cross[e] = next.adj_cross[e];
                }
                waits.move_op(f.destination, stamp[i].arr, next.adj_arr);
                stamp[i].arr = next.adj_arr;
            }
            const bool was_processed = cur.processed;
            cur = std::move(next);
            cur.processed = was_processed;
        } else {
            // Times held (so the stamped demand slots stay authoritative);
            // refresh the waits, which downstream flights read.
            cur.w_origin = next.w_origin;
            cur.w_cross = next.w_cross;
            cur.w_dest = next.w_dest;
            cur.evaluated = true;
        }
        return changed;
    };

    // Fingerprint of the full timeline state after a sweep. The engine's curves
    // are a pure function of the op stamps, and the stamps a function of the
    // timeline history, so if a sweep lands on a state seen earlier in this
    // sub-period the iteration is provably periodic and will never settle on
    // its own.
    auto sweep_signature = [&tl]() {
        uint64_t sig = 1469598103934665603ull;
        auto mix = [&sig](double v) {
            uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            for (int b = 0; b < 8; ++b) {
                sig ^= (bits >> (8 * b)) & 0xff;
                sig *= 1099511628211ull;
            }
        };
        for (const auto& t : tl) {
            mix(t.adj_dep);
            mix(t.adj_arr);
            mix(t.w_origin);
            mix(t.w_dest);
            for (double v : t.adj_cross) mix(v);
            for (double v : t.w_cross) mix(v);
        }
        return sig;
    };

    // March sub-period by sub-period; the final pass (open-ended upper bound)
    // settles anything pushed past the horizon.
    std::vector<uint64_t> sweep_states;
    for (size_t h = 0; h <= slots; ++h) {
        const double hi = (h < slots) ? t0 + double(h + 1) * slot_minutes
                                      : std::numeric_limits<double>::infinity();
        int iterations = 0;
        reassign = true;
        sweep_states.clear();
        bool changed = true;
        while (changed) {
            if (++iterations > guard) {
                if (reassign) {
                    // Out of budget while still reshuffling queue demand; pin
                    // the ops and spend a fresh budget settling times only.
                    reassign = false;
                    iterations = 1;
                } else {
                    throw numeric_error(
                        "delay propagation did not settle in sub-period " +
                        std::to_string(h) + " within " + std::to_string(guard) +
                        " iterations");
                }
            }
            changed = false;
            for (size_t idx : order) {
                if (tl[idx].processed) continue;
                if (tl[idx].adj_dep >= hi) continue; // departs in a later sub-period
                if (evaluate(idx)) changed = true;
            }
            if (changed && reassign) {
                // A handful of flights sitting right on a slot boundary can
                // chase each other's queue ops between two slots forever (the
                // op leaves the slot, the wait drops, the timeline slides back,
                // the op returns). Once a sweep revisits an earlier state, stop
                // moving demand: against fixed curves each flight depends only
                // on its predecessor, so the remaining sweeps settle. Times may
                // then rest a sub-slot step away from their stamped ops, which
                // is the cycle's own amplitude and the best single placement.
                const uint64_t sig = sweep_signature();
                if (std::find(sweep_states.begin(), sweep_states.end(), sig) !=
                    sweep_states.end()) {
                    reassign = false;
                } else {
                    sweep_states.push_back(sig);
                }
            }
        }
        // Freeze flights whose whole timeline (including the arrival queue
        // wait) completed inside this sub-period; frozen times never change.
        bool more = true;
        while (more) {
            more = false;
            for (size_t idx : order) {
                auto& cur = tl[idx];
                if (cur.processed || !cur.evaluated) continue;
                if (flights[idx].pred >= 0 && !tl[size_t(flights[idx].pred)].processed)
                    continue;
                if (cur.adj_arr + cur.w_dest < hi) {
                    cur.processed = true;
                    more = true;
                }
            }
        }
    }
    return tl;
}

// ---------------------------------------------------------------------------
// Decomposition

DelayReport decompose_delays(const std::vector<SimFlight>& flights,
                             const std::vector<FlightTimeline>& timelines,
                             WaitProvider& waits, const Buffers& buffers) {
    DelayReport rep;
    struct Acc {
        NodeKind kind = NodeKind::airport;
        double local = 0.0, propagated = 0.0;
        size_t n = 0;
    };
    std::map<std::string, Acc> acc;
    double total_arrival_delay = 0.0;

    for (size_t idx : evaluation_order(flights)) {
        const SimFlight& f = flights[idx];
        const FlightTimeline& t = timelines[idx];

        rep.per_flight.push_back({f.flight_id, f.origin, "dep", f.sched_dep, t.adj_dep,
                                  waits.wait_at(f.origin, t.adj_dep),
                                  t.adj_dep - f.sched_dep});

        for (size_t e = 0; e < f.crossings.size(); ++e) {
            const double sched = f.sched_dep + f.crossings[e].offset_min;
            FlightNodeRow row{f.flight_id,
                              f.crossings[e].point_id,
                              "cross",
                              sched,
                              t.adj_cross[e],
                              waits.wait_at(f.crossings[e].point_id, t.adj_cross[e]),
                              t.adj_cross[e] - sched};
            auto& a = acc[row.node_id];
            a.kind = NodeKind::enroute;
            a.local += row.local;
            a.propagated += row.propagated;
            a.n += 1;
            rep.per_flight.push_back(std::move(row));
        }

        FlightNodeRow arr{f.flight_id,
                          f.destination,
                          "arr",
                          f.sched_arr,
                          t.adj_arr,
                          waits.wait_at(f.destination, t.adj_arr),
                          t.adj_arr - f.sched_arr};
        auto& a = acc[f.destination];
        a.kind = NodeKind::airport;
        a.local += arr.local;
        a.propagated += arr.propagated;
        a.n += 1;
        total_arrival_delay += arr.propagated;
        rep.per_flight.push_back(std::move(arr));
    }

    for (const auto& [node_id, a] : acc) {
        NodeDelayRow row;
        row.node_id = node_id;
        row.kind = a.kind;
        row.flight_count = a.n;
        row.mean_propagated = a.propagated / double(a.n);
        const double mean_wait = a.local / double(a.n);
        row.mean_local = (a.kind == NodeKind::enroute)
                             ? std::max(0.0, mean_wait - buffers.e_buffer)
                             : mean_wait;
        rep.per_node.push_back(std::move(row));
    }

    rep.flight_count = flights.size();
    rep.network_avg_delay =
        flights.empty() ? 0.0 : total_arrival_delay / double(flights.size());
    rep.truncation_warning = waits.truncation_seen();
    return rep;
}

// ---------------------------------------------------------------------------
// Entry points

DelayReport simulate_flights(const MultiLayerNetwork& net,
                             const std::vector<SimFlight>& flights,
                             const Buffers& buffers, int guard) {
    EngineWaitProvider waits(net);
    // Queue demand is stamped from the resolved schedule itself so that every
    // later demand move is an exact one-operation transfer between slots.
    waits.clear_demand();
    for (const auto& f : flights) {
        waits.add_op(f.origin, f.sched_dep);
        for (const auto& c : f.crossings) waits.add_op(c.point_id, f.sched_dep + c.offset_min);
        waits.add_op(f.destination, f.sched_arr);
    }
    auto timelines =
        run_day_loop(flights, waits, buffers, net.t0, net.slot_minutes, net.slots, guard);
    return decompose_delays(flights, timelines, waits, buffers);
}

DelayReport simulate_day(const MultiLayerNetwork& net,
                         const std::vector<Itinerary>& itineraries,
                         const Buffers& buffers, const SimOptions& opt) {
    auto flights = make_sim_flights(net, itineraries, opt.epoch_offset_s);
    return simulate_flights(net, flights, buffers, opt.guard);
}

} // namespace airnet
