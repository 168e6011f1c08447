#pragma once
#include <vector>

#include "airnet/errors.hpp"

namespace airnet {

// Transient single-server queue with Poisson arrivals whose rate is piecewise
// constant per sub-period, and Erlang-k service. Because Erlang-k service is a
// chain of k exponential phases, the pair (customers, remaining phases of the
// one in service) collapses to a single Markov state: the total number of
// remaining service phases z in the system. A customer waiting contributes k
// phases, the customer in service contributes its unfinished phases, so
// z ranges over 0..k*N for a system truncated at N customers.
//
// The engine integrates the master equation of z directly:
//   arrivals  : rate lambda(t), z -> z + k   (blocked once z + k would exceed kN)
//   completion: rate k*mu,      z -> z - 1
// The expected virtual wait — the time a customer arriving at t would spend
// before entering service — is E[Z(t)] / (k*mu), the expected work ahead of it.

struct QueueParams {
    int k = 1;        // Erlang order (>= 1)
    double mu = 1.0;  // service rate per minute (> 0)
    int N = 120;      // customer-count truncation (>= 1)
};

struct DemandProfile {
    std::vector<double> rates;  // expected operations per sub-period
    double slot_minutes = 15.0; // sub-period length
    double t0 = 0.0;            // horizon start, minutes

    double t_end() const { return t0 + slot_minutes * double(rates.size()); }
    // arrival rate per minute at time t (half-open slots: boundary belongs to
    // the later slot)
    double rate_per_min_at(double t) const;
};

// Sub-period index of time t: floor((t - t0) / slot). Throws outside horizon.
int slot_index(double t, const DemandProfile& d);

struct QueueState {
    double t = 0.0;            // wall-clock minutes
    int k = 1;
    std::vector<double> phase; // probabilities over z = 0..k*N

    // customer-count marginal p_0..p_N (customer n covers z in (k(n-1), kn])
    std::vector<double> customer_marginal() const;
};

// Point mass on the empty system at time t0.
QueueState init_state(const QueueParams& p, double t0);

// Advance the state across a window of `minutes` at constant arrival rate
// lambda (per minute). Fixed-substep RK4 on the master equation; each substep
// is clipped to nonnegative and renormalized, so probability mass is conserved
// to machine precision.
void advance(QueueState& s, const QueueParams& p, double lambda_per_min, double minutes);

// Expected number waiting in queue (excludes the one in service):
// sum over customer states of (j - 1) * p_j.
double expected_queue_length(const QueueState& s);

// Expected virtual wait in minutes: E[Z] / (k*mu).
double expected_wait(const QueueState& s, const QueueParams& p);

// Sampled wait curve over a horizon. Samples are dense (about one per minute
// plus every sub-period boundary) and lookups interpolate linearly, so the
// curve is a continuous function of time. The queue-length column preserves
// the L = W * mu identity at every sample.
struct WaitCurve {
    std::vector<double> t;  // minutes
    std::vector<double> W;  // expected wait, minutes
    std::vector<double> L;  // W * mu
    double max_terminal_mass = 0.0; // max over samples of P(n = N)
    bool truncation_warning = false;

    double wait_at(double time) const; // linear interpolation, clamped ends
};

// Run the engine across the whole demand horizon from the empty state.
// `terminal_bound` is the truncation-health threshold: if P(n = N) ever
// exceeds it the curve carries a warning (the run still completes).
WaitCurve run_profile(const QueueParams& p, const DemandProfile& d,
                      double terminal_bound = 1e-6);

} // namespace airnet
