#include "airnet/queue_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace airnet {

double DemandProfile::rate_per_min_at(double t) const {
    if (rates.empty()) return 0.0;
    int j = int(std::floor((t - t0) / slot_minutes));
    j = std::clamp(j, 0, int(rates.size()) - 1);
    return rates[size_t(j)] / slot_minutes;
}

int slot_index(double t, const DemandProfile& d) {
    if (t < d.t0 || t > d.t_end())
        throw config_error("time " + std::to_string(t) + " outside horizon [" +
                           std::to_string(d.t0) + ", " + std::to_string(d.t_end()) + "]");
    int j = int(std::floor((t - d.t0) / d.slot_minutes));
    // t == t_end lands one past the last slot; clamp that single edge case
    return std::min(j, int(d.rates.size()) - 1);
}

std::vector<double> QueueState::customer_marginal() const {
    const int kN = int(phase.size()) - 1;
    const int N = kN / k;
    std::vector<double> p(size_t(N) + 1, 0.0);
    p[0] = phase[0];
    for (int n = 1; n <= N; ++n)
        for (int z = k * (n - 1) + 1; z <= k * n; ++z)
            p[size_t(n)] += phase[size_t(z)];
    return p;
}

QueueState init_state(const QueueParams& p, double t0) {
    if (p.k < 1 || p.N < 1 || p.mu <= 0.0)
        throw config_error("queue params require k >= 1, N >= 1, mu > 0");
    QueueState s;
    s.t = t0;
    s.k = p.k;
    s.phase.assign(size_t(p.k) * size_t(p.N) + 1, 0.0);
    s.phase[0] = 1.0;
    return s;
}

namespace {

// One master-equation derivative evaluation. dq must be zeroed by the caller.
void deriv(const std::vector<double>& q, int k, double kmu, double lam,
           std::vector<double>& dq) {
    const int kN = int(q.size()) - 1;
    std::fill(dq.begin(), dq.end(), 0.0);
    // arrivals: z -> z + k, blocked where z + k > kN
    for (int z = 0; z + k <= kN; ++z) {
        const double flow = lam * q[size_t(z)];
        dq[size_t(z)] -= flow;
        dq[size_t(z + k)] += flow;
    }
    // phase completions: z -> z - 1
    for (int z = 1; z <= kN; ++z) {
        const double flow = kmu * q[size_t(z)];
        dq[size_t(z)] -= flow;
        dq[size_t(z - 1)] += flow;
    }
}

} // namespace

void advance(QueueState& s, const QueueParams& p, double lambda_per_min, double minutes) {
    if (minutes <= 0.0) return;
    const double kmu = double(p.k) * p.mu;
    const double rate = lambda_per_min + kmu;
    // RK4 is stable and very accurate at dt ~ 0.4 of the fastest timescale
    const int steps = std::max(1, int(std::ceil(minutes * rate / 0.4)));
    const double dt = minutes / steps;

    const size_t n = s.phase.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (int step = 0; step < steps; ++step) {
        deriv(s.phase, p.k, kmu, lambda_per_min, k1);
        for (size_t i = 0; i < n; ++i) tmp[i] = s.phase[i] + 0.5 * dt * k1[i];
        deriv(tmp, p.k, kmu, lambda_per_min, k2);
        for (size_t i = 0; i < n; ++i) tmp[i] = s.phase[i] + 0.5 * dt * k2[i];
        deriv(tmp, p.k, kmu, lambda_per_min, k3);
        for (size_t i = 0; i < n; ++i) tmp[i] = s.phase[i] + dt * k3[i];
        deriv(tmp, p.k, kmu, lambda_per_min, k4);
        double sum = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double v = s.phase[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            v = std::max(v, 0.0);
            s.phase[i] = v;
            sum += v;
        }
        if (!(sum > 0.0) || !std::isfinite(sum))
            throw numeric_error("queue integration lost probability mass");
        const double inv = 1.0 / sum;
        for (size_t i = 0; i < n; ++i) s.phase[i] *= inv;
    }
    s.t += minutes;
}

double expected_queue_length(const QueueState& s) {
    const int kN = int(s.phase.size()) - 1;
    const int N = kN / s.k;
    double L = 0.0;
    // p_n spans z in (k(n-1), kn]; weight (n - 1)
    for (int n = 2; n <= N; ++n)
        for (int z = s.k * (n - 1) + 1; z <= s.k * n; ++z)
            L += double(n - 1) * s.phase[size_t(z)];
    return L;
}

double expected_wait(const QueueState& s, const QueueParams& p) {
    double ez = 0.0;
    for (size_t z = 1; z < s.phase.size(); ++z) ez += double(z) * s.phase[z];
    return ez / (double(p.k) * p.mu);
}

double WaitCurve::wait_at(double time) const {
    if (t.empty()) return 0.0;
    if (time <= t.front()) return W.front();
    if (time >= t.back()) return W.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const size_t i = size_t(it - t.begin());
    const double t0 = t[i - 1], t1 = t[i];
    if (t1 <= t0) return W[i];
    const double u = (time - t0) / (t1 - t0);
    return W[i - 1] * (1.0 - u) + W[i] * u;
}

WaitCurve run_profile(const QueueParams& p, const DemandProfile& d, double terminal_bound) {
    QueueState s = init_state(p, d.t0);
    WaitCurve curve;
    curve.t.push_back(s.t);
    curve.W.push_back(0.0);
    curve.L.push_back(0.0);

    const int kN = p.k * p.N;
    auto terminal_mass = [&]() {
        double m = 0.0;
        for (int z = p.k * (p.N - 1) + 1; z <= kN; ++z) m += s.phase[size_t(z)];
        return m;
    };

    // about one sample per minute, always landing exactly on slot boundaries
    const int samples = std::max(1, int(std::ceil(d.slot_minutes)));
    const double sub = d.slot_minutes / samples;

    for (size_t j = 0; j < d.rates.size(); ++j) {
        const double lam = d.rates[j] / d.slot_minutes;
        for (int i = 0; i < samples; ++i) {
            advance(s, p, lam, sub);
            const double W = expected_wait(s, p);
            curve.t.push_back(d.t0 + double(j) * d.slot_minutes + double(i + 1) * sub);
            curve.W.push_back(W);
            curve.L.push_back(W * p.mu);
        }
        curve.max_terminal_mass = std::max(curve.max_terminal_mass, terminal_mass());
    }
    curve.truncation_warning = curve.max_terminal_mass > terminal_bound;
    return curve;
}

} // namespace airnet
