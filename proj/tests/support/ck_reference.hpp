#pragma once
// Reference solver for the transient Erlang-service queue, used only by tests.
// Independent of the production engine: advances the full phase-state system
// with uniformization (truncated Poisson series over the embedded DTMC kernel)
// on a fixed fine grid instead of RK4 windows.
#include <cmath>
#include <functional>
#include <vector>

namespace ckref {

struct Curve {
    std::vector<double> t, W;
    double wait_at(double time) const {
        if (t.empty()) return 0.0;
        if (time <= t.front()) return W.front();
        if (time >= t.back()) return W.back();
        size_t lo = 0, hi = t.size() - 1;
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            (t[mid] <= time ? lo : hi) = mid;
        }
        double u = (time - t[lo]) / (t[hi] - t[lo]);
        return W[lo] * (1.0 - u) + W[hi] * u;
    }
};

// lambda_of_t: arrival rate per minute at time t. Horizon [0, T] minutes.
inline Curve solve(int k, double mu, const std::function<double(double)>& lambda_of_t,
                   int N, double T, double dt = 0.05) {
    const int kN = k * N;
    std::vector<double> q(size_t(kN) + 1, 0.0), nxt(q.size()), term(q.size());
    q[0] = 1.0;
    Curve c;
    c.t.push_back(0.0);
    c.W.push_back(0.0);

    const int steps = int(std::round(T / dt));
    double t = 0.0;
    for (int s = 0; s < steps; ++s) {
        const double lam = lambda_of_t(t + 0.5 * dt);
        const double Lam = lam + k * mu;
        const double pa = lam / Lam;   // arrival branch of the uniformized kernel
        const double ps = k * mu / Lam;

        auto apply_kernel = [&](const std::vector<double>& v, std::vector<double>& out) {
            std::fill(out.begin(), out.end(), 0.0);
            for (int z = 0; z <= kN; ++z) {
                const double m = v[size_t(z)];
                if (m == 0.0) continue;
                if (z + k <= kN)
                    out[size_t(z + k)] += pa * m;
                else
                    out[size_t(z)] += pa * m; // blocked arrival: self-loop
                if (z >= 1)
                    out[size_t(z - 1)] += ps * m;
                else
                    out[size_t(z)] += ps * m; // idle completion: self-loop
            }
        };

        const double a = Lam * dt;
        term = q;
        std::vector<double> acc(q.size());
        double coeff = std::exp(-a); // e^-a * a^j / j!
        for (size_t i = 0; i < q.size(); ++i) acc[i] = coeff * term[i];
        for (int j = 1; j < 64; ++j) {
            apply_kernel(term, nxt);
            term.swap(nxt);
            coeff *= a / j;
            for (size_t i = 0; i < q.size(); ++i) acc[i] += coeff * term[i];
            if (coeff < 1e-16 && double(j) > a + 10.0) break;
        }
        double sum = 0.0;
        for (double v : acc) sum += v;
        for (size_t i = 0; i < q.size(); ++i) q[i] = std::max(acc[i], 0.0) / sum;

        t += dt;
        double ez = 0.0;
        for (int z = 1; z <= kN; ++z) ez += double(z) * q[size_t(z)];
        c.t.push_back(t);
        c.W.push_back(ez / (k * mu));
    }
    return c;
}

} // namespace ckref
