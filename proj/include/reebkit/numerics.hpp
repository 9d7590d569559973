#pragma once

// Small numerical utilities shared across the toolkit: C-infinity bump/step
// building blocks, quadrature, bracketing root finders and a deterministic
// parallel map.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace reebkit {

inline constexpr double kPi = 3.14159265358979323846;

// exp(-1/u) extended by 0 for u <= 0; flat to all orders at u = 0.
inline double flat_exp(double u) {
    if (u <= 0.0) return 0.0;
    if (u < 1e-3) return 0.0;  // below 1e-434 anyway; avoids overflow in 1/u
    return std::exp(-1.0 / u);
}

// C-infinity step: 0 for u <= 0, 1 for u >= 1, strictly increasing between,
// flat to all orders at both endpoints. Symmetric about u = 1/2.
inline double smooth_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = flat_exp(u), b = flat_exp(1.0 - u);
    return a / (a + b);
}

// d/du smooth_step = A B (1/u^2 + 1/(1-u)^2) / (A+B)^2 with A = e^{-1/u},
// B = e^{-1/(1-u)}; strictly positive on (0,1), flat at the endpoints.
inline double smooth_step_deriv(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double a = flat_exp(u), b = flat_exp(1.0 - u);
    if (a == 0.0 || b == 0.0) return 0.0;  // flat flank underflow; the true
    const double s = a + b;                // value is below double precision
    return (a / s) * (b / s) * (1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u)));
}

// Unit bump: 0 outside (0,1), peak value 1 at u = 1/2, even about 1/2,
// flat to all orders at 0 and 1.
inline double smooth_bump(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double w = 2.0 * u - 1.0;          // (-1,1)
    return std::exp(1.0 - 1.0 / (1.0 - w * w));
}

// Plateau bump on [x0,x3]: 0 outside, exactly 1 on [x1,x2], monotone smooth
// transitions on the flanks.
struct PlateauBump {
    double x0, x1, x2, x3;
    double operator()(double x) const {
        if (x <= x0 || x >= x3) return 0.0;
        if (x < x1) return smooth_step((x - x0) / (x1 - x0));
        if (x <= x2) return 1.0;
        return smooth_step((x3 - x) / (x3 - x2));
    }
};

// 64-point Gauss-Legendre on [a,b]. Nodes/weights generated once by Newton
// iteration on the Legendre recurrence.
struct GaussLegendre {
    std::vector<double> nodes, weights;  // on [-1,1]
    explicit GaussLegendre(int n = 64) : nodes(n), weights(n) {
        for (int i = 0; i < n; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
    double integrate(const std::function<double(double)>& f, double a, double b) const {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double s = 0.0;
        for (size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(mid + half * nodes[i]);
        return s * half;
    }
};

inline const GaussLegendre& gauss64() {
    static const GaussLegendre g(64);
    return g;
}

// Composite 64-pt Gauss-Legendre; panels handle flat-endpoint integrands.
inline double integrate_1d(const std::function<double(double)>& f, double a, double b,
                           int panels = 8) {
    double s = 0.0;
    for (int i = 0; i < panels; ++i) {
        double pa = a + (b - a) * i / panels;
        double pb = a + (b - a) * (i + 1) / panels;
        s += gauss64().integrate(f, pa, pb);
    }
    return s;
}

// Bisection for f(x)=0 on a bracketing interval [lo,hi], f(lo) and f(hi) of
// opposite sign. Returns midpoint after reaching tolerance.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol = 1e-14, int maxit = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) throw std::runtime_error("bisect: interval does not bracket a root");
    for (int i = 0; i < maxit && (hi - lo) > xtol * std::max(1.0, std::abs(lo)); ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Largest x in (0, hi] with pred true, assuming pred holds near 0. Bisection
// on the boolean; returns 0 if pred(hi0) fails for every trial down to xtol.
inline double bisect_threshold(const std::function<bool(double)>& pred, double hi,
                               double xtol = 1e-10, int maxit = 200) {
    double good = 0.0, bad = hi;
    // find an initial good point
    double probe = hi;
    for (int i = 0; i < 60 && good == 0.0; ++i) {
        if (pred(probe)) good = probe;
        else {
            bad = probe;
            probe *= 0.5;
        }
        if (probe < xtol) return 0.0;
    }
    if (good == hi) return hi;
    for (int i = 0; i < maxit && (bad - good) > xtol; ++i) {
        double mid = 0.5 * (good + bad);
        (pred(mid) ? good : bad) = mid;
    }
    return good;
}

// Deterministic parallel map: results land in index order regardless of
// scheduling, so downstream output is scheduling-independent.
template <typename F>
void parallel_for(std::size_t n, F&& body, unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline long long gcdll(long long a, long long b) {
    a = std::abs(a);
    b = std::abs(b);
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace reebkit
