#pragma once

// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince pair) with dense output
// for recurrence detection. Accepted steps renormalize sphere-constrained
// coordinate blocks and watch the bounded coordinates of cut charts.

#include <functional>

#include "reebkit/geometry.hpp"

namespace reebkit {

using VectorField = std::function<Vec(const Vec&)>;

struct StepUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ChartExit : std::runtime_error {
    double t_exit;
    ChartExit(const std::string& msg, double t) : std::runtime_error(msg), t_exit(t) {}
};

struct IntegrateOptions {
    double tol = 1e-10;     // local error per unit time (absolute)
    double h_init = 0.0;    // 0 = automatic
    double h_min = 1e-13;
    long max_steps = 2000000;
    int err_dims = 0;       // error-control on the leading components only (0 = all);
                            // variational blocks ride along at the base accuracy
    const Model* chart = nullptr;  // renormalization + bounded-coordinate checks
};

// Piecewise cubic Hermite record of an integration run.
struct DenseTrajectory {
    std::vector<double> ts;
    std::vector<Vec> ys;
    std::vector<Vec> fs;

    double t_begin() const { return ts.front(); }
    double t_end() const { return ts.back(); }

    Vec eval(double t) const {
        if (ts.size() == 1 || t <= ts.front()) return ys.front();
        if (t >= ts.back()) return ys.back();
        auto it = std::upper_bound(ts.begin(), ts.end(), t);
        size_t i = static_cast<size_t>(it - ts.begin()) - 1;
        double h = ts[i + 1] - ts[i];
        double u = (t - ts[i]) / h;
        double u2 = u * u, u3 = u2 * u;
        double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
        double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
        return h00 * ys[i] + (h10 * h) * fs[i] + h01 * ys[i + 1] + (h11 * h) * fs[i + 1];
    }
};

namespace dp45 {
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
}  // namespace dp45

// Integrate y' = field(y) from y0 over time t (either sign). Returns the end
// state; optionally records the dense trajectory.
inline Vec integrate(const VectorField& field, Vec y0, double t, const IntegrateOptions& opt = {},
                     DenseTrajectory* dense = nullptr) {
    if (t == 0.0) {
        if (dense) {
            dense->ts = {0.0};
            dense->ys = {y0};
            dense->fs = {field(y0)};
        }
        return y0;
    }
    const double dir = t > 0 ? 1.0 : -1.0;
    const double t_end = t;
    double tc = 0.0;
    Vec y = std::move(y0);
    Vec k1 = field(y);
    double h = opt.h_init != 0.0 ? std::abs(opt.h_init)
                                 : std::min(std::abs(t), 1e-2 / std::max(1.0, k1.norm()));
    if (dense) {
        dense->ts.assign(1, 0.0);
        dense->ys.assign(1, y);
        dense->fs.assign(1, k1);
    }
    Vec k2, k3, k4, k5, k6, k7, ynew;
    // below this scale the budget tol*h sinks under FP roundoff of the state
    // update itself; such sliver steps are accepted outright
    const double sliver = 1e-12 * (std::abs(t_end) + 1.0);
    long step = 0;
    for (; step < opt.max_steps; ++step) {
        if (dir * (t_end - tc) <= 0) break;
        h = std::min(h, std::abs(t_end - tc));
        const double hs = dir * h;
        k2 = field(y + hs * (dp45::a21 * k1));
        k3 = field(y + hs * (dp45::a31 * k1 + dp45::a32 * k2));
        k4 = field(y + hs * (dp45::a41 * k1 + dp45::a42 * k2 + dp45::a43 * k3));
        k5 = field(y + hs * (dp45::a51 * k1 + dp45::a52 * k2 + dp45::a53 * k3 + dp45::a54 * k4));
        k6 = field(y + hs * (dp45::a61 * k1 + dp45::a62 * k2 + dp45::a63 * k3 + dp45::a64 * k4 +
                             dp45::a65 * k5));
        ynew = y + hs * (dp45::b1 * k1 + dp45::b3 * k3 + dp45::b4 * k4 + dp45::b5 * k5 +
                         dp45::b6 * k6);
        k7 = field(ynew);
        Vec errvec = hs * (dp45::e1 * k1 + dp45::e3 * k3 + dp45::e4 * k4 + dp45::e5 * k5 +
                           dp45::e6 * k6 + dp45::e7 * k7);
        double err = opt.err_dims > 0 ? errvec.head(opt.err_dims).norm() : errvec.norm();
        const double budget = opt.tol * h;  // local error per unit time
        if (err <= budget || h <= opt.h_min * 2 || h <= sliver) {
            tc += hs;
            y = std::move(ynew);
            if (opt.chart) {
                for (auto& b : opt.chart->chart_ref().spheres) {
                    double nu = y.segment(b.begin, b.len).norm();
                    if (nu > 0) y.segment(b.begin, b.len) /= nu;
                }
                for (auto& b : opt.chart->chart_ref().bounded)
                    if (y[b.idx] <= b.lo || y[b.idx] >= b.hi)
                        throw ChartExit("trajectory left the chart", tc);
            }
            k1 = (opt.chart ? field(y) : std::move(k7));  // FSAL unless renormalized
            if (dense) {
                dense->ts.push_back(tc);
                dense->ys.push_back(y);
                dense->fs.push_back(k1);
            }
        }
        double scale = err > 0 ? 0.9 * std::pow(budget / err, 0.2) : 5.0;
        h *= std::clamp(scale, 0.2, 5.0);
        if (h < opt.h_min && dir * (t_end - tc) > 0)
            throw StepUnderflow("integrator step size underflow");
    }
    if (step >= opt.max_steps && dir * (t_end - tc) > 0)
        throw StepUnderflow("integrator exceeded the step budget");
    return y;
}

// Convenience: flow map of a model's analytic Reeb field.
inline Vec reeb_flow(const Model& m, const Vec& x0, double t, double tol = 1e-10) {
    IntegrateOptions opt;
    opt.tol = tol;
    opt.chart = &m;
    return integrate([&m](const Vec& x) { return m.reeb_raw(x); }, x0, t, opt);
}

}  // namespace reebkit
