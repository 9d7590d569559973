#pragma once

// Wilson semi-plug contact forms on the flow box [-2e,2e] x [-2e,2e] x S^1
// (x B^{2n-4}(e)): bump-function constructions with their property lists
// verified at build time, contact-volume scans in dimension 3 and 2n-1, the
// inserted fast orbit, quantitative Gray-stability bounds, and parameter
// selection against a target (c1, c2).
//
// Flow-box reference form: lambda_0 = dt + x dtheta (+ kappa_0), theta of
// circumference 2pi. The deformed form is
//   lambda_{delta,eps} = (1 - delta A) dt + B dtheta             (dim 3)
//   lambda_{delta,eps} = (1 - delta A^) dt + B^ dtheta + kappa_0 (dim 2n-1)
// with A^ = cut(rho) A, B^ = (1-cut) x + cut B, rho = |z|^2 / 2.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <random>

#include "reebkit/numerics.hpp"
#include "reebkit/report.hpp"

namespace reebkit {

using Vec = Eigen::VectorXd;

struct PlugError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PropertyCheck {
    std::string name;
    bool ok = false;
    double worst = 0;  // extremal value witnessing the check
};

// Cumulative integral with exact derivative data (cubic Hermite evaluation).
class CumulativeTable {
  public:
    CumulativeTable() = default;
    CumulativeTable(std::function<double(double)> deriv, double lo, double hi, int n = 2048)
        : f_(std::move(deriv)), lo_(lo), hi_(hi) {
        grid_.resize(n + 1);
        cum_.resize(n + 1);
        cum_[0] = 0.0;
        for (int i = 0; i <= n; ++i) grid_[i] = lo + (hi - lo) * i / n;
        for (int i = 0; i < n; ++i)
            cum_[i + 1] = cum_[i] + gauss64().integrate(f_, grid_[i], grid_[i + 1]);
    }
    double total() const { return cum_.back(); }
    double operator()(double x) const {
        if (x <= lo_) return 0.0;
        if (x >= hi_) return cum_.back();
        const int n = static_cast<int>(grid_.size()) - 1;
        int i = std::min(static_cast<int>((x - lo_) / (hi_ - lo_) * n), n - 1);
        double x0 = grid_[i], x1 = grid_[i + 1], dx = x1 - x0;
        double t = (x - x0) / dx;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        return h00 * cum_[i] + h10 * dx * f_(x0) + h01 * cum_[i + 1] + h11 * dx * f_(x1);
    }

  private:
    std::function<double(double)> f_;
    double lo_ = 0, hi_ = 1;
    std::vector<double> grid_, cum_;
};

inline double smooth_bump_deriv(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    double w = 2 * u - 1;
    double q = 1 - w * w;
    if (q <= 1e-3) return 0.0;  // flat tails below double precision
    return smooth_bump(u) * (-4 * w) / (q * q);
}

class PlugSpec {
  public:
    PlugSpec(double eps, double delta, int dim = 3) : eps_(eps), delta_(delta), dim_(dim) {
        if (!(eps > 0) || eps > 0.15)
            throw PlugError("plug requires 0 < eps <= 0.15 (the value range of A forces small eps)");
        if (!(delta > 0)) throw PlugError("plug requires delta > 0");
        if (dim < 3 || dim % 2 == 0) throw PlugError("plug dimension must be odd and >= 3");
        build();
        verify_properties();
        for (const auto& pc : checks_)
            if (!pc.ok)
                throw PlugError("bump property verification failed: " + pc.name + " (worst " +
                                fmt(pc.worst) + ")");
    }

    double eps() const { return eps_; }
    double delta() const { return delta_; }
    int dim() const { return dim_; }
    int n() const { return (dim_ + 1) / 2; }
    const std::vector<PropertyCheck>& checks() const { return checks_; }

    // --- A(t,x) = phi(t) psi(x): supported in the interior of Q_eps,
    //     -1 < A <= 0, and d/dx A == 1 exactly on [-e,e] x [e/2, 3e/2].
    double phi(double t) const { return phiB_(t); }
    double phi_deriv(double t) const {
        const auto& b = phiB_;
        if (t <= b.x0 || t >= b.x3) return 0.0;
        if (t < b.x1) return smooth_step_deriv((t - b.x0) / (b.x1 - b.x0)) / (b.x1 - b.x0);
        if (t <= b.x2) return 0.0;
        return -smooth_step_deriv((b.x3 - t) / (b.x3 - b.x2)) / (b.x3 - b.x2);
    }
    double psi(double x) const {
        if (x <= psi_lo_ || x >= psi_hi_) return 0.0;
        // the true psi is <= 0; clamp the table's 1e-17 interpolation noise
        return std::min(0.0, psi_cum_(x));
    }
    double psi_prime(double x) const { return SB_(x) - Dscale_ * Dbump(x); }
    double A(double t, double x) const { return phi(t) * psi(x); }
    double A_x(double t, double x) const { return phi(t) * psi_prime(x); }
    double A_t(double t, double x) const { return phi_deriv(t) * psi(x); }

    // --- T(t): even bump on [-e,e], T^{-1}(1) = {0}.
    double T(double t) const {
        if (std::abs(t) >= eps_) return 0.0;
        return smooth_bump((t + eps_) / (2 * eps_));
    }
    double T_deriv(double t) const {
        if (std::abs(t) >= eps_) return 0.0;
        return smooth_bump_deriv((t + eps_) / (2 * eps_)) / (2 * eps_);
    }

    // --- X(x) = x + g(x): g supported on [e/2, 3e/2], g(e) = e^2, and
    //     g' >= -1 with equality exactly at x = e (so X' >= 0 vanishes only
    //     there); 0 <= g < 2 e^2.
    double g(double x) const {
        const double half = eps_ / 2;
        if (x <= half || x >= 3 * half) return 0.0;
        // the true g is >= 0; clamp table noise at the flat tails
        if (x <= eps_) return std::max(0.0, half * gleft_((x - half) / half));
        return std::max(0.0, eps_ * eps_ - half * gright_((x - eps_) / half));
    }
    double g_prime(double x) const {
        const double half = eps_ / 2;
        if (x <= half || x >= 3 * half) return 0.0;
        if (x <= eps_) return Rleft((x - half) / half);
        return -Wright((x - eps_) / half);
    }
    double X(double x) const { return x + g(x); }
    double X_prime(double x) const { return 1.0 + g_prime(x); }

    // --- B(t,x) = (1 - T) x + T X = x + T(t) g(x)
    double B(double t, double x) const { return x + T(t) * g(x); }
    double B_x(double t, double x) const { return 1.0 + T(t) * g_prime(x); }
    double B_t(double t, double x) const { return T_deriv(t) * g(x); }

    // --- cut(rho) on [0, e^2/2]: equal to 1 - rho near 0, 0 near e^2/2,
    //     with -4/e^2 < cut' <= 0.
    double cut(double rho) const {
        const double m = eps_ * eps_ / 2;
        if (rho <= 0) return 1.0;
        if (rho >= m) return 0.0;
        return std::clamp(1.0 - cut_scale_ * hcut_cum_(rho), 0.0, 1.0);
    }
    double cut_prime(double rho) const {
        const double m = eps_ * eps_ / 2;
        if (rho < 0 || rho >= m) return 0.0;
        return -cut_scale_ * hcut(rho);
    }
    double Ahat(double t, double x, double rho) const { return cut(rho) * A(t, x); }
    double Ahat_x(double t, double x, double rho) const { return cut(rho) * A_x(t, x); }
    double Ahat_rho(double t, double x, double rho) const { return cut_prime(rho) * A(t, x); }
    double Bhat(double t, double x, double rho) const {
        return (1 - cut(rho)) * x + cut(rho) * B(t, x);
    }
    double Bhat_x(double t, double x, double rho) const {
        return (1 - cut(rho)) + cut(rho) * B_x(t, x);
    }
    double Bhat_t(double t, double x, double rho) const { return cut(rho) * B_t(t, x); }
    double Bhat_rho(double t, double x, double rho) const { return cut_prime(rho) * (B(t, x) - x); }

    // --- contact-volume densities
    double density3(double t, double x, double delta) const {
        return B_x(t, x) * (1 - delta * A(t, x)) + delta * A_x(t, x) * B(t, x);
    }
    double density_high(double t, double x, double rho, double delta) const {
        double a = Ahat(t, x, rho), ax = Ahat_x(t, x, rho), ar = Ahat_rho(t, x, rho);
        double bx = Bhat_x(t, x, rho), br = Bhat_rho(t, x, rho), bb = Bhat(t, x, rho);
        return (1 - delta * a) * bx + delta * ax * bb +
               (n() - 2) * rho * delta * (ax * br - ar * bx);
    }
    double density(double t, double x, double rho, double delta) const {
        return dim_ == 3 ? density3(t, x, delta) : density_high(t, x, rho, delta);
    }

  private:
    double Dbump(double x) const {
        const double lo = eps_ / 16, hi = 7 * eps_ / 16;
        if (x <= lo || x >= hi) return 0.0;
        return smooth_bump((x - lo) / (hi - lo));
    }
    // left branch of g' in u = (x - e/2)/(e/2): rise bump, then a narrow dive
    // reaching slope -1 flatly at u = 1
    double Rleft(double u) const {
        double p1 = u < 1 - w2_ ? smooth_bump(u / (1 - w2_)) : 0.0;
        double p2 = u > 1 - w2_ ? smooth_step((u - (1 - w2_)) / w2_) : 0.0;
        return Aleft_ * p1 - p2;
    }
    // right branch magnitude in v = (x - e)/(e/2): W(0) = 1 flatly, W > 0 on
    // (0,1), integral 2e (so the branch drops by exactly e^2 in x-units)
    double Wright(double v) const {
        double head = v < v0_ ? 1.0 - smooth_step(v / v0_) : 0.0;
        return head + c2_ * smooth_bump(v);
    }
    // -cut' in u = rho/m units: 1 near 0 (giving cut = 1 - rho), a plateau of
    // height H below the 2/m slope bound, flat zero before u = 1
    double hcut(double rho) const {
        const double m = eps_ * eps_ / 2;
        double u = rho / m;
        double s1 = smooth_step((u - rho1_) / w1c_);
        double s2 = smooth_step((u - rho3_) / w2c_);
        return (1.0 - s1) + Hc_ * s1 * (1.0 - s2);
    }

    void build() {
        const double e = eps_;
        phiB_ = PlateauBump{-7 * e / 4, -e, e, 7 * e / 4};
        SB_ = PlateauBump{e / 4, e / 2, 3 * e / 2, 7 * e / 4};
        // psi' = S - D with the down-bump D scaled so psi returns to zero
        double IS = integrate_1d([this](double x) { return SB_(x); }, e / 4, 7 * e / 4, 64);
        double ID0 = integrate_1d([this](double x) { return Dbump(x); }, e / 16, 7 * e / 16, 64);
        Dscale_ = IS / ID0;
        psi_lo_ = e / 16;
        psi_hi_ = 7 * e / 4;
        psi_cum_ = CumulativeTable([this](double x) { return psi_prime(x); }, psi_lo_, psi_hi_, 16384);

        // right branch of the X-bump: head area v0/2 (symmetric step), tail
        // scaled so the full area is 2e
        v0_ = 2 * e;
        double Itau = integrate_1d([](double v) { return smooth_bump(v); }, 0.0, 1.0, 64);
        c2_ = (2 * e - v0_ / 2.0) / Itau;
        gright_ = CumulativeTable([this](double v) { return Wright(v); }, 0.0, 1.0, 8192);

        // left branch: slope area must also be 2e
        w2_ = std::min(3 * e, 0.5);
        double I1 = integrate_1d(
            [this](double u) { return u < 1 - w2_ ? smooth_bump(u / (1 - w2_)) : 0.0; }, 0.0, 1.0,
            64);
        double I2 = integrate_1d(
            [this](double u) { return u > 1 - w2_ ? smooth_step((u - (1 - w2_)) / w2_) : 0.0; }, 0.0,
            1.0, 64);
        Aleft_ = (2 * e + I2) / I1;
        gleft_ = CumulativeTable([this](double u) { return Rleft(u); }, 0.0, 1.0, 8192);

        // cut profile (used for dim > 3): integral of hcut over [0, m] is 1
        rho1_ = 1.0 / 6, w1c_ = 1.0 / 12, rho3_ = 0.8, w2c_ = 0.08;
        const double m = e * e / 2;
        double A0 = integrate_1d(
            [this](double u) { return 1.0 - smooth_step((u - rho1_) / w1c_); }, 0.0, 1.0, 64);
        double A1 = integrate_1d(
            [this](double u) {
                return smooth_step((u - rho1_) / w1c_) * (1.0 - smooth_step((u - rho3_) / w2c_));
            },
            0.0, 1.0, 64);
        Hc_ = (1.0 / m - A0) / A1;
        hcut_cum_ = CumulativeTable([this](double r) { return hcut(r); }, 0.0, m, 4096);
        cut_scale_ = 1.0 / hcut_cum_.total();  // pins cut == 0 beyond the support
    }

    void verify_properties() {
        const double e = eps_;
        const int N = 10000;
        auto check = [&](const std::string& name, bool ok, double worst) {
            checks_.push_back({name, ok, worst});
        };
        std::mt19937_64 rng(0x1234ULL);
        std::uniform_real_distribution<double> ud(0.0, 1.0);

        // (A1) support in Q_eps; (A2) -1 < A <= 0
        double amin = 0, amax = -1;
        bool support_ok = true;
        for (int i = 0; i < N; ++i) {
            double t = -2 * e + 4 * e * ud(rng), x = -2 * e + 4 * e * ud(rng);
            double a = A(t, x);
            amin = std::min(amin, a);
            amax = std::max(amax, a);
            if (std::abs(t) > 2 * e || std::abs(x) > 2 * e)
                if (a != 0.0) support_ok = false;
        }
        for (int i = 0; i < 100; ++i) {
            double t = 2 * e + ud(rng), x = -2 * e + 4 * e * ud(rng);
            if (A(t, x) != 0.0 || A(-t, x) != 0.0 || A(x, t + 2 * e - x) != 0.0) support_ok = false;
        }
        check("A1: support in Q_eps", support_ok, 0.0);
        check("A2: -1 < A <= 0", amin > -1.0 && amax <= 0.0, amin);

        // (A3) A_x == 1 on [-e,e] x [e/2, 3e/2] (identity by construction)
        double worst_a3 = 0;
        for (int i = 0; i < N; ++i) {
            double t = -e + 2 * e * ud(rng), x = e / 2 + e * ud(rng);
            worst_a3 = std::max(worst_a3, std::abs(A_x(t, x) - 1.0));
        }
        check("A3: A_x == 1 on the inner rectangle", worst_a3 < 1e-10, worst_a3);

        // (T1-3)
        bool t_ok = T(eps_) == 0.0 && T(-eps_) == 0.0 && T(0) == 1.0;
        double t_sym = 0, t_peak = 0;
        for (int i = 0; i < N; ++i) {
            double t = -e + 2 * e * ud(rng);
            t_sym = std::max(t_sym, std::abs(T(t) - T(-t)));
            if (std::abs(t) > 1e-4 * e) t_peak = std::max(t_peak, T(t));
        }
        check("T1/T3: support [-e,e], T(0)=1 only", t_ok && t_peak < 1.0, t_peak);
        check("T2: even", t_sym < 1e-14, t_sym);

        // (X1-4). Strict inequalities are sampled outside a 1%-of-eps margin:
        // the C-infinity flat joints are positive but fall below double
        // precision closer in.
        double gmin = 0, gmax = 0, xp_min_away = 1, worst_x3 = std::abs(X(e) - (e + e * e));
        bool interior_pos = true;
        for (int i = 0; i < N; ++i) {
            double x = e / 2 + e * ud(rng);
            double gv = g(x);
            gmin = std::min(gmin, gv);
            gmax = std::max(gmax, gv);
            if (x > e / 2 + 0.01 * e && x < 3 * e / 2 - 0.01 * e && gv <= 0.0) interior_pos = false;
            if (std::abs(x - e) > 0.01 * e) xp_min_away = std::min(xp_min_away, X_prime(x));
        }
        check("X1: X >= x, > only inside (e/2, 3e/2)", gmin >= 0.0 && interior_pos, gmin);
        check("X2: X' >= 0, zero only at eps", X_prime(e) == 0.0 && xp_min_away > 0.0, xp_min_away);
        check("X3: X(eps) = eps + eps^2", worst_x3 < 1e-12, worst_x3);
        check("X4: X - x < 2 eps^2", gmax < 2 * e * e, gmax);

        // (B1-2)
        double b_def_min = 1, bmx = 0;
        for (int i = 0; i < N; ++i) {
            double t = -2 * e + 4 * e * ud(rng), x = -2 * e + 4 * e * ud(rng);
            double bx = B_x(t, x);
            double dist = std::hypot(t, x - e);
            if (dist > 0.05 * e) b_def_min = std::min(b_def_min, bx);
            bmx = std::max(bmx, B(t, x) - x);
        }
        bool crit = B_x(0, e) == 0.0 && std::abs(B_t(0, e)) < 1e-14;
        check("B1: (0,eps) the only critical point / zero of B_x", crit && b_def_min > 0.0,
              b_def_min);
        check("B2: 0 <= B - x < 2 eps^2", bmx >= 0.0 && bmx < 2 * e * e, bmx);

        // (c1-3)
        if (dim_ > 3) {
            const double m = e * e / 2;
            double worst_c2 = 0, cp_min = 0, cp_max = -1;
            for (int i = 0; i < N; ++i) {
                double rho = m * ud(rng);
                double cp = cut_prime(rho);
                cp_min = std::min(cp_min, cp);
                cp_max = std::max(cp_max, cp);
                if (rho < rho1_ * m) worst_c2 = std::max(worst_c2, std::abs(cut(rho) - (1 - rho)));
            }
            check("c1: cut == 0 near eps^2/2", cut(0.95 * m) == 0.0 && cut(m) == 0.0, cut(0.95 * m));
            check("c2: cut == 1 - rho near 0", worst_c2 < 1e-12, worst_c2);
            check("c3: -4/eps^2 < cut' <= 0", cp_min > -4 / (e * e) && cp_max <= 0.0, cp_min);
        }
    }

    double eps_, delta_;
    int dim_;
    PlateauBump phiB_, SB_;
    double Dscale_ = 1;
    double psi_lo_ = 0, psi_hi_ = 1;
    CumulativeTable psi_cum_;
    double v0_ = 0.1, c2_ = 1, w2_ = 0.15, Aleft_ = 1;
    CumulativeTable gright_, gleft_;
    double rho1_ = 0, w1c_ = 0, rho3_ = 0, w2c_ = 0, Hc_ = 0, cut_scale_ = 1;
    CumulativeTable hcut_cum_;
    std::vector<PropertyCheck> checks_;
};

inline PlugSpec make_spec(double eps, double delta, int dim = 3) {
    return PlugSpec(eps, delta, dim);
}

// ---------------------------------------------------------------------------
// Contact verification

struct ContactScan {
    double min_density = 0;
    double inner_min = 0;        // minimum over the inner rectangle
    double inner_bound = 0;      // the analytic lower bound delta*eps/2
    bool positive = false;
    bool inner_ok = false;
    double argmin_t = 0, argmin_x = 0, argmin_rho = 0;
    int grid_tx = 0, grid_rho = 0;
};

inline ContactScan verify_contact(const PlugSpec& spec, double delta, int grid_tx = 512,
                                  int grid_rho = 64) {
    const double e = spec.eps();
    ContactScan out;
    out.grid_tx = grid_tx;
    out.grid_rho = spec.dim() == 3 ? 1 : grid_rho;
    out.inner_bound = delta * e / 2;
    out.min_density = std::numeric_limits<double>::infinity();
    out.inner_min = std::numeric_limits<double>::infinity();
    const double m = e * e / 2;
    for (int ir = 0; ir < out.grid_rho; ++ir) {
        double rho = spec.dim() == 3 ? 0.0 : m * ir / out.grid_rho;
        for (int it = 0; it <= grid_tx; ++it) {
            // symmetric t-grid including 0 exactly
            double t = -2 * e + 4 * e * it / grid_tx;
            for (int ix = 0; ix <= grid_tx; ++ix) {
                double x = -2 * e + 4 * e * ix / grid_tx;
                double d = spec.density(t, x, rho, delta);
                if (d < out.min_density) {
                    out.min_density = d;
                    out.argmin_t = t;
                    out.argmin_x = x;
                    out.argmin_rho = rho;
                }
            }
        }
        // inner rectangle with (0, eps) as an exact node
        for (int it = 0; it <= 256; ++it) {
            double t = -e + 2 * e * it / 256;
            for (int ix = 0; ix <= 256; ++ix) {
                double x = e / 2 + e * ix / 256;
                out.inner_min = std::min(out.inner_min, spec.density(t, x, rho, delta));
            }
        }
    }
    out.positive = out.min_density > 0;
    out.inner_ok = out.inner_min > out.inner_bound;
    return out;
}

// Admissible-delta cap. Dimension 3: 1/|min(x A_x)| per the contact lemma;
// higher dimensions: bisection of delta against the density scan.
inline double delta_bound(const PlugSpec& spec, int grid = 512) {
    const double e = spec.eps();
    if (spec.dim() == 3) {
        double worst = 0.0;
        for (int it = 0; it <= grid; ++it)
            for (int ix = 0; ix <= grid; ++ix) {
                double t = -2 * e + 4 * e * it / grid;
                double x = -2 * e + 4 * e * ix / grid;
                worst = std::min(worst, x * spec.A_x(t, x));
            }
        if (worst >= 0.0) return std::numeric_limits<double>::infinity();
        return 1.0 / std::abs(worst);
    }
    return bisect_threshold(
        [&](double d) { return verify_contact(spec, d, 128, 24).positive; }, 64.0, 1e-4);
}

// ---------------------------------------------------------------------------
// The inserted fast orbit

struct PlugOrbit {
    double period_analytic = 0;   // 2 pi B(0, eps)
    double period_quadrature = 0; // |contour integral of lambda over S_eps|
    double kernel_residual = 0;   // max |d lambda (K, frame)| at random points
    double t_component_min = 0;   // min of B_x away from (0, eps): uniqueness
    bool unique_at_grid_scale = false;
    bool critical_point_ok = false;
    Vec base;                     // (t, x, theta (, z)) representative
};

namespace plugdetail {

// ambient covector of lambda_{delta,eps} at (t, x, theta, q_1, p_1, ...)
inline Vec plug_covector(const PlugSpec& s, double delta, const Vec& y) {
    const int extra = s.dim() - 3;  // z-coordinates
    Vec c = Vec::Zero(3 + extra);
    if (extra == 0) {
        c[0] = 1 - delta * s.A(y[0], y[1]);
        c[2] = s.B(y[0], y[1]);
    } else {
        double rho = y.tail(extra).squaredNorm() / 2;
        c[0] = 1 - delta * s.Ahat(y[0], y[1], rho);
        c[2] = s.Bhat(y[0], y[1], rho);
        // kappa_0 = 1/2 sum (q dp - p dq) on pairs (q_i, p_i)
        for (int i = 0; i < extra / 2; ++i) {
            double q = y[3 + 2 * i], p = y[3 + 2 * i + 1];
            c[3 + 2 * i] = -0.5 * p;
            c[3 + 2 * i + 1] = 0.5 * q;
        }
    }
    return c;
}

// kernel field K of d lambda_{delta,eps}
inline Vec plug_kernel(const PlugSpec& s, double delta, const Vec& y) {
    const int extra = s.dim() - 3;
    Vec K = Vec::Zero(3 + extra);
    if (extra == 0) {
        K[0] = s.B_x(y[0], y[1]);
        K[1] = -s.B_t(y[0], y[1]);
        K[2] = delta * s.A_x(y[0], y[1]);
        return K;
    }
    double rho = y.tail(extra).squaredNorm() / 2;
    double bx = s.Bhat_x(y[0], y[1], rho), bt = s.Bhat_t(y[0], y[1], rho);
    double ax = s.Ahat_x(y[0], y[1], rho);
    K[0] = bx;
    K[1] = -bt;
    K[2] = delta * ax;
    // z-components: (delta A^_x B^_rho - B^_x delta A^_rho) rot(z), with
    // rot(q_i, p_i) = (-p_i, q_i) the kappa_0-Hamiltonian rotation
    double arho = s.Ahat_rho(y[0], y[1], rho), brho = s.Bhat_rho(y[0], y[1], rho);
    double coef = delta * ax * brho - bx * delta * arho;
    for (int i = 0; i < extra / 2; ++i) {
        // rot(q,p) = (p, -q): the kappa_0-Hamiltonian field of rho
        double q = y[3 + 2 * i], p = y[3 + 2 * i + 1];
        K[3 + 2 * i] = coef * p;
        K[3 + 2 * i + 1] = coef * (-q);
    }
    return K;
}

}  // namespace plugdetail

inline PlugOrbit locate_orbit(const PlugSpec& spec, double delta, int kernel_samples = 1000,
                              double fd_step = 1e-6) {
    const double e = spec.eps();
    PlugOrbit out;
    out.base = Vec::Zero(spec.dim());
    out.base[1] = e;
    out.critical_point_ok = spec.B_x(0, e) == 0.0 && std::abs(spec.B_t(0, e)) < 1e-14;
    out.period_analytic = 2 * kPi * spec.B(0, e);
    // quadrature of the contact form along S_eps (theta-circle at t=0, x=e, z=0):
    // pair the covector with the curve's velocity d/dtheta at sampled points
    const int N = 256;
    double integral = 0.0;
    Vec vel = Vec::Zero(spec.dim());
    vel[2] = 1.0;
    auto integrand = [&](double th) {
        Vec y = Vec::Zero(spec.dim());
        y[1] = e;
        y[2] = th;
        return plugdetail::plug_covector(spec, delta, y).dot(vel);
    };
    for (int i = 0; i < N; ++i) {
        double th0 = 2 * kPi * i / N, th1 = 2 * kPi * (i + 1) / N;
        integral += (th1 - th0) / 6.0 *
                    (integrand(th0) + 4 * integrand(0.5 * (th0 + th1)) + integrand(th1));
    }
    out.period_quadrature = std::abs(integral);

    // kernel residual: d lambda(K, frame) by central differences
    std::mt19937_64 rng(0xfeedULL);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < kernel_samples; ++s) {
        Vec y = Vec::Zero(spec.dim());
        y[0] = 2 * e * ud(rng) * 0.9;
        y[1] = 2 * e * ud(rng) * 0.9;
        y[2] = kPi * (ud(rng) + 1);
        if (spec.dim() > 3) {
            for (int i = 3; i < spec.dim(); ++i) y[i] = 0.5 * e * ud(rng);
            if (y.tail(spec.dim() - 3).squaredNorm() / 2 >= e * e / 2) continue;
        }
        Vec K = plugdetail::plug_kernel(spec, delta, y);
        for (int j = 0; j < spec.dim(); ++j) {
            Vec ej = Vec::Unit(spec.dim(), j);
            auto cd = [&](const Vec& u, const Vec& v, double h) {
                return (plugdetail::plug_covector(spec, delta, y + h * u).dot(v) -
                        plugdetail::plug_covector(spec, delta, y - h * u).dot(v)) /
                       (2 * h);
            };
            // Richardson-extrapolated central differences (h^4 truncation)
            auto pair = [&](const Vec& u, const Vec& v) {
                return (4 * cd(u, v, fd_step / 2) - cd(u, v, fd_step)) / 3;
            };
            worst = std::max(worst, std::abs(pair(K, ej) - pair(ej, K)));
        }
    }
    out.kernel_residual = worst;

    // uniqueness at grid scale: the t-component of K (= B_x, or Bhat_x in
    // higher dimension) is positive away from S_eps
    double tmin = std::numeric_limits<double>::infinity();
    const int nrho = spec.dim() == 3 ? 1 : 32;
    const double m = e * e / 2;
    for (int ir = 0; ir < nrho; ++ir) {
        double rho = spec.dim() == 3 ? 0.0 : m * ir / nrho;
        for (int it = 0; it <= 256; ++it)
            for (int ix = 0; ix <= 256; ++ix) {
                double t = -2 * e + 4 * e * it / 256;
                double x = -2 * e + 4 * e * ix / 256;
                if (std::sqrt(t * t + (x - e) * (x - e) + 2 * rho) < 0.05 * e) continue;
                tmin = std::min(tmin, spec.dim() == 3 ? spec.B_x(t, x) : spec.Bhat_x(t, x, rho));
            }
    }
    out.t_component_min = tmin;
    out.unique_at_grid_scale = tmin > 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Quantitative Gray stability

struct GrayBounds {
    double sup_rbar = 0;       // over the (s,t,x(,rho)) grid
    double sup_rhat = 0;
    bool rbar_ok = false;      // 0 <= rbar < 2 delta
    bool rhat_ok = false;      // 0 <= rhat < 4 eps
    double bound = 0;          // e^{2 delta + 4 eps}
    double grid_bound = 0;     // e^{int sup rbar ds + int sup rhat ds}
    double min_rbar = 0, min_rhat = 0;
    std::string violation;     // first violating point, if any
};

inline GrayBounds gray_bounds(const PlugSpec& spec, double delta, int grid_tx = 256,
                              int grid_s = 32, int grid_rho = 16) {
    const double e = spec.eps();
    const int nn = spec.n();
    GrayBounds out;
    out.bound = std::exp(2 * delta + 4 * e);
    std::vector<double> sup_rbar_s(grid_s + 1, 0.0), sup_rhat_s(grid_s + 1, 0.0);
    out.min_rbar = out.min_rhat = std::numeric_limits<double>::infinity();
    const double m = e * e / 2;
    const int nrho = spec.dim() == 3 ? 1 : grid_rho;
    for (int is = 0; is <= grid_s; ++is) {
        double s = double(is) / grid_s;
        for (int ir = 0; ir < nrho; ++ir) {
            double rho = spec.dim() == 3 ? 0.0 : m * ir / nrho;
            for (int it = 0; it <= grid_tx; ++it) {
                double t = -2 * e + 4 * e * it / grid_tx;
                for (int ix = 0; ix <= grid_tx; ++ix) {
                    double x = -2 * e + 4 * e * ix / grid_tx;
                    double a, ax, ar, b, bx, br;
                    if (spec.dim() == 3) {
                        a = spec.A(t, x);
                        ax = spec.A_x(t, x);
                        ar = 0;
                        b = spec.B(t, x);
                        bx = spec.B_x(t, x);
                        br = 0;
                    } else {
                        a = spec.Ahat(t, x, rho);
                        ax = spec.Ahat_x(t, x, rho);
                        ar = spec.Ahat_rho(t, x, rho);
                        b = spec.Bhat(t, x, rho);
                        bx = spec.Bhat_x(t, x, rho);
                        br = spec.Bhat_rho(t, x, rho);
                    }
                    // rbar_s = -delta A^ / ((n-1)[1 - s d A^ + s d x A^_x - s(n-2) rho d A^_rho])
                    double den_bar =
                        (nn - 1) * (1 - s * delta * a + s * delta * x * ax -
                                    s * (nn - 2) * rho * delta * ar);
                    double rbar = -delta * a / den_bar;
                    // rhat_s with B^s = x + s(B^ - x)
                    double bsx = 1 + s * (bx - 1);
                    double bs = x + s * (b - x);
                    double bsr = s * br;
                    double den_hat =
                        (nn - 1) * ((1 - delta * a) * bsx + delta * ax * bs +
                                    (nn - 2) * rho * delta * (ax * bsr - ar * bsx));
                    double rhat = (b - x) * delta * ax / den_hat;
                    sup_rbar_s[is] = std::max(sup_rbar_s[is], rbar);
                    sup_rhat_s[is] = std::max(sup_rhat_s[is], rhat);
                    out.min_rbar = std::min(out.min_rbar, rbar);
                    out.min_rhat = std::min(out.min_rhat, rhat);
                    if ((rbar < 0 || rbar >= 2 * delta || rhat < 0 || rhat >= 4 * e) &&
                        out.violation.empty())
                        out.violation = "(s,t,x,rho)=(" + fmt(s) + "," + fmt(t) + "," + fmt(x) +
                                        "," + fmt(rho) + ")";
                }
            }
        }
    }
    for (int is = 0; is <= grid_s; ++is) {
        out.sup_rbar = std::max(out.sup_rbar, sup_rbar_s[is]);
        out.sup_rhat = std::max(out.sup_rhat, sup_rhat_s[is]);
    }
    // trapezoid in s of the grid suprema
    double int_rbar = 0, int_rhat = 0;
    for (int is = 0; is < grid_s; ++is) {
        int_rbar += 0.5 * (sup_rbar_s[is] + sup_rbar_s[is + 1]) / grid_s;
        int_rhat += 0.5 * (sup_rhat_s[is] + sup_rhat_s[is + 1]) / grid_s;
    }
    out.grid_bound = std::exp(int_rbar + int_rhat);
    out.rbar_ok = out.min_rbar >= 0.0 && out.sup_rbar < 2 * delta;
    out.rhat_ok = out.min_rhat >= 0.0 && out.sup_rhat < 4 * e;
    return out;
}

// ---------------------------------------------------------------------------
// Parameter selection for the fast-orbit theorem: find (eps, delta) with
//   2 pi (eps + eps^2) < c2   and   2 delta + 4 eps < ln(1 + c1),
// the latter guaranteeing max(f) <= e^{2 delta + 4 eps} < 1 + c1.

struct FastOrbitChoice {
    double eps = 0, delta = 0;
    double period = 0;
    double bound = 0;          // e^{2 delta + 4 eps}
    double c1 = 0, c2 = 0;
    bool valid = false;
    ContactScan contact;
    PlugOrbit orbit;
    GrayBounds gray;
};

inline double snap_down_1sf(double v) {
    if (v <= 0) return v;
    double mag = std::pow(10.0, std::floor(std::log10(v)));
    return std::floor(v / mag) * mag;
}

inline FastOrbitChoice choose_parameters(double c1, double c2, int dim = 3) {
    if (!(c1 > 0) || !(c2 > 0)) throw PlugError("choose_parameters requires c1, c2 > 0");
    FastOrbitChoice out;
    out.c1 = c1;
    out.c2 = c2;
    const double log_target = std::log1p(c1);
    // prefer round eps from a 1-significant-figure ladder
    double eps = 0;
    for (double cand = 0.1; cand > 1e-8; cand = snap_down_1sf(cand * 0.999)) {
        if (cand > 0.15) continue;
        if (2 * kPi * (cand + cand * cand) < c2 && 4 * cand <= 0.92 * log_target) {
            eps = cand;
            break;
        }
    }
    if (eps == 0) {
        double cap = (-1 + std::sqrt(1 + 2 * c2 / kPi)) / 2;
        eps = std::min({0.15, 0.9 * cap, log_target / 8});
    }
    PlugSpec probe(eps, 1e-3, dim);
    double cap_delta = delta_bound(probe, dim == 3 ? 512 : 128);
    double delta = std::min(cap_delta / 2, 0.9 * (log_target - 4 * eps) / 2);
    double snapped = snap_down_1sf(delta);
    if (snapped > 0 && 2 * snapped + 4 * eps < log_target) delta = snapped;
    out.eps = eps;
    out.delta = delta;
    PlugSpec spec(eps, delta, dim);
    out.contact = verify_contact(spec, delta, dim == 3 ? 512 : 192, 64);
    out.orbit = locate_orbit(spec, delta);
    out.gray = gray_bounds(spec, delta, dim == 3 ? 256 : 96, 32, 16);
    out.period = out.orbit.period_analytic;
    out.bound = std::exp(2 * delta + 4 * eps);
    out.valid = out.contact.positive && out.contact.inner_ok && out.orbit.unique_at_grid_scale &&
                out.orbit.kernel_residual < 1e-8 && out.gray.rbar_ok && out.gray.rhat_ok &&
                out.period < c2 && out.bound < 1 + c1;
    return out;
}

}  // namespace reebkit
