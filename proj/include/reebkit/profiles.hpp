#pragma once

// Profile functions h in the class h_{a,b,c} (convex ramp, linear middle of
// slope b, concave cap, constant plateau), the shifted radial Hamiltonians
// H(tau,p) = h(e^{tau-kappa}) on the symplectization, the enumeration of
// negative-action 1-periodic orbit families through the dividing bijection,
// and the action/gap/cost arithmetic that gates the continuation maps.

#include "reebkit/constellation.hpp"
#include "reebkit/integrate.hpp"

namespace reebkit {

struct ProfileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// h' rises from 0 to b over [1, 1+a] along b * g_p((s-1)/a) with
// g_p(u) = smooth_step(u^p) (a one-parameter family of C-infinity ramps whose
// area sweeps (0,1) monotonically in p), holds b on [1+a, c], and descends
// along the mirrored ramp on [c, c+a]. The exponent p is tuned so the ramp
// area is exactly a^2 (property (h3)); the mirrored cap contributes the same
// area, so the plateau value is b(c-1-a) + 2a^2.
class Profile {
  public:
    Profile(double a, double b, double c) : a_(a), b_(b), c_(c) {
        if (!(a > 0) || !(b > 0)) throw ProfileError("profile requires a, b > 0");
        if (!(a < b)) throw ProfileError("infeasible ramp area: requires a < b");
        if (!(c > 1 + a)) throw ProfileError("profile requires c > 1 + a");
        const double target = a / b;  // = integral of g_p over [0,1]
        auto ramp_area = [](double p) {
            return integrate_1d([p](double u) { return smooth_step(std::pow(u, p)); }, 0.0, 1.0, 8);
        };
        // area decreases monotonically from 1 (p -> 0) to 0 (p -> inf)
        double lo = std::log(1e-8), hi = std::log(1e8);
        if (!(ramp_area(std::exp(lo)) > target && ramp_area(std::exp(hi)) < target))
            throw ProfileError("ramp-exponent bisection does not bracket the area target");
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            double mid = 0.5 * (lo + hi);
            (ramp_area(std::exp(mid)) > target ? lo : hi) = mid;
        }
        p_ = std::exp(0.5 * (lo + hi));
        build_cumulative();
    }

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }
    double shape_exponent() const { return p_; }
    double plateau() const { return b_ * (c_ - 1 - a_) + 2 * a_ * a_; }

    double ramp(double u) const {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        return smooth_step(std::pow(u, p_));
    }
    double ramp_deriv(double u) const {
        if (u <= 0.0 || u >= 1.0) return 0.0;
        double sd = smooth_step_deriv(std::pow(u, p_));
        if (sd == 0.0) return 0.0;  // flat region; avoids 0 * inf for p < 1
        return sd * p_ * std::pow(u, p_ - 1.0);
    }

    double hp(double s) const {  // h'
        if (s <= 1.0 || s >= c_ + a_) return 0.0;
        if (s < 1.0 + a_) return b_ * ramp((s - 1.0) / a_);
        if (s <= c_) return b_;
        return b_ * ramp((c_ + a_ - s) / a_);
    }

    double hpp(double s) const {  // h''
        if (s <= 1.0 || s >= c_ + a_) return 0.0;
        if (s < 1.0 + a_) return (b_ / a_) * ramp_deriv((s - 1.0) / a_);
        if (s <= c_) return 0.0;
        return -(b_ / a_) * ramp_deriv((c_ + a_ - s) / a_);
    }

    double h(double s) const {
        if (s <= 1.0) return 0.0;
        if (s < 1.0 + a_) return a_ * a_ * cumulative((s - 1.0) / a_);
        if (s <= c_) return a_ * a_ + b_ * (s - 1.0 - a_);
        if (s < c_ + a_) return plateau() - a_ * a_ * cumulative((c_ + a_ - s) / a_);
        return plateau();
    }

  private:
    void build_cumulative() {
        const int N = 2048;
        grid_.assign(N + 1, 0.0);
        cum_.assign(N + 1, 0.0);
        for (int i = 0; i <= N; ++i) grid_[i] = double(i) / N;
        for (int i = 0; i < N; ++i)
            cum_[i + 1] = cum_[i] + gauss64().integrate([this](double u) { return ramp(u); },
                                                        grid_[i], grid_[i + 1]);
        total_ = cum_.back();
        if (!(total_ > 0)) throw ProfileError("degenerate ramp integral");
    }
    // integral of g_p from 0 to u, normalized so cumulative(1) = 1 exactly;
    // then h(1+a) = a^2 holds by construction
    double cumulative(double u) const {
        if (u <= 0) return 0.0;
        if (u >= 1) return 1.0;
        const int N = static_cast<int>(grid_.size()) - 1;
        int i = std::min(static_cast<int>(u * N), N - 1);
        double u0 = grid_[i], u1 = grid_[i + 1];
        double t = (u - u0) / (u1 - u0);
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        double dx = u1 - u0;
        double v = h00 * cum_[i] + h10 * dx * ramp(u0) + h01 * cum_[i + 1] + h11 * dx * ramp(u1);
        return v / total_;
    }

    double a_, b_, c_, p_ = 1.0;
    std::vector<double> grid_, cum_;
    double total_ = 1.0;
};

inline Profile make_profile(double a, double b, double c) { return Profile(a, b, c); }

// H(tau, p) = h(e^{tau - kappa}); admissible: vanishes for e^{tau-kappa} <= 1
// and locally constant for e^{tau-kappa} >= c+a.
struct TunedHamiltonian {
    Profile profile;
    double kappa = 0.0;

    TunedHamiltonian(Profile h, double k) : profile(std::move(h)), kappa(k) {
        if (kappa < 0) throw ProfileError("kappa must be nonnegative");
    }
    double operator()(double tau) const { return profile.h(std::exp(tau - kappa)); }
    double b_effective() const { return profile.b() * std::exp(-kappa); }
    // support of dH in tau: [kappa, kappa + ln(c+a)]
    double tau_support_hi() const { return kappa + std::log(profile.c() + profile.a()); }
};

struct NegativeOrbitRecord {
    SpectrumEntry family;  // the underlying Reeb family
    double sigma = 0;      // e^{tau_x - kappa} in (1, 1+a)
    double level = 0;      // e^{tau_x}
    double period = 0;     // T_gamma
    double action = 0;     // -e^{tau_x} T_gamma + h(e^{tau_x - kappa})
};

struct BInSpectrum : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Positivity certificate for the upper-bend orbits:
//   c * gap - b(2a+1) > 0, gap = e^kappa * (b e^{-kappa} - max{t in T : t < b e^{-kappa}}).
struct CLargeCheck {
    bool ok = false;
    double value = 0;  // c*gap - b(2a+1)
    double gap = 0;
};
inline CLargeCheck check_c_large(const TunedHamiltonian& H, const PeriodSpectrum& spec) {
    CLargeCheck r;
    const double bk = H.b_effective();
    double below = -1.0;
    for (const auto& e : spec.entries)
        if (e.period < bk) below = std::max(below, e.period);
    r.gap = below < 0 ? H.profile.b() : std::exp(H.kappa) * (bk - below);
    r.value = H.profile.c() * r.gap - H.profile.b() * (2 * H.profile.a() + 1);
    r.ok = r.value > 0;
    return r;
}

// Dividing bijection: one record per spectrum family with period < b e^{-kappa},
// with the level solved from h'(sigma) = T e^kappa on the convex ramp.
inline std::vector<NegativeOrbitRecord> enumerate_negative(const TunedHamiltonian& H,
                                                           const PeriodSpectrum& spec,
                                                           double b_margin = 1e-9,
                                                           bool require_c_large = true) {
    const double bk = H.b_effective();
    if (spec.cap < bk)
        throw SpectrumError("enumerate_negative: spectrum cap below b e^{-kappa}");
    for (const auto& e : spec.entries)
        if (std::abs(e.period - bk) < b_margin)
            throw BInSpectrum("b e^{-kappa} = " + fmt(bk) + " lies in the period spectrum");
    if (require_c_large) {
        auto cl = check_c_large(H, spec);
        if (!cl.ok)
            throw CTooSmall("c too small: c*gap - b(2a+1) = " + fmt(cl.value));
    }
    const Profile& h = H.profile;
    std::vector<NegativeOrbitRecord> out;
    for (const auto& e : spec.entries) {
        if (!(e.period < bk)) continue;
        const double target = e.period * std::exp(H.kappa);  // in (0, b)
        double sigma = bisect([&](double s) { return h.hp(s) - target; }, 1.0 + 1e-15,
                              1.0 + h.a(), 1e-15);
        NegativeOrbitRecord rec;
        rec.family = e;
        rec.sigma = sigma;
        rec.level = sigma * std::exp(H.kappa);
        rec.period = e.period;
        rec.action = -rec.level * e.period + h.h(sigma);
        out.push_back(std::move(rec));
    }
    std::sort(out.begin(), out.end(), [](const NegativeOrbitRecord& x, const NegativeOrbitRecord& y) {
        return x.period < y.period;
    });
    return out;
}

// action gaps ---------------------------------------------------------------

inline double action_gap(const std::vector<NegativeOrbitRecord>& records, double eq_tol = 1e-12) {
    double gap = 0.0;
    for (const auto& x : records)
        for (const auto& y : records)
            if (std::abs(x.action - y.action) > eq_tol) gap = std::max(gap, x.action - y.action);
    return gap;
}

inline double action_gap_pair(const std::vector<NegativeOrbitRecord>& r0,
                              const std::vector<NegativeOrbitRecord>& r1, double eq_tol = 1e-12) {
    double gap = 0.0;
    bool any = false;
    for (const auto& x : r0)
        for (const auto& y : r1)
            if (std::abs(x.action - y.action) > eq_tol) {
                gap = any ? std::max(gap, x.action - y.action) : x.action - y.action;
                any = true;
            }
    return any ? gap : 0.0;
}

// homotopy-cost budget Delta_s = min{T_min(alpha)/2, T_min - Delta(H0,H1)}
inline double delta_s(const std::vector<NegativeOrbitRecord>& r0,
                      const std::vector<NegativeOrbitRecord>& r1, double T_min_alpha,
                      double T_min) {
    return std::min(T_min_alpha / 2.0, T_min - action_gap_pair(r0, r1));
}

// tuning checks --------------------------------------------------------------

struct InequalityCheck {
    std::string name;
    double lhs = 0, rhs = 0;
    bool ok = false;
    double margin = 0;
};

struct TunedReport {
    std::vector<InequalityCheck> checks;
    bool tuned() const {
        for (auto& c : checks)
            if (!c.ok) return false;
        return true;
    }
};

inline TunedReport check_tuned(const TunedHamiltonian& H, const RigidConstellation& C) {
    TunedReport rep;
    const double T = C.T;
    const double ek = std::exp(H.kappa);
    const double b = H.profile.b(), c = H.profile.c();
    double tplus_ratio = C.T_plus.finite ? C.T_plus.value / T : std::numeric_limits<double>::infinity();
    double sum_ratio = (C.T_min + C.T_min_alpha) / T;
    InequalityCheck t1{"t1: e^kappa < min{T+/T, (T_min+T_min_alpha)/T}", ek,
                       std::min(tplus_ratio, sum_ratio), false, 0};
    t1.margin = t1.rhs - t1.lhs;
    t1.ok = t1.margin > 0;
    rep.checks.push_back(t1);
    InequalityCheck t2a{"t2: T e^kappa < b", T * ek, b, false, 0};
    t2a.margin = t2a.rhs - t2a.lhs;
    t2a.ok = t2a.margin > 0;
    rep.checks.push_back(t2a);
    double tplus = C.T_plus.finite ? C.T_plus.value : std::numeric_limits<double>::infinity();
    InequalityCheck t2b{"t2: b < T+", b, tplus, false, 0};
    t2b.margin = t2b.rhs - t2b.lhs;
    t2b.ok = t2b.margin > 0;
    rep.checks.push_back(t2b);
    InequalityCheck t3{"t3: c > 2b/(b - T e^kappa)", T * ek < b ? 2 * b / (b - T * ek)
                                                                : std::numeric_limits<double>::infinity(),
                       c, false, 0};
    t3.margin = t3.rhs - t3.lhs;
    t3.ok = t3.margin > 0;
    std::swap(t3.lhs, t3.rhs);  // report as c > bound
    rep.checks.push_back(t3);
    return rep;
}

// Finely tuned: the three action inequalities evaluated on the enumerated
// records (class-restricted action bound, Delta(H) and Delta(H0,H1) below
// T_min), each with its numeric margin.
struct FinelyTunedReport {
    TunedReport tuned;
    std::vector<InequalityCheck> checks;
    double delta_H = 0;
    double delta_pair = 0;
    double delta_s_value = 0;
    bool finely_tuned() const {
        if (!tuned.tuned()) return false;
        for (auto& c : checks)
            if (!c.ok) return false;
        return true;
    }
};

inline FinelyTunedReport check_finely_tuned(const TunedHamiltonian& H0,
                                            const RigidConstellation& C,
                                            const PeriodSpectrum& spec,
                                            const TunedHamiltonian* H1 = nullptr) {
    FinelyTunedReport rep;
    rep.tuned = check_tuned(H0, C);
    auto r0 = enumerate_negative(H0, spec);
    double worst_alpha_action = -std::numeric_limits<double>::infinity();
    for (const auto& r : r0)
        if (r.family.cls == C.cls) worst_alpha_action = std::max(worst_alpha_action, r.action);
    InequalityCheck l1{"A_H(x) < -T_min_alpha/2 on class-alpha records", worst_alpha_action,
                       -C.T_min_alpha / 2, false, 0};
    l1.margin = l1.rhs - l1.lhs;
    l1.ok = l1.margin > 0;
    rep.checks.push_back(l1);
    rep.delta_H = action_gap(r0);
    InequalityCheck l2{"Delta(H) < T_min", rep.delta_H, C.T_min, false, 0};
    l2.margin = l2.rhs - l2.lhs;
    l2.ok = l2.margin > 0;
    rep.checks.push_back(l2);
    if (H1) {
        auto r1 = enumerate_negative(*H1, spec);
        rep.delta_pair = action_gap_pair(r0, r1);
        InequalityCheck l3{"Delta(H0,H1) < T_min", rep.delta_pair, C.T_min, false, 0};
        l3.margin = l3.rhs - l3.lhs;
        l3.ok = l3.margin > 0;
        rep.checks.push_back(l3);
        rep.delta_s_value = delta_s(r0, r1, C.T_min_alpha, C.T_min);
    } else {
        rep.delta_pair = rep.delta_H;
        rep.delta_s_value = std::min(C.T_min_alpha / 2, C.T_min - rep.delta_H);
    }
    return rep;
}

// Sharp sampled threshold a-bar: the largest ramp width for which the
// finely-tuned inequalities hold at (a, b, c, kappa pair); reported next to
// the closed-form sufficient bound extracted from the containing proof.
struct ABarResult {
    double sampled = 0;     // bisected threshold
    double proof_bound = 0; // sufficient closed-form value
};

inline ABarResult find_a_bar(const RigidConstellation& C, const PeriodSpectrum& spec, double b,
                             double c, double kappa0 = 0.0, double kappa1 = 0.0,
                             double a_hi = 0.0) {
    if (a_hi <= 0) a_hi = std::min(0.9 * b, std::min(1.0, c - 1 - 1e-9));
    auto pred = [&](double a) {
        try {
            TunedHamiltonian H0(make_profile(a, b, c), kappa0);
            TunedHamiltonian H1(make_profile(a, b, c), kappa1);
            auto rep = check_finely_tuned(H0, C, spec, &H1);
            return rep.finely_tuned();
        } catch (const std::exception&) {
            return false;
        }
    };
    ABarResult r;
    r.sampled = bisect_threshold(pred, a_hi, 1e-6);
    // sufficient bounds from the action bracket (2.12):
    double a1 = std::sqrt(C.T_min_alpha / 2.0);
    double T = C.T;
    double m2 = C.T_min - std::exp(kappa0) * (T - C.T_min_alpha);
    double a2 = 0.0;
    if (m2 > 0) {
        double disc = T * T - 4 * m2 * std::exp(-kappa0);
        a2 = disc > 0 ? (T - std::sqrt(disc)) / 2 : T / 2;
    }
    double ek1 = std::exp(kappa1);
    double m3 = C.T_min - (ek1 * T - C.T_min_alpha);
    double a3 = 0.0;
    if (m3 > 0) a3 = (-ek1 * T + std::sqrt(ek1 * T * ek1 * T + 4 * m3)) / 2;
    r.proof_bound = std::min({a1, a2, a3});
    return r;
}

// Profiles round-trip through a parameter record (a, b, c, kappa, p); the
// shape exponent is stored for reference and re-derived on load (it is a
// function of (a, b)).
inline std::string profile_record(const TunedHamiltonian& H) {
    ReportWriter w;
    w.kv("record", std::string("profile"));
    w.kv("a", H.profile.a());
    w.kv("b", H.profile.b());
    w.kv("c", H.profile.c());
    w.kv("kappa", H.kappa);
    w.kv("p", H.profile.shape_exponent());
    return w.str();
}

inline TunedHamiltonian profile_from_record(const KeyValues& kv) {
    TunedHamiltonian H(make_profile(kv.get_double("a"), kv.get_double("b"), kv.get_double("c")),
                       kv.get_double_or("kappa", 0.0));
    if (kv.has("p")) {
        double p_stored = kv.get_double("p");
        if (std::abs(p_stored - H.profile.shape_exponent()) >
            1e-6 * std::max(1.0, std::abs(p_stored)))
            throw ProfileError("profile record: stored shape exponent disagrees with (a, b)");
    }
    return H;
}

// Hamiltonians on the symplectization R x M ----------------------------------

struct SymplHamiltonian {
    std::function<double(double, const Vec&)> eval;
    double tau_lo = -2.0, tau_hi = 2.0;  // support window hint for grids
    double operator()(double tau, const Vec& p) const { return eval(tau, p); }
};

inline SymplHamiltonian radial_hamiltonian(const TunedHamiltonian& H) {
    SymplHamiltonian s;
    s.eval = [H](double tau, const Vec&) { return H(tau); };
    s.tau_lo = H.kappa - 1.0;
    s.tau_hi = H.tau_support_hi() + 1.0;
    return s;
}

// G(tau, p) = h(e^tau / f(p)); admissible but not radial.
inline SymplHamiltonian conformal_hamiltonian(const Profile& h, const ConformalFactor& f) {
    SymplHamiltonian s;
    Profile hc = h;
    ConformalFactor fc = f;
    s.eval = [hc, fc](double tau, const Vec& p) { return hc.h(std::exp(tau) / fc(p)); };
    s.tau_lo = -1.0;
    s.tau_hi = std::log((h.c() + h.a()) * f.fmax) + 1.0;
    return s;
}

// cost of the step homotopy from H0 to H1: max over the support grid of
// H1 - H0 (may be <= 0 for monotone-decreasing homotopies; reported raw).
struct LinearCost {
    double cost = 0;      // max(H1 - H0)
    double reverse = 0;   // max(H0 - H1)
    double norm = 0;      // max - min of the difference
};

inline LinearCost linear_cost(const SymplHamiltonian& H0, const SymplHamiltonian& H1,
                              const Model& model, int tau_samples = 257, int point_samples = 128) {
    double lo = std::min(H0.tau_lo, H1.tau_lo), hi = std::max(H0.tau_hi, H1.tau_hi);
    std::mt19937_64 rng(0xc057ULL);
    std::vector<Vec> pts;
    const Chart& ch = model.chart_ref();
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int i = 0; i < point_samples; ++i) {
        Vec x(ch.ambient_dim);
        for (int d = 0; d < ch.ambient_dim; ++d)
            x[d] = ch.period[d] > 0 ? ch.period[d] * ud(rng) : nd(rng);
        model.project(x);
        for (auto& b : ch.bounded) x[b.idx] = b.lo + (b.hi - b.lo) * ud(rng);
        pts.push_back(x);
    }
    LinearCost r;
    double dmax = -std::numeric_limits<double>::infinity();
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < tau_samples; ++i) {
        double tau = lo + (hi - lo) * i / (tau_samples - 1);
        for (const auto& p : pts) {
            double d = H1(tau, p) - H0(tau, p);
            dmax = std::max(dmax, d);
            dmin = std::min(dmin, d);
        }
    }
    r.cost = dmax;
    r.reverse = -dmin;
    r.norm = dmax - dmin;
    return r;
}

// conformal sandwich ----------------------------------------------------------
// Enumerates the negative-action families of G = h(e^tau / f) through the
// lambda-spectrum, verifies the period window of the persistence argument,
// checks the pointwise sandwich H0 >= G >= H1, and validates the fiberwise
// shift Psi(tau,p) = (tau + ln f(p), p) against the pullback identity
// Psi^*(e^tau lambda_0) = e^tau f lambda_0 (the literal shift tau + f(p) is
// evaluated alongside to document its failure).

struct BWindowEmpty : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SandwichResult {
    std::vector<NegativeOrbitRecord> records;
    double window_lo = 0, window_hi = 0;
    bool window_ok = false;
    double pullback_residual_log = 0;
    double pullback_residual_literal = 0;
    bool sandwich_ok = false;
    double sandwich_violation = 0;
};

// Max relative residual of Psi^*(e^tau lambda_0) - e^tau f lambda_0 over
// random (tau, p, v), with the differential of Psi taken by central
// differences of the map itself. log_shift selects tau + ln f(p) versus the
// literal tau + f(p).
inline double pullback_residual(const Model& model, const ConformalFactor& f, bool log_shift,
                                int samples = 100, double fd_step = 1e-5) {
    std::mt19937_64 rng(0x911dULL);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.1, 0.9);
    const Chart& ch = model.chart_ref();
    const int a = ch.ambient_dim;
    auto shift = [&](const Vec& p) { return log_shift ? std::log(f(p)) : f(p); };
    // Psi acts on (tau, p) in R x M; represent states as (1 + a)-vectors
    auto psi = [&](const Vec& x) {
        Vec y = x;
        y[0] += shift(x.tail(a));
        return y;
    };
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        Vec x(1 + a);
        x[0] = nd(rng) * 0.5;  // tau
        Vec p(a);
        for (int d = 0; d < a; ++d) p[d] = ch.period[d] > 0 ? ch.period[d] * ud(rng) : nd(rng);
        model.project(p);
        for (auto& bd : ch.bounded) p[bd.idx] = bd.lo + (bd.hi - bd.lo) * ud(rng);
        x.tail(a) = p;
        // random tangent direction of R x M at (tau, p)
        Mat B = model.tangent_frame(p);
        Vec v = Vec::Zero(1 + a);
        v[0] = nd(rng);
        Vec coef(B.cols());
        for (int d = 0; d < B.cols(); ++d) coef[d] = nd(rng);
        v.tail(a) = B * coef;
        v.normalize();
        // dPsi(v) by central differences of the map
        Vec dpsi = (psi(x + fd_step * v) - psi(x - fd_step * v)) / (2 * fd_step);
        // alpha = e^tau lambda_0 has no d-tau component
        Vec y = psi(x);
        double lhs = std::exp(y[0]) * model.contact(y.tail(a)).dot(dpsi.tail(a));
        double rhs = std::exp(x[0]) * f(p) * model.contact(p).dot(v.tail(a));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    return worst;
}

// lambda_spec: spectrum of lambda = f lambda_0; lambda0_spec: of lambda_0.
// T and alpha come from the rigid constellation of lambda_0 under study.
inline SandwichResult conformal_sandwich(const Model& model, const ConformalFactor& f,
                                         const Profile& h, const HomotopyClass& alpha, double T,
                                         double b, const PeriodSpectrum& lambda_spec,
                                         const PeriodSpectrum& lambda0_spec) {
    // pinching window for b: (T max f, min{T+, T_min + T_min(alpha)})
    auto tp = t_plus(lambda0_spec, alpha, T);
    double That = std::min(tp.finite ? tp.value : std::numeric_limits<double>::infinity(),
                           t_min(lambda0_spec) + t_min_alpha(lambda0_spec, alpha));
    if (!(T * f.fmax_hi() < That))
        throw BWindowEmpty("pinching hypothesis fails: T max f = " + fmt(T * f.fmax_hi()) +
                           " >= " + fmt(That));
    if (!(b > T * f.fmax_hi() && b < That))
        throw BWindowEmpty("b = " + fmt(b) + " outside (" + fmt(T * f.fmax_hi()) + ", " +
                           fmt(That) + ")");
    for (const auto& e : lambda_spec.entries)
        if (e.cls == alpha && std::abs(e.period - b) < 1e-9)
            throw BInSpectrum("b lies in the lambda-spectrum of class alpha");

    SandwichResult out;
    TunedHamiltonian H0(h, 0.0);
    // P^-_alpha(G) through the lambda-spectrum: levels solve h'(e^{tau_i}) = T_i
    PeriodSpectrum restricted = lambda_spec;
    restricted.entries.clear();
    for (const auto& e : lambda_spec.entries)
        if (e.cls == alpha) restricted.entries.push_back(e);
    out.records = enumerate_negative(H0, restricted, 1e-9, /*require_c_large=*/false);

    out.window_lo = t_min_alpha(lambda0_spec, alpha);
    out.window_hi = T * f.fmax_hi();
    out.window_ok = true;
    for (const auto& r : out.records)
        if (r.period < out.window_lo - 1e-9 || r.period > out.window_hi + 1e-9) out.window_ok = false;

    out.pullback_residual_log = pullback_residual(model, f, /*log_shift=*/true);
    out.pullback_residual_literal = pullback_residual(model, f, /*log_shift=*/false);

    // monotone sandwich H0 >= G >= H1 pointwise (requires min f = 1)
    SymplHamiltonian G = conformal_hamiltonian(h, f);
    SymplHamiltonian Hlow;
    double fmax = f.fmax;
    Profile hc = h;
    Hlow.eval = [hc, fmax](double tau, const Vec&) { return hc.h(std::exp(tau) / fmax); };
    out.sandwich_violation = 0.0;
    std::mt19937_64 rng(0x5a1dULL);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.05, 0.95);
    const Chart& ch = model.chart_ref();
    for (int i = 0; i < 64; ++i) {
        Vec p(ch.ambient_dim);
        for (int d = 0; d < ch.ambient_dim; ++d)
            p[d] = ch.period[d] > 0 ? ch.period[d] * ud(rng) : nd(rng);
        model.project(p);
        for (auto& bd : ch.bounded) p[bd.idx] = bd.lo + (bd.hi - bd.lo) * ud(rng);
        for (int j = 0; j <= 64; ++j) {
            double tau = -0.5 + (std::log((h.c() + h.a()) * fmax) + 1.0) * j / 64.0;
            double g = G(tau, p);
            double hi = H0(tau), lo = Hlow(tau, p);
            out.sandwich_violation =
                std::max({out.sandwich_violation, g - hi, lo - g});
        }
    }
    out.sandwich_ok = f.fmin >= 1.0 - 1e-12 && out.sandwich_violation <= 1e-12;
    return out;
}

// Cross-check of the critical-value formula: the action of the 1-periodic
// orbit over a Reeb family equals -e^{tau_x} * (integral of lambda_0 along
// the orbit) + h(sigma), with the line integral taken by quadrature along the
// numerically integrated trajectory.
inline double action_by_quadrature(const Model& model, const NegativeOrbitRecord& rec,
                                   const TunedHamiltonian& H) {
    if (!rec.family.representative) throw ProfileError("record has no representative point");
    DenseTrajectory traj;
    IntegrateOptions opt;
    opt.tol = 1e-12;
    opt.chart = &model;
    auto field = [&model](const Vec& x) { return model.reeb_raw(x); };
    integrate(field, *rec.family.representative, rec.period, opt, &traj);
    const int N = 2048;
    double circ = 0.0;  // integral of lambda_0(gamma'(s)) ds by Simpson
    auto integrand = [&](double s) {
        Vec x = traj.eval(s);
        return model.contact(x).dot(field(x));
    };
    for (int i = 0; i < N; ++i) {
        double s0 = rec.period * i / N, s1 = rec.period * (i + 1) / N;
        circ += (s1 - s0) / 6.0 * (integrand(s0) + 4 * integrand(0.5 * (s0 + s1)) + integrand(s1));
    }
    return -rec.level * circ + H.profile.h(rec.sigma);
}

}  // namespace reebkit
