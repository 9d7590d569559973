#include <catch2/catch_amalgamated.hpp>

#include "reebkit/profiles.hpp"

using namespace reebkit;

TEST_CASE("profile construction pins the (h1)-(h6) values") {
    auto h = make_profile(0.1, 3.5, 10.0);
    // (h1)
    REQUIRE(h.h(1.0) == 0.0);
    REQUIRE(h.h(0.3) == 0.0);
    REQUIRE(h.h(-5.0) == 0.0);
    // (h3): h(1+a) = a^2 to 1e-10
    REQUIRE(std::abs(h.h(1.1) - 0.01) < 1e-10);
    // (h4): slope exactly b on the middle
    for (double s : {1.1, 2.0, 5.0, 9.0, 10.0}) REQUIRE(h.hp(s) == 3.5);
    // the plateau of the mirrored construction: b(c-1-a) + 2a^2
    REQUIRE(std::abs(h.plateau() - (3.5 * 8.9 + 2 * 0.01)) < 1e-10);
    REQUIRE(h.h(10.2) == h.plateau());
    REQUIRE(h.h(50.0) == h.plateau());
    REQUIRE(h.hp(10.2) == 0.0);
}

TEST_CASE("profile invariants sampled at 1e4 points") {
    auto h = make_profile(0.05, 3.5, 15.0);
    const double a = 0.05, c = 15.0;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    int convex_pos = 0, concave_neg = 0;
    const double b = 3.5;
    for (int i = 0; i < 10000; ++i) {
        double u = ud(rng);
        // (h2) on (1, 1+a): nonnegative everywhere, strictly positive on the
        // active ramp (where h' is strictly between 0 and b at double
        // precision; below that the C-infinity flatness underflows)
        double s_ramp = 1.0 + a * u;
        REQUIRE(h.hpp(s_ramp) >= 0.0);
        if (h.hp(s_ramp) > 1e-6 * b && h.hp(s_ramp) < (1 - 1e-6) * b) {
            REQUIRE(h.hpp(s_ramp) > 0.0);
            ++convex_pos;
        }
        // (h5) mirrored on (c, c+a)
        double s_cap = c + a * u;
        REQUIRE(h.hpp(s_cap) <= 0.0);
        if (h.hp(s_cap) > 1e-6 * b && h.hp(s_cap) < (1 - 1e-6) * b) {
            REQUIRE(h.hpp(s_cap) < 0.0);
            ++concave_neg;
        }
        // monotone between 0 and b
        REQUIRE(h.hp(s_ramp) >= 0.0);
        REQUIRE(h.hp(s_ramp) <= 3.5);
        // (h6)
        REQUIRE(h.h(c + a + 10 * u) == h.plateau());
        // (h1)
        REQUIRE(h.h(1.0 - u) == 0.0);
    }
    REQUIRE(convex_pos > 500);
    REQUIRE(concave_neg > 500);
    // h' strictly increasing across the active ramp
    double u_lo = 0.0;
    for (double u = 0.0; u < 1.0; u += 1e-3)
        if (h.hp(1.0 + a * u) > 1e-6) {
            u_lo = u;
            break;
        }
    double prev = h.hp(1.0 + a * u_lo);
    for (int i = 1; i <= 100; ++i) {
        double s = 1.0 + a * (u_lo + (0.999 - u_lo) * i / 100.0);
        REQUIRE(h.hp(s) > prev);
        prev = h.hp(s);
    }
}

TEST_CASE("ramp area oracle: quadrature of h' over the ramp returns a^2") {
    auto h = make_profile(0.1, 3.5, 10.0);
    double area = integrate_1d([&](double s) { return h.hp(s); }, 1.0, 1.1, 16);
    REQUIRE(std::abs(area - 0.01) < 1e-10);
    // and over the cap: the mirrored ramp has the same area
    double cap_area = integrate_1d([&](double s) { return h.hp(s); }, 10.0, 10.1, 16);
    REQUIRE(std::abs(cap_area - 0.01) < 1e-10);
    // h itself agrees with the cumulative quadrature midway up the ramp
    double mid = integrate_1d([&](double s) { return h.hp(s); }, 1.0, 1.05, 16);
    REQUIRE(std::abs(mid - h.h(1.05)) < 1e-9);
}

TEST_CASE("infeasible parameters are rejected") {
    REQUIRE_THROWS_AS(make_profile(2.0, 1.0, 10.0), ProfileError);  // a >= b
    REQUIRE_THROWS_AS(make_profile(0.5, 1.0, 1.2), ProfileError);   // c <= 1+a
}

TEST_CASE("dividing bijection on the round sphere") {
    auto spec = analytic_spectrum(Model::sphere(2), 30.0);
    TunedHamiltonian H(make_profile(0.05, 3.5, 30.0), 0.0);
    auto recs = enumerate_negative(H, spec);
    // exactly one family below b = 3.5: the S^3 family at period pi
    REQUIRE(recs.size() == 1);
    REQUIRE(recs[0].period == Catch::Approx(kPi));
    REQUIRE(recs[0].sigma > 1.0);
    REQUIRE(recs[0].sigma < 1.05);
    // action bracket (2.12): (-e^k (1+a) T, -e^k T_min_alpha + a^2)
    REQUIRE(recs[0].action > -1.05 * kPi);
    REQUIRE(recs[0].action < -kPi + 0.0025);
    // the level solves h'(sigma) = T exactly
    REQUIRE(std::abs(H.profile.hp(recs[0].sigma) - kPi) < 1e-10);
}

TEST_CASE("dividing bijection counts match the spectrum exactly") {
    auto spec = analytic_spectrum(Model::ellipsoid({1.0, 1.2}), 30.0);
    TunedHamiltonian H(make_profile(0.01, 4.6, 150.0), 0.0);
    auto recs = enumerate_negative(H, spec);
    int below = 0;
    for (auto& e : spec.entries)
        if (e.period < 4.6) ++below;
    REQUIRE(static_cast<int>(recs.size()) == below);
    REQUIRE(recs.size() == 2);  // pi and 1.44 pi
    for (auto& r : recs) {
        REQUIRE(r.action > -(1 + 0.01) * r.period);
        REQUIRE(r.action < -r.period + 0.01 * 0.01);
    }
}

TEST_CASE("kappa shifts the dividing threshold to b e^{-kappa}") {
    auto spec = analytic_spectrum(Model::sphere(2), 30.0);
    // threshold 3.5/1.1 = 3.18 > pi: still one record; the narrowed gap
    // 1.1*(3.18 - pi) needs c beyond 87 to certify the upper bend
    TunedHamiltonian H(make_profile(0.05, 3.5, 100.0), std::log(1.1));
    auto recs = enumerate_negative(H, spec);
    REQUIRE(recs.size() == 1);
    // h'(sigma) e^{-kappa} reproduces the Reeb period
    REQUIRE(std::abs(H.profile.hp(recs[0].sigma) * std::exp(-H.kappa) - kPi) < 1e-10);
    // kappa large enough empties the enumeration below pi
    TunedHamiltonian H2(make_profile(0.05, 3.0, 30.0), std::log(1.05));
    REQUIRE(enumerate_negative(H2, spec, 1e-9, false).empty());  // 3.0/1.05 = 2.857 < pi
}

TEST_CASE("b in the spectrum is rejected") {
    auto spec = analytic_spectrum(Model::sphere(2), 30.0);
    TunedHamiltonian H(make_profile(0.05, 2 * kPi, 200.0), 0.0);
    REQUIRE_THROWS_AS(enumerate_negative(H, spec), BInSpectrum);
}

TEST_CASE("check_c_large arithmetic") {
    auto spec = analytic_spectrum(Model::sphere(2), 30.0);
    TunedHamiltonian H10(make_profile(0.05, 3.5, 10.0), 0.0);
    auto c10 = check_c_large(H10, spec);
    REQUIRE(!c10.ok);  // 10(3.5 - pi) = 3.584 < 3.85 = 3.5 * 1.1
    REQUIRE(c10.value == Catch::Approx(10 * (3.5 - kPi) - 3.5 * 1.1));
    TunedHamiltonian H15(make_profile(0.05, 3.5, 15.0), 0.0);
    auto c15 = check_c_large(H15, spec);
    REQUIRE(c15.ok);  // 15 * 0.3584 - 3.85 = 1.526 > 0
    REQUIRE(c15.value == Catch::Approx(15 * (3.5 - kPi) - 3.5 * 1.1));
    REQUIRE_THROWS_AS(enumerate_negative(H10, spec), CTooSmall);
    // no period below b: gap defaults to b, any c > 2a+1 passes
    PeriodSpectrum empty_low;
    empty_low.cap = 50.0;
    SpectrumEntry e;
    e.period = 40.0;
    e.cls = HomotopyClass::trivial();
    e.topology = FamilyTopology::Point;
    empty_low.entries.push_back(e);
    TunedHamiltonian H3(make_profile(0.05, 3.5, 2.0), 0.0);
    REQUIRE(check_c_large(H3, empty_low).ok);  // c = 2 > 1.1
}

TEST_CASE("tuned and finely tuned on the round sphere") {
    auto spec = analytic_spectrum(Model::sphere(2), 30.0);
    auto C = build_constellation(spec, HomotopyClass::trivial(), kPi);
    TunedHamiltonian H(make_profile(0.01, 3.5, 30.0), 0.0);
    auto tuned = check_tuned(H, C);
    REQUIRE(tuned.tuned());
    auto fine = check_finely_tuned(H, C, spec);
    REQUIRE(fine.finely_tuned());
    REQUIRE(fine.delta_H == 0.0);  // single action value: gap 0 by convention
    REQUIRE(fine.delta_s_value == Catch::Approx(std::min(kPi / 2, kPi - 0.0)));
}

TEST_CASE("tuning inequalities on the ellipsoid C(T_2)") {
    auto spec = analytic_spectrum(Model::ellipsoid({1.0, 1.2}), 30.0);
    auto C = build_constellation(spec, HomotopyClass::trivial(), 1.44 * kPi);
    // (t2): 1.44 pi < b < T+ = 2 pi; b = 4.6 passes
    TunedHamiltonian bad_c(make_profile(0.01, 4.6, 100.0), 0.0);
    auto rep1 = check_tuned(bad_c, C);
    REQUIRE(!rep1.tuned());  // (t3) needs c > 9.2/(4.6 - 1.44 pi) = 120.88
    TunedHamiltonian good(make_profile(0.01, 4.6, 150.0), 0.0);
    auto rep2 = check_tuned(good, C);
    REQUIRE(rep2.tuned());
    double t3_threshold = 2 * 4.6 / (4.6 - 1.44 * kPi);
    REQUIRE(t3_threshold == Catch::Approx(120.88).margin(0.01));
}

TEST_CASE("action gap limits: ellipsoid actions approach -period as a -> 0") {
    auto spec = analytic_spectrum(Model::ellipsoid({1.0, 1.2}), 30.0);
    TunedHamiltonian H(make_profile(1e-4, 4.6, 200000.0), 0.0);
    auto recs = enumerate_negative(H, spec, 1e-9, false);
    REQUIRE(recs.size() == 2);
    double gap = action_gap(recs);
    REQUIRE(gap == Catch::Approx(0.44 * kPi).margin(2e-3));
}

TEST_CASE("pair gap and delta_s on a finely tuned pair") {
    auto spec = analytic_spectrum(Model::ellipsoid({1.0, 1.2}), 30.0);
    auto C = build_constellation(spec, HomotopyClass::trivial(), 1.44 * kPi);
    TunedHamiltonian H0(make_profile(0.01, 4.6, 150.0), 0.0);
    TunedHamiltonian H1(make_profile(0.01, 4.6, 150.0), std::log(1.002));
    auto fine = check_finely_tuned(H0, C, spec, &H1);
    REQUIRE(fine.finely_tuned());
    REQUIRE(fine.delta_s_value > 0.0);
    // Lemma bound: Delta(H0,H1) <= e^k1 T - T_min_alpha + a0^2 + e^k1 a1 T
    double ek1 = 1.002, T = 1.44 * kPi, a = 0.01;
    double bound = ek1 * T - kPi + a * a + ek1 * a * T;
    REQUIRE(fine.delta_pair <= bound + 1e-12);
    REQUIRE(fine.delta_pair < kPi);  // < T_min
}

TEST_CASE("a-bar bisection produces a positive threshold on paper constellations") {
    struct Case {
        Model model;
        HomotopyClass cls;
        double T, b, c;
    };
    std::vector<Case> cases = {
        {Model::sphere(2), HomotopyClass::trivial(), kPi, 3.5, 30.0},
        {Model::ellipsoid({1.0, 1.2}), HomotopyClass::trivial(), 1.44 * kPi, 4.6, 150.0},
        {Model::torus3(2), HomotopyClass{{1, 0, 0}}, 1.0, 1.5, 25.0},
        {Model::cut_s2xs1(2), HomotopyClass{{1}}, 2 * kPi, 7.0, 60.0},
        {Model::cut_s3(1), HomotopyClass::trivial(), 2 * kPi, 7.0, 60.0},
    };
    for (auto& cs : cases) {
        auto spec = analytic_spectrum(cs.model, 8 * std::max(1.0, cs.T));
        auto C = build_constellation(spec, cs.cls, cs.T);
        REQUIRE(C.rigid());
        auto ab = find_a_bar(C, spec, cs.b, cs.c);
        INFO(cs.model.name());
        REQUIRE(ab.sampled > 0.0);
        REQUIRE(ab.proof_bound > 0.0);
        // at a-bar/2 all three inequalities hold with positive margin
        TunedHamiltonian H0(make_profile(ab.sampled / 2, cs.b, cs.c), 0.0);
        TunedHamiltonian H1(make_profile(ab.sampled / 2, cs.b, cs.c), 0.0);
        auto fine = check_finely_tuned(H0, C, spec, &H1);
        REQUIRE(fine.finely_tuned());
        for (auto& chk : fine.checks) REQUIRE(chk.margin > 0.0);
        REQUIRE(fine.delta_s_value > 0.0);
    }
}

TEST_CASE("linear cost of step homotopies") {
    Model m = Model::sphere(2);
    TunedHamiltonian H(make_profile(0.05, 3.5, 15.0), 0.0);
    auto S0 = radial_hamiltonian(H);
    auto cost0 = linear_cost(S0, S0, m);
    REQUIRE(cost0.cost == 0.0);
    REQUIRE(cost0.norm == 0.0);
    // H1 = h(e^tau / max f) <= H0: downward homotopy is cost-free
    auto f = factor_ellipsoid({1.0, 1.2});
    SymplHamiltonian S1;
    Profile h = H.profile;
    S1.eval = [h, &f](double tau, const Vec&) { return h.h(std::exp(tau) / f.fmax); };
    S1.tau_lo = S0.tau_lo;
    S1.tau_hi = S0.tau_hi + std::log(f.fmax);
    auto cost1 = linear_cost(S0, S1, m);
    REQUIRE(cost1.cost <= 1e-12);
    REQUIRE(cost1.norm > 0.0);
    // and the sandwich G sits between them, also cost-free downward
    auto G = conformal_hamiltonian(h, f);
    REQUIRE(linear_cost(S0, G, m).cost <= 1e-12);
    REQUIRE(linear_cost(G, S1, m).cost <= 1e-12);
}

TEST_CASE("conformal sandwich on the sphere with the ellipsoid factor") {
    Model m = Model::sphere(2);
    auto f = factor_ellipsoid({1.0, 1.2});
    auto lam0 = analytic_spectrum(m, 30.0);
    auto lam = analytic_spectrum(Model::ellipsoid({1.0, 1.2}), 30.0);
    auto h = make_profile(0.01, 4.6, 150.0);
    auto res = conformal_sandwich(m, f, h, HomotopyClass::trivial(), kPi, 4.6, lam, lam0);
    REQUIRE(res.records.size() == 2);
    REQUIRE(res.records[0].period == Catch::Approx(kPi));
    REQUIRE(res.records[1].period == Catch::Approx(1.44 * kPi));
    REQUIRE(res.window_ok);  // periods within [pi, 1.44 pi]
    REQUIRE(res.window_lo == Catch::Approx(kPi));
    REQUIRE(res.window_hi == Catch::Approx(1.44 * kPi));
    REQUIRE(res.sandwich_ok);
    // the pullback identity holds with the logarithmic shift and fails with
    // the literal one
    REQUIRE(res.pullback_residual_log < 1e-8);
    REQUIRE(res.pullback_residual_literal > 1e-2);
}

TEST_CASE("conformal sandwich with f == 1 reduces to the radial enumeration") {
    Model m = Model::sphere(2);
    auto lam0 = analytic_spectrum(m, 30.0);
    auto h = make_profile(0.01, 3.5, 30.0);
    auto res = conformal_sandwich(m, factor_one(), h, HomotopyClass::trivial(), kPi, 3.5, lam0,
                                  lam0);
    TunedHamiltonian H(h, 0.0);
    auto direct = enumerate_negative(H, lam0, 1e-9, false);
    REQUIRE(res.records.size() == direct.size());
    for (size_t i = 0; i < direct.size(); ++i) {
        REQUIRE(res.records[i].sigma == Catch::Approx(direct[i].sigma).epsilon(1e-12));
        REQUIRE(res.records[i].action == Catch::Approx(direct[i].action).epsilon(1e-12));
    }
}

TEST_CASE("empty pinching window is reported") {
    Model m = Model::sphere(2);
    auto lam0 = analytic_spectrum(m, 30.0);
    // max f = 2.25 >= 2: T max f >= T-hat = 2 pi, so no admissible b exists
    auto f_wide = factor_ellipsoid({1.0, 1.5});
    auto lam_wide = analytic_spectrum(Model::ellipsoid({1.0, 1.5}), 30.0);
    auto h = make_profile(0.01, 6.2, 400.0);
    REQUIRE_THROWS_AS(
        conformal_sandwich(m, f_wide, h, HomotopyClass::trivial(), kPi, 6.2, lam_wide, lam0),
        BWindowEmpty);
    // valid pinching but b outside the open interval
    auto f_ok = factor_ellipsoid({1.0, 1.2});
    auto lam_ok = analytic_spectrum(Model::ellipsoid({1.0, 1.2}), 30.0);
    REQUIRE_THROWS_AS(
        conformal_sandwich(m, f_ok, h, HomotopyClass::trivial(), kPi, 2 * kPi + 0.1, lam_ok, lam0),
        BWindowEmpty);
}

TEST_CASE("critical-value formula equals the line-integral action by quadrature") {
    auto ell = Model::ellipsoid({1.0, 1.2});
    auto spec = analytic_spectrum(ell, 30.0);
    TunedHamiltonian H(make_profile(0.01, 4.6, 150.0), 0.0);
    auto recs = enumerate_negative(H, spec, 1e-9, false);
    REQUIRE(recs.size() == 2);
    for (const auto& r : recs) {
        double via_integral = action_by_quadrature(ell, r, H);
        REQUIRE(std::abs(via_integral - r.action) < 1e-6);
    }
    // and with a kappa shift on the sphere
    auto sph = Model::sphere(2);
    auto sspec = analytic_spectrum(sph, 30.0);
    TunedHamiltonian Hk(make_profile(0.01, 3.5, 200.0), std::log(1.05));
    auto recs2 = enumerate_negative(Hk, sspec, 1e-9, false);
    REQUIRE(recs2.size() == 1);
    REQUIRE(std::abs(action_by_quadrature(sph, recs2[0], Hk) - recs2[0].action) < 1e-6);
}

TEST_CASE("profile round-trips through its parameter record") {
    TunedHamiltonian H(make_profile(0.03, 4.1, 60.0), 0.25);
    auto kv = parse_kv_text(profile_record(H));
    auto H2 = profile_from_record(kv);
    REQUIRE(H2.kappa == H.kappa);
    REQUIRE(H2.profile.shape_exponent() == Catch::Approx(H.profile.shape_exponent()));
    for (double s : {0.5, 1.004, 1.02, 2.0, 59.0, 60.02, 61.0})
        REQUIRE(H2.profile.h(s) == H.profile.h(s));
    // a corrupted exponent is rejected
    KeyValues bad = kv;
    for (auto& [k, v] : bad.items)
        if (k == "p") v = "999.0";
    REQUIRE_THROWS_AS(profile_from_record(bad), ProfileError);
}
