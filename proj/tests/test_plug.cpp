#include <catch2/catch_amalgamated.hpp>

#include "reebkit/plug.hpp"

using namespace reebkit;

TEST_CASE("bump constructions pass their property lists") {
    for (double eps : {0.05, 0.1}) {
        auto spec = make_spec(eps, 0.01, 3);
        for (const auto& pc : spec.checks()) {
            INFO(pc.name << " worst " << pc.worst);
            REQUIRE(pc.ok);
        }
    }
    auto spec5 = make_spec(0.05, 0.01, 5);
    for (const auto& pc : spec5.checks()) {
        INFO(pc.name);
        REQUIRE(pc.ok);
    }
}

TEST_CASE("pinned bump values") {
    auto spec = make_spec(0.05, 0.01, 3);
    // X(eps) = eps + eps^2
    REQUIRE(spec.X(0.05) == Catch::Approx(0.0525).margin(1e-12));
    // B(0, eps) = X(eps) since T(0) = 1
    REQUIRE(spec.B(0, 0.05) == Catch::Approx(0.0525).margin(1e-12));
    // B(t, x) = x for |t| >= eps
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ud(-0.1, 0.1);
    for (int i = 0; i < 100; ++i) {
        double x = ud(rng);
        REQUIRE(spec.B(0.05, x) == x);
        REQUIRE(spec.B(-0.07, x) == x);
    }
    // the critical point is exact
    REQUIRE(spec.B_x(0, 0.05) == 0.0);
    REQUIRE(spec.B_t(0, 0.05) == 0.0);
}

TEST_CASE("contact density positive with the inner-rectangle bound") {
    auto spec = make_spec(0.05, 0.01, 3);
    auto scan = verify_contact(spec, 0.01, 512);
    REQUIRE(scan.positive);
    REQUIRE(scan.inner_ok);
    REQUIRE(scan.inner_bound == Catch::Approx(2.5e-4));
    REQUIRE(scan.inner_min > scan.inner_bound);
    // at (0, eps) the density is delta * B(0,eps) = delta (eps + eps^2)
    REQUIRE(spec.density3(0, 0.05, 0.01) == Catch::Approx(0.01 * 0.0525).epsilon(1e-12));
    // outside the inner rectangle the density is 1 + delta x A_x >= 1 - delta |min x A_x|
    double cap = delta_bound(spec);
    REQUIRE(spec.density3(-1.8 * 0.05, -1.5 * 0.05, 0.01) >= 1.0 - 0.01 / cap);
}

TEST_CASE("delta beyond the cap produces a negative density at an outer point") {
    auto spec = make_spec(0.05, 0.01, 3);
    double cap = delta_bound(spec);
    REQUIRE(std::isfinite(cap));
    auto good = verify_contact(spec, cap / 2, 256);
    REQUIRE(good.positive);
    double d_bad = cap;
    ContactScan bad;
    for (int k = 0; k < 10; ++k) {
        d_bad *= 2;
        bad = verify_contact(spec, d_bad, 256);
        if (!bad.positive) break;
    }
    REQUIRE(!bad.positive);
    // the violation sits outside the inner rectangle, where density = 1 + delta x A_x
    bool outer = std::abs(bad.argmin_t) > 0.05 || bad.argmin_x < 0.05 / 2 ||
                 bad.argmin_x > 3 * 0.05 / 2;
    REQUIRE(outer);
}

TEST_CASE("delta = 0 degenerates exactly at the critical point") {
    auto spec = make_spec(0.05, 0.01, 3);
    REQUIRE(spec.density3(0, 0.05, 0.0) == 0.0);  // B_x alone vanishes there
    auto scan = verify_contact(spec, 0.0, 128);
    REQUIRE(scan.min_density >= 0.0);
    REQUIRE(!scan.positive);  // boundary case flagged non-strict
}

TEST_CASE("delta cap is monotone nonincreasing in eps") {
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.02, 0.05, 0.08, 0.12}) {
        auto spec = make_spec(eps, 1e-3, 3);
        double cap = delta_bound(spec, 256);
        REQUIRE(cap <= prev * (1 + 1e-9));
        prev = cap;
    }
}

TEST_CASE("fast orbit location, period and kernel residual") {
    auto spec = make_spec(0.05, 0.01, 3);
    auto orb = locate_orbit(spec, 0.01);
    REQUIRE(orb.critical_point_ok);
    REQUIRE(orb.period_analytic == Catch::Approx(2 * kPi * 0.0525).epsilon(1e-14));
    REQUIRE(orb.period_analytic == Catch::Approx(0.329867).margin(1e-6));
    REQUIRE(std::abs(orb.period_quadrature - orb.period_analytic) < 1e-10);
    REQUIRE(orb.kernel_residual < 1e-8);
    REQUIRE(orb.unique_at_grid_scale);
}

TEST_CASE("fast orbit in dimension five") {
    auto spec = make_spec(0.05, 0.01, 5);
    auto orb = locate_orbit(spec, 0.01);
    REQUIRE(orb.period_analytic == Catch::Approx(2 * kPi * 0.0525).epsilon(1e-14));
    REQUIRE(std::abs(orb.period_quadrature - orb.period_analytic) < 1e-10);
    REQUIRE(orb.kernel_residual < 1e-8);
    REQUIRE(orb.unique_at_grid_scale);
    // z-components of K vanish on S_eps
    Vec y = Vec::Zero(5);
    y[1] = 0.05;
    Vec K = plugdetail::plug_kernel(spec, 0.01, y);
    REQUIRE(K.tail(2).norm() == 0.0);
    // consistency across dimensions: at rho = 0 the cut factor is 1 and the
    // (n-2) rho term vanishes, so the dim-5 density reduces to the dim-3 one
    auto spec3 = make_spec(0.05, 0.01, 3);
    for (double t : {-0.05, 0.0, 0.03})
        for (double x : {0.02, 0.05, 0.07})
            REQUIRE(std::abs(spec.density_high(t, x, 0.0, 0.01) - spec3.density3(t, x, 0.01)) <
                    1e-12);
}

TEST_CASE("gray stability bounds") {
    auto spec = make_spec(0.05, 0.01, 3);
    auto gb = gray_bounds(spec, 0.01);
    REQUIRE(gb.rbar_ok);
    REQUIRE(gb.rhat_ok);
    REQUIRE(gb.sup_rbar < 2 * 0.01);
    REQUIRE(gb.sup_rhat < 4 * 0.05);
    REQUIRE(gb.min_rbar >= 0.0);
    REQUIRE(gb.min_rhat >= 0.0);
    REQUIRE(gb.bound == Catch::Approx(std::exp(0.22)));
    REQUIRE(gb.bound == Catch::Approx(1.24608).margin(1e-5));
    // the closed-form certificate bound over-estimates the grid bound
    REQUIRE(gb.bound > gb.grid_bound);
    REQUIRE(gb.grid_bound >= 1.0);
    // rbar vanishes where A = 0, rhat where B = x
    REQUIRE(spec.A(0.09, 0.0) == 0.0);
    REQUIRE(spec.B(0.06, 0.03) == 0.03);
}

TEST_CASE("gray bounds in dimension five") {
    auto spec = make_spec(0.05, 0.01, 5);
    auto gb = gray_bounds(spec, 0.01, 128, 16, 12);
    REQUIRE(gb.rbar_ok);
    REQUIRE(gb.rhat_ok);
    REQUIRE(gb.bound > gb.grid_bound);
}

TEST_CASE("parameter choice for (c1, c2) = (0.25, 0.33)") {
    auto choice = choose_parameters(0.25, 0.33);
    REQUIRE(choice.eps == Catch::Approx(0.05));
    REQUIRE(choice.delta == Catch::Approx(0.01));
    REQUIRE(choice.period == Catch::Approx(0.329867).margin(1e-5));
    REQUIRE(choice.period < 0.33);
    REQUIRE(choice.bound == Catch::Approx(1.24608).margin(1e-5));
    REQUIRE(choice.bound < 1.25);
    REQUIRE(choice.valid);
}

TEST_CASE("parameter choice adapts to other targets") {
    auto c = choose_parameters(0.8, 0.7);
    REQUIRE(c.valid);
    REQUIRE(2 * kPi * (c.eps + c.eps * c.eps) < 0.7);
    REQUIRE(c.bound < 1.8);
    // huge c1: only the period constraint binds
    auto c2 = choose_parameters(100.0, 0.5);
    REQUIRE(c2.valid);
    REQUIRE(c2.period < 0.5);
}

TEST_CASE("infeasible plug parameters are rejected") {
    REQUIRE_THROWS_AS(make_spec(0.3, 0.01, 3), PlugError);   // eps too large
    REQUIRE_THROWS_AS(make_spec(0.05, -1.0, 3), PlugError);  // negative delta
    REQUIRE_THROWS_AS(make_spec(0.05, 0.01, 4), PlugError);  // even dimension
}
