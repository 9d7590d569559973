#include <catch2/catch_amalgamated.hpp>

#include "reebkit/orbits.hpp"

using namespace reebkit;

namespace {
VectorField model_field(const Model& m) {
    return [&m](const Vec& x) { return m.reeb_raw(x); };
}
}  // namespace

TEST_CASE("integrate: sphere closes after one period") {
    Model m = Model::sphere(2);
    Vec z0(4);
    z0 << 1, 0, 0, 0;
    Vec z = reeb_flow(m, z0, kPi);
    REQUIRE((z - z0).norm() < 1e-8);
}

TEST_CASE("integrate: torus linear flow") {
    Model m = Model::torus3(1);
    Vec x0 = Vec::Zero(3);
    Vec x = reeb_flow(m, x0, 1.0);
    REQUIRE(m.distance(x, x0) < 1e-8);
}

TEST_CASE("integrate: zero time is exact") {
    Model m = Model::torus3(2);
    Vec x0(3);
    x0 << 0.3, 0.4, 1.0;
    Vec x = reeb_flow(m, x0, 0.0);
    REQUIRE((x - x0).norm() == 0.0);
}

TEST_CASE("integrate: semigroup property") {
    Model m = Model::ellipsoid({1.0, 1.2});
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ud(0.1, 1.7);
    const double tol = 1e-10;
    for (int i = 0; i < 10; ++i) {
        Vec x0(4);
        std::normal_distribution<double> nd;
        for (int j = 0; j < 4; ++j) x0[j] = nd(rng);
        m.project(x0);
        double s = ud(rng), t = ud(rng);
        Vec a = reeb_flow(m, reeb_flow(m, x0, t, tol), s, tol);
        Vec b = reeb_flow(m, x0, s + t, tol);
        REQUIRE((a - b).norm() < 10 * 1e-8);
    }
}

TEST_CASE("integrate: cut chart exit is reported") {
    Model m = Model::cut_s2xs1(1);
    // field with a t-drift leaves the bounded coordinate's range
    VectorField drift = [](const Vec&) {
        Vec v(3);
        v << 0, 0, 1;
        return v;
    };
    Vec x0(3);
    x0 << 0, 0, 6.0;
    IntegrateOptions opt;
    opt.chart = &m;
    REQUIRE_THROWS_AS(integrate(drift, x0, 1.0, opt), ChartExit);
}

TEST_CASE("shooting recovers the ellipsoid periods") {
    Model m = Model::ellipsoid({1.0, 1.2});
    Vec g1(4), g2(4);
    g1 << 0.999, 0.01, 0.03, 0.02;
    g2 << 0.03, 0.02, 0.999, 0.01;
    m.project(g1);
    m.project(g2);
    auto o1 = shoot_closed_orbit(model_field(m), m, g1, 3.1);
    REQUIRE(o1.period == Catch::Approx(kPi).margin(1e-8));
    auto o2 = shoot_closed_orbit(model_field(m), m, g2, 4.4);
    REQUIRE(o2.period == Catch::Approx(1.44 * kPi).margin(1e-8));
    REQUIRE(o1.simple);
    REQUIRE(o1.residual < 1e-9);
}

TEST_CASE("shooting on the torus pins the class lattice") {
    Model m = Model::torus3(2);
    Vec seed(3);
    seed << 0.1, 0.2, 0.05;  // near the theta = 0 torus, class (1,0,0)
    auto orb = shoot_closed_orbit(model_field(m), m, seed, 1.05, {1, 0, 0});
    REQUIRE(orb.period == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(orb.cls.v == std::vector<long long>{1, 0, 0});
}

TEST_CASE("shooting reduces covers to the minimal period") {
    Model m = Model::sphere(2);
    Vec g(4);
    g << 1, 0, 0, 0;
    auto orb = shoot_closed_orbit(model_field(m), m, g, 2 * kPi - 0.05);
    REQUIRE(orb.period == Catch::Approx(kPi).margin(1e-8));
    REQUIRE(orb.simple);
}

TEST_CASE("orbits re-integrate to small residual at doubled accuracy") {
    Model m = Model::ellipsoid({1.0, 1.2});
    Vec g(4);
    g << 0.999, 0.01, 0.03, 0.02;
    m.project(g);
    auto orb = shoot_closed_orbit(model_field(m), m, g, 3.1);
    IntegrateOptions opt;
    opt.tol = 1e-12;
    opt.chart = &m;
    Vec back = integrate(model_field(m), orb.x0, orb.period, opt);
    REQUIRE((back - orb.x0).norm() < 1e-8);
}

TEST_CASE("divisor minimality of returned orbits") {
    Model m = Model::ellipsoid({1.0, 1.2});
    Vec g(4);
    g << 0.999, 0.01, 0.03, 0.02;
    m.project(g);
    auto orb = shoot_closed_orbit(model_field(m), m, g, 3.1);
    IntegrateOptions opt;
    opt.tol = 1e-11;
    opt.chart = &m;
    for (int k = 2; k <= 6; ++k) {
        Vec xk = integrate(model_field(m), orb.x0, orb.period / k, opt);
        REQUIRE((xk - orb.x0).norm() > 1e-4);
    }
}

TEST_CASE("Floquet multipliers of the ellipsoid circles") {
    Model m = Model::ellipsoid({1.0, 1.2});
    Vec g(4);
    g << 0.999, 0.01, 0.03, 0.02;
    m.project(g);
    auto orb = shoot_closed_orbit(model_field(m), m, g, 3.1);
    floquet(orb, model_field(m), m);
    REQUIRE(orb.floquet.size() == 2);
    double angle = 2 * kPi / 1.44;
    std::complex<double> mu(std::cos(angle), std::sin(angle));
    double err = std::min(std::abs(orb.floquet[0] - mu), std::abs(orb.floquet[0] - std::conj(mu)));
    REQUIRE(err < 1e-6);
    REQUIRE(orb.nullity == 0);
    REQUIRE(orb.classification == OrbitClass::Nondegenerate);
    // volume preservation: the product of all multipliers has modulus one
    std::complex<double> prod(1, 0);
    for (auto& f : orb.floquet) prod *= f;
    REQUIRE(std::abs(std::abs(prod) - 1.0) < 1e-5);
}

TEST_CASE("round sphere orbits are Morse-Bott with full nullity") {
    Model m = Model::sphere(2);
    Vec g(4);
    g << 1, 0, 0, 0;
    auto orb = shoot_closed_orbit(model_field(m), m, g, 3.1);
    floquet(orb, model_field(m), m);
    REQUIRE(orb.floquet.size() == 2);
    for (auto& mu : orb.floquet) REQUIRE(std::abs(mu - std::complex<double>(1, 0)) < 1e-6);
    REQUIRE(orb.nullity == 2);
    REQUIRE(orb.classification == OrbitClass::MorseBott);
}

TEST_CASE("torus orbits sit in Morse-Bott circles of tori") {
    Model m = Model::torus3(1);
    Vec seed(3);
    seed << 0.0, 0.0, 0.0;
    auto orb = shoot_closed_orbit(model_field(m), m, seed, 1.0, {1, 0, 0});
    floquet(orb, model_field(m), m);
    REQUIRE(orb.floquet.size() == 2);
    for (auto& mu : orb.floquet) REQUIRE(std::abs(mu - std::complex<double>(1, 0)) < 1e-6);
    REQUIRE(orb.nullity == 1);  // parabolic block: family dimension 1
    REQUIRE(orb.classification == OrbitClass::MorseBott);
}

TEST_CASE("scan: torus3(k=1) class (1,0,0) finds the single subtorus") {
    Model m = Model::torus3(1);
    auto fams = scan_orbits(model_field(m), m, HomotopyClass{{1, 0, 0}}, 0.9, 1.1,
                            SeedGrid{{1, 1, 24}});
    REQUIRE(fams.size() == 1);
    REQUIRE(fams[0].period == Catch::Approx(1.0).margin(1e-8));
    REQUIRE(fams[0].topology == FamilyTopology::Circle);
}

TEST_CASE("scan: torus3(k=3) class (1,1,0) finds three subtori of period sqrt(2)") {
    Model m = Model::torus3(3);
    auto fams = scan_orbits(model_field(m), m, HomotopyClass{{1, 1, 0}}, 1.3, 1.5,
                            SeedGrid{{1, 1, 48}});
    REQUIRE(fams.size() == 3);
    for (auto& f : fams) REQUIRE(f.period == Catch::Approx(std::sqrt(2.0)).margin(1e-8));
}

TEST_CASE("scan: ellipsoid finds both circle families below the window cap") {
    Model m = Model::ellipsoid({1.0, 1.2});
    auto fams = scan_orbits(model_field(m), m, HomotopyClass::trivial(), 3.0, 4.6,
                            SeedGrid{{3, 3, 3}});
    REQUIRE(fams.size() == 2);
    REQUIRE(fams[0].period == Catch::Approx(kPi).margin(1e-7));
    REQUIRE(fams[1].period == Catch::Approx(1.44 * kPi).margin(1e-7));
}

TEST_CASE("scan: empty window returns empty, not an error") {
    Model m = Model::torus3(1);
    auto fams = scan_orbits(model_field(m), m, HomotopyClass{{1, 0, 0}}, 0.2, 0.4,
                            SeedGrid{{1, 1, 8}});
    REQUIRE(fams.empty());
}

TEST_CASE("orbit families serialize with class, period, dim and Floquet data") {
    Model m = Model::torus3(1);
    auto fams = scan_orbits([&m](const Vec& x) { return m.reeb_raw(x); }, m,
                            HomotopyClass{{1, 0, 0}}, 0.9, 1.1, SeedGrid{{1, 1, 12}});
    REQUIRE(fams.size() == 1);
    auto rep = families_report(fams);
    REQUIRE(rep.find("(1,0,0)") != std::string::npos);
    REQUIRE(rep.find("floquet") != std::string::npos);
    REQUIRE(rep.find("circle") != std::string::npos);
    REQUIRE(rep == families_report(fams));
}
