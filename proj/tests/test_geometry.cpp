#include <catch2/catch_amalgamated.hpp>

#include "reebkit/conformal.hpp"
#include "reebkit/geometry.hpp"

using namespace reebkit;

namespace {

std::vector<Model> catalog() {
    return {Model::sphere(2),      Model::sphere(3),          Model::ellipsoid({1.0, 1.2}),
            Model::torus3(1),      Model::torus3(3),          Model::cut_s2xs1(2),
            Model::cut_s3(1),      Model::flat_torus_cosphere(2),
            Model::flat_torus_cosphere(3)};
}

Vec random_point(const Model& m, std::mt19937_64& rng) {
    const Chart& c = m.chart_ref();
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.05, 0.95);
    Vec x(c.ambient_dim);
    for (int i = 0; i < c.ambient_dim; ++i) {
        if (c.period[i] > 0)
            x[i] = c.period[i] * ud(rng);
        else
            x[i] = nd(rng);
    }
    for (auto& b : c.bounded) x[b.idx] = b.lo + (b.hi - b.lo) * ud(rng);
    m.project(x);
    return x;
}

// central-difference evaluation of d(lambda)(u, v) at x for the reference form
double dlambda_fd(const Model& m, const Vec& x, const Vec& u, const Vec& v, double h = 1e-5) {
    auto along = [&](const Vec& dir, const Vec& w) {
        return (m.contact(x + h * dir).dot(w) - m.contact(x - h * dir).dot(w)) / (2 * h);
    };
    return along(u, v) - along(v, u);
}

}  // namespace

TEST_CASE("Reeb defining identities on the catalog") {
    std::mt19937_64 rng(42);
    for (const auto& m : catalog()) {
        const Chart& c = m.chart_ref();
        for (int trial = 0; trial < 100; ++trial) {
            Vec x = random_point(m, rng);
            Vec R = m.reeb(x);
            REQUIRE(std::abs(m.contact_eval(x, R) - 1.0) < 1e-10);
            Mat B = m.tangent_frame(x);
            for (int j = 0; j < B.cols(); ++j)
                REQUIRE(std::abs(dlambda_fd(m, x, R, B.col(j))) < 1e-8);
            (void)c;
        }
    }
}

TEST_CASE("sphere Reeb field matches the circle-action formula") {
    Model m = Model::sphere(2);
    Vec z(4);
    z << 1, 0, 0, 0;  // z = (1, 0) in C^2
    Vec R = m.reeb(z);
    Vec expected(4);
    expected << 0, 2, 0, 0;  // 2i z
    REQUIRE((R - expected).norm() == 0.0);
}

TEST_CASE("sphere contact form evaluates the restricted Liouville form") {
    // direct evaluation of (1/2) sum (x dy - y dx) at z=(1,0) on v=(i,0)
    Model m = Model::sphere(2);
    Vec z(4), v(4);
    z << 1, 0, 0, 0;
    v << 0, 1, 0, 0;
    REQUIRE(m.contact_eval(z, v) == Catch::Approx(0.5).margin(1e-15));
    // consistency: lambda(R) = 1 with R = 2v at this point
    REQUIRE(m.contact_eval(z, m.reeb(z)) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("torus form has no d-theta component") {
    Model m = Model::torus3(2);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        Vec x = random_point(m, rng);
        Vec dtheta(3);
        dtheta << 0, 0, 1;
        REQUIRE(m.contact_eval(x, dtheta) == 0.0);
    }
}

TEST_CASE("torus3 Reeb field at the origin") {
    Model m = Model::torus3(1);
    Vec x = Vec::Zero(3);
    Vec R = m.reeb(x);
    REQUIRE(R[0] == 1.0);
    REQUIRE(R[1] == 0.0);
    REQUIRE(R[2] == 0.0);
}

TEST_CASE("degenerate ellipsoid weights reproduce the round sphere") {
    Model s = Model::sphere(2);
    Model e = Model::ellipsoid({1.0, 1.0 + 1e-15});
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        Vec x = random_point(s, rng);
        REQUIRE((s.reeb(x) - e.reeb(x)).norm() < 1e-12);
    }
}

TEST_CASE("cut model pole fibers and chart errors") {
    Model m = Model::cut_s2xs1(2);
    Vec pole(3);
    pole << 0, 0, 0;
    REQUIRE_THROWS_AS(m.reeb(pole), ChartError);
    Vec R = m.reeb(pole, /*allow_pole=*/true);
    REQUIRE(R[0] == 1.0);
    auto fibers = m.pole_fibers();
    REQUIRE(fibers.size() == 2);
    REQUIRE(fibers[0].period == Catch::Approx(2 * kPi));
    REQUIRE(fibers[0].cls.v == std::vector<long long>{1});
}

TEST_CASE("conformal Reeb solver: identity and constant factors") {
    std::mt19937_64 rng(11);
    for (const auto& m : {Model::sphere(2), Model::torus3(1), Model::flat_torus_cosphere(2)}) {
        for (int i = 0; i < 5; ++i) {
            Vec x = random_point(m, rng);
            Vec R0 = m.reeb(x);
            Vec R1 = reeb_of_conformal(m, factor_one(), x);
            REQUIRE((R1 - R0).norm() < 1e-9);
            Vec Rc = reeb_of_conformal(m, factor_constant(2.5), x);
            REQUIRE((Rc - R0 / 2.5).norm() < 1e-9);
        }
    }
}

TEST_CASE("conformal Reeb solver recovers the ellipsoid flow") {
    Model sphere = Model::sphere(2);
    std::vector<double> r = {1.0, 1.2};
    auto f = factor_ellipsoid(r);
    std::mt19937_64 rng(13);
    for (int i = 0; i < 10; ++i) {
        Vec z = random_point(sphere, rng);
        Vec R = reeb_of_conformal(sphere, f, z);
        Vec expected(4);
        for (int j = 0; j < 2; ++j) {
            double w = 2.0 / (r[j] * r[j]);
            expected[2 * j] = -w * z[2 * j + 1];
            expected[2 * j + 1] = w * z[2 * j];
        }
        REQUIRE((R - expected).norm() < 1e-7);
    }
}

TEST_CASE("conformal distance") {
    REQUIRE(conformal_distance(factor_one()).value == 0.0);
    auto f = factor_ellipsoid({1.0, 1.2});
    REQUIRE(f.fmin == Catch::Approx(1.0));
    REQUIRE(f.fmax == Catch::Approx(1.44));
    REQUIRE(conformal_distance(f).value == Catch::Approx(std::log(1.44)).epsilon(1e-12));

    // oracle: extremize the ellipsoid factor on the sphere directly
    Model sphere = Model::sphere(2);
    double lo = 1e300, hi = -1e300;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20000; ++i) {
        Vec z = random_point(sphere, rng);
        double v = f(z);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    REQUIRE(lo >= f.fmin - 1e-9);
    REQUIRE(hi <= f.fmax + 1e-9);
    REQUIRE(std::log(hi / lo) <= conformal_distance(f).value + 1e-6);
}

TEST_CASE("conformal distance symmetry and triangle inequality") {
    // d is unchanged by constant rescaling and symmetric in f <-> 1/f
    auto f = factor_ellipsoid({1.0, 1.3});
    ConformalFactor cf = f;
    cf.fmin *= 3.0;
    cf.fmax *= 3.0;
    REQUIRE(conformal_distance(cf).value == Catch::Approx(conformal_distance(f).value));
    ConformalFactor inv = f;
    inv.fmin = 1.0 / f.fmax;
    inv.fmax = 1.0 / f.fmin;
    REQUIRE(conformal_distance(inv).value == Catch::Approx(conformal_distance(f).value));

    // triangle inequality on sampled factor triples: d(f,h) <= d(f,g) + d(g,h)
    // with d(f,g) = ln max(f/g) - ln min(f/g) sampled on the torus
    Model t = Model::torus3(1);
    auto g1 = factor_cos_bump(0.2);
    auto g2 = factor_cos_bump(0.35);
    std::mt19937_64 rng(17);
    auto dist = [&](const ConformalFactor& a, const ConformalFactor& b) {
        double lo = 1e300, hi = -1e300;
        std::mt19937_64 r2(99);
        for (int i = 0; i < 4000; ++i) {
            Vec x = random_point(t, r2);
            double q = a(x) / b(x);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        return std::log(hi / lo);
    };
    (void)rng;
    double d12 = dist(factor_one(), g1), d23 = dist(g1, g2), d13 = dist(factor_one(), g2);
    REQUIRE(d13 <= d12 + d23 + 1e-9);
}

TEST_CASE("homotopy class arithmetic is exact") {
    HomotopyClass a{{2, -3, 1}};
    REQUIRE(a.pow(4).v == std::vector<long long>{8, -12, 4});
    REQUIRE(a.is_primitive());
    REQUIRE(a.order() == 0);  // infinite
    HomotopyClass b{{2, 4, 6}};
    REQUIRE(!b.is_primitive());
    REQUIRE(HomotopyClass::trivial().order() == 1);
    Model t = Model::torus3(2);
    REQUIRE(t.class_of_winding({1, 0, 0}).is_primitive());
    REQUIRE(!t.class_of_winding({2, 0, 0}).is_primitive());
}

TEST_CASE("expression-grammar factors parse and enclose") {
    Model t = Model::torus3(1);
    auto f = factor_expression(t, {"1.0", "0.25 * cos(6.283185307179586*y) * cos(1*theta)"}, 24);
    REQUIRE(f.fmax == Catch::Approx(1.25).margin(2e-3));
    REQUIRE(f.fmin == Catch::Approx(0.75).margin(2e-3));
    Vec x(3);
    x << 0.3, 0.0, 0.0;
    REQUIRE(f(x) == Catch::Approx(1.25));
}
