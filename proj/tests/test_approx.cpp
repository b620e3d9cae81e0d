#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sg/approx.hpp"
#include "sg/grid.hpp"
#include "sg/integrand.hpp"
#include "sg/util.hpp"

using namespace sg;

namespace {

double quartic_cap(double t) { return 0.375 + 0.75 * t * t - 0.125 * t * t * t * t; }

}  // namespace

TEST_CASE("perturbation profile: closed form below 1, identity beyond") {
    CHECK(perturbation_h(0.0) == 0.375);
    CHECK(perturbation_h(2.0) == 2.0);
    CHECK(perturbation_h_d2(0.0) == doctest::Approx(1.5).epsilon(1e-15));
    // C^2 junction at t = 1
    CHECK(std::fabs(perturbation_h(1.0) - 1.0) < 1e-12);
    CHECK(std::fabs(perturbation_h_d1(1.0) - 1.0) < 1e-12);
    CHECK(std::fabs(perturbation_h_d2(1.0)) < 1e-12);

    for (int i = 0; i <= 10000; ++i) {
        double t = 3.0 * i / 10000.0;
        double want = t < 1.0 ? quartic_cap(t) : t;
        double want1 = t < 1.0 ? (3.0 * t - t * t * t) / 2.0 : 1.0;
        double want2 = t < 1.0 ? (3.0 - 3.0 * t * t) / 2.0 : 0.0;
        CHECK(std::fabs(perturbation_h(t) - want) < 1e-12);
        CHECK(std::fabs(perturbation_h_d1(t) - want1) < 1e-12);
        CHECK(std::fabs(perturbation_h_d2(t) - want2) < 1e-12);
        CHECK(perturbation_h(t) > 0.0);
        CHECK(perturbation_h_d1(t) >= 0.0);
        CHECK(perturbation_h_d2(t) >= -1e-15);
    }
    CHECK_THROWS_AS(perturbation_h(-0.1), param_error);
}

TEST_CASE("smooth ramp: plateaus, monotonicity, and hand derivatives") {
    CHECK(smooth_ramp(-1.0) == 1.0);
    CHECK(smooth_ramp(0.0) == 1.0);
    CHECK(smooth_ramp(1.0) == 0.0);
    CHECK(smooth_ramp(2.0) == 0.0);
    CHECK(smooth_ramp_d1(0.0) == 0.0);
    CHECK(smooth_ramp_d1(1.0) == 0.0);
    CHECK(smooth_ramp_d2(0.0) == 0.0);

    double prev = 1.0;
    for (int i = 1; i <= 1000; ++i) {
        double u = i / 1000.0;
        double v = smooth_ramp(u);
        CHECK(v >= 0.0);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
    for (int i = 1; i < 20; ++i) {
        double u = 0.05 + 0.9 * i / 20.0;
        double h = 1e-6;
        double fd1 = (smooth_ramp(u + h) - smooth_ramp(u - h)) / (2.0 * h);
        CHECK(std::fabs(smooth_ramp_d1(u) - fd1) < 1e-5);
        double fd2 = (smooth_ramp_d1(u + h) - smooth_ramp_d1(u - h)) / (2.0 * h);
        CHECK(std::fabs(smooth_ramp_d2(u) - fd2) < 1e-4);
    }
}

TEST_CASE("mollifier kernel: unit mass, compact support") {
    MollifierKernel k2(2, 0.1);
    CHECK(std::fabs(k2.mass_quadrature(200) - 1.0) < 1e-12);
    MollifierKernel k3(3, 0.25);
    CHECK(std::fabs(k3.mass_quadrature(120) - 1.0) < 1e-10);

    CHECK(k2.value({0.11, 0.0}) == 0.0);
    CHECK(k2.value({0.05, 0.05}) > 0.0);
    CHECK(k2.value_scaled(1.0) == 0.0);
    CHECK(k2.value_scaled(0.0) > 0.0);
    // radial symmetry
    CHECK(k2.value({0.06, 0.02}) ==
          doctest::Approx(k2.value({0.02, 0.06})).epsilon(1e-14));
}

TEST_CASE("grid mollification: invariances and quadratic convergence") {
    GridFunction uc = make_grid(64, [](double, double) { return 2.5; });
    GridFunction mc = mollify_grid(uc, 0.1);
    for (double v : mc.v) CHECK(std::fabs(v - 2.5) < 1e-13);

    GridFunction ua = make_grid(64, [](double x, double y) { return 1.0 + 2.0 * x - 0.7 * y; });
    GridFunction ma = mollify_grid(ua, 0.1);
    for (std::size_t i = 0; i < ma.v.size(); ++i)
        CHECK(std::fabs(ma.v[i] - ua.v[i]) < 1e-13);

    GridFunction us = make_grid(256, [](double x, double y) {
        return std::sin(M_PI * x) * std::cos(M_PI * y);
    });
    std::vector<double> errs;
    for (double eps : {0.12, 0.06, 0.03}) {
        GridFunction ms = mollify_grid(us, eps);
        double e = 0.0;
        for (std::size_t i = 0; i < ms.v.size(); ++i)
            e = std::max(e, std::fabs(ms.v[i] - us.v[i]));
        errs.push_back(e);
    }
    CHECK(errs[0] == doctest::Approx(0.017204903682497164).epsilon(1e-9));
    CHECK(errs[1] == doctest::Approx(0.0045558131668663737).epsilon(1e-9));
    CHECK(errs[2] == doctest::Approx(0.0011553736597268438).epsilon(1e-9));
    double s01 = std::log2(errs[0] / errs[1]);
    double s12 = std::log2(errs[1] / errs[2]);
    CHECK(s01 > 1.7);
    CHECK(s01 < 2.3);
    CHECK(s12 > 1.7);
    CHECK(s12 < 2.3);

    CHECK_THROWS_AS(mollify_grid(uc, 0.6), param_error);
}

TEST_CASE("smoothed densities agree with the base bit for bit outside the core") {
    Density base = parse_integrand("power_regularized(p=1.5)");
    double t0 = base->t0();
    RngStream rng(5);
    std::vector<Vec> inner, outer;
    for (int i = 0; i < 200; ++i) {
        Vec d = seeded_unit_vector(2, rng);
        double r = rng.uniform(0.01, t0 + 2.0 - 1e-9);
        inner.push_back({r * d[0], r * d[1]});
        double ro = rng.uniform(t0 + 2.0, t0 + 30.0);
        outer.push_back({ro * d[0], ro * d[1]});
    }

    std::vector<double> gaps;
    for (int k : {4, 8, 16, 32}) {
        Density fk = build_fk(base, k, t0);
        double gap = 0.0;
        for (const auto& x : inner)
            gap = std::max(gap, std::fabs(fk->eval(x) - base->eval(x)));
        gaps.push_back(gap);
        for (const auto& x : outer) {
            CHECK(fk->eval(x) == base->eval(x));
            Vec gk = fk->grad(x), gb = base->grad(x);
            CHECK(gk[0] == gb[0]);
            CHECK(gk[1] == gb[1]);
        }
    }
    CHECK(gaps[0] == doctest::Approx(0.079977049589028848).epsilon(1e-9));
    CHECK(gaps[3] == doctest::Approx(0.0015795609474835715).epsilon(1e-9));
    for (std::size_t i = 1; i < gaps.size(); ++i) CHECK(gaps[i] < gaps[i - 1]);
    CHECK(std::log2(gaps[0] / gaps[3]) / 3.0 > 1.7);

    int kstar = detect_k_star(base, t0);
    CHECK(kstar >= 1);
    Density fks = build_fk(base, kstar, t0);
    double gs = 0.0;
    for (const auto& x : inner)
        gs = std::max(gs, std::fabs(fks->eval(x) - base->eval(x)));
    CHECK(gs <= 1.0);
}

TEST_CASE("uniformly convex perturbation of the smoothed density") {
    Density base = parse_integrand("power_regularized(p=1.5)");
    double t0 = base->t0();
    const int k = 8;
    Density fk = build_fk(base, k, t0);
    Density ft = build_ftilde_k(fk, k, t0);
    double s0 = t0 + 2.0;

    RngStream rng(17);
    for (int i = 0; i < 100; ++i) {
        Vec d = seeded_unit_vector(2, rng);
        double r = rng.uniform(0.0, 3.0 * s0);
        Vec x = {r * d[0], r * d[1]};
        double want = fk->eval(x) + perturbation_h(norm2(x) / s0) / k;
        CHECK(ft->eval(x) == want);
    }
    // the added Hessian at the origin is h''(0)/(k s0^2) times the identity
    Vec lam = {0.3, 0.9};
    double dq = ft->hess_quadform({0.0, 0.0}, lam) - fk->hess_quadform({0.0, 0.0}, lam);
    CHECK(nearly_equal(dq, 1.5 / (k * s0 * s0) * dot(lam, lam), 1e-12));
}

TEST_CASE("energy convergence table: Jensen dominance and shrinking gaps") {
    Density f = parse_integrand("power_regularized(p=1.5)");
    double h = 1.0 / 64;
    Vec eps_list = {8 * h, 4 * h, 2 * h};

    GridFunction uaff = make_grid(64, [](double x, double y) { return x + 0.5 * y; });
    auto rows = energy_convergence_check(f, uaff, 0.15, eps_list);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        // affine data: mollification is exact, so the inner integral is the
        // plain local energy no matter the radius of smoothing
        CHECK(r.inner == doctest::Approx(0.12737825078437828).epsilon(1e-12));
        CHECK(r.gap >= -1e-10);
    }
    CHECK(rows[0].gap == doctest::Approx(0.30678423780461228).epsilon(1e-9));
    CHECK(rows[2].gap == doctest::Approx(0.066380215197489323).epsilon(1e-9));
    CHECK(rows[0].gap > rows[1].gap);
    CHECK(rows[1].gap > rows[2].gap);

    GridFunction ubmp = make_grid(64, [](double x, double y) {
        return std::sin(M_PI * x) * std::sin(M_PI * y);
    });
    auto rows2 = energy_convergence_check(f, ubmp, 0.15, eps_list);
    for (const auto& r : rows2) CHECK(r.gap >= -1e-10);
    CHECK(rows2[0].gap > rows2[1].gap);
    CHECK(rows2[1].gap > rows2[2].gap);
    CHECK(rows2[0].gap == doctest::Approx(0.52749621204441799).epsilon(1e-9));
}
