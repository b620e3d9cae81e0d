#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sg/analyzer.hpp"
#include "sg/apriori.hpp"
#include "sg/integrand.hpp"
#include "sg/solver.hpp"
#include "sg/util.hpp"

using namespace sg;

namespace {

const std::vector<std::pair<double, double>> kRadiusPairs = {
    {0.10, 0.25}, {0.15, 0.35}, {0.20, 0.45}, {0.10, 0.35}, {0.15, 0.45}, {0.10, 0.45}};

// radial spike centered inside the unit square; steepness gamma
std::function<double(double, double)> spike(double cx, double cy, double gamma) {
    return [=](double x, double y) {
        return std::pow(1.0 + std::hypot(x - cx, y - cy), -gamma);
    };
}

std::vector<std::function<double(double, double)>> spike_family(double gamma) {
    return {spike(0.5, 0.5, gamma), spike(0.4, 0.6, gamma), spike(0.62, 0.45, gamma)};
}

}  // namespace

TEST_CASE("iteration schedule: recursion matches the closed form") {
    // Sobolev exponent requested: n = 4 gives 2* = 4
    IterationSchedule sch = iteration_schedule(4, 3.0 / 8.0, 0.0, 200);
    CHECK(sch.two_star == 4.0);
    REQUIRE(sch.deltas.size() == 201);
    CHECK(sch.deltas[0] == 2.0);
    CHECK(sch.deltas[1] == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(sch.limit == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sch.admissible);  // 3/8 < 1 - 2/4
    for (std::size_t i = 0; i < sch.deltas.size(); ++i) {
        const double scale = std::max(1.0, std::fabs(sch.deltas[i]));
        CHECK(std::fabs(sch.deltas[i] - sch.closed_form[i]) <= 1e-9 * scale);
    }
    // normalized sequence converges to the limit 2 - n beta
    CHECK(std::fabs(sch.normalized[200] - 0.5) <= 1e-6);
    CHECK(sch.limit == doctest::Approx(2.0 - 4 * 3.0 / 8.0).epsilon(1e-15));

    IterationSchedule s3 = iteration_schedule(3, 0.5, 6.0, 200);
    CHECK(s3.deltas[1] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(s3.limit == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s3.admissible);  // 1/2 < 2/3
    CHECK(std::fabs(s3.normalized[200] - 0.5) <= 1e-6);
    CHECK(s3.limit == doctest::Approx(2.0 - 3 * 0.5).epsilon(1e-15));

    // near the 2/n endpoint the limit approaches zero from above
    IterationSchedule tight = iteration_schedule(3, 0.66, 6.0, 50);
    CHECK(tight.limit == doctest::Approx(2.0 - 3 * 0.66).epsilon(1e-12));
    CHECK(tight.limit > 0.0);
    CHECK(tight.limit < 0.025);
}

TEST_CASE("iteration schedule: admissibility boundary and validation") {
    // at beta = 1 - 2/2* the sequence is frozen at its fixed point 2
    IterationSchedule edge = iteration_schedule(3, 0.75, 8.0, 40);
    CHECK_FALSE(edge.admissible);
    CHECK(edge.limit == 0.0);
    for (double d : edge.deltas) CHECK(d == 2.0);

    // beyond it the sequence crosses below 2 and the normalized limit is negative
    IterationSchedule far = iteration_schedule(3, 0.7, 6.0, 60);
    CHECK_FALSE(far.admissible);
    CHECK(far.limit < 0.0);
    CHECK(far.normalized.back() < 0.0);
    CHECK(far.deltas[5] < 2.0);

    CHECK_THROWS_AS(iteration_schedule(2, 0.3, 0.0, 10), param_error);   // no Sobolev 2* for n = 2
    CHECK_THROWS_AS(iteration_schedule(3, 0.3, 2.0, 10), param_error);   // 2* must exceed 2
    CHECK_THROWS_AS(iteration_schedule(3, 0.0, 6.0, 10), param_error);
    CHECK_THROWS_AS(iteration_schedule(3, 1.0, 6.0, 10), param_error);
    CHECK_THROWS_AS(iteration_schedule(1, 0.3, 4.0, 10), param_error);
    CHECK_THROWS_AS(iteration_schedule(3, 0.3, 6.0, 0), param_error);

    // explicit 2* works for n = 2
    IterationSchedule planar = iteration_schedule(2, 0.4, 5.0, 30);
    CHECK(planar.admissible);  // 0.4 < 1 - 2/5
    CHECK(planar.limit == doctest::Approx(2.0 - 2.0 * 0.4 * 5.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("interpolation check is exact for constant fields") {
    std::vector<std::function<double(double, double)>> fam = {
        [](double, double) { return 1.0; }};
    InterpolationCheck chk = interpolation_lemma_check(fam, 1.0, 0.5, kRadiusPairs, 64);
    // sup = 1 and v^lambda = v, so premise and fitted constants coincide
    CHECK(chk.fitted_c == chk.premise_c);
    CHECK(chk.premise_c == doctest::Approx(0.19239263803680978).epsilon(1e-12));
    CHECK(chk.proof_c == doctest::Approx(16.0 * chk.premise_c).epsilon(1e-14));
    CHECK(chk.premise_ok);
    CHECK(chk.conclusion_ok);

    CHECK_THROWS_AS(interpolation_lemma_check({}, 1.0, 0.5, kRadiusPairs, 64), param_error);
    CHECK_THROWS_AS(interpolation_lemma_check(fam, 0.9, 0.5, kRadiusPairs, 64), param_error);
    CHECK_THROWS_AS(interpolation_lemma_check(fam, 1.5, 1.0 / 3.0, kRadiusPairs, 64),
                    param_error);  // lambda at (theta-1)/theta
    CHECK_THROWS_AS(interpolation_lemma_check(fam, 1.0, 1.0, kRadiusPairs, 64), param_error);
    CHECK_THROWS_AS(interpolation_lemma_check(fam, 1.0, 0.5, {}, 64), param_error);
    CHECK_THROWS_AS(interpolation_lemma_check(fam, 1.0, 0.5, {{0.3, 0.2}}, 64), param_error);
    CHECK_THROWS_AS(interpolation_lemma_check(fam, 1.0, 0.5, {{0.2, 0.5}}, 64), param_error);
    CHECK_THROWS_AS(interpolation_lemma_check(fam, 1.0, 0.5, kRadiusPairs, 7), param_error);
    CHECK_THROWS_AS(interpolation_lemma_check(fam, 1.0, 0.5, {{0.001, 0.002}}, 64),
                    param_error);  // no cell center that deep inside

    std::vector<std::function<double(double, double)>> neg = {
        [](double, double) { return -1.0; }};
    CHECK_THROWS_AS(interpolation_lemma_check(neg, 1.0, 0.5, kRadiusPairs, 64), numeric_error);
    std::vector<std::function<double(double, double)>> zero = {
        [](double, double) { return 0.0; }};
    CHECK_THROWS_AS(interpolation_lemma_check(zero, 1.0, 0.5, kRadiusPairs, 64), numeric_error);
}

TEST_CASE("interpolation constant is uniform for the radial spike family") {
    const double theta = 1.5;
    const std::vector<double> lambdas = {0.75, 0.5, 0.4, 0.34};  // down toward (theta-1)/theta
    std::vector<InterpolationCheck> sweep;
    for (double lam : lambdas)
        sweep.push_back(interpolation_lemma_check(spike_family(theta * (1.0 - lam)), theta, lam,
                                                  kRadiusPairs, 64));
    CHECK(sweep[0].fitted_c == doctest::Approx(0.20687222817811146).epsilon(1e-9));
    CHECK(sweep[1].fitted_c == doctest::Approx(0.21205131078385892).epsilon(1e-9));
    for (const InterpolationCheck& chk : sweep) {
        CHECK(chk.premise_ok);
        CHECK(chk.conclusion_ok);
        CHECK(std::isfinite(chk.fitted_c));
        // a single uniform constant serves every radius pair and lambda
        CHECK(chk.fitted_c > 0.20);
        CHECK(chk.fitted_c < 0.22);
        CHECK(chk.fitted_c <= chk.proof_c);
    }
    // the proof-form constant blows up as lambda drops toward (theta-1)/theta
    for (std::size_t i = 1; i < sweep.size(); ++i)
        CHECK(sweep[i].proof_c > sweep[i - 1].proof_c);
    CHECK(sweep[3].proof_c > 1e50);

    // grid refinement moves the fitted constant by well under 5%
    const double gamma = theta * (1.0 - 0.75);
    InterpolationCheck fine =
        interpolation_lemma_check(spike_family(gamma), theta, 0.75, kRadiusPairs, 256);
    CHECK(fine.fitted_c == doctest::Approx(0.20708368348135517).epsilon(1e-9));
    CHECK(std::fabs(fine.fitted_c - sweep[0].fitted_c) / sweep[0].fitted_c < 0.05);
}

TEST_CASE("g1g2 integral table matches the closed-form oracle") {
    auto one = [](double) { return 1.0; };
    const double beta = 1.0 / 3.0, two_star = 6.0;
    const Vec gammas = {0.0, 2.0, 8.0, 32.0};
    const Vec grid = logspace(1e-2, 1e2, 25);
    std::vector<G1G2Row> rows = g1g2_integral_check(one, one, beta, two_star, gammas, grid);
    REQUIRE(rows.size() == 4);

    const double pinned[4] = {0.27757703615066248, 0.6594970914979339, 0.92889771664695853,
                              0.99389440508870508};
    for (int k = 0; k < 4; ++k) {
        const G1G2Row& row = rows[k];
        CHECK(row.gamma == gammas[k]);
        CHECK(row.c3_max == doctest::Approx(pinned[k]).epsilon(1e-9));
        CHECK(row.c3_max > 0.25);  // bounded away from zero over the whole sweep

        // with g1 = g2 = 1 both sides have closed forms
        const double e = row.gamma / 2.0 + 1.0 - beta;
        double oracle_c3 = std::numeric_limits<double>::infinity();
        for (double t : grid) {
            const double lhs = 1.0 + std::pow(1.0 + t, e) / (e * e);
            const double rhs = 1.0 + oracle::power_integral((row.gamma - 2.0) / 2.0, t);
            oracle_c3 = std::min(oracle_c3, rhs / lhs);
        }
        CHECK(row.c3_max == doctest::Approx(oracle_c3).epsilon(1e-8));
        CHECK(row.lhs_end ==
              doctest::Approx(1.0 + std::pow(1.0 + grid.back(), e) / (e * e)).epsilon(1e-12));
        CHECK(row.rhs_end ==
              doctest::Approx(1.0 + oracle::power_integral((row.gamma - 2.0) / 2.0, grid.back()))
                  .epsilon(1e-8));
    }
    for (int k = 1; k < 4; ++k) CHECK(rows[k].c3_max > rows[k - 1].c3_max);

    CHECK_THROWS_AS(g1g2_integral_check(one, one, beta, 2.0, gammas, grid), param_error);
    CHECK_THROWS_AS(g1g2_integral_check(one, one, 0.0, two_star, gammas, grid), param_error);
    CHECK_THROWS_AS(g1g2_integral_check(one, one, 1.0, two_star, gammas, grid), param_error);
    CHECK_THROWS_AS(g1g2_integral_check(one, one, beta, two_star, {-1.0}, grid), param_error);
    CHECK_THROWS_AS(g1g2_integral_check(one, one, beta, two_star, gammas, {0.0, 1.0}),
                    param_error);
    CHECK_THROWS_AS(g1g2_integral_check(one, one, beta, two_star, {}, grid), param_error);
    auto negative = [](double) { return -1.0; };
    CHECK_THROWS_AS(g1g2_integral_check(negative, one, beta, two_star, {0.0}, {1.0}),
                    numeric_error);
}

TEST_CASE("power lemma constants match the closed form") {
    const Vec t = linspace(0.0, 100.0, 201);
    const std::vector<double> t_std(t.begin(), t.end());
    const Vec alphas = {0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0};
    std::vector<PowerLemmaRow> rows = lemmapaolo_check(alphas, 0.5, t);
    REQUIRE(rows.size() == alphas.size());

    double sup = 0.0;
    for (const PowerLemmaRow& row : rows) {
        const double want = oracle::lemmapaolo_c(row.alpha, t_std);
        CHECK(row.c_min == doctest::Approx(want).epsilon(1e-12));
        CHECK(std::isfinite(row.c_min));
        sup = std::max(sup, row.c_min);
    }
    // alpha = 2: the binding point is t = 2, where c = 9/12 exactly
    CHECK(rows[2].c_min == doctest::Approx(0.75).epsilon(1e-12));
    // the sweep's sup is finite and attained at the smallest alpha
    CHECK(sup == doctest::Approx(4.5522847498307923).epsilon(1e-9));
    CHECK(sup == rows[0].c_min);

    // t = 0 alone forces exactly c >= 1/alpha^2
    std::vector<PowerLemmaRow> at0 = lemmapaolo_check({0.5, 2.0}, 0.5, {0.0});
    CHECK(at0[0].c_min == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(at0[1].c_min == doctest::Approx(0.25).epsilon(1e-15));

    CHECK_THROWS_AS(lemmapaolo_check({0.4}, 0.5, t), param_error);  // alpha below alpha0
    CHECK_THROWS_AS(lemmapaolo_check({1.0}, 0.0, t), param_error);
    CHECK_THROWS_AS(lemmapaolo_check({}, 0.5, t), param_error);
    CHECK_THROWS_AS(lemmapaolo_check({1.0}, 0.5, {}), param_error);
    CHECK_THROWS_AS(lemmapaolo_check({1.0}, 0.5, {-1.0}), param_error);
}

TEST_CASE("step1 probe is immediately feasible for small gradients") {
    Density f = parse_integrand("power_regularized(p=1.5)");
    GrowthBoundSamples samples = sample_growth_bounds(*f, logspace(0.5, 40.0, 120), 64,
                                                      0x5eed5106ull);

    // |Du| stays below 1, so the truncation never activates and the left side is 1
    GridFunction bd = make_grid(32, [](double x, double y) { return 0.2 * (x + 0.2 * y * y); });
    SolveResult res = minimize(f, bd, 1e-8, 20000);
    REQUIRE(res.converged);
    CHECK(res.iterations <= 200);

    Step1Probe probe = step1_inequality_probe(res, samples, 0.45, 0.15, 0.35);
    CHECK(probe.lhs == 1.0);
    CHECK_FALSE(probe.truncation_active);
    CHECK(probe.rhs == doctest::Approx(12.071164686972072).epsilon(1e-9));
    CHECK(probe.c4_min == doctest::Approx(0.08284204763433145).epsilon(1e-9));
    CHECK(probe.c4_min == doctest::Approx(probe.lhs / probe.rhs).epsilon(1e-15));

    // the auxiliary bound 1 + t^2 g2(t) <= (1/g2(1) + 1) t^2 g2(t) is tight at t = 1
    for (double v : {0.5, 1.5, 2.0, samples.g2.front()}) {
        CHECK(nearly_equal(1.0 + v, (1.0 / v + 1.0) * v, 1e-15));
    }

    CHECK_THROWS_AS(step1_inequality_probe(res, samples, 0.45, 0.0, 0.35), param_error);
    CHECK_THROWS_AS(step1_inequality_probe(res, samples, 0.45, 0.35, 0.15), param_error);
    CHECK_THROWS_AS(step1_inequality_probe(res, samples, 0.45, 0.15, 0.6), param_error);
    CHECK_THROWS_AS(step1_inequality_probe(res, samples, 0.0, 0.15, 0.35), param_error);
    CHECK_THROWS_AS(step1_inequality_probe(res, samples, 1.0, 0.15, 0.35), param_error);
    CHECK_THROWS_AS(step1_inequality_probe(res, GrowthBoundSamples{}, 0.45, 0.15, 0.35),
                    param_error);
}

TEST_CASE("step1 constant is stable across a decade of scales") {
    Density f = parse_integrand("power_regularized(p=1.5)");
    GrowthBoundSamples samples = sample_growth_bounds(*f, logspace(0.5, 40.0, 120), 64,
                                                      0x5eed5106ull);
    const double beta = 0.25;  // matches the p = 1.5 growth of the right side

    const std::vector<double> scales = {1.0, std::sqrt(10.0), 10.0};
    const double pinned_c4[3] = {0.080688170334010115, 0.071013453315604422,
                                 0.069798855229849577};
    std::vector<double> c4;
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const double s = scales[k];
        GridFunction bd = make_grid(32, [s](double x, double y) { return s * (x + 0.5 * y); });
        SolveResult res = minimize(f, bd, 1e-8, 20000);
        CHECK(res.iterations == 0);  // affine data is already minimal

        Step1Probe probe = step1_inequality_probe(res, samples, beta, 0.15, 0.35);
        CHECK(probe.truncation_active);
        // |Du| = s sqrt(1.25) everywhere, so the left side has a closed form
        const double du = s * std::sqrt(1.25);
        CHECK(probe.lhs == doctest::Approx(std::pow(du, 2.0 - 2.0 * beta)).epsilon(1e-9));
        CHECK(probe.c4_min == doctest::Approx(pinned_c4[k]).epsilon(1e-9));
        c4.push_back(probe.c4_min);
    }
    CHECK(c4[1] < c4[0]);
    CHECK(c4[2] < c4[1]);
    CHECK(c4[0] / c4[2] < 1.5);  // under 50% variation across the decade
}

TEST_CASE("theta consistency when p equals q") {
    // with the substitution mu = 2-q, alpha = q/p, beta = 2/n - q/n + (q-p)/2
    // the (ab) exponent collapses to q times 2/((n+2)p - n q)
    for (int n : {2, 3, 4, 6}) {
        for (double p : {1.2, 1.5, 1.8, 2.0}) {
            const double q = p;
            const double beta_bar = 2.0 / n - q / n + (q - p) / 2.0;
            const double theta = check_ab_arithmetic(n, 2.0 - q, q / p, beta_bar).theta;
            const double theta_pq = 2.0 / ((n + 2.0) * p - n * q);
            CHECK(std::fabs(theta / q - theta_pq) <= 1e-12);
            CHECK(theta_pq == doctest::Approx(1.0 / p).epsilon(1e-15));
        }
    }
    // a genuinely anisotropic pair keeps the same identity
    const double p = 1.5, q = 1.8;
    const int n = 3;
    const double beta_bar = 2.0 / n - q / n + (q - p) / 2.0;
    const double theta = check_ab_arithmetic(n, 2.0 - q, q / p, beta_bar).theta;
    CHECK(std::fabs(theta / q - 2.0 / ((n + 2.0) * p - n * q)) <= 1e-12);
}
