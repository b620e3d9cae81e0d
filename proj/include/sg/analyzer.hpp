#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sg/integrand.hpp"

namespace sg {

// sampled Hessian eigenvalue range per radius: g1 = smallest quadratic-form
// ratio seen over the direction set, g2 = largest; f_min/f_max bracket the
// density itself on the sphere of that radius
struct GrowthBoundSamples {
    Vec t;
    Vec g1, g2;
    Vec f_min, f_max;
};

// probes Q(t d, lambda)/|lambda|^2 with a per-direction probe triple
// (seeded, radial, tangential); throws numeric_error with a witness if any
// probe dips below -1e-12 (the density is not convex there)
GrowthBoundSamples sample_growth_bounds(const EnergyDensity& f, const Vec& t_grid,
                                        int n_dirs, std::uint64_t seed);

struct CheckResult {
    std::string id;   // H1..H5, AB
    bool pass = false;
    std::string detail;
    std::map<std::string, double> stats;  // named scalars for reporting
};

// envelope consistency: declared bounds contain the sampled eigenvalue range
// (with relative slack), samples stay positive, and a radial profile must
// reproduce the samples to 1e-8
CheckResult check_H1(const EnergyDensity& f, const GrowthBoundSamples& s,
                     double slack = 1e-9);

// value-form monotonicity on the official upper series: t^mu g2(t)
// non-increasing and t g2(t) non-decreasing along the grid
CheckResult check_H2(const Vec& t, const Vec& g2, double mu, double slack = 1e-9);

// g2^(2/two_star) <= C1 t^(2 beta) g1 on the grid. C1 <= 0 fits the smallest
// feasible constant; a requirement still growing at the grid end fails
CheckResult check_H3(const Vec& t, const Vec& g1, const Vec& g2, int n, double beta,
                     double two_star, double C1 = -1.0, double slack = 1e-9);

// g2(t) t^2 <= C2 (1 + f)^alpha with f the sampled minimum on each sphere
CheckResult check_H4(const Vec& t, const Vec& g2, const Vec& f_min, double alpha,
                     double C2 = -1.0, double slack = 1e-9);

// superlinearity f/|xi| -> infinity, probed on its own radius ladder growing
// tenfold per step from t_start (capped at 1e100)
CheckResult check_H5(const EnergyDensity& f, double t_start, std::uint64_t seed);

struct AbResult {
    bool ok = false;
    double margin = 0.0;  // 2 - mu - alpha (n beta - mu)
    double theta = 0.0;   // (2 - mu) alpha / margin, when positive
};

// applicability condition with parameter validation (mu in [0,1], alpha > 1,
// beta in (1/n, 2/n)); cross-checked against the interpolation-pair route
AbResult check_ab(int n, double mu, double alpha, double beta);
// bare arithmetic, no range checks: margin and exponent only
AbResult check_ab_arithmetic(int n, double mu, double alpha, double beta);

// fitted structural exponents from a (t, series) table
double fit_mu(const Vec& t, const Vec& g2);
double fit_alpha(const Vec& t, const Vec& g2, const Vec& f_min);
// smallest beta the third inequality tolerates given the tail slopes; for
// n = 2 with the defaulted two_star this is a fixed point in beta
double fit_beta_lower(const Vec& t, const Vec& g1, const Vec& g2, int n,
                      std::optional<double> two_star);

struct HypothesisParams {
    double mu = -1.0;        // < 0: fitted from the upper envelope
    double alpha = -1.0;     // < 0: fitted
    double beta = -1.0;      // < 0: midpoint of the admissible window
    double two_star = -1.0;  // < 0: two_star_default(n, beta)
    double C1 = -1.0;        // < 0: smallest feasible
    double C2 = -1.0;
    double t_lo = -1.0;      // < 0: t0 + 1
    double t_hi = 1e4;
    int grid_points = 200;
    int n_dirs = 256;
    std::uint64_t seed = 0x5eed5106ull;
    double slack = 1e-9;
};

struct AnalysisReport {
    std::string integrand_id;
    int n = 0;
    HypothesisParams used;  // every parameter resolved to its final value
    std::vector<CheckResult> checks;
    double theta = 0.0;
    bool pass = false;
    // window the automatic beta selection worked with (empty -> fail)
    double beta_lo = 0.0, beta_hi = 0.0;
    GrowthBoundSamples samples;
    Vec g1_env, g2_env;           // official envelope series on samples.t
    std::string envelope_source;  // "exact", "hint", or "sampled"
    std::optional<ExponentSet> exps;
};

AnalysisReport analyze(const Density& f, HypothesisParams params = {});

// power-growth sandwich: lower(t) <= f <= upper(t) for t >= t_bar, with
// lower = m/(2(p-1)) t^p (p > 1) or (m/2) t log t (p = 1)
// upper = 2M/(q-1) t^q (q > 1) or 2 M t log t (q = 1)
std::function<double(double)> make_pfq_lower(double p, double m);
std::function<double(double)> make_pfq_upper(double q, double M);

struct PfqResult {
    bool pass = false;
    double t_bar = 0.0;       // threshold actually used
    double worst_lower = 0.0; // smallest f/lower ratio beyond t_bar
    double worst_upper = 0.0; // smallest upper/f ratio beyond t_bar
    std::string detail;
};

// t_bar <= 0 picks the smallest grid radius from which both bounds hold
PfqResult pfq_bounds_check(const EnergyDensity& f, double p, double q, double m,
                           double M, double t_bar, const Vec& t_grid,
                           int n_dirs = 64, std::uint64_t seed = 0x5eed5106ull);
PfqResult pfq_bounds_check(const std::function<double(double)>& f_min_of_t,
                           const std::function<double(double)>& f_max_of_t, double p,
                           double q, double m, double M, double t_bar, const Vec& t_grid);

}  // namespace sg
