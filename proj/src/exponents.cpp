#include "sg/exponents.hpp"

#include <cmath>

#include "sg/util.hpp"

namespace sg {

double two_star_default(int n, double beta) {
    if (n < 2) throw param_error("two_star_default: need n >= 2");
    if (n > 2) return 2.0 * n / (n - 2.0);
    if (!(beta > 0.0 && beta < 1.0))
        throw param_error("two_star_default: planar case needs beta in (0,1)");
    return 2.0 / (1.0 - beta) * 1.25;
}

ExponentSet corollary_conditions(ExponentSet x) {
    if (x.n < 2) throw param_error("corollary_conditions: need n >= 2");
    if (!(x.p >= 1.0)) throw param_error("corollary_conditions: need p >= 1");
    if (!(x.q >= x.p)) throw param_error("corollary_conditions: need q >= p");

    x.r = 2.0 * x.p - x.q;
    x.s = (x.p / x.q) * (x.q - 2.0) + 2.0;
    x.pq_ok = x.q / x.p < 1.0 + 2.0 / x.n;
    double denom = (x.n + 2.0) * x.p - x.n * x.q;
    x.theta_pq = x.pq_ok ? 2.0 / denom : 0.0;
    x.aniso_ok = x.p > 2.0 * x.n / (x.n + 2.0);
    x.ex1_ok = x.s < (2.0 / x.n) * x.p + x.r;
    x.ex2_trivial = x.p >= x.n;
    x.ex2_ok = x.ex2_trivial || x.q < x.n * x.p / (x.n - x.p);
    return x;
}

RemarkThresholds remark_comparison(const ExponentSet& x) {
    if (!(x.p <= x.q)) throw param_error("remark_comparison: need p <= q");
    ExponentSet d = corollary_conditions(x);
    return {(1.0 + 2.0 / d.n) * d.r, (2.0 / d.n) * d.p + d.r};
}

double ab_margin(int n, double mu, double alpha, double beta) {
    return 2.0 - mu - alpha * (n * beta - mu);
}

double theta_exponent(int n, double mu, double alpha, double beta) {
    double margin = ab_margin(n, mu, alpha, beta);
    if (!(margin > 0.0)) throw numeric_error("theta_exponent: exponent condition fails");
    return (2.0 - mu) * alpha / margin;
}

bool ab_holds_via_interpolation(int n, double mu, double alpha, double beta) {
    double denom = 2.0 - n * beta;
    if (!(denom > 0.0)) return false;
    double vartheta = (2.0 - mu) / denom;
    double lambda = 1.0 / alpha;
    return vartheta * (1.0 - lambda) < 1.0;
}

}  // namespace sg
