#pragma once

#include <optional>
#include <string>

namespace sg {

// two-star exponent used by the iteration machinery. For n > 2 it is the
// Sobolev exponent 2n/(n-2); in the plane any value exceeding 2/(1-beta)
// works, and we take 25% headroom by default.
double two_star_default(int n, double beta);

// growth/ellipticity exponents attached to a catalog entry, plus the derived
// quantities and admissibility verdicts of the power-growth route.
struct ExponentSet {
    int n = 0;
    double p = 0.0;
    double q = 0.0;
    double m = 0.0;   // lower ellipticity constant (0 when unavailable)
    double M = 0.0;   // upper ellipticity constant

    // derived (filled by corollary_conditions)
    double r = 0.0;            // 2p - q
    double s = 0.0;            // (p/q)(q-2) + 2
    double theta_pq = 0.0;     // 2/((n+2)p - nq), when pq_ok
    bool pq_ok = false;        // q/p < 1 + 2/n
    bool aniso_ok = false;     // p > 2n/(n+2)
    bool ex1_ok = false;       // s < (2/n) p + r
    bool ex2_ok = false;       // q < np/(n-p) (trivially true once p >= n)
    bool ex2_trivial = false;  // p >= n, so no Sobolev restriction applies
};

// fills the derived fields from (n, p, q); requires n >= 2, 1 <= p <= q
ExponentSet corollary_conditions(ExponentSet x);

// thresholds on q at fixed (n, p, r): the general power-growth gap bound
// (1 + 2/n) r versus the sharper (2/n) p + r available here. first <= second,
// strictly when p < q (i.e. r < p).
struct RemarkThresholds {
    double threshold_general;
    double threshold_sharp;
};
RemarkThresholds remark_comparison(const ExponentSet& x);

// raw arithmetic of the main estimate's exponent. margin > 0 is the
// applicability condition; theta blows up as the margin shrinks.
double ab_margin(int n, double mu, double alpha, double beta);
double theta_exponent(int n, double mu, double alpha, double beta);

// equivalent route through the interpolation pair (vartheta, lambda):
// margin > 0  <=>  vartheta * (1 - lambda) < 1 with vartheta = (2-mu)/(2-n beta),
// lambda = 1/alpha. Exposed separately so the two can be cross-checked.
bool ab_holds_via_interpolation(int n, double mu, double alpha, double beta);

}  // namespace sg
