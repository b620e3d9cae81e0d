#pragma once

#include <functional>
#include <utility>

#include "sg/analyzer.hpp"
#include "sg/solver.hpp"

namespace sg {

// test-function exponent recursion delta_{i+1} = (delta_i - 2 beta) 2*/2 from
// delta_0 = 2, with the closed form and the normalized limit alongside
struct IterationSchedule {
    int n = 0;
    double beta = 0.0;
    double two_star = 0.0;
    Vec deltas;       // recursion, deltas[i] = delta_i
    Vec closed_form;  // same indices, explicit formula
    Vec normalized;   // delta_i * (2/2*)^i
    double limit = 0.0;   // 2 - 2 beta 2*/(2* - 2)
    bool admissible = false;  // beta < 1 - 2/2*, i.e. the sequence never drops below 2
};

// two_star <= 0 requests the Sobolev exponent 2n/(n-2) (n > 2 only)
IterationSchedule iteration_schedule(int n, double beta, double two_star, int i_max);

// sup-vs-mean interpolation: if the premise
//   sup^{1/theta} <= c (R-rho)^{-n} int |v|
// holds with constant premise_c, the lambda-form
//   sup^{(1-theta(1-lambda))/theta} <= c_lambda (R-rho)^{-n} int |v|^lambda
// follows with c_lambda <= premise_c * 2^{n/(1-gamma)}, gamma = theta(1-lambda)
struct InterpolationCheck {
    double theta = 0.0;
    double lambda = 0.0;
    double premise_c = 0.0;  // minimal constant making the premise true
    double fitted_c = 0.0;   // minimal uniform constant over all pairs and fields
    double proof_c = 0.0;    // premise-driven bound
    bool premise_ok = false;
    bool conclusion_ok = false;  // fitted_c <= proof_c and finite
};

InterpolationCheck interpolation_lemma_check(
    const std::vector<std::function<double(double, double)>>& family, double theta,
    double lambda, const std::vector<std::pair<double, double>>& radius_pairs, int N);

// largest C3 for which
//   C3 [1 + g2(1+t)^{1/2*} (1+t)^{gamma/2+1-beta} / (gamma/2+1-beta)^2]
//     <= 1 + int_0^t (1+s)^{(gamma-2)/2} s sqrt(g1(1+s)) ds
// holds on the whole t grid
struct G1G2Row {
    double gamma = 0.0;
    double c3_max = 0.0;
    double lhs_end = 0.0;  // bracket at the last grid point
    double rhs_end = 0.0;
};

std::vector<G1G2Row> g1g2_integral_check(const std::function<double(double)>& g1,
                                         const std::function<double(double)>& g2, double beta,
                                         double two_star, const Vec& gamma_list,
                                         const Vec& t_grid);

// minimal c with (1+t)^alpha <= c alpha^2 (1 + int_0^t (1+s)^{alpha-2} s ds)
struct PowerLemmaRow {
    double alpha = 0.0;
    double c_min = 0.0;
};

std::vector<PowerLemmaRow> lemmapaolo_check(const Vec& alpha_list, double alpha0,
                                            const Vec& t_grid);

// discrete probe of the first a-priori step on a computed minimiser:
//   (sup over B_rho of 1+(|Du|-1)_+)^{2-n beta}
//     <= c4 (R-rho)^{-n} int over B_R of (1+(|Du|-1)_+)^2 g2(1+(|Du|-1)_+)
struct Step1Probe {
    double lhs = 0.0;
    double rhs = 0.0;     // weighted integral, (R-rho)^{-n} included
    double c4_min = 0.0;  // lhs / rhs
    bool truncation_active = false;  // some |Du| exceeded 1
};

Step1Probe step1_inequality_probe(const SolveResult& result, const GrowthBoundSamples& samples,
                                  double beta, double rho, double R);

}  // namespace sg
