#include "sg/apriori.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sg {

IterationSchedule iteration_schedule(int n, double beta, double two_star, int i_max) {
    if (n < 2) throw param_error("iteration_schedule: n must be at least 2");
    if (two_star <= 0.0) {
        if (n == 2)
            throw param_error("iteration_schedule: two_star must be given explicitly for n = 2");
        two_star = 2.0 * n / (n - 2.0);
    }
    if (!(two_star > 2.0)) throw param_error("iteration_schedule: two_star must exceed 2");
    if (!(beta > 0.0 && beta < 1.0)) throw param_error("iteration_schedule: beta must be in (0,1)");
    if (i_max < 1) throw param_error("iteration_schedule: i_max must be positive");

    IterationSchedule sch;
    sch.n = n;
    sch.beta = beta;
    sch.two_star = two_star;
    const double r = two_star / 2.0;
    const double b = 2.0 * beta * two_star / (two_star - 2.0);  // fixed point of the recursion
    sch.limit = 2.0 - b;
    sch.admissible = beta < 1.0 - 2.0 / two_star;

    sch.deltas.resize(i_max + 1);
    sch.closed_form.resize(i_max + 1);
    sch.normalized.resize(i_max + 1);
    sch.deltas[0] = 2.0;
    for (int i = 0; i < i_max; ++i) sch.deltas[i + 1] = (sch.deltas[i] - 2.0 * beta) * r;
    for (int i = 0; i <= i_max; ++i) {
        sch.closed_form[i] = std::pow(r, i) * (2.0 - b) + b;
        sch.normalized[i] = sch.deltas[i] * std::pow(1.0 / r, i);
    }
    return sch;
}

namespace {

struct BallSums {
    double sup = 0.0;       // over nodes inside B_rho
    double mass = 0.0;      // integral of v over cells with center in B_R
    double mass_pow = 0.0;  // integral of v^lambda over the same cells
};

BallSums ball_sums(const std::function<double(double, double)>& v, double rho, double R, int N,
                   double lambda) {
    BallSums out;
    const double h = 1.0 / N;
    bool sup_any = false, cell_any = false;
    for (int j = 0; j <= N; ++j) {
        for (int i = 0; i <= N; ++i) {
            const double x = i * h - 0.5, y = j * h - 0.5;
            if (x * x + y * y <= rho * rho) {
                const double val = v(i * h, j * h);
                if (!std::isfinite(val) || val < 0.0)
                    throw numeric_error("interpolation_lemma_check: field not finite nonnegative");
                out.sup = std::max(out.sup, val);
                sup_any = true;
            }
        }
    }
    for (int cj = 0; cj < N; ++cj) {
        for (int ci = 0; ci < N; ++ci) {
            const double cx = (ci + 0.5) * h - 0.5, cy = (cj + 0.5) * h - 0.5;
            if (cx * cx + cy * cy > R * R) continue;
            const double val = v((ci + 0.5) * h, (cj + 0.5) * h);
            out.mass += h * h * val;
            out.mass_pow += h * h * std::pow(val, lambda);
            cell_any = true;
        }
    }
    if (!sup_any || !cell_any)
        throw param_error("interpolation_lemma_check: radii too small for the grid");
    return out;
}

}  // namespace

InterpolationCheck interpolation_lemma_check(
    const std::vector<std::function<double(double, double)>>& family, double theta,
    double lambda, const std::vector<std::pair<double, double>>& radius_pairs, int N) {
    if (family.empty()) throw param_error("interpolation_lemma_check: empty family");
    if (!(theta >= 1.0)) throw param_error("interpolation_lemma_check: theta must be at least 1");
    const double lam_lo = (theta - 1.0) / theta;
    if (!(lambda > lam_lo && lambda < 1.0))
        throw param_error("interpolation_lemma_check: lambda must lie in ((theta-1)/theta, 1)");
    if (radius_pairs.empty()) throw param_error("interpolation_lemma_check: no radius pairs");
    if (N < 8) throw param_error("interpolation_lemma_check: N must be at least 8");
    for (const auto& pr : radius_pairs)
        if (!(pr.first > 0.0 && pr.first < pr.second && pr.second < 0.5))
            throw param_error("interpolation_lemma_check: need 0 < rho < R < 1/2");

    InterpolationCheck chk;
    chk.theta = theta;
    chk.lambda = lambda;
    const double n_dim = 2.0;
    const double gamma = theta * (1.0 - lambda);
    double premise_c = 0.0, fitted_c = 0.0;
    for (const auto& v : family) {
        for (const auto& pr : radius_pairs) {
            const double gap_n = std::pow(pr.second - pr.first, n_dim);
            const BallSums bs = ball_sums(v, pr.first, pr.second, N, lambda);
            if (bs.mass <= 0.0 || bs.mass_pow <= 0.0)
                throw numeric_error("interpolation_lemma_check: vanishing mass in B_R");
            premise_c = std::max(premise_c, std::pow(bs.sup, 1.0 / theta) * gap_n / bs.mass);
            const double lhs = std::pow(bs.sup, (1.0 - theta * (1.0 - lambda)) / theta);
            fitted_c = std::max(fitted_c, lhs * gap_n / bs.mass_pow);
        }
    }
    chk.premise_c = premise_c;
    chk.fitted_c = fitted_c;
    chk.proof_c = premise_c * std::pow(2.0, n_dim / (1.0 - gamma));
    chk.premise_ok = std::isfinite(premise_c) && premise_c > 0.0;
    chk.conclusion_ok = chk.premise_ok && std::isfinite(fitted_c) && fitted_c <= chk.proof_c;
    return chk;
}

std::vector<G1G2Row> g1g2_integral_check(const std::function<double(double)>& g1,
                                         const std::function<double(double)>& g2, double beta,
                                         double two_star, const Vec& gamma_list,
                                         const Vec& t_grid) {
    if (!(two_star > 2.0)) throw param_error("g1g2_integral_check: two_star must exceed 2");
    if (!(beta > 0.0 && beta < 1.0)) throw param_error("g1g2_integral_check: beta in (0,1)");
    if (gamma_list.empty() || t_grid.empty())
        throw param_error("g1g2_integral_check: empty gamma list or t grid");
    for (double t : t_grid)
        if (!(t > 0.0)) throw param_error("g1g2_integral_check: t grid must be positive");

    std::vector<G1G2Row> rows;
    for (double gamma : gamma_list) {
        if (gamma < 0.0) throw param_error("g1g2_integral_check: gamma must be >= 0");
        const double e = gamma / 2.0 + 1.0 - beta;
        G1G2Row row;
        row.gamma = gamma;
        double c3 = std::numeric_limits<double>::infinity();
        double prev_t = 0.0, acc = 0.0;
        for (double t : t_grid) {
            acc += integrate_adaptive(
                [&](double s) {
                    const double g = g1(1.0 + s);
                    if (!(g >= 0.0)) throw numeric_error("g1g2_integral_check: negative g1");
                    return std::pow(1.0 + s, (gamma - 2.0) / 2.0) * s * std::sqrt(g);
                },
                prev_t, t, 1e-10);
            prev_t = t;
            const double rhs = 1.0 + acc;
            const double bracket =
                1.0 + std::pow(g2(1.0 + t), 1.0 / two_star) * std::pow(1.0 + t, e) / (e * e);
            if (!(bracket > 0.0) || !std::isfinite(bracket))
                throw numeric_error("g1g2_integral_check: bracket not positive finite");
            c3 = std::min(c3, rhs / bracket);
            row.lhs_end = bracket;
            row.rhs_end = rhs;
        }
        row.c3_max = c3;
        rows.push_back(row);
    }
    return rows;
}

std::vector<PowerLemmaRow> lemmapaolo_check(const Vec& alpha_list, double alpha0,
                                            const Vec& t_grid) {
    if (!(alpha0 > 0.0)) throw param_error("lemmapaolo_check: alpha0 must be positive");
    if (alpha_list.empty() || t_grid.empty())
        throw param_error("lemmapaolo_check: empty alpha list or t grid");
    std::vector<PowerLemmaRow> rows;
    for (double a : alpha_list) {
        if (!(a >= alpha0)) throw param_error("lemmapaolo_check: alpha below alpha0");
        PowerLemmaRow row;
        row.alpha = a;
        double c = 0.0;
        for (double t : t_grid) {
            if (!(t >= 0.0)) throw param_error("lemmapaolo_check: t grid must be >= 0");
            // closed form of int_0^t (1+s)^{a-2} s ds
            double I;
            if (std::abs(a - 1.0) < 1e-12) {
                I = t - std::log1p(t);
            } else {
                I = (std::pow(1.0 + t, a) - 1.0) / a -
                    (std::pow(1.0 + t, a - 1.0) - 1.0) / (a - 1.0);
            }
            const double need = std::pow(1.0 + t, a) / (a * a * (1.0 + I));
            if (!std::isfinite(need)) throw numeric_error("lemmapaolo_check: overflow in (1+t)^a");
            c = std::max(c, need);
        }
        row.c_min = c;
        rows.push_back(row);
    }
    return rows;
}

namespace {

// log-log interpolation of the sampled upper eigenvalue envelope, clamped to
// the sampled range at both ends
double g2_from_samples(const GrowthBoundSamples& s, double t) {
    if (s.t.empty()) throw param_error("step1_inequality_probe: empty samples");
    if (t <= s.t.front()) return s.g2.front();
    if (t >= s.t.back()) return s.g2.back();
    std::size_t hi = 1;
    while (hi < s.t.size() && s.t[hi] < t) ++hi;
    const double x0 = std::log(s.t[hi - 1]), x1 = std::log(s.t[hi]);
    const double y0 = std::log(s.g2[hi - 1]), y1 = std::log(s.g2[hi]);
    const double w = (std::log(t) - x0) / (x1 - x0);
    return std::exp(y0 * (1.0 - w) + y1 * w);
}

}  // namespace

Step1Probe step1_inequality_probe(const SolveResult& result, const GrowthBoundSamples& samples,
                                  double beta, double rho, double R) {
    if (!(rho > 0.0 && rho < R && R < 0.5))
        throw param_error("step1_inequality_probe: need 0 < rho < R < 1/2");
    const double n_dim = 2.0;
    if (!(beta > 0.0 && n_dim * beta < 2.0))
        throw param_error("step1_inequality_probe: need 0 < beta < 2/n");

    const GridFunction& u = result.u;
    const double h = u.h();
    Step1Probe probe;
    double sup = -1.0, integral = 0.0;
    bool any_outer = false, active = false;
    for_each_cell_quadrature(u, [&](int ci, int cj, double, double, double ux, double uy,
                                    double w) {
        const double cx = (ci + 0.5) * h - 0.5, cy = (cj + 0.5) * h - 0.5;
        const double r2 = cx * cx + cy * cy;
        const double du = std::sqrt(ux * ux + uy * uy);
        const double trunc = 1.0 + std::max(du - 1.0, 0.0);
        if (du > 1.0) active = true;
        if (r2 <= rho * rho) sup = std::max(sup, trunc);
        if (r2 <= R * R) {
            integral += w * trunc * trunc * g2_from_samples(samples, trunc);
            any_outer = true;
        }
    });
    if (sup < 0.0 || !any_outer)
        throw param_error("step1_inequality_probe: radii enclose no cell centers");
    probe.truncation_active = active;
    probe.lhs = std::pow(sup, 2.0 - n_dim * beta);
    probe.rhs = integral / std::pow(R - rho, n_dim);
    if (!(probe.rhs > 0.0)) throw numeric_error("step1_inequality_probe: vanishing right side");
    probe.c4_min = probe.lhs / probe.rhs;
    return probe;
}

}  // namespace sg
