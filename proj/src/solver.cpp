#include "sg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace sg {

namespace {

const double QA = 0.5 - 0.5 / std::sqrt(3.0);
const double QB = 0.5 + 0.5 / std::sqrt(3.0);

struct QuadPoint {
    double s, t;
};
const QuadPoint QP[4] = {{QA, QA}, {QA, QB}, {QB, QA}, {QB, QB}};

// energy of the bilinear interpolant; infinite values reported through `bad`
// (cell index) instead of an exception so line searches can reject wild steps
double energy_core(const EnergyDensity& f, const GridFunction& u, int* bad_i, int* bad_j) {
    const int N = u.N;
    const double h = u.h();
    const double w = h * h * 0.25;
    double total = 0.0;
    Vec xi(2);
    for (int cj = 0; cj < N; ++cj) {
        for (int ci = 0; ci < N; ++ci) {
            const double u00 = u.at(ci, cj), u10 = u.at(ci + 1, cj);
            const double u01 = u.at(ci, cj + 1), u11 = u.at(ci + 1, cj + 1);
            for (const QuadPoint& q : QP) {
                xi[0] = ((u10 - u00) * (1 - q.t) + (u11 - u01) * q.t) / h;
                xi[1] = ((u01 - u00) * (1 - q.s) + (u11 - u10) * q.s) / h;
                const double val = f.eval(xi);
                if (!std::isfinite(val)) {
                    if (bad_i) {
                        *bad_i = ci;
                        *bad_j = cj;
                    }
                    return std::numeric_limits<double>::infinity();
                }
                total += w * val;
            }
        }
    }
    return total;
}

// energy plus its gradient with respect to every node (boundary included;
// callers mask the ring)
double energy_and_grad(const EnergyDensity& f, const GridFunction& u, Vec& grad) {
    const int N = u.N;
    const double h = u.h();
    const double w = h * h * 0.25;
    grad.assign(u.v.size(), 0.0);
    double total = 0.0;
    Vec xi(2), gf(2);
    for (int cj = 0; cj < N; ++cj) {
        for (int ci = 0; ci < N; ++ci) {
            const double u00 = u.at(ci, cj), u10 = u.at(ci + 1, cj);
            const double u01 = u.at(ci, cj + 1), u11 = u.at(ci + 1, cj + 1);
            const std::size_t i00 = static_cast<std::size_t>(cj) * (N + 1) + ci;
            const std::size_t i10 = i00 + 1;
            const std::size_t i01 = i00 + (N + 1);
            const std::size_t i11 = i01 + 1;
            for (const QuadPoint& q : QP) {
                xi[0] = ((u10 - u00) * (1 - q.t) + (u11 - u01) * q.t) / h;
                xi[1] = ((u01 - u00) * (1 - q.s) + (u11 - u10) * q.s) / h;
                const double val = f.eval(xi);
                if (!std::isfinite(val))
                    throw numeric_error("discretize_energy: non-finite integrand in cell (" +
                                        std::to_string(ci) + "," + std::to_string(cj) + ")");
                total += w * val;
                f.grad(xi, gf);
                const double fx = w * gf[0] / h, fy = w * gf[1] / h;
                grad[i00] += -fx * (1 - q.t) - fy * (1 - q.s);
                grad[i10] += fx * (1 - q.t) - fy * q.s;
                grad[i01] += -fx * q.t + fy * (1 - q.s);
                grad[i11] += fx * q.t + fy * q.s;
            }
        }
    }
    return total;
}

void zero_ring(Vec& g, int N) {
    for (int i = 0; i <= N; ++i) {
        g[i] = 0.0;
        g[static_cast<std::size_t>(N) * (N + 1) + i] = 0.0;
        g[static_cast<std::size_t>(i) * (N + 1)] = 0.0;
        g[static_cast<std::size_t>(i) * (N + 1) + N] = 0.0;
    }
}

double sup_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

double discretize_energy(const Density& f, const GridFunction& u) {
    if (!f) throw param_error("discretize_energy: null density");
    if (f->dim() != 2) throw param_error("discretize_energy: needs a planar density");
    if (u.N < 1) throw param_error("discretize_energy: empty grid");
    int bi = -1, bj = -1;
    const double e = energy_core(*f, u, &bi, &bj);
    if (!std::isfinite(e))
        throw numeric_error("discretize_energy: non-finite integrand in cell (" +
                            std::to_string(bi) + "," + std::to_string(bj) + ")");
    return e;
}

double interior_sup_gradient(const GridFunction& u, double rho) {
    if (!(rho > 0.0 && rho < 0.5))
        throw param_error("interior_sup_gradient: rho must lie in (0, 1/2)");
    const double h = u.h();
    double sup = -1.0;
    for_each_cell_quadrature(u, [&](int ci, int cj, double, double, double ux, double uy,
                                    double) {
        const double cx = (ci + 0.5) * h - 0.5, cy = (cj + 0.5) * h - 0.5;
        if (cx * cx + cy * cy > rho * rho) return;
        sup = std::max(sup, std::sqrt(ux * ux + uy * uy));
    });
    if (sup < 0.0)
        throw param_error("interior_sup_gradient: no cell center inside B_rho; rho too small");
    return sup;
}

double local_energy_mean(const GridFunction& u, const Density& f, double rho, double R) {
    if (!f) throw param_error("local_energy_mean: null density");
    if (!(rho > 0.0 && rho < R && R < 0.5))
        throw param_error("local_energy_mean: need 0 < rho < R < 1/2");
    const double h = u.h();
    double total = 0.0;
    bool any = false;
    Vec xi(2);
    for_each_cell_quadrature(u, [&](int ci, int cj, double, double, double ux, double uy,
                                    double w) {
        const double cx = (ci + 0.5) * h - 0.5, cy = (cj + 0.5) * h - 0.5;
        if (cx * cx + cy * cy > R * R) return;
        any = true;
        xi[0] = ux;
        xi[1] = uy;
        total += w * (1.0 + f->eval(xi));
    });
    if (!any) throw param_error("local_energy_mean: no cell center inside B_R; R too small");
    return total / ((R - rho) * (R - rho));
}

SolveResult minimize(const Density& f, const GridFunction& boundary, const GridFunction& init,
                     double tol, int max_iter) {
    if (!f) throw param_error("minimize: null density");
    if (f->dim() != 2) throw param_error("minimize: needs a planar density");
    const int N = boundary.N;
    if (N < 8) throw param_error("minimize: N must be at least 8");
    if (init.N != N) throw param_error("minimize: init and boundary grids disagree");
    if (!(tol > 0.0)) throw param_error("minimize: tol must be positive");
    if (max_iter < 1) throw param_error("minimize: max_iter must be positive");

    GridFunction u = init;
    for (int i = 0; i <= N; ++i) {  // the ring is data, never touched again
        u.at(i, 0) = boundary.at(i, 0);
        u.at(i, N) = boundary.at(i, N);
        u.at(0, i) = boundary.at(0, i);
        u.at(N, i) = boundary.at(N, i);
    }

    Vec grad;
    double energy = energy_and_grad(*f, u, grad);
    zero_ring(grad, N);
    double residual = sup_norm(grad);

    std::deque<Vec> s_hist, y_hist;
    std::deque<double> rho_hist;
    const std::size_t mem = 8;
    const std::size_t total = u.v.size();
    Vec d(total), q(total), trial(total);
    int iter = 0;
    int stalled = 0;
    bool converged = residual <= tol * (1.0 + std::abs(energy));

    while (!converged && iter < max_iter) {
        // two-loop recursion
        q = grad;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t idx = s_hist.size(); idx-- > 0;) {
            alpha[idx] = rho_hist[idx] * dot(s_hist[idx], q);
            for (std::size_t c = 0; c < total; ++c) q[c] -= alpha[idx] * y_hist[idx][c];
        }
        double gamma = 1.0;
        if (!s_hist.empty()) {
            const double yy = dot(y_hist.back(), y_hist.back());
            if (yy > 0.0) gamma = dot(s_hist.back(), y_hist.back()) / yy;
        }
        for (std::size_t c = 0; c < total; ++c) q[c] *= gamma;
        for (std::size_t idx = 0; idx < s_hist.size(); ++idx) {
            const double beta = rho_hist[idx] * dot(y_hist[idx], q);
            for (std::size_t c = 0; c < total; ++c)
                q[c] += (alpha[idx] - beta) * s_hist[idx][c];
        }
        for (std::size_t c = 0; c < total; ++c) d[c] = -q[c];

        double gd = dot(grad, d);
        bool steepest = false;
        if (!(gd < 0.0)) {  // not a descent direction; fall back
            for (std::size_t c = 0; c < total; ++c) d[c] = -grad[c];
            gd = -dot(grad, grad);
            steepest = true;
        }

        // Armijo backtracking; non-finite trial energies are simply rejected
        auto try_step = [&](double step, double& e_out) {
            trial = u.v;
            for (std::size_t c = 0; c < total; ++c) trial[c] += step * d[c];
            GridFunction cand;
            cand.N = N;
            cand.v.swap(trial);
            e_out = energy_core(*f, cand, nullptr, nullptr);
            cand.v.swap(trial);
            return std::isfinite(e_out) && e_out <= energy + 1e-4 * step * gd;
        };
        double step = 1.0, e_new = energy;
        bool accepted = false;
        for (int half = 0; half < 60; ++half) {
            if (try_step(step, e_new)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted && !steepest) {
            for (std::size_t c = 0; c < total; ++c) d[c] = -grad[c];
            gd = -dot(grad, grad);
            steepest = true;
            step = 1.0;
            for (int half = 0; half < 60; ++half) {
                if (try_step(step, e_new)) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
        }
        if (!accepted)
            throw numeric_error(
                "minimize: line search failed to reduce the energy at iteration " +
                std::to_string(iter) + " (residual " + g17(residual) +
                "); the density may be non-convex along the sampled segment");

        Vec s(total), y(total);
        for (std::size_t c = 0; c < total; ++c) {
            s[c] = step * d[c];
            u.v[c] += s[c];
        }
        Vec grad_new;
        const double e_check = energy_and_grad(*f, u, grad_new);
        zero_ring(grad_new, N);
        for (std::size_t c = 0; c < total; ++c) y[c] = grad_new[c] - grad[c];
        const double ys = dot(y, s);
        const double yn = std::sqrt(dot(y, y)), sn = std::sqrt(dot(s, s));
        if (ys > 1e-12 * yn * sn) {  // skip pairs that would wreck positive-definiteness
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / ys);
            if (s_hist.size() > mem) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        // a collapsed step with a sub-ulp energy gain means the iteration sits
        // at the rounding floor; a handful in a row cannot recover, so hand
        // back the partial result instead of grinding through max_iter
        const bool sub_ulp =
            e_check >= energy - 4.0 * std::numeric_limits<double>::epsilon() * std::abs(energy);
        stalled = (sub_ulp && step <= 1e-6) ? stalled + 1 : 0;
        grad.swap(grad_new);
        energy = e_check;
        residual = sup_norm(grad);
        ++iter;
        converged = residual <= tol * (1.0 + std::abs(energy));
        if (stalled >= 4) break;
    }

    SolveResult res;
    res.u = std::move(u);
    res.energy = energy;
    res.iterations = iter;
    res.residual = residual;
    res.converged = converged;
    for (double rho : {0.15, 0.25, 0.35, 0.45})
        res.sup_grad[rho] = interior_sup_gradient(res.u, rho);
    res.local_mean[{0.15, 0.35}] = local_energy_mean(res.u, f, 0.15, 0.35);
    res.local_mean[{0.25, 0.45}] = local_energy_mean(res.u, f, 0.25, 0.45);
    return res;
}

SolveResult minimize(const Density& f, const GridFunction& boundary, double tol, int max_iter) {
    return minimize(f, boundary, transfinite_from_ring(boundary), tol, max_iter);
}

ScalingStudy scaling_study(const Density& f,
                           const std::function<double(double, double)>& base_boundary,
                           const Vec& scales, double rho, double R, int N, double theta,
                           double slope_tol, double tol, int max_iter) {
    if (scales.empty()) throw param_error("scaling_study: empty scale list");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] >= 1.0)) throw param_error("scaling_study: scales must be >= 1");
        if (i && !(scales[i] > scales[i - 1]))
            throw param_error("scaling_study: scales must be strictly increasing");
    }
    ScalingStudy st;
    st.theta_theoretical = theta;
    st.complete = true;
    for (double s : scales) {
        GridFunction bgrid =
            make_grid(N, [&](double x, double y) { return s * base_boundary(x, y); });
        SolveResult res = minimize(f, bgrid, tol, max_iter);
        if (!res.converged) {
            st.complete = false;  // partial table is still reported
            break;
        }
        st.scales.push_back(s);
        st.sup_grads.push_back(interior_sup_gradient(res.u, rho));
        st.means.push_back(local_energy_mean(res.u, f, rho, R));
    }
    if (st.scales.size() >= 2) {
        // fit over the top half of the covered scale range (log sense)
        const double cut =
            std::exp(0.5 * (std::log(st.scales.front()) + std::log(st.scales.back()))) *
            (1.0 - 1e-12);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (std::size_t j = 0; j < st.scales.size(); ++j) {
            if (st.scales[j] < cut) continue;
            const double X = std::log(st.means[j]), Y = std::log(st.sup_grads[j]);
            sx += X;
            sy += Y;
            sxx += X * X;
            sxy += X * Y;
            ++m;
        }
        if (m >= 2) st.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        double C = 0.0;
        for (std::size_t j = 0; j < st.scales.size(); ++j)
            C = std::max(C, st.sup_grads[j] / std::pow(st.means[j], theta));
        st.fitted_C = C;
        st.slope_ok = std::abs(st.fitted_slope - theta) <= slope_tol;
        st.bound_ok = true;
        for (std::size_t j = 0; j < st.scales.size(); ++j)
            if (st.sup_grads[j] > st.fitted_C * std::pow(st.means[j], theta) * (1.0 + 1e-12))
                st.bound_ok = false;
    }
    return st;
}

}  // namespace sg
