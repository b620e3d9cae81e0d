#include "sg/approx.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sg {

namespace {

// exp(-1/t) transition block, all zero for t <= 0
double wexp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double wexp_d1(double t) { return t > 0.0 ? wexp(t) / (t * t) : 0.0; }
double wexp_d2(double t) {
    if (t <= 0.0) return 0.0;
    const double w = wexp(t);
    return w * (1.0 / (t * t * t * t) - 2.0 / (t * t * t));
}

}  // namespace

double smooth_ramp(double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    const double a = wexp(1.0 - u), b = wexp(u);
    return a / (a + b);
}

double smooth_ramp_d1(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double a = wexp(1.0 - u), b = wexp(u);
    const double a1 = -wexp_d1(1.0 - u), b1 = wexp_d1(u);
    const double s = a + b, s1 = a1 + b1;
    return (a1 * s - a * s1) / (s * s);
}

double smooth_ramp_d2(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double a = wexp(1.0 - u), b = wexp(u);
    const double a1 = -wexp_d1(1.0 - u), b1 = wexp_d1(u);
    const double a2 = wexp_d2(1.0 - u), b2 = wexp_d2(u);
    const double s = a + b, s1 = a1 + b1, s2 = a2 + b2;
    const double num1 = a1 * s - a * s1;
    return (a2 * s - a * s2) / (s * s) - 2.0 * s1 * num1 / (s * s * s);
}

double perturbation_h(double t) {
    if (t < 0.0) throw param_error("perturbation_h: t must be >= 0");
    if (t < 1.0) return (6.0 * t * t - t * t * t * t + 3.0) / 8.0;
    return t;
}

double perturbation_h_d1(double t) {
    if (t < 0.0) throw param_error("perturbation_h: t must be >= 0");
    if (t < 1.0) return (3.0 * t - t * t * t) / 2.0;
    return 1.0;
}

double perturbation_h_d2(double t) {
    if (t < 0.0) throw param_error("perturbation_h: t must be >= 0");
    if (t < 1.0) return (3.0 - 3.0 * t * t) / 2.0;
    return 0.0;
}

MollifierKernel::MollifierKernel(int d, double eps) : dim(d), epsilon(eps) {
    if (d < 1 || d > 16) throw param_error("MollifierKernel: dim out of range");
    if (!(eps > 0.0)) throw param_error("MollifierKernel: epsilon must be positive");
    // C_n = 1 / (sigma_{n-1} * int_0^1 exp(-1/(1-t^2)) t^{n-1} dt)
    const double sigma = 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
    const double prof = integrate_adaptive(
        [d](double t) {
            const double s = 1.0 - t * t;
            return s > 0.0 ? std::exp(-1.0 / s) * std::pow(t, d - 1) : 0.0;
        },
        0.0, 1.0, 1e-13);
    normalization = 1.0 / (sigma * prof);
}

double MollifierKernel::value_scaled(double r2) const {
    if (r2 >= 1.0) return 0.0;
    return normalization * std::exp(-1.0 / (1.0 - r2));
}

double MollifierKernel::value(const Vec& y) const {
    if (static_cast<int>(y.size()) != dim) throw param_error("MollifierKernel: bad point size");
    double r2 = 0.0;
    for (double c : y) r2 += (c / epsilon) * (c / epsilon);
    return value_scaled(r2) / std::pow(epsilon, dim);
}

double MollifierKernel::mass_quadrature(int nodes_per_axis) const {
    const GaussRule& rule = gauss_legendre(nodes_per_axis);
    std::vector<int> idx(dim, 0);
    double total = 0.0;
    for (;;) {
        double w = 1.0, r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            w *= rule.weights[idx[a]];
            r2 += rule.nodes[idx[a]] * rule.nodes[idx[a]];
        }
        total += w * value_scaled(r2);
        int a = 0;
        while (a < dim && ++idx[a] == nodes_per_axis) idx[a++] = 0;
        if (a == dim) break;
    }
    return total;  // the eps^-n of the kernel cancels against the eps^n volume
}

namespace {

// f*phi with the ramp living on [t0+1, t0+2]
double cutoff(double t, double t0) { return smooth_ramp(t - (t0 + 1.0)); }

double f_phi(const EnergyDensity& base, double t0, const Vec& x) {
    const double t = norm2(x);
    const double phi = cutoff(t, t0);
    if (phi == 0.0) return 0.0;
    return base.eval(x) * phi;
}

// tensor Gauss-Legendre over the unit cube in mollifier coordinates z = k*y.
// kern fills `m` kernel components at z; the return is
//   int (f phi)(xi - z/k) kern_c(z) dz,  c = 0..m-1
// with the per-axis order doubled until every component settles to 1e-8.
Vec cube_convolution(const EnergyDensity& base, double t0, const Vec& xi, int k, int m,
                     const std::function<void(const Vec&, double, Vec&)>& kern) {
    const int dim = base.dim();
    Vec prev(m, 0.0);
    bool have_prev = false;
    // bases with curvature seams inside the ball settle slowly, hence the cap
    const int max_order = dim <= 2 ? 1024 : 64;
    for (int order = 8; order <= max_order; order *= 2) {
        const GaussRule& rule = gauss_legendre(order);
        Vec acc(m, 0.0), z(dim), shifted(dim), kv(m);
        std::vector<int> idx(dim, 0);
        for (;;) {
            double w = 1.0, r2 = 0.0;
            for (int a = 0; a < dim; ++a) {
                z[a] = rule.nodes[idx[a]];
                w *= rule.weights[idx[a]];
                r2 += z[a] * z[a];
            }
            if (r2 < 1.0) {
                for (int a = 0; a < dim; ++a) shifted[a] = xi[a] - z[a] / k;
                const double g = f_phi(base, t0, shifted);
                if (g != 0.0) {
                    kern(z, r2, kv);
                    for (int c = 0; c < m; ++c) acc[c] += w * g * kv[c];
                }
            }
            int a = 0;
            while (a < dim && ++idx[a] == order) idx[a++] = 0;
            if (a == dim) break;
        }
        if (have_prev) {
            double diff = 0.0, scale = 1e-300;
            for (int c = 0; c < m; ++c) {
                diff = std::max(diff, std::abs(acc[c] - prev[c]));
                scale = std::max(scale, std::abs(acc[c]));
            }
            if (diff <= 1e-8 * scale) return acc;
        }
        prev = acc;
        have_prev = true;
    }
    throw numeric_error("build_fk: convolution quadrature did not settle");
}

class MollifiedDensity final : public EnergyDensity {
  public:
    MollifiedDensity(Density base, int k, double t0, std::string id)
        : EnergyDensity("fk", base->dim(), t0 + 2.0, std::move(id)),
          base_(std::move(base)),
          k_(k),
          cut_(t0),
          kernel_(base_->dim(), 1.0 / k) {}

  protected:
    double do_eval(const Vec& xi) const override {
        const double t = norm2(xi);
        if (t >= cut_ + 2.0) return base_->eval(xi);  // same code path, bit for bit
        const double phi = cutoff(t, cut_);
        double out = phi < 1.0 ? base_->eval(xi) * (1.0 - phi) : 0.0;
        const double cn = kernel_.normalization;
        Vec conv = cube_convolution(*base_, cut_, xi, k_, 1,
                                    [cn](const Vec&, double r2, Vec& kv) {
                                        kv[0] = cn * std::exp(-1.0 / (1.0 - r2));
                                    });
        return out + conv[0];
    }

    void do_grad(const Vec& xi, Vec& out) const override {
        const double t = norm2(xi);
        if (t >= cut_ + 2.0) {
            base_->grad(xi, out);
            return;
        }
        const int n = dim();
        std::fill(out.begin(), out.end(), 0.0);
        const double phi = cutoff(t, cut_);
        if (phi < 1.0) {
            base_->grad(xi, out);
            const double dphi = smooth_ramp_d1(t - (cut_ + 1.0));
            const double f = base_->eval(xi);
            for (int a = 0; a < n; ++a)
                out[a] = out[a] * (1.0 - phi) - f * dphi * xi[a] / t;
        }
        // grad of the convolution = convolution against the kernel gradient
        const double cn = kernel_.normalization;
        Vec conv = cube_convolution(*base_, cut_, xi, k_, n,
                                    [cn, n](const Vec& z, double r2, Vec& kv) {
                                        const double q = 1.0 / (1.0 - r2);
                                        const double eta = cn * std::exp(-q);
                                        for (int a = 0; a < n; ++a)
                                            kv[a] = -2.0 * q * q * z[a] * eta;
                                    });
        for (int a = 0; a < n; ++a) out[a] += k_ * conv[a];
    }

    double do_quadform(const Vec& xi, const Vec& lam) const override {
        const double t = norm2(xi);
        if (t >= cut_ + 2.0) return base_->hess_quadform(xi, lam);
        double out = 0.0;
        const double phi = cutoff(t, cut_);
        if (phi < 1.0) {
            const double u = t - (cut_ + 1.0);
            const double dphi = smooth_ramp_d1(u), ddphi = smooth_ramp_d2(u);
            const double f = base_->eval(xi);
            Vec gf = base_->grad(xi);
            const double lam2 = dot(lam, lam);
            const double proj = dot(xi, lam) / t;
            out = (1.0 - phi) * base_->hess_quadform(xi, lam) -
                  f * (ddphi * proj * proj + dphi / t * (lam2 - proj * proj)) -
                  2.0 * dphi * dot(gf, lam) * proj;
        }
        const double cn = kernel_.normalization;
        Vec lcopy = lam;
        Vec conv = cube_convolution(
            *base_, cut_, xi, k_, 1, [cn, &lcopy](const Vec& z, double r2, Vec& kv) {
                const double q = 1.0 / (1.0 - r2);
                const double eta = cn * std::exp(-q);
                const double zl = dot(z, lcopy);
                const double l2 = dot(lcopy, lcopy);
                kv[0] = eta * (-2.0 * q * q * l2 + zl * zl * (4.0 * q * q * q * q -
                                                              8.0 * q * q * q));
            });
        return out + static_cast<double>(k_) * k_ * conv[0];
    }

  private:
    Density base_;
    int k_;
    double cut_;  // hypotheses radius of the base; the ramp sits on [cut+1, cut+2]
    MollifierKernel kernel_;
};

class PerturbedDensity final : public EnergyDensity {
  public:
    PerturbedDensity(Density fk, int k, double t0, std::string id)
        : EnergyDensity("ftilde", fk->dim(), fk->t0(), std::move(id)),
          fk_(std::move(fk)),
          k_(k),
          s0_(t0 + 2.0) {}

  protected:
    double do_eval(const Vec& xi) const override {
        return fk_->eval(xi) + perturbation_h(norm2(xi) / s0_) / k_;
    }

    void do_grad(const Vec& xi, Vec& out) const override {
        fk_->grad(xi, out);
        const double t = norm2(xi);
        if (t == 0.0) return;  // h'(0) = 0
        const double d1 = perturbation_h_d1(t / s0_) / (k_ * s0_);
        for (std::size_t a = 0; a < xi.size(); ++a) out[a] += d1 * xi[a] / t;
    }

    double do_quadform(const Vec& xi, const Vec& lam) const override {
        double out = fk_->hess_quadform(xi, lam);
        const double t = norm2(xi);
        const double lam2 = dot(lam, lam);
        if (t == 0.0) return out + 1.5 / (k_ * s0_ * s0_) * lam2;
        const double u = t / s0_;
        const double proj = dot(xi, lam) / t;
        const double rad = perturbation_h_d2(u) / (s0_ * s0_);
        const double tan = perturbation_h_d1(u) / (s0_ * t);
        return out + (rad * proj * proj + tan * (lam2 - proj * proj)) / k_;
    }

  private:
    Density fk_;
    int k_;
    double s0_;
};

std::string approx_id(const char* head, int k, double t0, const std::string& base) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(k=%d,t0=", k);
    return std::string(head) + buf + g17(t0) + ",base=" + base + ")";
}

}  // namespace

Density build_fk(const Density& base, int k, double t0) {
    if (!base) throw param_error("build_fk: null base density");
    if (k < 1) throw param_error("build_fk: k must be >= 1");
    if (!(t0 >= 0.0)) throw param_error("build_fk: t0 must be >= 0");
    return std::make_shared<MollifiedDensity>(base, k, t0,
                                              approx_id("fk", k, t0, base->id()));
}

Density build_ftilde_k(const Density& fk, int k, double t0) {
    if (!fk) throw param_error("build_ftilde_k: null density");
    if (k < 1) throw param_error("build_ftilde_k: k must be >= 1");
    if (!(t0 >= 0.0)) throw param_error("build_ftilde_k: t0 must be >= 0");
    return std::make_shared<PerturbedDensity>(fk, k, t0,
                                              approx_id("ftilde", k, t0, fk->id()));
}

namespace {

// fixed seeded sample of B_{t0+2}; shared by the Lipschitz estimate and the
// sup |f - f_k| verification so detected thresholds are reproducible
std::vector<Vec> kstar_points(int dim, double t0, int n_points, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<Vec> pts;
    pts.reserve(n_points);
    for (int i = 0; i < n_points; ++i) {
        Vec d = seeded_unit_vector(dim, rng);
        const double r = rng.uniform01() * (t0 + 2.0);
        for (double& c : d) c *= r;
        pts.push_back(std::move(d));
    }
    return pts;
}

double sampled_sup_diff(const EnergyDensity& base, const EnergyDensity& fk,
                        const std::vector<Vec>& pts) {
    double sup = 0.0;
    for (const Vec& x : pts) sup = std::max(sup, std::abs(base.eval(x) - fk.eval(x)));
    return sup;
}

}  // namespace

int detect_k_star(const Density& base, double t0, int n_points, std::uint64_t seed) {
    if (!base) throw param_error("detect_k_star: null density");
    if (n_points < 8) throw param_error("detect_k_star: need at least 8 sample points");
    const std::vector<Vec> pts = kstar_points(base->dim(), t0, n_points, seed);

    // Lipschitz scale of f*phi gives the starting guess: |f - f_k| <~ L/k
    double lip = 1.0;
    Vec g(base->dim());
    for (const Vec& x : pts) {
        const double t = norm2(x);
        const double phi = cutoff(t, t0);
        if (phi == 0.0) continue;
        base->grad(x, g);
        const double dphi = t > 0.0 ? smooth_ramp_d1(t - (t0 + 1.0)) : 0.0;
        const double f = base->eval(x);
        double m2 = 0.0;
        for (std::size_t a = 0; a < g.size(); ++a) {
            const double c = phi * g[a] + (t > 0.0 ? f * dphi * x[a] / t : 0.0);
            m2 += c * c;
        }
        lip = std::max(lip, std::sqrt(m2));
    }
    int k = std::max(1, static_cast<int>(std::ceil(lip)));

    // verify by direct evaluation, widening then bisecting to the least k
    auto ok = [&](int kk) {
        return sampled_sup_diff(*base, *build_fk(base, kk, t0), pts) <= 1.0;
    };
    int hi = k;
    int guard = 0;
    while (!ok(hi)) {
        hi *= 2;
        if (++guard > 24) throw numeric_error("detect_k_star: no admissible k found");
    }
    int lo = hi > 1 ? hi / 2 : 0;  // ok(hi) holds; lo is unverified below hi
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (ok(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

GridFunction mollify_grid(const GridFunction& u, double epsilon) {
    if (!(epsilon > 0.0)) throw param_error("mollify_grid: epsilon must be positive");
    if (epsilon >= 0.5) throw param_error("mollify_grid: epsilon too large for the unit square");
    const int N = u.N;
    const double h = u.h();
    const int M = static_cast<int>(std::floor(epsilon / h));

    // lattice weights from the kernel profile, renormalised to unit sum so the
    // discrete average preserves constants exactly
    std::vector<std::pair<std::pair<int, int>, double>> stencil;
    double total = 0.0;
    for (int dj = -M; dj <= M; ++dj) {
        for (int di = -M; di <= M; ++di) {
            const double r2 = (di * (double)di + dj * (double)dj) * h * h / (epsilon * epsilon);
            if (r2 >= 1.0) continue;
            const double w = std::exp(-1.0 / (1.0 - r2));
            stencil.push_back({{di, dj}, w});
            total += w;
        }
    }
    for (auto& s : stencil) s.second /= total;

    GridFunction out = u;
    for (int j = M; j <= N - M; ++j) {
        for (int i = M; i <= N - M; ++i) {
            double acc = 0.0;
            for (const auto& s : stencil)
                acc += s.second * u.at(i + s.first.first, j + s.first.second);
            out.at(i, j) = acc;
        }
    }
    return out;
}

std::vector<EnergyConvergenceRow> energy_convergence_check(const Density& f,
                                                           const GridFunction& u, double rho,
                                                           const Vec& eps_list) {
    if (!f) throw param_error("energy_convergence_check: null density");
    if (f->dim() != 2) throw param_error("energy_convergence_check: needs a planar density");
    if (!(rho > 0.0)) throw param_error("energy_convergence_check: rho must be positive");
    if (eps_list.empty()) throw param_error("energy_convergence_check: empty eps list");
    const double h = u.h();
    double eps_max = 0.0;
    for (double e : eps_list) {
        if (!(e > 0.0)) throw param_error("energy_convergence_check: eps must be positive");
        eps_max = std::max(eps_max, e);
    }
    if (rho + eps_max + 3.0 * h > 0.5)
        throw param_error("energy_convergence_check: rho + eps reaches the boundary");

    auto ball_energy = [&](const GridFunction& g, double radius) {
        double total = 0.0;
        Vec du(2);
        for_each_cell_quadrature(g, [&](int ci, int cj, double, double, double ux, double uy,
                                        double w) {
            const double cx = (ci + 0.5) * h - 0.5, cy = (cj + 0.5) * h - 0.5;
            if (cx * cx + cy * cy > radius * radius) return;
            du[0] = ux;
            du[1] = uy;
            total += w * f->eval(du);
        });
        return total;
    };

    std::vector<EnergyConvergenceRow> rows;
    for (double eps : eps_list) {
        GridFunction ueps = mollify_grid(u, eps);
        EnergyConvergenceRow row;
        row.eps = eps;
        row.inner = ball_energy(ueps, rho);
        row.outer = ball_energy(u, rho + eps);
        row.gap = row.outer - row.inner;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sg
