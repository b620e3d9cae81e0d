#include "sg/integrand.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace sg {

double RadialProfile::g1_exact(double t) const {
    if (!(t > t0)) throw param_error("g1_exact: t must exceed the junction radius");
    return std::min(ddg(t), dg(t) / t);
}

double RadialProfile::g2_exact(double t) const {
    if (!(t > t0)) throw param_error("g2_exact: t must exceed the junction radius");
    return std::max(ddg(t), dg(t) / t);
}

double EnergyDensity::eval(const Vec& xi) const {
    if (static_cast<int>(xi.size()) != dim_)
        throw param_error(name_ + ": eval expects dimension " + std::to_string(dim_));
    return do_eval(xi);
}

Vec EnergyDensity::grad(const Vec& xi) const {
    Vec out(xi.size());
    grad(xi, out);
    return out;
}

void EnergyDensity::grad(const Vec& xi, Vec& out) const {
    if (static_cast<int>(xi.size()) != dim_)
        throw param_error(name_ + ": grad expects dimension " + std::to_string(dim_));
    out.resize(xi.size());
    do_grad(xi, out);
}

double EnergyDensity::hess_quadform(const Vec& xi, const Vec& lam) const {
    if (static_cast<int>(xi.size()) != dim_ || static_cast<int>(lam.size()) != dim_)
        throw param_error(name_ + ": hess_quadform expects dimension " + std::to_string(dim_));
    return do_quadform(xi, lam);
}

double iterated_log(double t, int k) {
    if (k < 1) throw param_error("iterated_log: k must be >= 1");
    double v = std::log1p(t);
    for (int i = 1; i < k; ++i) v = std::log1p(v);
    return v;
}

namespace {

std::vector<double> log_ladder(double t, int k) {
    std::vector<double> L(k);
    double cur = std::log1p(t);
    L[0] = cur;
    for (int i = 1; i < k; ++i) {
        cur = std::log1p(cur);
        L[i] = cur;
    }
    return L;
}

// ---------------------------------------------------------------------------
// radial density with optional quadratic inner extension

class RadialDensity final : public EnergyDensity {
  public:
    RadialDensity(std::string name, int dim, double t0_report, std::string id,
                  RadialProfile profile)
        : EnergyDensity(std::move(name), dim, t0_report, std::move(id)),
          profile_(std::move(profile)) {
        if (profile_.t0 > 0.0) {
            extended_ = true;
            double g0 = profile_.g(profile_.t0);
            double d0 = profile_.dg(profile_.t0);
            if (!std::isfinite(g0) || !std::isfinite(d0))
                throw param_error(this->name() + ": profile not finite at the junction radius");
            b_ = d0 / (2.0 * profile_.t0);
            a0_ = g0 - profile_.t0 * d0 / 2.0;
        }
        radial_ = profile_;
    }

    void set_hint(GrowthHint h) { hint_ = std::move(h); }
    void set_exponents(ExponentSet e) { exps_ = corollary_conditions(e); }

  protected:
    double do_eval(const Vec& xi) const override {
        double t = norm2(xi);
        if (extended_ && t < profile_.t0) {
            double v = a0_ + b_ * t * t;
            return v > 0.0 ? v : 0.0;
        }
        return profile_.g(t);
    }

    void do_grad(const Vec& xi, Vec& out) const override {
        double t = norm2(xi);
        if (extended_ && t < profile_.t0) {
            bool clamped = a0_ + b_ * t * t <= 0.0 && a0_ < 0.0;
            double c = clamped ? 0.0 : 2.0 * b_;
            for (std::size_t i = 0; i < xi.size(); ++i) out[i] = c * xi[i];
            return;
        }
        if (t == 0.0) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        double r = profile_.dg(t) / t;
        for (std::size_t i = 0; i < xi.size(); ++i) out[i] = r * xi[i];
    }

    double do_quadform(const Vec& xi, const Vec& lam) const override {
        double t = norm2(xi);
        double lam2 = dot(lam, lam);
        if (extended_ && t < profile_.t0) {
            bool clamped = a0_ + b_ * t * t <= 0.0 && a0_ < 0.0;
            return clamped ? 0.0 : 2.0 * b_ * lam2;
        }
        if (t == 0.0) {
            double d0 = profile_.dg(0.0);
            double c0 = profile_.ddg(0.0);
            if (d0 != 0.0 || !std::isfinite(c0))
                throw numeric_error(name() + ": Hessian singular at xi = 0");
            return c0 * lam2;
        }
        double proj = dot(xi, lam) / t;
        double radial = profile_.ddg(t);
        double tangent = profile_.dg(t) / t;
        return radial * proj * proj + tangent * (lam2 - proj * proj);
    }

  private:
    RadialProfile profile_;
    bool extended_ = false;
    double a0_ = 0.0, b_ = 0.0;
};

// ---------------------------------------------------------------------------
// separable density: f(xi) = sum_i G(|xi_i|), same extension machinery per axis

class SeparableDensity final : public EnergyDensity {
  public:
    SeparableDensity(std::string name, int dim, double t0_report, std::string id,
                     RadialProfile profile)
        : EnergyDensity(std::move(name), dim, t0_report, std::move(id)),
          profile_(std::move(profile)) {
        if (profile_.t0 > 0.0) {
            extended_ = true;
            b_ = profile_.dg(profile_.t0) / (2.0 * profile_.t0);
            a0_ = profile_.g(profile_.t0) - profile_.t0 * profile_.dg(profile_.t0) / 2.0;
        }
    }

    void set_hint(GrowthHint h) { hint_ = std::move(h); }
    double inner_curvature() const { return extended_ ? 2.0 * b_ : profile_.ddg(0.0); }

  protected:
    double component(double u) const {
        if (extended_ && u < profile_.t0) {
            double v = a0_ + b_ * u * u;
            return v > 0.0 ? v : 0.0;
        }
        return profile_.g(u);
    }
    double component_slope(double u) const {
        if (extended_ && u < profile_.t0) {
            bool clamped = a0_ + b_ * u * u <= 0.0 && a0_ < 0.0;
            return clamped ? 0.0 : 2.0 * b_ * u;
        }
        return profile_.dg(u);
    }
    double component_curv(double u) const {
        if (extended_ && u < profile_.t0) {
            bool clamped = a0_ + b_ * u * u <= 0.0 && a0_ < 0.0;
            return clamped ? 0.0 : 2.0 * b_;
        }
        return profile_.ddg(u);
    }

    double do_eval(const Vec& xi) const override {
        double s = 0.0;
        for (double x : xi) s += component(std::abs(x));
        return s;
    }
    void do_grad(const Vec& xi, Vec& out) const override {
        for (std::size_t i = 0; i < xi.size(); ++i) {
            double u = std::abs(xi[i]);
            double sgn = xi[i] > 0.0 ? 1.0 : (xi[i] < 0.0 ? -1.0 : 0.0);
            out[i] = component_slope(u) * sgn;
        }
    }
    double do_quadform(const Vec& xi, const Vec& lam) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) {
            double c = component_curv(std::abs(xi[i]));
            if (!std::isfinite(c))
                throw numeric_error(name() + ": Hessian singular on a coordinate axis");
            s += c * lam[i] * lam[i];
        }
        return s;
    }

  private:
    RadialProfile profile_;
    bool extended_ = false;
    double a0_ = 0.0, b_ = 0.0;
};

// ---------------------------------------------------------------------------
// structured anisotropic families

double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// sum_i (1 + xi_i^2)^{p_i}, evaluated with the largest component factored out
// so radii up to ~1e100 stay finite
double sqrt_sum_radicand_scaled(const Vec& xi, const Vec& p, double* scale_pow) {
    double m2 = 0.0;
    for (double x : xi) m2 = std::max(m2, x * x);
    double base = 1.0 + m2;
    double pmin = *std::min_element(p.begin(), p.end());
    double s = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        double ratio = (1.0 + xi[i] * xi[i]) / base;
        s += std::pow(ratio, p[i]) * std::pow(base, p[i] - pmin);
    }
    *scale_pow = std::pow(base, pmin / 2.0);
    return s;
}

double degenerate_radicand_scaled(const Vec& xi, const Vec& p, double* scale_pow) {
    double m = max_abs(xi);
    if (m == 0.0) {
        *scale_pow = 0.0;
        return 0.0;
    }
    double pmin = *std::min_element(p.begin(), p.end());
    double s = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        double ratio = std::abs(xi[i]) / m;
        s += std::pow(ratio, 2.0 * p[i]) * std::pow(m, 2.0 * (p[i] - pmin));
    }
    *scale_pow = std::pow(m, pmin);
    return s;
}

class AnisoPowerSum final : public EnergyDensity {
  public:
    AnisoPowerSum(Vec p, std::string id)
        : EnergyDensity("aniso_power_sum", static_cast<int>(p.size()), 0.0, std::move(id)),
          p_(std::move(p)) {
        double pmin = *std::min_element(p_.begin(), p_.end());
        hint_ = GrowthHint{
            [pmin](double t) {
                return pmin * (pmin - 1.0) * std::pow(1.0 + t * t, (pmin - 2.0) / 2.0);
            },
            [](double) { return 2.0; }, 0.0, true};
        ExponentSet e;
        e.n = dim();
        e.p = pmin;
        e.q = 2.0;
        e.m = pmin * (pmin - 1.0) * std::pow(2.0, (pmin - 2.0) / 2.0);
        e.M = 2.0;
        exps_ = corollary_conditions(e);
    }

  protected:
    double do_eval(const Vec& xi) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i)
            s += std::pow(1.0 + xi[i] * xi[i], p_[i] / 2.0);
        return s;
    }
    void do_grad(const Vec& xi, Vec& out) const override {
        for (std::size_t i = 0; i < xi.size(); ++i)
            out[i] = p_[i] * xi[i] * std::pow(1.0 + xi[i] * xi[i], p_[i] / 2.0 - 1.0);
    }
    double do_quadform(const Vec& xi, const Vec& lam) const override {
        return hess_quadform_aniso(xi, lam, p_);
    }

  private:
    Vec p_;
};

class SqrtPowerSum final : public EnergyDensity {
  public:
    SqrtPowerSum(Vec p, std::string id)
        : EnergyDensity("sqrt_power_sum", static_cast<int>(p.size()), 0.0, std::move(id)),
          p_(std::move(p)) {
        int n = dim();
        double pmin = *std::min_element(p_.begin(), p_.end());
        double pmax = *std::max_element(p_.begin(), p_.end());
        double s_exp = (pmin / pmax) * (pmax - 2.0) + 2.0;
        double cl = (pmin * pmin - pmin) / std::sqrt(static_cast<double>(n));
        double cu = 2.0 * pmax * pmax * std::pow(1.0 + 1.0 / n, (s_exp - 2.0) / 2.0);
        // pmin = 1 zeroes the lower envelope constant; drop it rather than
        // declare a vacuous bound
        hint_ = GrowthHint{
            [cl, pmax](double t) { return cl * std::pow(1.0 + t * t, -pmax / 2.0); },
            [cu, s_exp](double t) { return cu * std::pow(t, s_exp - 2.0); }, 1.0, cl > 0.0};
        ExponentSet e;
        e.n = n;
        e.p = pmin;
        e.q = pmax;
        e.m = cl;
        e.M = cu;
        exps_ = corollary_conditions(e);
    }

  protected:
    double do_eval(const Vec& xi) const override {
        double scale = 0.0;
        double s = sqrt_sum_radicand_scaled(xi, p_, &scale);
        return scale * std::sqrt(s);
    }
    void do_grad(const Vec& xi, Vec& out) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i)
            s += std::pow(1.0 + xi[i] * xi[i], p_[i]);
        double rs = std::sqrt(s);
        for (std::size_t i = 0; i < xi.size(); ++i)
            out[i] = p_[i] * xi[i] * std::pow(1.0 + xi[i] * xi[i], p_[i] - 1.0) / rs;
    }
    double do_quadform(const Vec& xi, const Vec& lam) const override {
        return hess_quadform_sqrt_sum(xi, lam, p_);
    }

  private:
    Vec p_;
};

class DegenerateRadicand final : public EnergyDensity {
  public:
    DegenerateRadicand(Vec p, std::string id)
        : EnergyDensity("degenerate_radicand", static_cast<int>(p.size()), 0.0, std::move(id)),
          p_(std::move(p)) {
        int n = dim();
        double pmin = *std::min_element(p_.begin(), p_.end());
        double pmax = *std::max_element(p_.begin(), p_.end());
        double sigma = pmin * (pmax - 2.0) / pmax;
        double cu = 2.0 * pmax * pmax - pmax;
        double rootn = std::sqrt(static_cast<double>(n));
        hint_ = GrowthHint{[](double) { return 0.0; },
                           [cu, sigma, rootn](double t) { return cu * std::pow(t / rootn, sigma); },
                           rootn, false};
        ExponentSet e;
        e.n = n;
        e.p = pmin;
        e.q = pmax;
        e.m = 0.0;
        e.M = cu * std::pow(rootn, -sigma);
        exps_ = corollary_conditions(e);
    }

  protected:
    double do_eval(const Vec& xi) const override {
        double scale = 0.0;
        double s = degenerate_radicand_scaled(xi, p_, &scale);
        return scale * std::sqrt(s);
    }
    void do_grad(const Vec& xi, Vec& out) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i)
            s += std::pow(std::abs(xi[i]), 2.0 * p_[i]);
        if (s == 0.0) {
            // minimum of the convex radicand; 0 is a valid subgradient
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        double rs = std::sqrt(s);
        for (std::size_t i = 0; i < xi.size(); ++i) {
            double a = std::abs(xi[i]);
            double sgn = xi[i] > 0.0 ? 1.0 : (xi[i] < 0.0 ? -1.0 : 0.0);
            out[i] = p_[i] * std::pow(a, 2.0 * p_[i] - 1.0) * sgn / rs;
        }
    }
    double do_quadform(const Vec& xi, const Vec& lam) const override {
        return hess_quadform_degenerate(xi, lam, p_);
    }

  private:
    Vec p_;
};

// ---------------------------------------------------------------------------
// sum of densities (power/log head plus a degenerate radicand tail)

class SumDensity final : public EnergyDensity {
  public:
    SumDensity(std::string name, int dim, double t0_report, std::string id,
               std::vector<Density> parts)
        : EnergyDensity(std::move(name), dim, t0_report, std::move(id)),
          parts_(std::move(parts)) {
        bool any_lower = false;
        double t_valid = 0.0;
        bool all_upper = true;
        for (const auto& part : parts_) {
            const GrowthHint* h = part->growth_hint();
            if (!h) {
                all_upper = false;
                continue;
            }
            t_valid = std::max(t_valid, h->t_valid);
            if (h->has_lower) any_lower = true;
        }
        if (all_upper && !parts_.empty()) {
            auto ps = parts_;
            hint_ = GrowthHint{
                [ps](double t) {
                    double s = 0.0;
                    for (const auto& part : ps) {
                        const GrowthHint* h = part->growth_hint();
                        if (h && h->has_lower) s += h->lower(t);
                    }
                    return s;
                },
                [ps](double t) {
                    double s = 0.0;
                    for (const auto& part : ps) s += part->growth_hint()->upper(t);
                    return s;
                },
                t_valid, any_lower};
        }
    }

    void set_exponents(ExponentSet e) { exps_ = corollary_conditions(e); }

  protected:
    double do_eval(const Vec& xi) const override {
        double s = 0.0;
        for (const auto& part : parts_) s += part->eval(xi);
        return s;
    }
    void do_grad(const Vec& xi, Vec& out) const override {
        std::fill(out.begin(), out.end(), 0.0);
        Vec tmp(xi.size());
        for (const auto& part : parts_) {
            part->grad(xi, tmp);
            for (std::size_t i = 0; i < xi.size(); ++i) out[i] += tmp[i];
        }
    }
    double do_quadform(const Vec& xi, const Vec& lam) const override {
        double s = 0.0;
        for (const auto& part : parts_) s += part->hess_quadform(xi, lam);
        return s;
    }

  private:
    std::vector<Density> parts_;
};

}  // namespace

// ---------------------------------------------------------------------------
// structured quadratic forms

double hess_quadform_aniso(const Vec& xi, const Vec& lam, const Vec& p) {
    if (xi.size() != lam.size() || xi.size() != p.size())
        throw param_error("hess_quadform_aniso: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        double u2 = xi[i] * xi[i];
        s += p[i] * (1.0 + (p[i] - 1.0) * u2) * std::pow(1.0 + u2, p[i] / 2.0 - 2.0) *
             lam[i] * lam[i];
    }
    return s;
}

double hess_quadform_sqrt_sum(const Vec& xi, const Vec& lam, const Vec& p) {
    if (xi.size() != lam.size() || xi.size() != p.size())
        throw param_error("hess_quadform_sqrt_sum: size mismatch");
    double S = 0.0, vw = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        double u2 = xi[i] * xi[i];
        double base = 1.0 + u2;
        S += std::pow(base, p[i]);
        vw += p[i] * xi[i] * std::pow(base, p[i] - 1.0) * lam[i];
        diag += p[i] * (1.0 + (2.0 * p[i] - 1.0) * u2) * std::pow(base, p[i] - 2.0) *
                lam[i] * lam[i];
    }
    return (S * diag - vw * vw) / (S * std::sqrt(S));
}

double hess_quadform_degenerate(const Vec& xi, const Vec& lam, const Vec& p) {
    if (xi.size() != lam.size() || xi.size() != p.size())
        throw param_error("hess_quadform_degenerate: size mismatch");
    double S = 0.0, vw = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        double a = std::abs(xi[i]);
        double sgn = xi[i] > 0.0 ? 1.0 : (xi[i] < 0.0 ? -1.0 : 0.0);
        S += std::pow(a, 2.0 * p[i]);
        vw += p[i] * std::pow(a, p[i] - 1.0) * lam[i] * sgn * std::pow(a, p[i]);
        diag += (2.0 * p[i] * p[i] - p[i]) * std::pow(a, 2.0 * p[i] - 2.0) * lam[i] * lam[i];
    }
    if (S == 0.0)
        throw numeric_error("degenerate_radicand: Hessian singular at xi = 0");
    return (S * diag - vw * vw) / (S * std::sqrt(S));
}

// ---------------------------------------------------------------------------
// profiles

namespace {

RadialProfile profile_power_regularized(double p) {
    return {[p](double t) { return std::pow(1.0 + t * t, p / 2.0); },
            [p](double t) { return p * t * std::pow(1.0 + t * t, p / 2.0 - 1.0); },
            [p](double t) {
                return p * (1.0 + (p - 1.0) * t * t) * std::pow(1.0 + t * t, p / 2.0 - 2.0);
            },
            0.0};
}

RadialProfile profile_power(double p, double t0) {
    return {[p](double t) { return std::pow(t, p); },
            [p](double t) { return p * std::pow(t, p - 1.0); },
            [p](double t) { return p * (p - 1.0) * std::pow(t, p - 2.0); },
            t0};
}

RadialProfile profile_log_power(double a, double t0) {
    return {[a](double t) { return t * std::pow(std::log(t), a); },
            [a](double t) {
                double L = std::log(t);
                return std::pow(L, a) + a * std::pow(L, a - 1.0);
            },
            [a](double t) {
                double L = std::log(t);
                return (a * std::pow(L, a - 1.0) + a * (a - 1.0) * std::pow(L, a - 2.0)) / t;
            },
            t0};
}

RadialProfile profile_one_plus_t_logk(int k, double t0) {
    return {[k](double t) { return (1.0 + t) * iterated_log(t, k); },
            [k](double t) {
                auto L = log_ladder(t, k);
                double invprod = 1.0;
                for (int i = 0; i + 1 < k; ++i) invprod /= 1.0 + L[i];
                return L[k - 1] + invprod;
            },
            [k](double t) {
                auto L = log_ladder(t, k);
                double invprod = 1.0;
                double bracket = 1.0;
                double run = 1.0;
                for (int i = 0; i + 1 < k; ++i) {
                    invprod /= 1.0 + L[i];
                    run /= 1.0 + L[i];
                    bracket -= run;
                }
                return invprod / (1.0 + t) * bracket;
            },
            t0};
}

RadialProfile profile_t_logk(int k) {
    return {[k](double t) { return t * iterated_log(t, k); },
            [k](double t) {
                auto L = log_ladder(t, k);
                double invprod = 1.0;
                for (int i = 0; i + 1 < k; ++i) invprod /= 1.0 + L[i];
                return L[k - 1] + t * invprod / (1.0 + t);
            },
            [k](double t) {
                auto L = log_ladder(t, k);
                // L_j' = 1 / prod_{i<j}(1+L_i) with L_0 = t
                double lkp = 1.0 / (1.0 + t);
                for (int i = 0; i + 1 < k; ++i) lkp /= 1.0 + L[i];
                double sum = t / (1.0 + t);
                double prod = 1.0 + t;
                for (int j = 1; j < k; ++j) {
                    sum += t / (prod * (1.0 + L[j - 1]));
                    prod *= 1.0 + L[j - 1];
                }
                return lkp * (2.0 - sum);
            },
            0.0};
}

// ---------------------------------------------------------------------------
// parameter plumbing

double get_scalar(const std::map<std::string, Vec>& params, const std::string& key,
                  const std::string& entry, std::optional<double> fallback = std::nullopt) {
    auto it = params.find(key);
    if (it == params.end()) {
        if (fallback) return *fallback;
        throw param_error(entry + ": missing parameter '" + key + "'");
    }
    if (it->second.size() != 1)
        throw param_error(entry + ": parameter '" + key + "' must be a scalar");
    return it->second[0];
}

Vec get_list(const std::map<std::string, Vec>& params, const std::string& key,
             const std::string& entry) {
    auto it = params.find(key);
    if (it == params.end())
        throw param_error(entry + ": missing parameter '" + key + "'");
    return it->second;
}

int get_int(const std::map<std::string, Vec>& params, const std::string& key,
            const std::string& entry, std::optional<int> fallback = std::nullopt) {
    if (!params.count(key) && fallback) return *fallback;
    double v = get_scalar(params, key, entry);
    double r = std::round(v);
    if (std::abs(v - r) > 1e-9)
        throw param_error(entry + ": parameter '" + key + "' must be an integer");
    return static_cast<int>(r);
}

void require_keys(const std::map<std::string, Vec>& params, const std::string& entry,
                  std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : params) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw param_error(entry + ": unknown parameter '" + key + "'");
    }
}

int get_dim(const std::map<std::string, Vec>& params, const std::string& entry) {
    int n = get_int(params, "n", entry, 2);
    if (n < 2 || n > 16)
        throw param_error(entry + ": n must be an integer in [2,16], got " + std::to_string(n));
    return n;
}

void check_exp_list(const Vec& p, const std::string& entry, double lo_excl, double lo_incl) {
    if (p.size() < 2 || p.size() > 16)
        throw param_error(entry + ": exponent list length must lie in [2,16]");
    for (double v : p) {
        bool ok = lo_excl > 0.0 ? v > lo_excl : v >= lo_incl;
        if (!ok || v > 2.0)
            throw param_error(entry + ": each exponent must lie in " +
                              (lo_excl > 0.0 ? std::string("(1,2]") : std::string("[1,2]")) +
                              ", got " + g17(v));
    }
}

std::string list_str(const Vec& v) { return format_vec(v); }

// ---------------------------------------------------------------------------
// entry builders

Density build_power_regularized(const std::map<std::string, Vec>& params) {
    require_keys(params, "power_regularized", {"p", "n"});
    double p = get_scalar(params, "p", "power_regularized");
    if (!(p > 1.0 && p <= 2.0))
        throw param_error("power_regularized: p must lie in (1,2], got " + g17(p));
    int n = get_dim(params, "power_regularized");
    std::string id = "power_regularized(n=" + std::to_string(n) + ",p=" + g17(p) + ")";
    auto d = std::make_shared<RadialDensity>("power_regularized", n, 0.0, id,
                                             profile_power_regularized(p));
    d->set_hint({[p](double t) {
                     return p * (p - 1.0) * std::pow(1.0 + t * t, (p - 2.0) / 2.0);
                 },
                 [p](double t) { return p * std::pow(t, p - 2.0); }, 1.0, true});
    ExponentSet e;
    e.n = n;
    e.p = p;
    e.q = p;
    e.m = p * (p - 1.0) * std::pow(2.0, (p - 2.0) / 2.0);
    e.M = p;
    d->set_exponents(e);
    return d;
}

Density build_log_power(const std::map<std::string, Vec>& params) {
    require_keys(params, "log_power", {"a", "t0", "n"});
    double a = get_scalar(params, "a", "log_power");
    if (!(a > 0.0 && a <= 64.0))
        throw param_error("log_power: a must lie in (0,64], got " + g17(a));
    double t0_default = std::exp(std::max(a, 1.0 - a));
    double t0 = get_scalar(params, "t0", "log_power", t0_default);
    if (!(t0 >= 1.0))
        throw param_error("log_power: t0 must be >= 1, got " + g17(t0));
    if (a < 1.0 && t0 == 1.0)
        throw param_error("log_power: t0 must exceed 1 when a < 1 (slope unbounded at 1)");
    int n = get_dim(params, "log_power");
    std::string id =
        "log_power(a=" + g17(a) + ",n=" + std::to_string(n) + ",t0=" + g17(t0) + ")";
    auto d = std::make_shared<RadialDensity>("log_power", n, t0, id, profile_log_power(a, t0));
    // envelope validity: the g'' branch needs log t >= max(1, 2(1-a)) and, for
    // a > 1, log t past the root of (1+a)L^2 - aL - a(a-1)
    double lmin = std::max(1.0, 2.0 * (1.0 - a));
    if (a > 1.0) {
        double root = (a + std::sqrt(a * a + 4.0 * a * (a * a - 1.0))) / (2.0 * (1.0 + a));
        lmin = std::max(lmin, root);
    }
    double t_valid = std::max(t0, std::exp(lmin));
    d->set_hint({[a](double t) {
                     return (a / 2.0) * std::pow(std::log(t), a - 1.0) / t;
                 },
                 [a](double t) { return (1.0 + a) * std::pow(std::log(t), a) / t; },
                 t_valid, true});
    return d;
}

Density build_iterated_log(const std::map<std::string, Vec>& params) {
    require_keys(params, "iterated_log", {"k", "n"});
    int k = get_int(params, "k", "iterated_log");
    if (k < 1 || k > 6)
        throw param_error("iterated_log: k must be an integer in [1,6], got " + std::to_string(k));
    int n = get_dim(params, "iterated_log");
    std::string id = "iterated_log(k=" + std::to_string(k) + ",n=" + std::to_string(n) + ")";
    // k <= 2: the raw profile is convex on (0,inf), keep it everywhere so the
    // formula value holds below e as well. k >= 3: g'' < 0 near 0 forces the
    // quadratic inner extension at e.
    double junction = k <= 2 ? 0.0 : M_E;
    auto d = std::make_shared<RadialDensity>("iterated_log", n, M_E, id,
                                             profile_one_plus_t_logk(k, junction));
    double t_valid = 6.0 + 2.0 * k;
    d->set_hint({[k](double t) {
                     auto L = log_ladder(t, k);
                     double prod = 1.0 + t;
                     for (int i = 0; i + 1 < k; ++i) prod *= 1.0 + L[i];
                     return 0.5 / prod;
                 },
                 [k](double t) { return 2.0 * iterated_log(t, k) / (1.0 + t); },
                 t_valid, true});
    return d;
}

Density build_radial_power(const std::map<std::string, Vec>& params) {
    require_keys(params, "radial", {"p", "t0", "n"});
    double p = get_scalar(params, "p", "radial");
    if (!(p > 1.0 && p <= 2.0))
        throw param_error("radial: p must lie in (1,2], got " + g17(p));
    double t0 = get_scalar(params, "t0", "radial", 0.0);
    if (!(t0 >= 0.0)) throw param_error("radial: t0 must be >= 0, got " + g17(t0));
    int n = get_dim(params, "radial");
    std::string id =
        "radial(n=" + std::to_string(n) + ",p=" + g17(p) + ",t0=" + g17(t0) + ")";
    auto d = std::make_shared<RadialDensity>("radial", n, t0, id, profile_power(p, t0));
    d->set_hint({[p](double t) { return p * (p - 1.0) * std::pow(t, p - 2.0); },
                 [p](double t) { return p * std::pow(t, p - 2.0); },
                 t0 > 0.0 ? t0 : 1e-6, true});
    ExponentSet e;
    e.n = n;
    e.p = p;
    e.q = p;
    e.m = p * (p - 1.0);
    e.M = p;
    d->set_exponents(e);
    return d;
}

Density build_separable_log(const std::map<std::string, Vec>& params) {
    require_keys(params, "separable_log", {"a", "t0", "n"});
    double a = get_scalar(params, "a", "separable_log");
    if (!(a > 0.0 && a <= 64.0))
        throw param_error("separable_log: a must lie in (0,64], got " + g17(a));
    double t0_default = std::exp(std::max(a, 1.0 - a));
    double t0 = get_scalar(params, "t0", "separable_log", t0_default);
    if (!(t0 > 1.0))
        throw param_error("separable_log: t0 must exceed 1, got " + g17(t0));
    int n = get_dim(params, "separable_log");
    std::string id =
        "separable_log(a=" + g17(a) + ",n=" + std::to_string(n) + ",t0=" + g17(t0) + ")";
    RadialProfile prof = profile_log_power(a, t0);
    auto d = std::make_shared<SeparableDensity>("separable_log", n, t0, id, prof);
    // components at radius t range over [0,t]; with the default junction both
    // eigenvalue branches are monotone beyond t0, so the extrema sit at the
    // junction, the inner parabola, or t itself
    double inner = d->inner_curvature();
    RadialProfile pcopy = prof;
    double tv = std::max(t0 * 1.0000001, std::exp(std::max(1.0, 2.0 * (1.0 - a))));
    d->set_hint({[pcopy, inner, tv](double t) {
                     double lo = std::min(inner, pcopy.g1_exact(std::max(t, tv)));
                     return std::min(lo, pcopy.g1_exact(tv));
                 },
                 [pcopy, inner, tv](double t) {
                     double hi = std::max(inner, pcopy.g2_exact(std::max(t, tv)));
                     return std::max(hi, pcopy.g2_exact(tv));
                 },
                 tv, inner > 0.0});
    return d;
}

Density build_aniso(const std::map<std::string, Vec>& params) {
    require_keys(params, "aniso_power_sum", {"p", "n"});
    Vec p = get_list(params, "p", "aniso_power_sum");
    check_exp_list(p, "aniso_power_sum", 1.0, 0.0);
    if (params.count("n") && get_dim(params, "aniso_power_sum") != static_cast<int>(p.size()))
        throw param_error("aniso_power_sum: n must match the exponent list length");
    return std::make_shared<AnisoPowerSum>(p, "aniso_power_sum(p=" + list_str(p) + ")");
}

Density build_sqrt_sum(const std::map<std::string, Vec>& params) {
    require_keys(params, "sqrt_power_sum", {"p", "n"});
    Vec p = get_list(params, "p", "sqrt_power_sum");
    check_exp_list(p, "sqrt_power_sum", 0.0, 1.0);
    if (params.count("n") && get_dim(params, "sqrt_power_sum") != static_cast<int>(p.size()))
        throw param_error("sqrt_power_sum: n must match the exponent list length");
    return std::make_shared<SqrtPowerSum>(p, "sqrt_power_sum(p=" + list_str(p) + ")");
}

Density build_degenerate(const std::map<std::string, Vec>& params) {
    require_keys(params, "degenerate_radicand", {"p", "n"});
    Vec p = get_list(params, "p", "degenerate_radicand");
    check_exp_list(p, "degenerate_radicand", 0.0, 1.0);
    if (params.count("n") && get_dim(params, "degenerate_radicand") != static_cast<int>(p.size()))
        throw param_error("degenerate_radicand: n must match the exponent list length");
    return std::make_shared<DegenerateRadicand>(p,
                                                "degenerate_radicand(p=" + list_str(p) + ")");
}

Density build_p_plus_h(const std::map<std::string, Vec>& params) {
    require_keys(params, "p_plus_h", {"p", "h", "n"});
    double p = get_scalar(params, "p", "p_plus_h");
    if (!(p > 1.0 && p <= 2.0))
        throw param_error("p_plus_h: p must lie in (1,2], got " + g17(p));
    Vec h = get_list(params, "h", "p_plus_h");
    check_exp_list(h, "p_plus_h", 0.0, 1.0);
    int n = static_cast<int>(h.size());
    if (params.count("n") && get_dim(params, "p_plus_h") != n)
        throw param_error("p_plus_h: n must match the radicand exponent list length");
    std::string id = "p_plus_h(h=" + list_str(h) + ",p=" + g17(p) + ")";

    auto power = std::make_shared<RadialDensity>("p_plus_h_power", n, 1.0, id + "#power",
                                                 profile_power(p, 1.0));
    power->set_hint({[p](double t) { return p * (p - 1.0) * std::pow(t, p - 2.0); },
                     [p](double t) { return p * std::pow(t, p - 2.0); }, 1.0, true});
    std::map<std::string, Vec> hp{{"p", h}};
    Density tail = build_degenerate(hp);

    auto d = std::make_shared<SumDensity>("p_plus_h", n, 1.0, id,
                                          std::vector<Density>{power, tail});
    double q_h = *std::max_element(h.begin(), h.end());
    ExponentSet e;
    e.n = n;
    e.p = p;
    e.q = std::max(p, q_h);
    e.m = p * (p - 1.0);
    e.M = p + tail->exponent_set()->M;
    d->set_exponents(e);
    return d;
}

Density build_log_plus_h(const std::map<std::string, Vec>& params) {
    require_keys(params, "log_plus_h", {"a", "q", "t0", "n"});
    double a = get_scalar(params, "a", "log_plus_h");
    if (!(a > 0.0 && a <= 64.0))
        throw param_error("log_plus_h: a must lie in (0,64], got " + g17(a));
    double q = get_scalar(params, "q", "log_plus_h");
    if (!(q > 1.0 && q <= 2.0))
        throw param_error("log_plus_h: q must lie in (1,2], got " + g17(q));
    int n = get_dim(params, "log_plus_h");

    std::map<std::string, Vec> lp{{"a", Vec{a}}, {"n", Vec{static_cast<double>(n)}}};
    if (params.count("t0")) lp["t0"] = params.at("t0");
    Density head = build_log_power(lp);

    Vec h(n, 1.0);
    h.back() = q;
    std::map<std::string, Vec> hp{{"p", h}};
    Density tail = build_degenerate(hp);

    std::string id = "log_plus_h(a=" + g17(a) + ",n=" + std::to_string(n) + ",q=" + g17(q) +
                     ",t0=" + g17(head->t0()) + ")";
    return std::make_shared<SumDensity>("log_plus_h", n, head->t0(), id,
                                        std::vector<Density>{head, tail});
}

Density build_iterlog_plus_h(const std::map<std::string, Vec>& params) {
    require_keys(params, "iterlog_plus_h", {"k", "q", "n"});
    int k = get_int(params, "k", "iterlog_plus_h");
    if (k < 1 || k > 6)
        throw param_error("iterlog_plus_h: k must be an integer in [1,6], got " +
                          std::to_string(k));
    double q = get_scalar(params, "q", "iterlog_plus_h");
    if (!(q > 1.0 && q <= 2.0))
        throw param_error("iterlog_plus_h: q must lie in (1,2], got " + g17(q));
    int n = get_dim(params, "iterlog_plus_h");

    std::string id = "iterlog_plus_h(k=" + std::to_string(k) + ",n=" + std::to_string(n) +
                     ",q=" + g17(q) + ")";
    auto head = std::make_shared<RadialDensity>("iterlog_head", n, 0.0, id + "#head",
                                                profile_t_logk(k));
    head->set_hint({[k](double t) {
                        auto L = log_ladder(t, k);
                        double prod = 1.0 + t;
                        for (int i = 0; i + 1 < k; ++i) prod *= 1.0 + L[i];
                        return 0.5 / prod;
                    },
                    [k](double t) { return 2.0 * iterated_log(t, k) / t; },
                    6.0 + 2.0 * k, true});

    Vec h(n, 1.0);
    h.back() = q;
    std::map<std::string, Vec> hp{{"p", h}};
    Density tail = build_degenerate(hp);

    // claim the hypotheses only from the radius where the head envelope is
    // proven, so the official series never mixes sampled and closed-form parts
    return std::make_shared<SumDensity>("iterlog_plus_h", n, 5.0 + 2.0 * k, id,
                                        std::vector<Density>{head, tail});
}

}  // namespace

Density make_radial(RadialProfile profile, int dim, const std::string& label) {
    if (dim < 1 || dim > 16) throw param_error("make_radial: dim must lie in [1,16]");
    return std::make_shared<RadialDensity>(label, dim, profile.t0,
                                           label + "(radial,n=" + std::to_string(dim) + ")",
                                           std::move(profile));
}

Density make_separable(RadialProfile profile, int dim, const std::string& label) {
    if (dim < 1 || dim > 16) throw param_error("make_separable: dim must lie in [1,16]");
    return std::make_shared<SeparableDensity>(
        label, dim, profile.t0, label + "(separable,n=" + std::to_string(dim) + ")",
        std::move(profile));
}

Density catalog_lookup(const std::string& name, const std::map<std::string, Vec>& params) {
    if (name == "power_regularized") return build_power_regularized(params);
    if (name == "log_power") return build_log_power(params);
    if (name == "iterated_log") return build_iterated_log(params);
    if (name == "radial") return build_radial_power(params);
    if (name == "separable_log") return build_separable_log(params);
    if (name == "aniso_power_sum") return build_aniso(params);
    if (name == "sqrt_power_sum") return build_sqrt_sum(params);
    if (name == "degenerate_radicand") return build_degenerate(params);
    if (name == "p_plus_h") return build_p_plus_h(params);
    if (name == "log_plus_h") return build_log_plus_h(params);
    if (name == "iterlog_plus_h") return build_iterlog_plus_h(params);
    throw param_error("catalog_lookup: unknown integrand '" + name + "'");
}

const std::vector<CatalogEntryInfo>& catalog_entries() {
    static const std::vector<CatalogEntryInfo> entries = {
        {"power_regularized", "(1+|xi|^2)^(p/2)", "p in (1,2]; n in [2,16]"},
        {"log_power", "|xi| log(|xi|)^a, quadratic below t0",
         "a in (0,64]; t0 >= 1 (default exp(max(a,1-a))); n in [2,16]"},
        {"iterated_log", "(1+|xi|) L_k(|xi|), L_1 = log(1+t), L_{j+1} = log(1+L_j)",
         "k in [1,6]; n in [2,16]"},
        {"radial", "|xi|^p, quadratic below t0 when t0 > 0",
         "p in (1,2]; t0 >= 0 (default 0); n in [2,16]"},
        {"separable_log", "sum_i G_a(|xi_i|) with the log_power profile G_a",
         "a in (0,64]; t0 > 1 (default exp(max(a,1-a))); n in [2,16]"},
        {"aniso_power_sum", "sum_i (1+xi_i^2)^(p_i/2)", "p_i in (1,2]; 2 <= n <= 16"},
        {"sqrt_power_sum", "sqrt(sum_i (1+xi_i^2)^(p_i))", "p_i in [1,2]; 2 <= n <= 16"},
        {"degenerate_radicand", "sqrt(sum_i |xi_i|^(2 p_i))", "p_i in [1,2]; 2 <= n <= 16"},
        {"p_plus_h", "|xi|^p (quadratic below 1) + sqrt(sum_i |xi_i|^(2 h_i))",
         "p in (1,2]; h_i in [1,2]; n = len(h)"},
        {"log_plus_h", "log_power head + sqrt(|xi_1|^2+...+|xi_{n-1}|^2+|xi_n|^(2q))",
         "a in (0,64]; q in (1,2]; n in [2,16]"},
        {"iterlog_plus_h", "|xi| L_k(|xi|) + sqrt(|xi_1|^2+...+|xi_n|^(2q))",
         "k in [1,6]; q in (1,2]; n in [2,16]"},
    };
    return entries;
}

// ---------------------------------------------------------------------------
// "name(key=value,key=[...],...)"

namespace {

void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

double parse_number(const std::string& s, std::size_t& i, const std::string& ctx) {
    skip_ws(s, i);
    std::size_t end = i;
    while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) ||
                              s[end] == '+' || s[end] == '-' || s[end] == '.' ||
                              s[end] == 'e' || s[end] == 'E'))
        ++end;
    if (end == i) throw param_error("parse_integrand: expected a number in " + ctx);
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s.substr(i, end - i), &used);
    } catch (const std::exception&) {
        throw param_error("parse_integrand: bad number '" + s.substr(i, end - i) + "'");
    }
    if (used != end - i) throw param_error("parse_integrand: bad number in " + ctx);
    i = end;
    return v;
}

}  // namespace

Density parse_integrand(const std::string& text) {
    std::size_t i = 0;
    skip_ws(text, i);
    std::size_t start = i;
    while (i < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        ++i;
    std::string name = text.substr(start, i - start);
    if (name.empty()) throw param_error("parse_integrand: missing integrand name");
    skip_ws(text, i);

    std::map<std::string, Vec> params;
    if (i < text.size() && text[i] == '(') {
        ++i;
        skip_ws(text, i);
        while (i < text.size() && text[i] != ')') {
            std::size_t ks = i;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                ++i;
            std::string key = text.substr(ks, i - ks);
            if (key.empty()) throw param_error("parse_integrand: expected a parameter name");
            skip_ws(text, i);
            if (i >= text.size() || text[i] != '=')
                throw param_error("parse_integrand: expected '=' after '" + key + "'");
            ++i;
            skip_ws(text, i);
            Vec vals;
            if (i < text.size() && text[i] == '[') {
                ++i;
                while (true) {
                    vals.push_back(parse_number(text, i, key));
                    skip_ws(text, i);
                    if (i < text.size() && text[i] == ',') {
                        ++i;
                        continue;
                    }
                    break;
                }
                if (i >= text.size() || text[i] != ']')
                    throw param_error("parse_integrand: unterminated list for '" + key + "'");
                ++i;
            } else {
                vals.push_back(parse_number(text, i, key));
            }
            if (params.count(key))
                throw param_error("parse_integrand: duplicate parameter '" + key + "'");
            params[key] = vals;
            skip_ws(text, i);
            if (i < text.size() && text[i] == ',') {
                ++i;
                skip_ws(text, i);
            }
        }
        if (i >= text.size() || text[i] != ')')
            throw param_error("parse_integrand: missing ')'");
        ++i;
    }
    skip_ws(text, i);
    if (i != text.size())
        throw param_error("parse_integrand: trailing characters after ')'");
    return catalog_lookup(name, params);
}

}  // namespace sg
