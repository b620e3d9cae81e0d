#include "sg/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>

namespace sg {

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<Vec> unit_directions(int dim, int count, std::uint64_t seed) {
    if (dim < 1 || count < 1) throw param_error("unit_directions: dim and count must be positive");
    std::vector<Vec> dirs;
    dirs.reserve(count);
    RngStream rng(seed);
    if (dim == 1) {
        for (int i = 0; i < count; ++i) dirs.push_back({i % 2 == 0 ? 1.0 : -1.0});
        return dirs;
    }
    if (dim == 2) {
        double offset = rng.uniform(0.0, 2.0 * M_PI);
        for (int i = 0; i < count; ++i) {
            double a = offset + 2.0 * M_PI * i / count;
            dirs.push_back({std::cos(a), std::sin(a)});
        }
        return dirs;
    }
    for (int i = 0; i < count; ++i) {
        Vec d(dim);
        double n = 0.0;
        while (n < 1e-12) {
            for (int j = 0; j < dim; ++j) d[j] = rng.normal();
            n = norm2(d);
        }
        for (int j = 0; j < dim; ++j) d[j] /= n;
        dirs.push_back(std::move(d));
    }
    return dirs;
}

Vec seeded_unit_vector(int dim, RngStream& rng) {
    Vec v(dim);
    double n = 0.0;
    while (n < 1e-12) {
        for (int j = 0; j < dim; ++j) v[j] = rng.normal();
        n = norm2(v);
    }
    for (int j = 0; j < dim; ++j) v[j] /= n;
    return v;
}

Vec orthogonal_unit(const Vec& d, RngStream& rng) {
    int dim = static_cast<int>(d.size());
    if (dim == 1) throw param_error("orthogonal_unit: needs dim >= 2");
    if (dim == 2) return {-d[1], d[0]};
    // Gram-Schmidt a seeded vector against d; retry on near-parallel draws
    for (int attempt = 0; attempt < 64; ++attempt) {
        Vec v = seeded_unit_vector(dim, rng);
        double proj = dot(v, d);
        for (int j = 0; j < dim; ++j) v[j] -= proj * d[j];
        double n = norm2(v);
        if (n > 1e-8) {
            for (int j = 0; j < dim; ++j) v[j] /= n;
            return v;
        }
    }
    throw numeric_error("orthogonal_unit: could not build orthogonal vector");
}

std::vector<double> logspace(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo)) throw param_error("logspace: need 0 < lo < hi");
    if (count < 2) throw param_error("logspace: need at least 2 points");
    std::vector<double> out(count);
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        out[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 2) throw param_error("linspace: need at least 2 points");
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = lo + (hi - lo) * i / (count - 1);
    out.back() = hi;
    return out;
}

namespace {

GaussRule build_gauss(int order) {
    // Newton on Legendre P_n; nodes symmetric, start from Chebyshev guess
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[order - 1 - i] = x;
        rule.weights[order - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

std::map<int, GaussRule>& gauss_cache() {
    static std::map<int, GaussRule> cache;
    return cache;
}
std::mutex gauss_mutex;

}  // namespace

const GaussRule& gauss_legendre(int order) {
    if (order < 1 || order > 2048) throw param_error("gauss_legendre: order out of range");
    std::lock_guard<std::mutex> lock(gauss_mutex);
    auto& cache = gauss_cache();
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_gauss(order)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int order) {
    const GaussRule& rule = gauss_legendre(order);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < order; ++i)
        s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return s * half;
}

namespace {

double adaptive_segment(const std::function<double(double)>& f, double a, double b,
                        double tol_abs, int depth) {
    double coarse = integrate_gl(f, a, b, 8);
    double mid = 0.5 * (a + b);
    double fine = integrate_gl(f, a, mid, 8) + integrate_gl(f, mid, b, 8);
    if (!std::isfinite(fine)) throw numeric_error("integrate_adaptive: non-finite integrand");
    if (std::abs(fine - coarse) <= tol_abs || depth >= 48)
        return fine;
    return adaptive_segment(f, a, mid, 0.5 * tol_abs, depth + 1) +
           adaptive_segment(f, mid, b, 0.5 * tol_abs, depth + 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_floor) {
    if (a == b) return 0.0;
    if (a > b) return -integrate_adaptive(f, b, a, rel_tol, abs_floor);
    // pre-split where the integrand scale changes by decades so the local
    // error budget tracks the local magnitude
    std::vector<double> cuts{a};
    if (b - a > 4.0 && a >= 0.0) {
        double c = std::max(1.0, a);
        while (c < b) {
            if (c > a) cuts.push_back(c);
            c *= 10.0;
        }
    }
    cuts.push_back(b);
    double rough = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        rough += std::abs(integrate_gl(f, cuts[i], cuts[i + 1], 8));
    double tol_abs = std::max(rough * rel_tol, abs_floor);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += adaptive_segment(f, cuts[i], cuts[i + 1],
                                  tol_abs * std::max(1e-3, (cuts[i + 1] - cuts[i]) / (b - a)), 0);
    return total;
}

std::string g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string format_vec(const Vec& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += g17(v[i]);
    }
    s += "]";
    return s;
}

bool nearly_equal(double a, double b, double rel, double abs_floor) {
    double diff = std::abs(a - b);
    return diff <= abs_floor + rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace sg
