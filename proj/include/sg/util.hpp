#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sg {

using Vec = std::vector<double>;

// invalid user input: bad names, parameters out of range, malformed strings
struct param_error : std::runtime_error {
    explicit param_error(const std::string& what) : std::runtime_error(what) {}
};

// numeric trouble discovered while running a check (singular point, overflow, ...)
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// splitmix64: tiny, seedable, identical stream on every platform
struct RngStream {
    std::uint64_t state;
    explicit RngStream(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in (0,1]; never returns 0 so log() is safe
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }
    double normal();   // Box-Muller, one value per call (caches the pair)

  private:
    bool have_spare_ = false;
    double spare_ = 0.0;
};

double norm2(const Vec& v);
double dot(const Vec& a, const Vec& b);

// deterministic direction set on the unit sphere. n=2 uses equally spaced
// angles with a seeded offset; higher dimensions use normalized gaussians.
std::vector<Vec> unit_directions(int dim, int count, std::uint64_t seed);

// companion unit vectors: for each direction a seeded unit vector plus, in
// any dimension, a vector orthogonal to the direction (exact radial probes).
Vec seeded_unit_vector(int dim, RngStream& rng);
Vec orthogonal_unit(const Vec& d, RngStream& rng);

std::vector<double> logspace(double lo, double hi, int count);
std::vector<double> linspace(double lo, double hi, int count);

// Gauss-Legendre nodes/weights on [-1,1]; cached per order
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

double integrate_gl(const std::function<double(double)>& f, double a, double b, int order);

// adaptive bisection with embedded GL pair; splits until the local estimate
// is stable to rel_tol (abs_floor guards integrals that vanish)
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, double abs_floor = 1e-300);

// shortest round-trip decimal form, identical across runs
std::string g17(double x);
std::string format_vec(const Vec& v);

bool nearly_equal(double a, double b, double rel, double abs_floor = 0.0);

}  // namespace sg
