#pragma once

#include <cstdint>

#include "sg/grid.hpp"
#include "sg/integrand.hpp"

namespace sg {

// C-infinity ramp on [0,1]: 1 at u <= 0, 0 at u >= 1, built from exp(-1/t)
// transitions; first and second derivatives by hand formulas
double smooth_ramp(double u);
double smooth_ramp_d1(double u);
double smooth_ramp_d2(double u);

// piecewise perturbation profile: quartic cap below 1, identity beyond;
// C^2 across the junction, h(0) = 3/8, h''(0) = 3/2
double perturbation_h(double t);
double perturbation_h_d1(double t);
double perturbation_h_d2(double t);

// radially symmetric C-infinity bump of unit mass supported in B_epsilon(0)
struct MollifierKernel {
    int dim;
    double epsilon;
    double normalization;  // C_n for the unit-radius profile exp(-1/(1-|y|^2))

    MollifierKernel(int dim, double epsilon);
    double value(const Vec& y) const;         // eta_eps(y)
    double value_scaled(double r2) const;     // profile at |z|^2 = r2 in unit ball
    double mass_quadrature(int nodes_per_axis) const;
};

// f_k = f(1-phi) + (f phi)*eta_{1/k}; identical to the base density (same code
// path, bit for bit) once |xi| >= t0+2.  Derivatives of the convolution go
// through kernel derivatives, so the base is only ever evaluated pointwise.
Density build_fk(const Density& base, int k, double t0);

// f_k + (1/k) h(|xi|/(t0+2)): uniformly convex near the origin
Density build_ftilde_k(const Density& fk, int k, double t0);

// least k with sampled sup |f - f_k| <= 1 on a fixed seeded point set inside
// B_{t0+2}; the estimate starts from a sampled Lipschitz bound of f*phi and is
// then verified by direct evaluation (never assumed)
int detect_k_star(const Density& base, double t0, int n_points = 160,
                  std::uint64_t seed = 0x5eedf00d5eedf00dull);

// discrete mollification of nodal values: lattice-offset kernel weights
// renormalised to unit sum, applied only where the support fits inside the
// square; nodes closer than epsilon to the boundary keep their original value
GridFunction mollify_grid(const GridFunction& u, double epsilon);

struct EnergyConvergenceRow {
    double eps;
    double inner;  // integral of f(Du_eps) over B_rho
    double outer;  // integral of f(Du) over B_{rho+eps}
    double gap;    // outer - inner
};

// Jensen dominance table: inner <= outer for every eps (convexity), and the
// gap shrinks as eps decreases
std::vector<EnergyConvergenceRow> energy_convergence_check(const Density& f,
                                                           const GridFunction& u, double rho,
                                                           const Vec& eps_list);

}  // namespace sg
