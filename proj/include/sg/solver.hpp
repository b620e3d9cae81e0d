#pragma once

#include <map>
#include <utility>

#include "sg/grid.hpp"
#include "sg/integrand.hpp"

namespace sg {

// energy of the bilinear interpolant: per-cell 2x2 tensor Gauss quadrature
double discretize_energy(const Density& f, const GridFunction& u);

struct SolveResult {
    GridFunction u;
    double energy = 0.0;
    int iterations = 0;
    double residual = 0.0;  // sup-norm of the discrete interior gradient
    bool converged = false;
    std::map<double, double> sup_grad;                       // rho -> sup |Du| on B_rho
    std::map<std::pair<double, double>, double> local_mean;  // (rho, R) -> scaled mean
};

// minimise the discrete energy over interior nodes, Dirichlet ring taken from
// `boundary`.  Quasi-Newton descent (L-BFGS with Armijo backtracking); stops
// when the sup-norm energy gradient falls under tol * (1 + |energy|).  Hitting
// max_iter, or stalling at the rounding floor (collapsed steps with sub-ulp
// energy gains), returns the partial result with converged = false; a failed
// line search raises a numeric_error suggesting non-convexity.
SolveResult minimize(const Density& f, const GridFunction& boundary, const GridFunction& init,
                     double tol = 1e-8, int max_iter = 100000);
// convenience: transfinite interpolant of the ring as the starting iterate
SolveResult minimize(const Density& f, const GridFunction& boundary, double tol = 1e-8,
                     int max_iter = 100000);

// max |Du| over quadrature points of cells whose center lies in B_rho(center);
// requires 0 < rho < 1/2 and at least one qualifying cell
double interior_sup_gradient(const GridFunction& u, double rho);

// (R-rho)^{-2} * integral over cells with center in B_R of (1 + f(Du))
double local_energy_mean(const GridFunction& u, const Density& f, double rho, double R);

struct ScalingStudy {
    Vec scales;
    Vec sup_grads;
    Vec means;
    double fitted_slope = 0.0;       // log sup vs log mean, top half of the scales
    double theta_theoretical = 0.0;
    double fitted_C = 0.0;           // minimal C with sup_j <= C * mean_j^theta
    bool slope_ok = false;
    bool bound_ok = false;
    bool complete = false;           // false when a solve failed to converge
};

// solve with boundary data scale * base_boundary for every scale, then fit
// sup_grad against the local energy mean
ScalingStudy scaling_study(const Density& f,
                           const std::function<double(double, double)>& base_boundary,
                           const Vec& scales, double rho, double R, int N, double theta,
                           double slope_tol = 0.05, double tol = 1e-8, int max_iter = 100000);

}  // namespace sg
