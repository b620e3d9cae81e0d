#pragma once

#include <functional>
#include <string>

#include "sg/util.hpp"

namespace sg {

// nodal values on the (N+1)x(N+1) lattice of the unit square
struct GridFunction {
    int N = 0;
    Vec v;  // row-major: v[j*(N+1)+i] sits at (x, y) = (i/N, j/N)

    GridFunction() = default;
    explicit GridFunction(int n, double fill = 0.0);

    double h() const { return 1.0 / N; }
    int nodes() const { return N + 1; }
    double& at(int i, int j) { return v[static_cast<std::size_t>(j) * (N + 1) + i]; }
    double at(int i, int j) const { return v[static_cast<std::size_t>(j) * (N + 1) + i]; }
};

GridFunction make_grid(int N, const std::function<double(double, double)>& f);

// boundary ring from b, interior filled by transfinite interpolation
GridFunction transfinite_interpolant(int N, const std::function<double(double, double)>& b);
// same, but the ring values come from an existing grid
GridFunction transfinite_from_ring(const GridFunction& ring);

// visit the 2x2 tensor quadrature points of every cell; the callback gets the
// cell index, the point, the bilinear gradient of u there, and the weight
// (which already includes the cell area factor h^2/4)
void for_each_cell_quadrature(
    const GridFunction& u,
    const std::function<void(int ci, int cj, double x, double y, double ux, double uy,
                             double w)>& fn);

// plain-text matrix dump, row-major, one row per line, 17 significant digits;
// a sidecar `<path>.meta` records N, the domain, the integrand string and tol
void save_grid(const GridFunction& g, const std::string& path,
               const std::string& integrand = "", double tol = 0.0);
GridFunction load_grid(const std::string& path);

}  // namespace sg
