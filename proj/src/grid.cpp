#include "sg/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sg {

GridFunction::GridFunction(int n, double fill) : N(n) {
    if (n < 1) throw param_error("GridFunction: N must be at least 1");
    v.assign(static_cast<std::size_t>(n + 1) * (n + 1), fill);
}

GridFunction make_grid(int N, const std::function<double(double, double)>& f) {
    GridFunction g(N);
    const double h = g.h();
    for (int j = 0; j <= N; ++j)
        for (int i = 0; i <= N; ++i) g.at(i, j) = f(i * h, j * h);
    return g;
}

GridFunction transfinite_interpolant(int N, const std::function<double(double, double)>& b) {
    GridFunction g(N);
    const double h = g.h();
    const double b00 = b(0, 0), b10 = b(1, 0), b01 = b(0, 1), b11 = b(1, 1);
    for (int j = 0; j <= N; ++j) {
        const double y = j * h;
        for (int i = 0; i <= N; ++i) {
            const double x = i * h;
            g.at(i, j) = (1 - x) * b(0, y) + x * b(1, y) + (1 - y) * b(x, 0) + y * b(x, 1) -
                         ((1 - x) * (1 - y) * b00 + x * (1 - y) * b10 + (1 - x) * y * b01 +
                          x * y * b11);
        }
    }
    return g;
}

GridFunction transfinite_from_ring(const GridFunction& ring) {
    const int N = ring.N;
    GridFunction g(N);
    const double h = g.h();
    const double b00 = ring.at(0, 0), b10 = ring.at(N, 0);
    const double b01 = ring.at(0, N), b11 = ring.at(N, N);
    for (int j = 0; j <= N; ++j) {
        const double y = j * h;
        for (int i = 0; i <= N; ++i) {
            const double x = i * h;
            g.at(i, j) = (1 - x) * ring.at(0, j) + x * ring.at(N, j) + (1 - y) * ring.at(i, 0) +
                         y * ring.at(i, N) -
                         ((1 - x) * (1 - y) * b00 + x * (1 - y) * b10 + (1 - x) * y * b01 +
                          x * y * b11);
        }
    }
    return g;
}

void for_each_cell_quadrature(
    const GridFunction& u,
    const std::function<void(int, int, double, double, double, double, double)>& fn) {
    const int N = u.N;
    const double h = u.h();
    // 2-point Gauss nodes on [0,1], weight 1/2 each
    const double qa = 0.5 - 0.5 / std::sqrt(3.0);
    const double qb = 0.5 + 0.5 / std::sqrt(3.0);
    const double qn[2] = {qa, qb};
    const double w = h * h * 0.25;
    for (int cj = 0; cj < N; ++cj) {
        for (int ci = 0; ci < N; ++ci) {
            const double u00 = u.at(ci, cj), u10 = u.at(ci + 1, cj);
            const double u01 = u.at(ci, cj + 1), u11 = u.at(ci + 1, cj + 1);
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const double s = qn[a], t = qn[b];
                    const double ux = ((u10 - u00) * (1 - t) + (u11 - u01) * t) / h;
                    const double uy = ((u01 - u00) * (1 - s) + (u11 - u10) * s) / h;
                    fn(ci, cj, (ci + s) * h, (cj + t) * h, ux, uy, w);
                }
            }
        }
    }
}

void save_grid(const GridFunction& g, const std::string& path, const std::string& integrand,
               double tol) {
    std::ofstream out(path);
    if (!out) throw param_error("save_grid: cannot open " + path);
    for (int j = 0; j <= g.N; ++j) {
        for (int i = 0; i <= g.N; ++i) {
            if (i) out << ' ';
            out << g17(g.at(i, j));
        }
        out << '\n';
    }
    out.close();
    std::ofstream meta(path + ".meta");
    if (!meta) throw param_error("save_grid: cannot open " + path + ".meta");
    meta << "N = " << g.N << "\n";
    meta << "domain = [0,1]x[0,1]\n";
    meta << "integrand = " << integrand << "\n";
    meta << "tol = " << g17(tol) << "\n";
}

GridFunction load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw param_error("load_grid: cannot open " + path);
    std::vector<Vec> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Vec row;
        double x;
        while (ls >> x) row.push_back(x);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw param_error("load_grid: " + path + " is empty");
    const std::size_t m = rows.size();
    for (const auto& r : rows)
        if (r.size() != m) throw param_error("load_grid: " + path + " is not square");
    GridFunction g(static_cast<int>(m) - 1);
    for (int j = 0; j < static_cast<int>(m); ++j)
        for (int i = 0; i < static_cast<int>(m); ++i) g.at(i, j) = rows[j][i];
    return g;
}

}  // namespace sg
