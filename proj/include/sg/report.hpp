#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sg/analyzer.hpp"
#include "sg/apriori.hpp"
#include "sg/approx.hpp"
#include "sg/solver.hpp"

namespace sg {

// flat key=value document with [section] headers; doubles go through g17 so
// identical inputs render byte-identical reports
class Report {
  public:
    void section(const std::string& name);
    void kv(const std::string& key, const std::string& value);
    void kv(const std::string& key, const char* value);
    void kv(const std::string& key, double value);
    void kv(const std::string& key, int value);
    void kv(const std::string& key, std::uint64_t value);
    void kv(const std::string& key, bool value);
    std::string str() const;
    void write(const std::string& path) const;

  private:
    std::vector<std::string> lines_;
};

// comma-separated table, one header line, g17 cells
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<Vec>& rows);

// every run setting that influenced the result, resolved to final values
struct RunConfig {
    std::string command;
    std::string integrand;
    int N = 64;
    double tol = 1e-8;
    int max_iter = 100000;
    double mu = -1.0;
    double alpha = -1.0;
    double beta = -1.0;
    double two_star = -1.0;
    double t_lo = -1.0;
    double t_hi = 1e4;
    int grid_points = 200;
    int n_dirs = 256;
    double slack = 1e-9;
    double rho = 0.15;
    double R = 0.35;
    Vec scales = {1, 2, 4, 8, 16, 32, 64};
    double slope_tol = 0.05;
    int k = 0;  // mollification index, 0 = detect
    int i_max = 200;
    std::string out_dir;
    std::uint64_t seed = 0x5eed5106ull;
};

void embed_config(Report& rep, const RunConfig& cfg);

// command-level renderers; each emits the resolved config, the grid settings and
// one block per condition identifier involved
Report render_analysis(const AnalysisReport& an, const RunConfig& cfg);
std::string analysis_samples_csv(const AnalysisReport& an);

Report render_solve(const SolveResult& res, const RunConfig& cfg);

Report render_scaling(const ScalingStudy& st, const RunConfig& cfg);
std::string scaling_csv(const ScalingStudy& st);

Report render_schedule(const IterationSchedule& sch, const RunConfig& cfg);
std::string schedule_csv(const IterationSchedule& sch);

std::string convergence_csv(const std::vector<EnergyConvergenceRow>& rows);

}  // namespace sg
