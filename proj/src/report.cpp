#include "sg/report.hpp"

#include <fstream>

namespace sg {

void Report::section(const std::string& name) {
    if (!lines_.empty()) lines_.push_back("");
    lines_.push_back("[" + name + "]");
}

void Report::kv(const std::string& key, const std::string& value) {
    lines_.push_back(key + " = " + value);
}
void Report::kv(const std::string& key, const char* value) { kv(key, std::string(value)); }
void Report::kv(const std::string& key, double value) { kv(key, g17(value)); }
void Report::kv(const std::string& key, int value) { kv(key, std::to_string(value)); }
void Report::kv(const std::string& key, std::uint64_t value) { kv(key, std::to_string(value)); }
void Report::kv(const std::string& key, bool value) {
    kv(key, std::string(value ? "true" : "false"));
}

std::string Report::str() const {
    std::string out;
    for (const auto& l : lines_) {
        out += l;
        out += '\n';
    }
    return out;
}

void Report::write(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw param_error("Report::write: cannot open " + path);
    f << str();
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<Vec>& rows) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    out += '\n';
    for (const Vec& r : rows) {
        if (r.size() != header.size()) throw param_error("csv_table: ragged row");
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c) out += ',';
            out += g17(r[c]);
        }
        out += '\n';
    }
    return out;
}

void embed_config(Report& rep, const RunConfig& cfg) {
    rep.section("config");
    rep.kv("command", cfg.command);
    rep.kv("integrand", cfg.integrand);
    rep.kv("N", cfg.N);
    rep.kv("tol", cfg.tol);
    rep.kv("max_iter", cfg.max_iter);
    rep.kv("mu", cfg.mu);
    rep.kv("alpha", cfg.alpha);
    rep.kv("beta", cfg.beta);
    rep.kv("two_star", cfg.two_star);
    rep.kv("t_lo", cfg.t_lo);
    rep.kv("t_hi", cfg.t_hi);
    rep.kv("grid_points", cfg.grid_points);
    rep.kv("n_dirs", cfg.n_dirs);
    rep.kv("slack", cfg.slack);
    rep.kv("rho", cfg.rho);
    rep.kv("R", cfg.R);
    rep.kv("scales", format_vec(cfg.scales));
    rep.kv("slope_tol", cfg.slope_tol);
    rep.kv("k", cfg.k);
    rep.kv("i_max", cfg.i_max);
    rep.kv("out_dir", cfg.out_dir);
    rep.kv("seed", cfg.seed);
}

Report render_analysis(const AnalysisReport& an, const RunConfig& cfg) {
    Report rep;
    embed_config(rep, cfg);
    rep.section("grid");
    rep.kv("t_lo", an.used.t_lo);
    rep.kv("t_hi", an.used.t_hi);
    rep.kv("points", an.used.grid_points);
    rep.kv("directions", an.used.n_dirs);
    rep.kv("seed", an.used.seed);
    rep.kv("envelope_source", an.envelope_source);

    rep.section("resolved");
    rep.kv("integrand", an.integrand_id);
    rep.kv("n", an.n);
    rep.kv("mu", an.used.mu);
    rep.kv("alpha", an.used.alpha);
    rep.kv("beta", an.used.beta);
    rep.kv("two_star", an.used.two_star);
    rep.kv("C1", an.used.C1);
    rep.kv("C2", an.used.C2);
    rep.kv("beta_window_lo", an.beta_lo);
    rep.kv("beta_window_hi", an.beta_hi);

    for (const CheckResult& c : an.checks) {
        rep.section(c.id);
        rep.kv("pass", c.pass);
        if (!c.detail.empty()) rep.kv("detail", c.detail);
        for (const auto& s : c.stats) rep.kv(s.first, s.second);
    }

    if (an.exps) {
        const ExponentSet& e = *an.exps;
        rep.section("exponents");
        rep.kv("p", e.p);
        rep.kv("q", e.q);
        rep.kv("m", e.m);
        rep.kv("M", e.M);
        rep.kv("r", e.r);
        rep.kv("s", e.s);
        rep.kv("theta_pq", e.theta_pq);
        rep.section("PQ");
        rep.kv("pass", e.pq_ok);
        rep.section("ANISO");
        rep.kv("pass", e.aniso_ok);
        rep.section("EX1");
        rep.kv("pass", e.ex1_ok);
        rep.section("EX2");
        rep.kv("pass", e.ex2_ok);
        const RemarkThresholds rt = remark_comparison(e);
        rep.section("REMARK");
        rep.kv("threshold_general", rt.threshold_general);
        rep.kv("threshold_sharp", rt.threshold_sharp);
        rep.kv("strict", rt.threshold_general < rt.threshold_sharp);
    }

    rep.section("result");
    rep.kv("theta", an.theta);
    rep.kv("pass", an.pass);
    return rep;
}

std::string analysis_samples_csv(const AnalysisReport& an) {
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < an.samples.t.size(); ++i)
        rows.push_back({an.samples.t[i], an.samples.g1[i], an.samples.g2[i], an.g1_env[i],
                        an.g2_env[i], an.samples.f_min[i], an.samples.f_max[i]});
    return csv_table({"t", "g1_sampled", "g2_sampled", "g1_env", "g2_env", "f_min", "f_max"},
                     rows);
}

Report render_solve(const SolveResult& res, const RunConfig& cfg) {
    Report rep;
    embed_config(rep, cfg);
    rep.section("solve");
    rep.kv("converged", res.converged);
    rep.kv("iterations", res.iterations);
    rep.kv("energy", res.energy);
    rep.kv("residual", res.residual);
    for (const auto& s : res.sup_grad) rep.kv("sup_grad_" + g17(s.first), s.second);
    for (const auto& m : res.local_mean)
        rep.kv("local_mean_" + g17(m.first.first) + "_" + g17(m.first.second), m.second);
    return rep;
}

Report render_scaling(const ScalingStudy& st, const RunConfig& cfg) {
    Report rep;
    embed_config(rep, cfg);
    rep.section("scaling");
    rep.kv("complete", st.complete);
    rep.kv("fitted_slope", st.fitted_slope);
    rep.kv("theta_theoretical", st.theta_theoretical);
    rep.kv("fitted_C", st.fitted_C);
    rep.kv("slope_ok", st.slope_ok);
    rep.kv("bound_ok", st.bound_ok);
    return rep;
}

std::string scaling_csv(const ScalingStudy& st) {
    std::vector<Vec> rows;
    for (std::size_t j = 0; j < st.scales.size(); ++j)
        rows.push_back({st.scales[j], st.sup_grads[j], st.means[j]});
    return csv_table({"scale", "sup_grad", "local_mean"}, rows);
}

Report render_schedule(const IterationSchedule& sch, const RunConfig& cfg) {
    Report rep;
    embed_config(rep, cfg);
    rep.section("SCHEDULE");
    rep.kv("n", sch.n);
    rep.kv("beta", sch.beta);
    rep.kv("two_star", sch.two_star);
    rep.kv("limit", sch.limit);
    rep.kv("admissible", sch.admissible);
    rep.kv("steps", static_cast<int>(sch.deltas.size()) - 1);
    rep.kv("normalized_last", sch.normalized.back());
    return rep;
}

std::string schedule_csv(const IterationSchedule& sch) {
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < sch.deltas.size(); ++i)
        rows.push_back({static_cast<double>(i), sch.deltas[i], sch.closed_form[i],
                        sch.normalized[i]});
    return csv_table({"i", "delta", "closed_form", "normalized"}, rows);
}

std::string convergence_csv(const std::vector<EnergyConvergenceRow>& rows) {
    std::vector<Vec> table;
    for (const auto& r : rows) table.push_back({r.eps, r.inner, r.gap, r.outer});
    return csv_table({"parameter", "energy", "gap", "bound"}, table);
}

}  // namespace sg
