// Experiment runner: solves a benchmark (or a whole suite) and writes
// trace.csv / summary.csv plus aggregated table files.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "asfw/problems.hpp"
#include "asfw/solver.hpp"

namespace fs = std::filesystem;
using namespace asfw;

namespace {

struct RunSpec {
    std::string problem;
    int n = 0;  // 0 = problem default
    std::string variant = "relaxed";
    int max_inner = 2;
    long max_outer = 50000;
    double tol = 1e-6;
    double rho = 1.0;
    int hb_window = 0;
    std::uint64_t seed = 42;
    std::string out = "out";
    std::string data = "data/diabetes.csv";
};

Variant parse_variant(const std::string& s) {
    if (s == "vanilla") return Variant::Vanilla;
    if (s == "relaxed") return Variant::Relaxed;
    if (s == "hb" || s == "heavy_ball") return Variant::HeavyBall;
    if (s == "subgradient_fw" || s == "subgrad") return Variant::SubgradientFW;
    throw CLI::ValidationError("--variant", "unknown variant '" + s + "'");
}

Problem build_problem(const RunSpec& spec) {
    if (spec.problem == "maxq") return make_maxq(spec.n > 0 ? spec.n : 20);
    if (spec.problem == "wong2") return make_wong2();
    if (spec.problem == "cb3i") return make_cb3i(spec.n > 0 ? spec.n : 500);
    if (spec.problem == "mifflin2") return make_mifflin2(spec.n > 0 ? spec.n : 200);
    if (spec.problem == "lasso") return make_lasso(load_csv_dataset(spec.data), spec.rho);
    throw std::invalid_argument("unknown problem '" + spec.problem + "'");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Trace run_spec(const RunSpec& spec, const Problem& problem) {
    SolveConfig cfg;
    cfg.variant = parse_variant(spec.variant);
    cfg.max_outer = spec.max_outer;
    cfg.max_inner = spec.max_inner;
    cfg.dual_gap_tol = spec.tol;
    cfg.hb_window = spec.hb_window;
    cfg.seed = spec.seed;
    return run(problem, cfg);
}

// trace.csv: deterministic columns first, wall clock last (excluded from
// determinism checks). h = f - f_ref when a reference value is known.
void write_trace(const fs::path& dir, const Problem& problem, const Trace& tr) {
    fs::create_directories(dir);
    std::ofstream out(dir / "trace.csv");
    if (!out) throw std::ios_base::failure("cannot write " + (dir / "trace.csv").string());
    out << "t,f,h,g_hat,L,G,E,inner_iters,pivot_cum,exact,elapsed_ms\n";
    for (const IterRecord& r : tr.iters) {
        out << r.t << ',' << fmt(r.f) << ',';
        if (problem.f_ref) out << fmt(r.f - *problem.f_ref);
        out << ',' << fmt(r.g_hat) << ',' << fmt(r.L) << ',' << fmt(r.G) << ',' << fmt(r.E) << ','
            << r.inner_iters << ',' << r.pivot_cum << ',' << (r.exact ? 1 : 0) << ','
            << fmt(r.elapsed_ms) << '\n';
    }
}

void write_summary(const fs::path& dir, const Trace& tr) {
    std::ofstream out(dir / "summary.csv");
    if (!out) throw std::ios_base::failure("cannot write " + (dir / "summary.csv").string());
    out << "f_final,iterations,pivots,stop_reason\n";
    const long pivots = tr.iters.empty() ? 0 : tr.iters.back().pivot_cum;
    out << fmt(tr.f_final) << ',' << tr.iters.size() << ',' << pivots << ',' << tr.stop_reason
        << '\n';
}

Trace run_and_write(const RunSpec& spec) {
    const Problem problem = build_problem(spec);
    const Trace tr = run_spec(spec, problem);
    write_trace(spec.out, problem, tr);
    write_summary(spec.out, tr);
    return tr;
}

struct TableRow {
    std::string label;
    Trace tr;
};

void write_table(const fs::path& path, const std::vector<TableRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    out << "run,f_final,iterations,pivots,stop_reason\n";
    for (const TableRow& r : rows) {
        const long pivots = r.tr.iters.empty() ? 0 : r.tr.iters.back().pivot_cum;
        out << r.label << ',' << fmt(r.tr.f_final) << ',' << r.tr.iters.size() << ',' << pivots
            << ',' << r.tr.stop_reason << '\n';
    }
}

RunSpec suite_spec(const RunSpec& base, const std::string& problem, int n, const std::string& variant,
                   int max_inner, long max_outer, const std::string& subdir) {
    RunSpec s = base;
    s.problem = problem;
    s.n = n;
    s.variant = variant;
    s.max_inner = max_inner;
    s.max_outer = max_outer;
    s.out = (fs::path(base.out) / subdir).string();
    return s;
}

void run_suite_tables(const RunSpec& base) {
    std::vector<TableRow> t1;
    for (auto& [prob, n] : std::vector<std::pair<std::string, int>>{
             {"maxq", 20}, {"wong2", 0}, {"cb3i", 500}}) {
        for (int mi : {2, 100}) {
            RunSpec s = suite_spec(base, prob, n, mi == 100 ? "vanilla" : "relaxed", mi, 50000,
                                   prob + "_mi" + std::to_string(mi));
            t1.push_back({prob + "_mi" + std::to_string(mi), run_and_write(s)});
            std::cout << "table1: " << t1.back().label << " f=" << t1.back().tr.f_final << "\n";
        }
    }
    write_table(fs::path(base.out) / "table1.csv", t1);

    std::vector<TableRow> t2;
    for (int mi : {2, 10}) {
        RunSpec s = suite_spec(base, "mifflin2", 200, "relaxed", mi, 5000,
                               "mifflin2_mi" + std::to_string(mi));
        t2.push_back({"mifflin2_mi" + std::to_string(mi), run_and_write(s)});
        std::cout << "table2: " << t2.back().label << " f=" << t2.back().tr.f_final << "\n";
    }
    write_table(fs::path(base.out) / "table2.csv", t2);

    std::vector<TableRow> t4;
    for (auto& [prob, n, budget] : std::vector<std::tuple<std::string, int, long>>{
             {"maxq", 20, 20001}, {"wong2", 0, 10001}, {"cb3i", 500, 10001}}) {
        RunSpec s = suite_spec(base, prob, n, "subgradient_fw", 1, budget, prob + "_subgrad");
        s.tol = 0.0;  // run the full budget
        t4.push_back({prob + "_subgrad", run_and_write(s)});
        std::cout << "table4: " << t4.back().label << " f=" << t4.back().tr.f_final << "\n";
    }
    write_table(fs::path(base.out) / "table4.csv", t4);
}

void run_suite_lasso(const RunSpec& base) {
    const Dataset data = load_csv_dataset(base.data);
    fs::create_directories(base.out);
    std::ofstream out(fs::path(base.out) / "table5.csv");
    if (!out) throw std::ios_base::failure("cannot write table5.csv");
    out << "rho,mse,intercept,iterations,pivots,stop_reason\n";
    const double intercept =
        std::accumulate(data.y.begin(), data.y.end(), 0.0) / data.y.size();
    for (double rho : {0.1, 0.5, 1.0, 5.0, 10.0}) {
        RunSpec s = base;
        s.problem = "lasso";
        s.rho = rho;
        std::ostringstream label;
        label << "lasso_rho" << rho;
        s.out = (fs::path(base.out) / label.str()).string();
        const Problem problem = make_lasso(data, rho);
        const Trace tr = run_spec(s, problem);
        write_trace(s.out, problem, tr);
        write_summary(s.out, tr);
        const long pivots = tr.iters.empty() ? 0 : tr.iters.back().pivot_cum;
        out << rho << ',' << fmt(lasso_mse(data, tr.x_final)) << ',' << fmt(intercept) << ','
            << tr.iters.size() << ',' << pivots << ',' << tr.stop_reason << '\n';
        std::cout << "table5: rho=" << rho << " mse=" << lasso_mse(data, tr.x_final) << "\n";
    }
}

void run_suite_figures(const RunSpec& base) {
    // Dual/primal gap traces for the log-log plots.
    for (auto& [prob, n] : std::vector<std::pair<std::string, int>>{{"maxq", 20}, {"wong2", 0}}) {
        RunSpec s = suite_spec(base, prob, n, "vanilla", 100, 50000, prob + "_fig");
        run_and_write(s);
        std::cout << "figures: " << prob << " trace written\n";
    }
}

void run_suite(const RunSpec& base, const std::string& suite) {
    if (suite == "tables" || suite == "all") run_suite_tables(base);
    if (suite == "lasso" || suite == "all") run_suite_lasso(base);
    if (suite == "figures" || suite == "all") run_suite_figures(base);
}

}  // namespace

int main(int argc, char** argv) {
    RunSpec spec;
    std::string suite, config_path;

    CLI::App app{"Projection-free solver for constrained non-smooth optimization"};
    app.add_option("--problem", spec.problem, "maxq | wong2 | cb3i | mifflin2 | lasso");
    app.add_option("--n", spec.n, "problem dimension (0 = default)");
    app.add_option("--variant", spec.variant, "vanilla | relaxed | hb | subgradient_fw");
    app.add_option("--max-inner", spec.max_inner, "inner iteration budget");
    app.add_option("--max-outer", spec.max_outer, "outer iteration budget");
    app.add_option("--tol", spec.tol, "dual gap stopping tolerance");
    app.add_option("--rho", spec.rho, "LASSO l1 weight");
    app.add_option("--hb-window", spec.hb_window, "heavy-ball history window (0 = all)");
    app.add_option("--seed", spec.seed, "RNG seed for curvature sampling");
    app.add_option("--out", spec.out, "output directory");
    app.add_option("--data", spec.data, "dataset CSV path (lasso)");
    app.add_option("--suite", suite, "tables | figures | lasso | all");
    app.set_config("--config", "", "flat key=value config file");
    app.allow_config_extras(false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (!suite.empty()) {
            if (suite != "tables" && suite != "figures" && suite != "lasso" && suite != "all") {
                std::cerr << "error: unknown suite '" << suite << "'\n";
                return 1;
            }
            run_suite(spec, suite);
        } else {
            if (spec.problem.empty()) {
                std::cerr << "error: --problem or --suite is required\n";
                return 1;
            }
            const Trace tr = run_and_write(spec);
            std::cout << "f_final=" << fmt(tr.f_final) << " iterations=" << tr.iters.size()
                      << " stop=" << tr.stop_reason << "\n";
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
