#include "asfw/solver.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace asfw {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Platform-independent uniform double in [0,1).
double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

Vec sample_point(const Polytope& C, std::mt19937_64& rng) {
    const int n = C.dim();
    Vec x(n);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        for (int i = 0; i < n; ++i) x[i] = C.lb[i] + uniform01(rng) * (C.ub[i] - C.lb[i]);
        if (C.contains(x)) return x;
    }
    throw std::runtime_error("sample_point: rejection sampling failed (rows too tight)");
}

}  // namespace

StepWeights step_schedule(long t) {
    if (t < 0) throw DimensionError("step_schedule: t must be >= 0");
    StepWeights w;
    w.a = 2.0 * t + 2.0;
    w.A = static_cast<double>(t + 1) * static_cast<double>(t + 2);
    w.alpha = w.a / w.A;
    return w;
}

double dual_gap(double model_value, double alpha) { return -model_value / alpha; }

CurvatureEstimate estimate_curvature(const Problem& problem, int samples, std::uint64_t seed) {
    if (samples < 1) throw DimensionError("estimate_curvature: samples must be >= 1");
    std::mt19937_64 rng(seed);
    const int n = problem.n;
    CurvatureEstimate est;
    est.samples = samples;
    Vec y(n);
    for (int k = 0; k < samples; ++k) {
        const Vec x = sample_point(problem.C, rng);
        const Vec v = sample_point(problem.C, rng);
        const EvalRecord rec = eval(problem.tape, x);
        const double fx = rec.y;
        for (double alpha : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
            double dist2 = 0.0;
            for (int i = 0; i < n; ++i) {
                const double step = alpha * (v[i] - x[i]);
                y[i] = x[i] + step;
                dist2 += step * step;
            }
            const double model = eval_pl(problem.tape, rec, y) - fx;
            const double err = std::abs(eval(problem.tape, y).y - fx - model);
            est.C_f_est = std::max(est.C_f_est, 2.0 * err / (alpha * alpha));
            if (dist2 > 0.0) est.gamma_est = std::max(est.gamma_est, err / dist2);
        }
    }
    return est;
}

Trace run_asfw(const Problem& problem, const SolveConfig& config) {
    problem.C.validate();
    if (!problem.C.contains(problem.start)) throw DimensionError("run_asfw: start point infeasible");
    const auto t0 = Clock::now();
    const int n = problem.n;
    // Vanilla means exact inner solves; realize them with an effectively
    // unlimited budget.
    const int max_inner = config.variant == Variant::Vanilla ? 1 << 24 : config.max_inner;

    Trace tr;
    tr.curvature = estimate_curvature(problem, config.curvature_samples, config.seed);
    const double cf = tr.curvature.C_f_est;

    Vec x = problem.start;
    double fx = eval(problem.tape, x).y;
    double sum_af = 0.0;    // sum a_i f(x_i)
    double sum_model = 0.0; // sum a_i [ delta_i / alpha_i - (alpha_i/2) C_f ]
    double prev_AG = 0.0;
    long pivot_cum = 0;
    tr.stop_reason = "max_outer";

    for (long t = 0; t < config.max_outer; ++t) {
        const StepWeights w = step_schedule(t);
        const AbsLinearForm form = abs_linearize(problem.tape, x);
        const PLSolveResult res = minimize_pl(form, problem.C, x, w.alpha, max_inner);
        pivot_cum += res.pivot_total;
        const double g_hat = dual_gap(res.model_value, w.alpha);

        sum_af += w.a * fx;
        sum_model += w.a * (res.model_value / w.alpha - 0.5 * w.alpha * cf);
        const double lower = (sum_af + sum_model) / w.A;

        Vec x_next(n);
        for (int i = 0; i < n; ++i) x_next[i] = (1.0 - w.alpha) * x[i] + w.alpha * res.v[i];
        const double f_next = eval(problem.tape, x_next).y;
        const double gap = f_next - lower;

        IterRecord rec;
        rec.t = t;
        rec.f = fx;
        rec.g_hat = g_hat;
        rec.L = lower;
        rec.G = gap;
        rec.E = w.A * gap - prev_AG;
        rec.pivot_cum = pivot_cum;
        rec.inner_iters = res.inner_iters;
        rec.exact = res.exact;
        rec.elapsed_ms = ms_since(t0);
        tr.iters.push_back(rec);
        prev_AG = w.A * gap;

        x = std::move(x_next);
        fx = f_next;
        if (res.exact && g_hat <= config.dual_gap_tol) {
            tr.stop_reason = "dual_gap";
            break;
        }
    }
    tr.x_final = std::move(x);
    tr.f_final = fx;
    return tr;
}

Trace run_hb_asfw(const Problem& problem, const SolveConfig& config) {
    problem.C.validate();
    if (!problem.C.contains(problem.start))
        throw DimensionError("run_hb_asfw: start point infeasible");
    const auto t0 = Clock::now();
    const int n = problem.n;
    const int max_inner = config.variant == Variant::Vanilla ? 1 << 24 : config.max_inner;

    Trace tr;
    tr.curvature = estimate_curvature(problem, config.curvature_samples, config.seed);
    const double cf = tr.curvature.C_f_est;

    Vec x = problem.start;
    double fx = eval(problem.tape, x).y;
    double sum_af = 0.0;
    double sum_half = 0.0;  // sum a_i alpha_i / 2 * C_f
    double prev_AG = 0.0;
    long pivot_cum = 0;
    long s_total = 0;
    tr.stop_reason = "max_outer";

    std::vector<AbsLinearForm> blocks;
    Vec weights, steps;
    // Dropped leading blocks contribute fixed amounts to the running sums;
    // keep those so L_t stays the full-history expression up to truncation.
    for (long t = 0; t < config.max_outer; ++t) {
        const StepWeights w = step_schedule(t);
        AbsLinearForm form = abs_linearize(problem.tape, x);
        s_total += form.s;
        if (s_total > config.hb_switch_cap)
            throw std::runtime_error(
                "run_hb_asfw: aggregated switching rows exceed the configured cap; set hb_window "
                "to truncate the model history");
        blocks.push_back(form);
        weights.push_back(w.a);
        steps.push_back(w.alpha);
        if (config.hb_window > 0 && static_cast<int>(blocks.size()) > config.hb_window) {
            s_total -= blocks.front().s;
            blocks.erase(blocks.begin());
            weights.erase(weights.begin());
            steps.erase(steps.begin());
            tr.windowed = true;
        }

        // The first step has a single block, so Phi_0 is just the weighted
        // single-block increment; solving it through the single-block path
        // keeps the t = 0 certificate identical to the non-aggregated loop.
        PLSolveResult res;
        double g_hat, lower;
        sum_af += w.a * fx;
        sum_half += 0.5 * w.a * w.alpha * cf;
        if (t == 0) {
            res = minimize_pl(form, problem.C, x, w.alpha, max_inner);
            g_hat = dual_gap(res.model_value, w.alpha);
            lower = (sum_af + w.a * (res.model_value / w.alpha - 0.5 * w.alpha * cf)) / w.A;
        } else {
            const AbsLinearForm agg = aggregate(blocks, weights, steps, x);
            res = minimize_form(agg, problem.C, x, max_inner);
            // Current-block dual gap (the aggregate optimum is not g(x_t)).
            Vec step_vec(n);
            for (int i = 0; i < n; ++i) step_vec[i] = w.alpha * (res.v[i] - x[i]);
            g_hat = dual_gap(delta(form, step_vec), w.alpha);
            // Phi_t(v_t) = res.model_value (aggregate eval is Phi itself).
            lower = (sum_af + res.model_value - sum_half) / w.A;
        }
        pivot_cum += res.pivot_total;

        Vec x_next(n);
        for (int i = 0; i < n; ++i) x_next[i] = (1.0 - w.alpha) * x[i] + w.alpha * res.v[i];
        const double f_next = eval(problem.tape, x_next).y;
        const double gap = f_next - lower;

        IterRecord rec;
        rec.t = t;
        rec.f = fx;
        rec.g_hat = g_hat;
        rec.L = lower;
        rec.G = gap;
        rec.E = w.A * gap - prev_AG;
        rec.pivot_cum = pivot_cum;
        rec.inner_iters = res.inner_iters;
        rec.exact = res.exact;
        rec.elapsed_ms = ms_since(t0);
        prev_AG = w.A * gap;

        x = std::move(x_next);
        fx = f_next;

        // Periodic stop test via a one-off single-block solve at x_t.
        bool stop = false;
        if (config.hb_gap_check_interval > 0 && (t + 1) % config.hb_gap_check_interval == 0) {
            const PLSolveResult gap_res = minimize_pl(form, problem.C, form.anchor, w.alpha, max_inner);
            pivot_cum += gap_res.pivot_total;
            rec.pivot_cum = pivot_cum;
            if (gap_res.exact && dual_gap(gap_res.model_value, w.alpha) <= config.dual_gap_tol) {
                tr.stop_reason = "dual_gap";
                stop = true;
            }
        }
        tr.iters.push_back(rec);
        if (stop) break;
    }
    tr.x_final = std::move(x);
    tr.f_final = fx;
    return tr;
}

Trace run_subgradient_fw(const Problem& problem, const SolveConfig& config) {
    problem.C.validate();
    if (!problem.C.contains(problem.start))
        throw DimensionError("run_subgradient_fw: start point infeasible");
    const auto t0 = Clock::now();
    const int n = problem.n;
    const bool box_only = problem.C.h.empty();

    Trace tr;
    Vec x = problem.start;
    double fx = eval(problem.tape, x).y;
    long pivot_cum = 0;
    tr.stop_reason = "max_outer";

    for (long t = 0; t < config.max_outer; ++t) {
        const StepWeights w = step_schedule(t);
        // Extreme subgradient: gradient of the active linear piece with kink
        // ties resolved to +1. Away from kinks this equals the chain-rule
        // subgradient; at ties it picks one piece deterministically instead
        // of averaging, which is the convention classical baselines use.
        const AbsLinearForm form = abs_linearize(problem.tape, x);
        const Vec z = solve_z(form, x);
        SignatureVector sig;
        sig.sigma.resize(form.s);
        for (int i = 0; i < form.s; ++i) sig.sigma[i] = z[i] < 0.0 ? -1 : 1;
        const Vec g = restrict_to_signature(form, sig).grad;

        Vec v(n);
        if (box_only) {
            for (int i = 0; i < n; ++i) v[i] = g[i] < 0.0 ? problem.C.ub[i] : problem.C.lb[i];
        } else {
            LPProblem lp;
            lp.objective = g;
            lp.lb = problem.C.lb;
            lp.ub = problem.C.ub;
            lp.G = problem.C.G;
            lp.h = problem.C.h;
            const LPSolution sol = solve_lp(lp);
            if (sol.status != LPStatus::Optimal)
                throw std::runtime_error("run_subgradient_fw: LMO infeasible");
            pivot_cum += sol.pivot_count;
            v = sol.x;
        }
        double gap = 0.0;  // classical FW gap <g, x - v>
        for (int i = 0; i < n; ++i) gap += g[i] * (x[i] - v[i]);

        IterRecord rec;
        rec.t = t;
        rec.f = fx;
        rec.g_hat = gap;
        rec.pivot_cum = pivot_cum;
        rec.inner_iters = 1;
        rec.exact = true;
        rec.elapsed_ms = ms_since(t0);
        tr.iters.push_back(rec);

        for (int i = 0; i < n; ++i) x[i] = (1.0 - w.alpha) * x[i] + w.alpha * v[i];
        fx = eval(problem.tape, x).y;
        if (gap <= config.dual_gap_tol) {
            tr.stop_reason = "dual_gap";
            break;
        }
    }
    tr.x_final = std::move(x);
    tr.f_final = fx;
    return tr;
}

Trace run(const Problem& problem, const SolveConfig& config) {
    switch (config.variant) {
        case Variant::Vanilla:
        case Variant::Relaxed: return run_asfw(problem, config);
        case Variant::HeavyBall: return run_hb_asfw(problem, config);
        case Variant::SubgradientFW: return run_subgradient_fw(problem, config);
    }
    throw DimensionError("run: unknown variant");
}

}  // namespace asfw
