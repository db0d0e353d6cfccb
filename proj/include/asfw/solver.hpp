#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asfw/aasm.hpp"
#include "asfw/problems.hpp"

namespace asfw {

enum class Variant { Vanilla, Relaxed, HeavyBall, SubgradientFW };

struct SolveConfig {
    Variant variant = Variant::Relaxed;
    long max_outer = 50000;
    int max_inner = 2;
    double dual_gap_tol = 1e-6;
    int hb_window = 0;  // 0 = keep all blocks
    std::uint64_t seed = 42;
    int curvature_samples = 1000;
    int hb_gap_check_interval = 50;
    long hb_switch_cap = 200000;  // total stacked switching rows before failing
};

struct CurvatureEstimate {
    double C_f_est = 0.0;
    double gamma_est = 0.0;
    int samples = 0;
};

struct StepWeights {
    double a;      // a_t = 2t + 2
    double A;      // A_t = (t+1)(t+2)
    double alpha;  // alpha_t = a_t / A_t = 2/(t+2)
};

struct IterRecord {
    long t = 0;
    double f = 0.0;      // f(x_t)
    double g_hat = 0.0;  // inexact dual gap at t
    double L = 0.0;      // ADGT lower bound L_t
    double G = 0.0;      // G_t = f(x_{t+1}) - L_t (one step ahead of f)
    double E = 0.0;      // A_t G_t - A_{t-1} G_{t-1}
    long pivot_cum = 0;
    int inner_iters = 0;
    bool exact = false;
    double elapsed_ms = 0.0;
};

struct Trace {
    std::vector<IterRecord> iters;
    Vec x_final;
    double f_final = 0.0;
    std::string stop_reason;
    CurvatureEstimate curvature;
    bool windowed = false;  // heavy-ball history truncated; certificates not claimed
};

StepWeights step_schedule(long t);

/// Sampled curvature constant: the max over random segments in C of
/// 2 |f(y) - f(x) - delta(x; y-x)| / alpha^2 for alpha in {1, 1/2, ..., 1/16},
/// plus the matching gamma estimate. Deterministic given the seed.
CurvatureEstimate estimate_curvature(const Problem& problem, int samples, std::uint64_t seed);

/// g_hat = -delta(form, alpha (v - anchor)) / alpha given the inner solve's
/// model value (already a delta).
double dual_gap(double model_value, double alpha);

Trace run_asfw(const Problem& problem, const SolveConfig& config);
Trace run_hb_asfw(const Problem& problem, const SolveConfig& config);
Trace run_subgradient_fw(const Problem& problem, const SolveConfig& config);

/// Dispatch on config.variant (Vanilla and Relaxed share run_asfw).
Trace run(const Problem& problem, const SolveConfig& config);

}  // namespace asfw
