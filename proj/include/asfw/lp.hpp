#pragma once

#include "asfw/common.hpp"

namespace asfw {

// Dense LP in the form
//     min  objective . x
//     s.t. G x <= h,  E x = e,  lb <= x <= ub  (bounds finite).
struct LPProblem {
    Vec objective;
    Matrix G;
    Vec h;
    Matrix E;
    Vec e;
    Vec lb, ub;
};

enum class LPStatus { Optimal, Infeasible };

struct LPSolution {
    LPStatus status = LPStatus::Infeasible;
    Vec x;
    double objective_value = 0.0;
    long pivot_count = 0;
};

inline constexpr double kLpFeasTol = 1e-8;
inline constexpr double kLpCostTol = 1e-9;

/// Two-phase primal simplex on the full tableau. Dantzig pricing with a
/// Bland's-rule fallback once degenerate pivots accumulate, lowest-index
/// tie breaking throughout, so identical inputs give identical solutions.
LPSolution solve_lp(const LPProblem& p);

}  // namespace asfw
