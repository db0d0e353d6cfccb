#pragma once

#include <cmath>

#include "asfw/absform.hpp"
#include "asfw/common.hpp"
#include "asfw/lp.hpp"

namespace asfw {

/// Compact polyhedral feasible set: box bounds plus optional rows G x <= h.
struct Polytope {
    Vec lb, ub;
    Matrix G;
    Vec h;

    int dim() const { return static_cast<int>(lb.size()); }

    double diameter() const {
        double d2 = 0.0;
        for (std::size_t i = 0; i < lb.size(); ++i) d2 += (ub[i] - lb[i]) * (ub[i] - lb[i]);
        return std::sqrt(d2);
    }

    bool contains(const Vec& x, double tol = 1e-8) const;
    void validate() const;  // throws unless lb <= ub, all finite
};

struct PLSolveResult {
    Vec v;
    double model_value = 0.0;  // delta(form, alpha (v - anchor))
    int inner_iters = 0;
    long pivot_total = 0;
    bool exact = false;
};

/// Minimizes eval_pl(form, v) over C by walking signature domains: solve
/// the LP on the current signature closure, probe single sign flips of
/// active kinks for descent, stop at a certified local minimizer or when
/// the budget runs out. `v_start` must be feasible. The reported value is
/// the absolute model value at the returned point.
PLSolveResult minimize_form(const AbsLinearForm& form, const Polytope& C, const Vec& v_start,
                            int max_inner);

/// Inner solve of the outer loop: minimizes delta(form, alpha (v - anchor))
/// over v in C, starting from the anchor's signature.
PLSolveResult minimize_pl(const AbsLinearForm& form, const Polytope& C, const Vec& anchor,
                          double alpha, int max_inner);

/// True iff no single flip of an active kink at v (to +1 or -1) yields a
/// feasible LP with value below the current one by more than the descent
/// tolerance. `v` must be LP-optimal on the closure of its signature domain.
bool local_opt_check(const AbsLinearForm& form, const Polytope& C, const Vec& v,
                     const SignatureVector& sigma, long* pivot_total = nullptr);

/// The single-flip adjacent signature with the largest LP-value decrease;
/// ties broken by lowest kink index, then +1 before -1. Only valid when
/// local_opt_check returned false.
SignatureVector next_signature(const AbsLinearForm& form, const Polytope& C, const Vec& v,
                               const SignatureVector& sigma, long* pivot_total = nullptr);

/// LP over the closure of one signature domain intersected with C.
LPProblem signature_lp(const LinearPiece& piece, const Polytope& C);

}  // namespace asfw
