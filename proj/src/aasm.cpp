#include "asfw/aasm.hpp"

#include <cmath>
#include <optional>

#include "asfw/kernels.hpp"

namespace asfw {

namespace ker = asfw::kernels;

namespace {

constexpr double kFeasTol = 1e-8;

// Activity tolerance for kink probing. Looser than the signature kink
// tolerance: LP basic solutions satisfy tight rows only to solver accuracy,
// and a kink missed here would block the descent switch.
inline double activity_tol(double z) { return 1e-8 * (1.0 + std::abs(z)); }

inline double descent_tol(double value) { return 1e-10 * (1.0 + std::abs(value)); }

struct Flip {
    SignatureVector sigma;
    LPSolution sol;
    double value;
    int kink;
    int target;
};

LPSolution solve_signature_lp(const AbsLinearForm& form, const Polytope& C,
                              const SignatureVector& sigma, long* pivots, double* value) {
    const LinearPiece piece = restrict_to_signature(form, sigma);
    LPSolution sol = solve_lp(signature_lp(piece, C));
    if (pivots) *pivots += sol.pivot_count;
    if (value && sol.status == LPStatus::Optimal) *value = piece.objective(sol.x);
    return sol;
}

// Best strictly improving single flip of an active kink, or nullopt.
// first_improving short-circuits the lexicographic scan at the first hit;
// the full scan keeps the largest decrease (ties to the scan order).
std::optional<Flip> probe_flips(const AbsLinearForm& form, const Polytope& C, const Vec& v,
                                const SignatureVector& sigma, double current_value, long* pivots,
                                bool first_improving) {
    const Vec z = solve_z(form, v);
    std::optional<Flip> best;
    for (int i = 0; i < form.s; ++i) {
        if (std::abs(z[i]) > activity_tol(z[i])) continue;
        for (int target : {+1, -1}) {
            if (target == sigma.sigma[i]) continue;
            SignatureVector cand = sigma;
            cand.sigma[i] = static_cast<std::int8_t>(target);
            double value = 0.0;
            LPSolution sol = solve_signature_lp(form, C, cand, pivots, &value);
            if (sol.status != LPStatus::Optimal) continue;
            if (value >= current_value - descent_tol(current_value)) continue;
            if (!best || value < best->value - descent_tol(best->value)) {
                best = Flip{std::move(cand), std::move(sol), value, i, target};
                if (first_improving) return best;
            }
        }
    }
    return best;
}

std::optional<Flip> best_flip(const AbsLinearForm& form, const Polytope& C, const Vec& v,
                              const SignatureVector& sigma, double current_value, long* pivots) {
    return probe_flips(form, C, v, sigma, current_value, pivots, /*first_improving=*/false);
}

}  // namespace

bool Polytope::contains(const Vec& x, double tol) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    for (std::size_t i = 0; i < lb.size(); ++i)
        if (x[i] < lb[i] - tol || x[i] > ub[i] + tol) return false;
    for (std::size_t r = 0; r < h.size(); ++r)
        if (ker::dot(G.row(r), x.data(), x.size()) > h[r] + tol) return false;
    return true;
}

void Polytope::validate() const {
    if (lb.size() != ub.size()) throw DimensionError("Polytope: bound size mismatch");
    for (std::size_t i = 0; i < lb.size(); ++i) {
        if (!(lb[i] <= ub[i])) throw DimensionError("Polytope: lb > ub");
        if (!std::isfinite(lb[i]) || !std::isfinite(ub[i]))
            throw DimensionError("Polytope: bounds must be finite (C compact)");
    }
    if (h.size() > 0 && G.cols() != lb.size()) throw DimensionError("Polytope: row dimension mismatch");
}

LPProblem signature_lp(const LinearPiece& piece, const Polytope& C) {
    const std::size_t n = piece.grad.size();
    const int s = piece.sigma.size();
    LPProblem lp;
    lp.objective = piece.grad;
    lp.lb = C.lb;
    lp.ub = C.ub;

    std::size_t n_ineq = C.h.size(), n_eq = 0;
    for (int i = 0; i < s; ++i) (piece.sigma.sigma[i] == 0 ? n_eq : n_ineq) += 1;
    lp.G = Matrix(n_ineq, n);
    lp.h.assign(n_ineq, 0.0);
    lp.E = Matrix(n_eq, n);
    lp.e.assign(n_eq, 0.0);

    std::size_t gi = 0;
    for (std::size_t r = 0; r < C.h.size(); ++r, ++gi) {
        for (std::size_t j = 0; j < n; ++j) lp.G(gi, j) = C.G(r, j);
        lp.h[gi] = C.h[r];
    }
    std::size_t ei = 0;
    for (int i = 0; i < s; ++i) {
        const int sg = piece.sigma.sigma[i];
        if (sg == 0) {
            for (std::size_t j = 0; j < n; ++j) lp.E(ei, j) = piece.kink_coef(i, j);
            lp.e[ei] = -piece.kink_const[i];
            ++ei;
        } else {
            // sigma_i z_i(x) >= 0  <=>  -sigma_i (row . x) <= sigma_i const
            for (std::size_t j = 0; j < n; ++j) lp.G(gi, j) = -sg * piece.kink_coef(i, j);
            lp.h[gi] = sg * piece.kink_const[i];
            ++gi;
        }
    }
    return lp;
}

bool local_opt_check(const AbsLinearForm& form, const Polytope& C, const Vec& v,
                     const SignatureVector& sigma, long* pivot_total) {
    const double value = eval_pl(form, v);
    return !best_flip(form, C, v, sigma, value, pivot_total).has_value();
}

SignatureVector next_signature(const AbsLinearForm& form, const Polytope& C, const Vec& v,
                               const SignatureVector& sigma, long* pivot_total) {
    const double value = eval_pl(form, v);
    auto flip = best_flip(form, C, v, sigma, value, pivot_total);
    if (!flip) throw std::logic_error("next_signature: no descent flip exists");
    return flip->sigma;
}

PLSolveResult minimize_form(const AbsLinearForm& form, const Polytope& C, const Vec& v_start,
                            int max_inner) {
    C.validate();
    if (max_inner < 1) throw DimensionError("minimize_form: max_inner must be >= 1");
    if (!C.contains(v_start, kFeasTol)) throw DimensionError("minimize_form: start point infeasible");

    PLSolveResult res;
    SignatureVector sigma = signature(form, v_start);
    double value = 0.0;
    LPSolution sol = solve_signature_lp(form, C, sigma, &res.pivot_total, &value);
    if (sol.status != LPStatus::Optimal)
        throw std::runtime_error("minimize_form: initial signature LP infeasible");
    res.v = sol.x;
    res.model_value = value;
    res.inner_iters = 1;

    // Walk with the first improving flip in scan order; the full probe
    // sweep is paid only when the walk terminates (no flip improves),
    // which doubles as the local-optimality certificate.
    for (;;) {
        if (res.inner_iters >= max_inner) return res;  // budget exhausted, exactness unknown
        auto flip = probe_flips(form, C, res.v, sigma, res.model_value, &res.pivot_total,
                                /*first_improving=*/true);
        if (!flip) {
            res.exact = true;
            return res;
        }
        sigma = std::move(flip->sigma);
        res.v = std::move(flip->sol.x);
        res.model_value = flip->value;
        ++res.inner_iters;
    }
}

PLSolveResult minimize_pl(const AbsLinearForm& form, const Polytope& C, const Vec& anchor,
                          double alpha, int max_inner) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DimensionError("minimize_pl: alpha must be in (0,1]");
    const AbsLinearForm stepped = with_step(form, alpha);
    PLSolveResult res = minimize_form(stepped, C, anchor, max_inner);
    res.model_value -= form.anchor_value;  // absolute model value -> delta
    return res;
}

}  // namespace asfw
