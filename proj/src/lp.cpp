#include "asfw/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "asfw/kernels.hpp"

namespace asfw {

namespace ker = asfw::kernels;

namespace {

constexpr double kPivotTol = 1e-7;
constexpr double kDegenTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Full simplex tableau over shifted variables y = x - lb >= 0.
// Column layout: [structural | slacks | artificials], trailing rhs column.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : t_(rows, cols + 1), cols_(cols) {}

    double& at(std::size_t i, std::size_t j) { return t_(i, j); }
    double& rhs(std::size_t i) { return t_(i, cols_); }
    double* row(std::size_t i) { return t_.row(i); }
    std::size_t width() const { return cols_ + 1; }

    void pivot(std::size_t pr, std::size_t pc, std::size_t nrows) {
        const double pv = t_(pr, pc);
        ker::scale(row(pr), 1.0 / pv, width());
        t_(pr, pc) = 1.0;
        for (std::size_t i = 0; i < nrows; ++i) {
            if (i == pr) continue;
            const double f = t_(i, pc);
            if (f == 0.0) continue;
            ker::axpy(-f, row(pr), row(i), width());
            t_(i, pc) = 0.0;
        }
    }

private:
    Matrix t_;
    std::size_t cols_;
};

// Bounded-variable two-phase primal simplex:
//     min c.y  s.t.  A y (+ slack) = rhs,  0 <= y_j <= span_j,
// over shifted structurals y = x - lb. Box bounds are handled implicitly:
// nonbasic variables rest at either bound and switch with O(m) bound flips,
// so the tableau only carries the general rows.
LPSolution solve_core(const Vec& objective, const Matrix& G, const Vec& h, const Vec& lb,
                      const Vec& ub) {
    const std::size_t n = objective.size();
    const std::size_t m = h.size();

    Matrix A(m, n);
    Vec rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) A(i, j) = G(i, j);
        rhs[i] = h[i] - ker::dot(G.row(i), lb.data(), n);
    }

    // Equilibrate: scale each row to unit max coefficient so phase-1
    // feasibility decisions are not distorted by badly scaled models.
    for (std::size_t i = 0; i < m; ++i) {
        double mx = 0.0;
        for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, std::abs(A(i, j)));
        if (mx > 0.0) {
            ker::scale(A.row(i), 1.0 / mx, n);
            rhs[i] /= mx;
        }
    }

    // Normalize rhs >= 0; rows whose slack flips to -1 need an artificial
    // for the initial basis.
    std::vector<double> slack_sign(m, 1.0);
    std::vector<char> needs_art(m, 0);
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (rhs[i] < 0.0) {
            ker::scale(A.row(i), -1.0, n);
            rhs[i] = -rhs[i];
            slack_sign[i] = -1.0;
            needs_art[i] = 1;
            ++n_art;
        }
    }

    const std::size_t n_cols = n + m + n_art;
    Tableau tab(m + 1, n_cols);
    std::vector<std::size_t> basis(m);
    std::vector<char> at_upper(n_cols, 0);
    Vec span(n_cols, kInf);  // artificial spans drop to 0 after phase 1
    for (std::size_t j = 0; j < n; ++j) span[j] = ub[j] - lb[j];

    std::size_t art_next = n + m;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = A(i, j);
        tab.at(i, n + i) = slack_sign[i];
        tab.rhs(i) = rhs[i];
        if (needs_art[i]) {
            tab.at(i, art_next) = 1.0;
            basis[i] = art_next++;
        } else {
            basis[i] = n + i;
        }
    }

    LPSolution sol;
    long degen_streak = 0;
    const long bland_after = 10 * static_cast<long>(n_cols + m);
    Vec col(m + 1);

    // Pivot at (pr, enter) where the entering variable moved by step theta
    // from its resting bound; new_rhs holds the post-step basic values and
    // is written over whatever the elimination leaves in the rhs column.
    auto do_pivot = [&](std::size_t pr, std::size_t enter, const Vec& new_rhs) {
        tab.pivot(pr, enter, m + 1);
        for (std::size_t i = 0; i <= m; ++i) tab.rhs(i) = new_rhs[i];
        at_upper[basis[pr]] = 0;  // overwritten below for upper-bound exits
        basis[pr] = enter;
        at_upper[enter] = 0;
        ++sol.pivot_count;
    };

    // Price over columns [0, active_cols); the objective row (row m) holds
    // current reduced costs. Nonbasic-at-upper variables price with the
    // negated sign and improve by moving down.
    auto run_phase = [&](std::size_t active_cols) {
        for (;;) {
            const bool bland = degen_streak > bland_after;
            std::size_t enter = n_cols;
            double best = -kLpCostTol;
            for (std::size_t j = 0; j < active_cols; ++j) {
                const double cj = at_upper[j] ? -tab.at(m, j) : tab.at(m, j);
                if (bland) {
                    if (cj < -kLpCostTol) {
                        enter = j;
                        break;
                    }
                } else if (cj < best) {
                    best = cj;
                    enter = j;
                }
            }
            if (enter == n_cols) return;  // phase optimal

            const double t = at_upper[enter] ? -1.0 : 1.0;
            for (std::size_t i = 0; i <= m; ++i) col[i] = tab.at(i, enter);

            // Ratio test: basic i changes at rate -t * col_i; it blocks at
            // its lower bound 0 or (finite-span basics) at its span.
            std::size_t leave = m;
            bool leave_at_upper = false;
            double best_ratio = kInf;
            for (std::size_t i = 0; i < m; ++i) {
                const double delta = t * col[i];
                double ratio;
                bool hits_upper;
                if (delta > kPivotTol) {
                    ratio = std::max(tab.rhs(i), 0.0) / delta;
                    hits_upper = false;
                } else if (delta < -kPivotTol && span[basis[i]] < kInf) {
                    ratio = std::max(span[basis[i]] - tab.rhs(i), 0.0) / (-delta);
                    hits_upper = true;
                } else {
                    continue;
                }
                if (ratio < best_ratio - 1e-12 ||
                    (ratio <= best_ratio + 1e-12 && leave != m && basis[i] < basis[leave])) {
                    best_ratio = ratio;
                    leave = i;
                    leave_at_upper = hits_upper;
                }
            }

            if (span[enter] < best_ratio - 1e-12) {
                // Bound flip: the entering variable crosses its whole span
                // before any basic variable blocks.
                const double step = span[enter];
                for (std::size_t i = 0; i <= m; ++i) tab.rhs(i) -= t * step * col[i];
                at_upper[enter] = !at_upper[enter];
                degen_streak = step <= kDegenTol ? degen_streak + 1 : 0;
                ++sol.pivot_count;  // a bound flip is one simplex iteration
                continue;
            }
            if (leave == m) throw std::runtime_error("solve_lp: unbounded ray despite finite bounds");

            const double theta = best_ratio;
            Vec new_rhs(m + 1);
            for (std::size_t i = 0; i <= m; ++i) new_rhs[i] = tab.rhs(i) - t * theta * col[i];
            new_rhs[leave] = at_upper[enter] ? span[enter] - theta : theta;
            const bool exit_upper = leave_at_upper;
            const std::size_t old_basic = basis[leave];
            degen_streak = theta <= kDegenTol ? degen_streak + 1 : 0;
            do_pivot(leave, enter, new_rhs);
            if (exit_upper) at_upper[old_basic] = 1;
        }
    };

    if (n_art > 0) {
        // Phase 1: minimize the artificial sum; rhs(m) tracks its negation.
        for (std::size_t j = n + m; j < n_cols; ++j) tab.at(m, j) = 1.0;
        for (std::size_t i = 0; i < m; ++i)
            if (needs_art[i]) ker::axpy(-1.0, tab.row(i), tab.row(m), tab.width());
        run_phase(n_cols);
        double rhs_scale = 0.0;
        for (std::size_t i = 0; i < m; ++i) rhs_scale += std::abs(rhs[i]);
        if (-tab.rhs(m) > kLpFeasTol * (1.0 + rhs_scale)) {
            sol.status = LPStatus::Infeasible;
            return sol;
        }
        // Drive leftover artificials out of the basis (zero-step pivots);
        // all-zero rows are redundant and stay parked at level zero. Any
        // artificial that stays basic is clamped by a zero span below.
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n + m) continue;
            std::size_t pc = n_cols;
            for (std::size_t j = 0; j < n + m; ++j) {
                if (std::abs(tab.at(i, j)) > kPivotTol) {
                    pc = j;
                    break;
                }
            }
            if (pc == n_cols) continue;
            Vec new_rhs(m + 1);
            for (std::size_t k = 0; k <= m; ++k) new_rhs[k] = tab.rhs(k);
            new_rhs[i] = at_upper[pc] ? span[pc] : 0.0;
            do_pivot(i, pc, new_rhs);
        }
        // Artificials must never re-enter or grow: freeze them at zero.
        for (std::size_t j = n + m; j < n_cols; ++j) span[j] = 0.0;
    }

    // Phase 2: rebuild reduced costs for the true objective; artificial
    // columns are excluded from pricing.
    for (std::size_t j = 0; j < tab.width(); ++j) tab.at(m, j) = 0.0;
    for (std::size_t j = 0; j < n; ++j) tab.at(m, j) = objective[j];
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n && objective[basis[i]] != 0.0)
            ker::axpy(-objective[basis[i]], tab.row(i), tab.row(m), tab.width());
    }
    degen_streak = 0;
    run_phase(n + m);

    sol.status = LPStatus::Optimal;
    sol.x = lb;
    for (std::size_t j = 0; j < n; ++j)
        if (at_upper[j]) sol.x[j] = ub[j];
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) sol.x[basis[i]] = lb[basis[i]] + tab.rhs(i);
    sol.objective_value = ker::dot(objective.data(), sol.x.data(), n);
    return sol;
}

// Gauss-Jordan elimination of the equality system E x = e on
// max-coefficient-scaled rows with partial pivoting. On success returns the
// substitution x[piv[i]] = s[i] - sum_f F(i, f) x[free[f]]. Degenerate
// signature LPs carry far more equality rows than their rank; inconsistent
// dependent rows (non-vanishing residual) report infeasibility.
struct EqElimination {
    std::vector<std::size_t> piv;   // eliminated columns, one per rank row
    std::vector<std::size_t> free;  // remaining columns
    Matrix F;                       // rank x free.size()
    Vec s;                          // rank
};

// Elimination pivots count toward LPSolution::pivot_count: they are the
// pivot operations this backend performs instead of driving equality-row
// artificials through the simplex.

bool eliminate_equalities(const Matrix& E, const Vec& e, std::size_t n, EqElimination& out) {
    const std::size_t me = e.size();
    Matrix w(me, n + 1);
    for (std::size_t i = 0; i < me; ++i) {
        for (std::size_t j = 0; j < n; ++j) w(i, j) = E(i, j);
        w(i, n) = e[i];
        double mx = 0.0;
        for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, std::abs(w(i, j)));
        if (mx > 0.0) ker::scale(w.row(i), 1.0 / mx, n + 1);
    }
    out.piv.clear();
    out.free.clear();
    std::vector<char> is_pivot_col(n, 0);
    std::size_t r = 0;
    for (std::size_t col = 0; col < n && r < me; ++col) {
        std::size_t pr = me;
        double best = 1e-10;
        for (std::size_t i = r; i < me; ++i) {
            if (std::abs(w(i, col)) > best) {
                best = std::abs(w(i, col));
                pr = i;
            }
        }
        if (pr == me) continue;
        if (pr != r)
            for (std::size_t j = 0; j <= n; ++j) std::swap(w(r, j), w(pr, j));
        ker::scale(w.row(r), 1.0 / w(r, col), n + 1);
        w(r, col) = 1.0;
        // Full elimination above and below: pivot columns end up unit.
        for (std::size_t i = 0; i < me; ++i) {
            if (i == r) continue;
            const double f = w(i, col);
            if (f != 0.0) {
                ker::axpy(-f, w.row(r), w.row(i), n + 1);
                w(i, col) = 0.0;
            }
        }
        out.piv.push_back(col);
        is_pivot_col[col] = 1;
        ++r;
    }
    for (std::size_t i = r; i < me; ++i)
        if (std::abs(w(i, n)) > kLpFeasTol) return false;  // inconsistent

    for (std::size_t j = 0; j < n; ++j)
        if (!is_pivot_col[j]) out.free.push_back(j);
    const std::size_t nf = out.free.size();
    out.F = Matrix(r, nf);
    out.s.assign(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t f = 0; f < nf; ++f) out.F(i, f) = w(i, out.free[f]);
        out.s[i] = w(i, n);
    }
    return true;
}

}  // namespace

LPSolution solve_lp(const LPProblem& p) {
    const std::size_t n = p.objective.size();
    if (p.lb.size() != n || p.ub.size() != n) throw DimensionError("solve_lp: bound size mismatch");
    const std::size_t mg = p.h.size();
    if ((mg && p.G.cols() != n) || (!p.e.empty() && p.E.cols() != n))
        throw DimensionError("solve_lp: row dimension mismatch");
    for (std::size_t j = 0; j < n; ++j) {
        if (!(p.lb[j] <= p.ub[j])) throw DimensionError("solve_lp: lb > ub");
        if (!std::isfinite(p.lb[j]) || !std::isfinite(p.ub[j]))
            throw DimensionError("solve_lp: bounds must be finite");
    }

    if (p.e.empty()) return solve_core(p.objective, p.G, p.h, p.lb, p.ub);

    // Substitute the equalities out and solve an inequality-only LP over
    // the free variables; the eliminated variables' bounds turn into rows.
    EqElimination eq;
    LPSolution sol;
    if (!eliminate_equalities(p.E, p.e, n, eq)) {
        sol.status = LPStatus::Infeasible;
        return sol;
    }
    const std::size_t r = eq.piv.size();
    const std::size_t nf = eq.free.size();
    sol.pivot_count = static_cast<long>(r);

    if (nf == 0) {
        // Fully determined point: x[piv[i]] = s[i]; feasibility check only.
        Vec x(n);
        for (std::size_t i = 0; i < r; ++i) x[eq.piv[i]] = eq.s[i];
        for (std::size_t j = 0; j < n; ++j)
            if (x[j] < p.lb[j] - kLpFeasTol || x[j] > p.ub[j] + kLpFeasTol) {
                sol.status = LPStatus::Infeasible;
                return sol;
            }
        for (std::size_t i = 0; i < mg; ++i) {
            const double row_max = [&] {
                double mx = 0.0;
                for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, std::abs(p.G(i, j)));
                return mx;
            }();
            if (ker::dot(p.G.row(i), x.data(), n) > p.h[i] + kLpFeasTol * (1.0 + row_max)) {
                sol.status = LPStatus::Infeasible;
                return sol;
            }
        }
        sol.status = LPStatus::Optimal;
        sol.x = std::move(x);
        sol.objective_value = ker::dot(p.objective.data(), sol.x.data(), n);
        return sol;
    }

    // Reduced objective: c_f - F^T c_p (the constant part is re-added by
    // evaluating the reconstructed point).
    Vec obj(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        double c = p.objective[eq.free[f]];
        for (std::size_t i = 0; i < r; ++i) c -= p.objective[eq.piv[i]] * eq.F(i, f);
        obj[f] = c;
    }

    // Rows: original G rows with pivots substituted, then two bound rows
    // per eliminated variable (lb_p <= s_i - F_i . x_f <= ub_p).
    const std::size_t m_red = mg + 2 * r;
    Matrix G(m_red, nf);
    Vec h(m_red);
    for (std::size_t i = 0; i < mg; ++i) {
        double rhs = p.h[i];
        for (std::size_t f = 0; f < nf; ++f) G(i, f) = p.G(i, eq.free[f]);
        for (std::size_t k = 0; k < r; ++k) {
            const double g = p.G(i, eq.piv[k]);
            if (g == 0.0) continue;
            ker::axpy(-g, eq.F.row(k), G.row(i), nf);
            rhs -= g * eq.s[k];
        }
        h[i] = rhs;
    }
    for (std::size_t k = 0; k < r; ++k) {
        double* up = G.row(mg + 2 * k);      // x_p <= ub:  -F_k . x_f <= ub - s
        double* lo = G.row(mg + 2 * k + 1);  // x_p >= lb:   F_k . x_f <= s - lb
        for (std::size_t f = 0; f < nf; ++f) {
            up[f] = -eq.F(k, f);
            lo[f] = eq.F(k, f);
        }
        h[mg + 2 * k] = p.ub[eq.piv[k]] - eq.s[k];
        h[mg + 2 * k + 1] = eq.s[k] - p.lb[eq.piv[k]];
    }

    Vec lb(nf), ub(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        lb[f] = p.lb[eq.free[f]];
        ub[f] = p.ub[eq.free[f]];
    }

    LPSolution red = solve_core(obj, G, h, lb, ub);
    sol.pivot_count += red.pivot_count;
    if (red.status != LPStatus::Optimal) {
        sol.status = LPStatus::Infeasible;
        return sol;
    }
    sol.status = LPStatus::Optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t f = 0; f < nf; ++f) sol.x[eq.free[f]] = red.x[f];
    for (std::size_t i = 0; i < r; ++i) {
        // Clamp substitution round-off so the point stays inside the box.
        const std::size_t j = eq.piv[i];
        const double v = eq.s[i] - ker::dot(eq.F.row(i), red.x.data(), nf);
        sol.x[j] = std::min(std::max(v, p.lb[j]), p.ub[j]);
    }
    sol.objective_value = ker::dot(p.objective.data(), sol.x.data(), n);
    return sol;
}

}  // namespace asfw
