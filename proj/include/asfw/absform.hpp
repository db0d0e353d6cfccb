#pragma once

#include <cstdint>
#include <vector>

#include "asfw/common.hpp"

namespace asfw {

// Localized piecewise-linear model
//
//     f_PL(x) = d + a.x + b.z + e.|z|,   z = c + Z x + M z + L |z|,
//
// with M, L strictly lower triangular, so z is computed by forward
// substitution. The objective carries explicit |z| coefficients e: the
// switching variables are the arguments of the abs nodes, and the output
// may depend on their absolute values directly.
struct AbsLinearForm {
    int n = 0;  // input dimension
    int s = 0;  // switching count
    Vec anchor;
    double anchor_value = 0.0;
    Vec a;       // length n
    Vec b;       // length s, coefficients of z in the objective
    Vec e;       // length s, coefficients of |z| in the objective
    Vec c;       // length s
    double d = 0.0;
    Matrix Z;    // s x n
    Matrix M;    // s x s, strictly lower triangular
    Matrix L;    // s x s, strictly lower triangular
};

struct SignatureVector {
    std::vector<std::int8_t> sigma;  // entries in {-1, 0, +1}
    int size() const { return static_cast<int>(sigma.size()); }
    bool operator==(const SignatureVector&) const = default;
};

// Restriction of the model to the closure of one signature domain:
// an affine objective plus sign-consistency rows with z eliminated.
struct LinearPiece {
    Vec grad;          // objective gradient in x
    double offset = 0.0;
    Matrix kink_coef;  // s x n, z_i(x) = kink_coef.row(i).x + kink_const[i]
    Vec kink_const;
    SignatureVector sigma;  // sigma_i z_i(x) >= 0, equality when sigma_i = 0

    double objective(const Vec& x) const;
};

Vec solve_z(const AbsLinearForm& form, const Vec& x);
double eval_pl(const AbsLinearForm& form, const Vec& x);
double delta(const AbsLinearForm& form, const Vec& dx);
SignatureVector signature(const AbsLinearForm& form, const Vec& x);
LinearPiece restrict_to_signature(const AbsLinearForm& form, const SignatureVector& sigma);

/// Reparameterizes the model to the variable v with x = (1-alpha) anchor + alpha v,
/// so eval_pl(result, v) = eval_pl(form, anchor + alpha (v - anchor)). The
/// anchor and anchor value are unchanged (v = anchor gives x = anchor).
AbsLinearForm with_step(const AbsLinearForm& form, double alpha);

/// Weighted aggregate of past abs-linearizations in the variable v,
///
///     Phi(v) = sum_i w_i * [ f_PL_i((1-alpha_i) x_i + alpha_i v) - f(x_i) ],
///     w_i = weight_i / alpha_i,
///
/// assembled by block-diagonal stacking of the switching structure. The
/// result's eval_pl returns Phi(v) itself; its anchor is `nominal_anchor`.
AbsLinearForm aggregate(const std::vector<AbsLinearForm>& forms, const Vec& weights,
                        const Vec& steps, const Vec& nominal_anchor);

}  // namespace asfw
