#include "asfw/absform.hpp"

#include <cmath>

#include "asfw/kernels.hpp"

namespace asfw {

namespace ker = asfw::kernels;

Vec solve_z(const AbsLinearForm& form, const Vec& x) {
    if (static_cast<int>(x.size()) != form.n) throw DimensionError("solve_z: dim(x) != n");
    Vec z(form.s), az(form.s);
    for (int i = 0; i < form.s; ++i) {
        double zi = form.c[i] + ker::dot(form.Z.row(i), x.data(), form.n);
        zi += ker::dot(form.M.row(i), z.data(), i);
        zi += ker::dot(form.L.row(i), az.data(), i);
        z[i] = zi;
        az[i] = std::abs(zi);
    }
    return z;
}

double eval_pl(const AbsLinearForm& form, const Vec& x) {
    Vec z = solve_z(form, x);
    double y = form.d + ker::dot(form.a.data(), x.data(), form.n);
    for (int i = 0; i < form.s; ++i) y += form.b[i] * z[i] + form.e[i] * std::abs(z[i]);
    return y;
}

double delta(const AbsLinearForm& form, const Vec& dx) {
    if (static_cast<int>(dx.size()) != form.n) throw DimensionError("delta: dim(dx) != n");
    Vec x(form.anchor);
    for (int i = 0; i < form.n; ++i) x[i] += dx[i];
    // Subtract the model's own anchor value (not the recorded function
    // value) so the two evaluations share rounding and delta(0) is exactly 0.
    return eval_pl(form, x) - eval_pl(form, form.anchor);
}

SignatureVector signature(const AbsLinearForm& form, const Vec& x) {
    Vec z = solve_z(form, x);
    SignatureVector sig;
    sig.sigma.resize(form.s);
    for (int i = 0; i < form.s; ++i) {
        if (std::abs(z[i]) <= kink_tol(z[i]))
            sig.sigma[i] = 0;
        else
            sig.sigma[i] = z[i] > 0 ? 1 : -1;
    }
    return sig;
}

double LinearPiece::objective(const Vec& x) const {
    return offset + ker::dot(grad.data(), x.data(), x.size());
}

LinearPiece restrict_to_signature(const AbsLinearForm& form, const SignatureVector& sigma) {
    if (sigma.size() != form.s) throw DimensionError("restrict_to_signature: sigma size != s");
    LinearPiece piece;
    piece.sigma = sigma;
    piece.kink_coef = Matrix(form.s, form.n);
    piece.kink_const.assign(form.s, 0.0);
    // Forward substitution with |z_j| := sigma_j z_j: each row becomes
    // affine in x.
    for (int i = 0; i < form.s; ++i) {
        double* row = piece.kink_coef.row(i);
        for (int k = 0; k < form.n; ++k) row[k] = form.Z(i, k);
        double cst = form.c[i];
        for (int j = 0; j < i; ++j) {
            double w = form.M(i, j) + form.L(i, j) * sigma.sigma[j];
            if (w == 0.0) continue;
            ker::axpy(w, piece.kink_coef.row(j), row, form.n);
            cst += w * piece.kink_const[j];
        }
        piece.kink_const[i] = cst;
    }
    piece.grad = form.a;
    piece.offset = form.d;
    for (int i = 0; i < form.s; ++i) {
        double w = form.b[i] + form.e[i] * sigma.sigma[i];
        if (w == 0.0) continue;
        ker::axpy(w, piece.kink_coef.row(i), piece.grad.data(), form.n);
        piece.offset += w * piece.kink_const[i];
    }
    return piece;
}

AbsLinearForm with_step(const AbsLinearForm& form, double alpha) {
    AbsLinearForm out = form;
    const double beta = 1.0 - alpha;
    // x = (1-alpha) anchor + alpha v: fold the fixed part into the constants.
    for (int i = 0; i < form.s; ++i) {
        double shift = beta * ker::dot(form.Z.row(i), form.anchor.data(), form.n);
        out.c[i] += shift;
        ker::scale(out.Z.row(i), alpha, form.n);
    }
    out.d += beta * ker::dot(form.a.data(), form.anchor.data(), form.n);
    ker::scale(out.a.data(), alpha, form.n);
    return out;
}

AbsLinearForm aggregate(const std::vector<AbsLinearForm>& forms, const Vec& weights,
                        const Vec& steps, const Vec& nominal_anchor) {
    if (forms.empty()) throw DimensionError("aggregate: no forms");
    if (weights.size() != forms.size() || steps.size() != forms.size())
        throw DimensionError("aggregate: weights/steps size mismatch");
    const int n = forms[0].n;
    int s_total = 0;
    for (const auto& f : forms) {
        if (f.n != n) throw DimensionError("aggregate: input dimension mismatch");
        s_total += f.s;
    }

    AbsLinearForm agg;
    agg.n = n;
    agg.s = s_total;
    agg.anchor = nominal_anchor;
    agg.a.assign(n, 0.0);
    agg.b.assign(s_total, 0.0);
    agg.e.assign(s_total, 0.0);
    agg.c.assign(s_total, 0.0);
    agg.d = 0.0;
    agg.Z = Matrix(s_total, n);
    agg.M = Matrix(s_total, s_total);
    agg.L = Matrix(s_total, s_total);

    int base = 0;
    for (std::size_t k = 0; k < forms.size(); ++k) {
        if (!(weights[k] > 0.0)) throw DimensionError("aggregate: weights must be positive");
        if (!(steps[k] > 0.0 && steps[k] <= 1.0)) throw DimensionError("aggregate: steps in (0,1]");
        const AbsLinearForm block = with_step(forms[k], steps[k]);
        const double w = weights[k] / steps[k];
        for (int i = 0; i < block.s; ++i) {
            agg.c[base + i] = block.c[i];
            agg.b[base + i] = w * block.b[i];
            agg.e[base + i] = w * block.e[i];
            for (int j = 0; j < n; ++j) agg.Z(base + i, j) = block.Z(i, j);
            for (int j = 0; j < i; ++j) {
                agg.M(base + i, base + j) = block.M(i, j);
                agg.L(base + i, base + j) = block.L(i, j);
            }
        }
        ker::axpy(w, block.a.data(), agg.a.data(), n);
        agg.d += w * (block.d - forms[k].anchor_value);
        base += block.s;
    }
    agg.anchor_value = eval_pl(agg, nominal_anchor);
    return agg;
}

}  // namespace asfw
