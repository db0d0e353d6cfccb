#include "asfw/tape.hpp"

#include <cmath>

#include "asfw/kernels.hpp"

namespace asfw {
namespace {
Node make_node(Op op, int a0 = -1, int a1 = -1) {
    Node n;
    n.op = op;
    n.arg0 = a0;
    n.arg1 = a1;
    return n;
}
}  // namespace


namespace ker = asfw::kernels;

TapeBuilder::TapeBuilder(int input_dim) {
    if (input_dim < 1) throw DimensionError("TapeBuilder: input_dim must be >= 1");
    tape_.input_dim_ = input_dim;
}

int TapeBuilder::check(int node) const {
    if (node < 0 || node >= static_cast<int>(tape_.nodes_.size()))
        throw DimensionError("TapeBuilder: dangling node reference");
    return node;
}

int TapeBuilder::push(Node n) {
    tape_.nodes_.push_back(std::move(n));
    return static_cast<int>(tape_.nodes_.size()) - 1;
}

int TapeBuilder::input(int i) {
    if (i < 0 || i >= tape_.input_dim_) throw DimensionError("TapeBuilder: input index out of range");
    return push(make_node(Op::Input, i));
}

int TapeBuilder::constant(double value) {
    Node n = make_node(Op::Constant);
    n.coeff = value;
    return push(std::move(n));
}

int TapeBuilder::add(int u, int w) { return push(make_node(Op::Add, check(u), check(w))); }
int TapeBuilder::sub(int u, int w) { return push(make_node(Op::Sub, check(u), check(w))); }
int TapeBuilder::mul(int u, int w) { return push(make_node(Op::Mul, check(u), check(w))); }
int TapeBuilder::div(int u, int w) { return push(make_node(Op::Div, check(u), check(w))); }
int TapeBuilder::neg(int u) { return push(make_node(Op::Neg, check(u))); }
int TapeBuilder::square(int u) { return push(make_node(Op::Square, check(u))); }
int TapeBuilder::exp(int u) { return push(make_node(Op::Exp, check(u))); }

int TapeBuilder::scale(double alpha, int u) {
    Node n = make_node(Op::Scale, check(u));
    n.coeff = alpha;
    return push(std::move(n));
}

int TapeBuilder::affine(double offset, std::vector<std::pair<double, int>> terms) {
    Node n = make_node(Op::Affine);
    n.offset = offset;
    n.terms.reserve(terms.size());
    n.coeffs.reserve(terms.size());
    for (auto& [coeff, node] : terms) {
        n.coeffs.push_back(coeff);
        n.terms.push_back(check(node));
    }
    return push(std::move(n));
}

int TapeBuilder::abs(int u) {
    Node n = make_node(Op::Abs, check(u));
    int id = push(std::move(n));
    tape_.abs_nodes_.push_back(id);
    return id;
}

int TapeBuilder::max2(int u, int w) {
    int a = abs(sub(u, w));
    return affine(0.0, {{0.5, u}, {0.5, w}, {0.5, a}});
}

int TapeBuilder::min2(int u, int w) {
    int a = abs(sub(u, w));
    return affine(0.0, {{0.5, u}, {0.5, w}, {-0.5, a}});
}

Tape TapeBuilder::finish(int output_node) {
    check(output_node);
    tape_.output_ = output_node;
    return std::move(tape_);
}

namespace {

double smooth_value(const Node& node, int idx, const Vec& x, const Vec& vals) {
    switch (node.op) {
        case Op::Input: return x[node.arg0];
        case Op::Constant: return node.coeff;
        case Op::Add: return vals[node.arg0] + vals[node.arg1];
        case Op::Sub: return vals[node.arg0] - vals[node.arg1];
        case Op::Mul: return vals[node.arg0] * vals[node.arg1];
        case Op::Div:
            if (vals[node.arg1] == 0.0) throw EvalError(idx, "division by zero");
            return vals[node.arg0] / vals[node.arg1];
        case Op::Neg: return -vals[node.arg0];
        case Op::Square: return vals[node.arg0] * vals[node.arg0];
        case Op::Exp: return std::exp(vals[node.arg0]);
        case Op::Scale: return node.coeff * vals[node.arg0];
        case Op::Abs: return std::abs(vals[node.arg0]);
        case Op::Affine: {
            double v = node.offset;
            for (std::size_t k = 0; k < node.terms.size(); ++k)
                v += node.coeffs[k] * vals[node.terms[k]];
            return v;
        }
    }
    throw EvalError(idx, "unsupported elemental");
}

}  // namespace

EvalRecord eval(const Tape& tape, const Vec& x) {
    if (static_cast<int>(x.size()) != tape.input_dim())
        throw DimensionError("eval: dim(x) != input_dim");
    EvalRecord rec;
    const auto& nodes = tape.nodes();
    rec.node_values.resize(nodes.size());
    rec.z.reserve(tape.switching_count());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& node = nodes[i];
        if (node.op == Op::Abs) rec.z.push_back(rec.node_values[node.arg0]);
        rec.node_values[i] = smooth_value(node, static_cast<int>(i), x, rec.node_values);
    }
    rec.y = rec.node_values[tape.output_node()];
    return rec;
}

AbsLinearForm abs_linearize(const Tape& tape, const Vec& anchor) {
    const int n = tape.input_dim();
    const int s = tape.switching_count();
    if (static_cast<int>(anchor.size()) != n)
        throw DimensionError("abs_linearize: dim(anchor) != input_dim");
    EvalRecord rec = eval(tape, anchor);

    // Per-node affine expansion of the model value in (x, z, |z|):
    //   value = cst + gx.x + gz.z + ga.|z|
    // Smooth nodes propagate tangents at the anchor, abs nodes switch to
    // their |z_i| coordinate exactly.
    const int w = 1 + n + 2 * s;  // [cst | gx | gz | ga]
    const auto& nodes = tape.nodes();
    std::vector<double> expn(nodes.size() * static_cast<std::size_t>(w), 0.0);
    auto row = [&](int i) { return expn.data() + static_cast<std::size_t>(i) * w; };

    AbsLinearForm form;
    form.n = n;
    form.s = s;
    form.anchor = anchor;
    form.anchor_value = rec.y;
    form.a.assign(n, 0.0);
    form.b.assign(s, 0.0);
    form.e.assign(s, 0.0);
    form.c.assign(s, 0.0);
    form.Z = Matrix(s, n);
    form.M = Matrix(s, s);
    form.L = Matrix(s, s);

    int abs_seen = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& node = nodes[i];
        double* out = row(static_cast<int>(i));
        const Vec& v = rec.node_values;
        switch (node.op) {
            case Op::Input:
                out[1 + node.arg0] = 1.0;
                break;
            case Op::Constant:
                out[0] = node.coeff;
                break;
            case Op::Add:
                ker::axpy(1.0, row(node.arg0), out, w);
                ker::axpy(1.0, row(node.arg1), out, w);
                break;
            case Op::Sub:
                ker::axpy(1.0, row(node.arg0), out, w);
                ker::axpy(-1.0, row(node.arg1), out, w);
                break;
            case Op::Mul:
                // tangent: u0*w0 + w0*(U-u0) + u0*(W-w0)
                ker::axpy(v[node.arg1], row(node.arg0), out, w);
                ker::axpy(v[node.arg0], row(node.arg1), out, w);
                out[0] -= v[node.arg0] * v[node.arg1];
                break;
            case Op::Div: {
                if (v[node.arg1] == 0.0) throw EvalError(static_cast<int>(i), "division by zero");
                const double q = v[node.arg0] / v[node.arg1];
                ker::axpy(1.0 / v[node.arg1], row(node.arg0), out, w);
                ker::axpy(-q / v[node.arg1], row(node.arg1), out, w);
                out[0] += q;
                break;
            }
            case Op::Neg:
                ker::axpy(-1.0, row(node.arg0), out, w);
                break;
            case Op::Square:
                ker::axpy(2.0 * v[node.arg0], row(node.arg0), out, w);
                out[0] -= v[node.arg0] * v[node.arg0];
                break;
            case Op::Exp: {
                const double ev = std::exp(v[node.arg0]);
                ker::axpy(ev, row(node.arg0), out, w);
                out[0] += ev * (1.0 - v[node.arg0]);
                break;
            }
            case Op::Scale:
                ker::axpy(node.coeff, row(node.arg0), out, w);
                break;
            case Op::Affine:
                out[0] = node.offset;
                for (std::size_t k = 0; k < node.terms.size(); ++k)
                    ker::axpy(node.coeffs[k], row(node.terms[k]), out, w);
                break;
            case Op::Abs: {
                // Freeze the argument expansion as switching row z_i and
                // continue with the exact coordinate |z_i|.
                const int si = abs_seen++;
                const double* arg = row(node.arg0);
                form.c[si] = arg[0];
                for (int k = 0; k < n; ++k) form.Z(si, k) = arg[1 + k];
                for (int k = 0; k < si; ++k) {
                    form.M(si, k) = arg[1 + n + k];
                    form.L(si, k) = arg[1 + n + s + k];
                }
                out[1 + n + s + si] = 1.0;
                break;
            }
        }
    }

    const double* out = row(tape.output_node());
    form.d = out[0];
    for (int k = 0; k < n; ++k) form.a[k] = out[1 + k];
    for (int k = 0; k < s; ++k) {
        form.b[k] = out[1 + n + k];
        form.e[k] = out[1 + n + s + k];
    }
    return form;
}

double eval_pl(const Tape& tape, const EvalRecord& anchor_record, const Vec& x) {
    const auto& nodes = tape.nodes();
    if (static_cast<int>(x.size()) != tape.input_dim())
        throw DimensionError("eval_pl: dim(x) != input_dim");
    if (anchor_record.node_values.size() != nodes.size())
        throw DimensionError("eval_pl: record does not match tape");
    const Vec& v = anchor_record.node_values;
    Vec p(nodes.size());  // model value per node
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& node = nodes[i];
        switch (node.op) {
            case Op::Input: p[i] = x[node.arg0]; break;
            case Op::Constant: p[i] = node.coeff; break;
            case Op::Add: p[i] = p[node.arg0] + p[node.arg1]; break;
            case Op::Sub: p[i] = p[node.arg0] - p[node.arg1]; break;
            case Op::Mul:
                p[i] = v[node.arg1] * p[node.arg0] + v[node.arg0] * p[node.arg1] -
                       v[node.arg0] * v[node.arg1];
                break;
            case Op::Div: {
                if (v[node.arg1] == 0.0) throw EvalError(static_cast<int>(i), "division by zero");
                const double q = v[node.arg0] / v[node.arg1];
                p[i] = q + (p[node.arg0] - q * p[node.arg1]) / v[node.arg1];
                break;
            }
            case Op::Neg: p[i] = -p[node.arg0]; break;
            case Op::Square:
                p[i] = 2.0 * v[node.arg0] * p[node.arg0] - v[node.arg0] * v[node.arg0];
                break;
            case Op::Exp: {
                const double ev = std::exp(v[node.arg0]);
                p[i] = ev * (1.0 + p[node.arg0] - v[node.arg0]);
                break;
            }
            case Op::Scale: p[i] = node.coeff * p[node.arg0]; break;
            case Op::Affine: {
                double acc = node.offset;
                for (std::size_t k = 0; k < node.terms.size(); ++k)
                    acc += node.coeffs[k] * p[node.terms[k]];
                p[i] = acc;
                break;
            }
            case Op::Abs: p[i] = std::abs(p[node.arg0]); break;
        }
    }
    return p[tape.output_node()];
}

Vec subgradient(const Tape& tape, const Vec& x) {
    const int n = tape.input_dim();
    if (static_cast<int>(x.size()) != n) throw DimensionError("subgradient: dim(x) != input_dim");
    EvalRecord rec = eval(tape, x);
    const auto& nodes = tape.nodes();
    std::vector<double> grads(nodes.size() * static_cast<std::size_t>(n), 0.0);
    auto row = [&](int i) { return grads.data() + static_cast<std::size_t>(i) * n; };
    const Vec& v = rec.node_values;

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& node = nodes[i];
        double* out = row(static_cast<int>(i));
        switch (node.op) {
            case Op::Input: out[node.arg0] = 1.0; break;
            case Op::Constant: break;
            case Op::Add:
                ker::axpy(1.0, row(node.arg0), out, n);
                ker::axpy(1.0, row(node.arg1), out, n);
                break;
            case Op::Sub:
                ker::axpy(1.0, row(node.arg0), out, n);
                ker::axpy(-1.0, row(node.arg1), out, n);
                break;
            case Op::Mul:
                ker::axpy(v[node.arg1], row(node.arg0), out, n);
                ker::axpy(v[node.arg0], row(node.arg1), out, n);
                break;
            case Op::Div: {
                if (v[node.arg1] == 0.0) throw EvalError(static_cast<int>(i), "division by zero");
                ker::axpy(1.0 / v[node.arg1], row(node.arg0), out, n);
                ker::axpy(-v[node.arg0] / (v[node.arg1] * v[node.arg1]), row(node.arg1), out, n);
                break;
            }
            case Op::Neg: ker::axpy(-1.0, row(node.arg0), out, n); break;
            case Op::Square: ker::axpy(2.0 * v[node.arg0], row(node.arg0), out, n); break;
            case Op::Exp: ker::axpy(std::exp(v[node.arg0]), row(node.arg0), out, n); break;
            case Op::Scale: ker::axpy(node.coeff, row(node.arg0), out, n); break;
            case Op::Affine:
                for (std::size_t k = 0; k < node.terms.size(); ++k)
                    ker::axpy(node.coeffs[k], row(node.terms[k]), out, n);
                break;
            case Op::Abs: {
                const double zu = v[node.arg0];
                const double sgn = zu > 0.0 ? 1.0 : (zu < 0.0 ? -1.0 : 0.0);
                if (sgn != 0.0) ker::axpy(sgn, row(node.arg0), out, n);
                break;
            }
        }
    }
    const double* out = row(tape.output_node());
    return Vec(out, out + n);
}

}  // namespace asfw
