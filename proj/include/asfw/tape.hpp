#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "asfw/absform.hpp"
#include "asfw/common.hpp"

namespace asfw {

// Evaluation tape for abs-smooth functions. Nodes are stored in
// topological order; max/min are rewritten through abs at construction,
// so abs is the only non-smooth primitive on a finished tape.

enum class Op : std::uint8_t {
    Input,     // value = x[index]
    Constant,  // value = coeff
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Square,
    Exp,
    Scale,   // value = coeff * arg0
    Abs,     // switching node; z = value of arg0
    Affine,  // value = offset + sum coeffs[k] * terms[k]
};

struct Node {
    Op op;
    int arg0 = -1;
    int arg1 = -1;
    double coeff = 0.0;   // Constant / Scale payload
    double offset = 0.0;  // Affine payload
    std::vector<int> terms;
    std::vector<double> coeffs;
};

struct EvalRecord {
    double y = 0.0;
    Vec z;            // switching values, tape order of abs nodes
    Vec node_values;  // all intermediate values
};

class Tape {
public:
    int input_dim() const { return input_dim_; }
    int output_node() const { return output_; }
    int switching_count() const { return static_cast<int>(abs_nodes_.size()); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<int>& switching_order() const { return abs_nodes_; }

private:
    friend class TapeBuilder;
    int input_dim_ = 0;
    int output_ = -1;
    std::vector<Node> nodes_;
    std::vector<int> abs_nodes_;
};

/// Incremental tape construction. Methods return node indices; every
/// argument must be an index previously returned by this builder.
class TapeBuilder {
public:
    explicit TapeBuilder(int input_dim);

    int input(int i);
    int constant(double value);
    int add(int u, int w);
    int sub(int u, int w);
    int mul(int u, int w);
    int div(int u, int w);
    int neg(int u);
    int square(int u);
    int exp(int u);
    int scale(double alpha, int u);
    int affine(double offset, std::vector<std::pair<double, int>> terms);
    int abs(int u);

    // max(u,w) = (u + w + |u - w|)/2, min(u,w) = (u + w - |u - w|)/2
    int max2(int u, int w);
    int min2(int u, int w);

    Tape finish(int output_node);

private:
    int check(int node) const;
    int push(Node n);
    Tape tape_;
};

EvalRecord eval(const Tape& tape, const Vec& x);

/// Piecewise linearization of the tape localized at the anchor.
AbsLinearForm abs_linearize(const Tape& tape, const Vec& anchor);

/// Value of the anchored piecewise-linear model at x in a single O(nodes)
/// sweep: smooth elementals propagate their tangent at the anchor, abs is
/// applied exactly. Agrees with eval_pl(abs_linearize(tape, anchor), x);
/// anchor_record must be eval(tape, anchor).
double eval_pl(const Tape& tape, const EvalRecord& anchor_record, const Vec& x);

/// One element of the Clarke subdifferential: chain rule with
/// d|u|/du = sign(u), sign(0) = 0.
Vec subgradient(const Tape& tape, const Vec& x);

}  // namespace asfw
