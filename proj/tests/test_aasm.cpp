#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "asfw/aasm.hpp"
#include "asfw/tape.hpp"
#include "oracles.hpp"

using asfw::AbsLinearForm;
using asfw::Matrix;
using asfw::PLSolveResult;
using asfw::Polytope;
using asfw::SignatureVector;
using asfw::Vec;

namespace {

Polytope box(int n, double lo, double hi) {
    Polytope C;
    C.lb.assign(n, lo);
    C.ub.assign(n, hi);
    return C;
}

// f_PL = -|x1| - |x2|, anchored at the origin: every vertex flip from the
// all-zero signature ties exactly, exercising the tie-breaking rules.
AbsLinearForm concave_cross() {
    AbsLinearForm f;
    f.n = 2;
    f.s = 2;
    f.anchor = {0.0, 0.0};
    f.anchor_value = 0.0;
    f.a.assign(2, 0.0);
    f.b.assign(2, 0.0);
    f.e = {-1.0, -1.0};
    f.c.assign(2, 0.0);
    f.d = 0.0;
    f.Z = Matrix(2, 2);
    f.Z(0, 0) = 1.0;
    f.Z(1, 1) = 1.0;
    f.M = Matrix(2, 2);
    f.L = Matrix(2, 2);
    return f;
}

}  // namespace

TEST_CASE("signature LP encodes sign-consistency rows") {
    asfw::TapeBuilder tb(2);
    const asfw::Tape tape = tb.finish(tb.max2(tb.square(tb.input(0)), tb.square(tb.input(1))));
    const AbsLinearForm form = abs_linearize(tape, {-2.0, 1.0});
    const Polytope C = box(2, -3.0, 3.0);

    SignatureVector plus;
    plus.sigma = {1};
    const asfw::LPProblem lp_plus = asfw::signature_lp(restrict_to_signature(form, plus), C);
    REQUIRE(lp_plus.h.size() == 1);  // box has no rows; one sign row
    CHECK(lp_plus.e.empty());
    // z(x) = -3 - 4 x1 - 2 x2; z >= 0 becomes 4 x1 + 2 x2 <= -3.
    CHECK(lp_plus.G(0, 0) == doctest::Approx(4.0));
    CHECK(lp_plus.G(0, 1) == doctest::Approx(2.0));
    CHECK(lp_plus.h[0] == doctest::Approx(-3.0));

    SignatureVector zero;
    zero.sigma = {0};
    const asfw::LPProblem lp_zero = asfw::signature_lp(restrict_to_signature(form, zero), C);
    CHECK(lp_zero.h.empty());
    REQUIRE(lp_zero.e.size() == 1);  // kink becomes an equality
    CHECK(lp_zero.E(0, 0) == doctest::Approx(-4.0));
    CHECK(lp_zero.E(0, 1) == doctest::Approx(-2.0));
    CHECK(lp_zero.e[0] == doctest::Approx(3.0));
}

TEST_CASE("local optimality holds at the global minimum of |x1| + |x2|") {
    asfw::TapeBuilder tb(2);
    const asfw::Tape tape = tb.finish(tb.add(tb.abs(tb.input(0)), tb.abs(tb.input(1))));
    const AbsLinearForm form = abs_linearize(tape, {0.0, 0.0});
    const Polytope C = box(2, -1.0, 1.0);
    const SignatureVector sigma = signature(form, {0.0, 0.0});
    CHECK(asfw::local_opt_check(form, C, {0.0, 0.0}, sigma));
}

TEST_CASE("next signature tie-breaking: lowest kink index, then +1 before -1") {
    const AbsLinearForm f = concave_cross();
    const Polytope C = box(2, -1.0, 1.0);
    const Vec origin = {0.0, 0.0};
    const SignatureVector sigma = signature(f, origin);
    REQUIRE(sigma.sigma == std::vector<std::int8_t>{0, 0});
    CHECK_FALSE(asfw::local_opt_check(f, C, origin, sigma));
    // All four single flips reach value -1; the pinned winner is (+1, 0).
    const SignatureVector next = asfw::next_signature(f, C, origin, sigma);
    CHECK(next.sigma == std::vector<std::int8_t>{1, 0});
}

TEST_CASE("signature walk reaches the enumeration optimum on the tied model") {
    const AbsLinearForm f = concave_cross();
    const Polytope C = box(2, -1.0, 1.0);
    const PLSolveResult res = asfw::minimize_form(f, C, {0.0, 0.0}, 100);
    CHECK(res.exact);
    CHECK(res.model_value == doctest::Approx(-2.0).epsilon(1e-10));
    const oracle::EnumResult ref = oracle::enumerate_pl_min(f, C);
    CHECK(res.model_value == doctest::Approx(ref.value).epsilon(1e-10));
}

TEST_CASE("budget exhaustion reports inexact and respects max_inner") {
    const AbsLinearForm f = concave_cross();
    const Polytope C = box(2, -1.0, 1.0);
    const PLSolveResult res = asfw::minimize_form(f, C, {0.0, 0.0}, 1);
    CHECK(res.inner_iters == 1);
    CHECK_FALSE(res.exact);
    CHECK(C.contains(res.v));
}

TEST_CASE("walk is monotone in the inner budget") {
    std::mt19937_64 rng(41);
    for (int inst = 0; inst < 10; ++inst) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const auto [tape, s] = oracle::random_convex_tape(n, 4, rng);
        (void)s;
        Vec anchor(n);
        for (auto& v : anchor) v = oracle::uniform01(rng) - 0.5;
        const AbsLinearForm form = abs_linearize(tape, anchor);
        const Polytope C = box(n, -2.0, 2.0);
        double prev = std::numeric_limits<double>::infinity();
        for (int budget = 1; budget <= 6; ++budget) {
            const PLSolveResult res = asfw::minimize_form(form, C, anchor, budget);
            CHECK(res.model_value <= prev + 1e-10);
            CHECK(res.inner_iters <= budget);
            CHECK(C.contains(res.v));
            prev = res.model_value;
        }
    }
}

TEST_CASE("exact solves agree with full signature enumeration (random convex)") {
    std::mt19937_64 rng(43);
    for (int inst = 0; inst < 40; ++inst) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const int s = 2 + static_cast<int>(rng() % 4);  // up to 5 switches
        const auto rct = oracle::random_convex_tape(n, s, rng);
        Vec anchor(n);
        for (auto& v : anchor) v = oracle::uniform01(rng) - 0.5;
        const AbsLinearForm form = abs_linearize(rct.tape, anchor);
        const Polytope C = box(n, -1.5, 1.5);
        const PLSolveResult res = asfw::minimize_form(form, C, anchor, 1 << 20);
        REQUIRE(res.exact);
        const oracle::EnumResult ref = oracle::enumerate_pl_min(form, C);
        CHECK(res.model_value ==
              doctest::Approx(ref.value).epsilon(1e-8).scale(1.0 + std::abs(ref.value)));
        CHECK(C.contains(res.v, 1e-8));
    }
}

TEST_CASE("stepped inner solve returns a nonpositive increment at feasible anchors") {
    std::mt19937_64 rng(47);
    const auto [tape, s] = oracle::random_convex_tape(3, 4, rng);
    (void)s;
    const Vec anchor = {0.2, -0.3, 0.1};
    const AbsLinearForm form = abs_linearize(tape, anchor);
    const Polytope C = box(3, -1.0, 1.0);
    for (double alpha : {1.0, 0.5, 0.1}) {
        const PLSolveResult res = asfw::minimize_pl(form, C, anchor, alpha, 1 << 20);
        CHECK(res.exact);
        CHECK(res.model_value <= 1e-12);  // v = anchor gives increment 0
    }
}

TEST_CASE("polytope rows restrict the walk's optimum") {
    // minimize |x1| - x1 - x2 over the triangle x1 + x2 <= 1 in [0,1]^2:
    // model value at (x1, x2) is -x2 for x1 >= 0, so optimum -1 at x2 = 1.
    AbsLinearForm f;
    f.n = 2;
    f.s = 1;
    f.anchor = {0.0, 0.0};
    f.anchor_value = 0.0;
    f.a = {-1.0, -1.0};
    f.b.assign(1, 0.0);
    f.e = {1.0};
    f.c.assign(1, 0.0);
    f.Z = Matrix(1, 2);
    f.Z(0, 0) = 1.0;
    f.M = Matrix(1, 1);
    f.L = Matrix(1, 1);
    Polytope C = box(2, 0.0, 1.0);
    C.G = Matrix(1, 2, 1.0);
    C.h = {1.0};
    const PLSolveResult res = asfw::minimize_form(f, C, {0.0, 0.0}, 100);
    CHECK(res.exact);
    CHECK(res.model_value == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(res.v[0] + res.v[1] <= 1.0 + 1e-8);
}

TEST_CASE("invalid arguments throw") {
    const AbsLinearForm f = concave_cross();
    const Polytope C = box(2, -1.0, 1.0);
    CHECK_THROWS_AS((void)asfw::minimize_form(f, C, {5.0, 0.0}, 10), asfw::DimensionError);
    CHECK_THROWS_AS((void)asfw::minimize_form(f, C, {0.0, 0.0}, 0), asfw::DimensionError);
    CHECK_THROWS_AS((void)asfw::minimize_pl(f, C, {0.0, 0.0}, 0.0, 10), asfw::DimensionError);
    Polytope bad = box(2, 1.0, -1.0);
    CHECK_THROWS_AS(bad.validate(), asfw::DimensionError);
}
