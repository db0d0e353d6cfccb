#pragma once

#include <optional>
#include <string>
#include <vector>

#include "asfw/aasm.hpp"
#include "asfw/common.hpp"
#include "asfw/tape.hpp"

namespace asfw {

struct Problem {
    std::string name;
    int n = 0;
    Tape tape;
    Polytope C;
    Vec start;
    std::optional<double> f_ref;
    bool convex = false;  // convexity-dependent certificates enabled
};

struct Dataset {
    Matrix A;  // p x n predictors
    Vec y;     // responses
    std::vector<std::string> column_names;
};

// Benchmark definitions: objective, start point, box, reference value.
Problem make_maxq(int n);
Problem make_wong2();
Problem make_cb3i(int n);
Problem make_mifflin2(int n);

/// LASSO (1/2)||A x - y_c||^2 + rho ||x||_1 over the centered response
/// y_c = y - mean(y); the intercept is exactly mean(y).
Problem make_lasso(const Dataset& data, double rho, double bound = 1000.0);

/// Comma-separated numeric file, one header row, response in the last
/// column. Predictor columns are centered and scaled to unit Euclidean
/// norm unless they already have (near-)zero means.
Dataset load_csv_dataset(const std::string& path);

/// Mean squared prediction error of x with intercept mean(y).
double lasso_mse(const Dataset& data, const Vec& x);

}  // namespace asfw
