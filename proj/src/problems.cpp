#include "asfw/problems.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace asfw {

namespace {

Polytope box(int n, double lo, double hi) {
    Polytope C;
    C.lb.assign(n, lo);
    C.ub.assign(n, hi);
    return C;
}

void check_start(const Problem& p) {
    if (!p.C.contains(p.start)) throw DimensionError(p.name + ": start point infeasible");
}

}  // namespace

Problem make_maxq(int n) {
    if (n < 1) throw DimensionError("make_maxq: n must be >= 1");
    TapeBuilder tb(n);
    int m = tb.square(tb.input(0));
    for (int i = 1; i < n; ++i) m = tb.max2(m, tb.square(tb.input(i)));

    Problem p;
    p.name = "maxq";
    p.n = n;
    p.tape = tb.finish(m);
    p.C = box(n, -20.0, 20.0);
    p.start.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < n; ++i) p.start[i] = i < half ? i + 1.0 : -(i + 1.0);
    p.f_ref = 0.0;
    p.convex = true;
    check_start(p);
    return p;
}

Problem make_wong2() {
    const int n = 10;
    TapeBuilder tb(n);
    std::vector<int> x(n);
    for (int i = 0; i < n; ++i) x[i] = tb.input(i);
    auto sq_shift = [&](int i, double shift) {  // (x_i - shift)^2
        return tb.square(tb.affine(-shift, {{1.0, x[i]}}));
    };

    // f1 = x1^2 + x2^2 + x1 x2 - 14 x1 - 16 x2 + (x3-10)^2 + 4(x4-5)^2
    //      + (x5-3)^2 + 2(x6-1)^2 + 5 x7^2 + 7(x8-11)^2 + 2(x9-10)^2
    //      + (x10-7)^2 + 45
    int f1 = tb.affine(45.0, {{1.0, tb.square(x[0])},
                              {1.0, tb.square(x[1])},
                              {1.0, tb.mul(x[0], x[1])},
                              {-14.0, x[0]},
                              {-16.0, x[1]},
                              {1.0, sq_shift(2, 10.0)},
                              {4.0, sq_shift(3, 5.0)},
                              {1.0, sq_shift(4, 3.0)},
                              {2.0, sq_shift(5, 1.0)},
                              {5.0, tb.square(x[6])},
                              {7.0, sq_shift(7, 11.0)},
                              {2.0, sq_shift(8, 10.0)},
                              {1.0, sq_shift(9, 7.0)}});

    int f2 = tb.affine(-1200.0, {{1.0, f1},
                                 {30.0, sq_shift(0, 2.0)},
                                 {40.0, sq_shift(1, 3.0)},
                                 {20.0, tb.square(x[2])},
                                 {-70.0, x[3]}});
    int f3 = tb.affine(-400.0, {{1.0, f1},
                                {50.0, tb.square(x[0])},
                                {80.0, x[1]},
                                {10.0, sq_shift(2, 6.0)},
                                {-20.0, x[3]}});
    int f4 = tb.affine(-300.0, {{1.0, f1},
                                {5.0, sq_shift(0, 8.0)},
                                {20.0, sq_shift(1, 4.0)},
                                {30.0, tb.square(x[4])},
                                {-10.0, x[5]}});
    int f5 = tb.affine(0.0, {{1.0, f1},
                             {10.0, tb.square(x[0])},
                             {20.0, sq_shift(1, 2.0)},
                             {-20.0, tb.mul(x[0], x[1])},
                             {140.0, x[4]},
                             {-60.0, x[5]}});
    int f6 = tb.affine(-1050.0, {{1.0, f1}, {40.0, x[0]}, {50.0, x[1]}, {-30.0, x[6]}, {90.0, x[7]}});
    int f7 = tb.affine(0.0, {{1.0, f1}, {100.0, x[0]}, {-80.0, x[1]}, {-170.0, x[6]}, {20.0, x[7]}});
    int f8 = tb.affine(0.0, {{1.0, f1},
                             {-30.0, x[0]},
                             {60.0, x[1]},
                             {120.0, sq_shift(8, 8.0)},
                             {-70.0, x[9]}});
    int f9 = tb.affine(-120.0,
                       {{1.0, f1}, {-80.0, x[0]}, {20.0, x[1]}, {50.0, x[8]}, {-20.0, x[9]}});

    int m = f1;
    for (int fi : {f2, f3, f4, f5, f6, f7, f8, f9}) m = tb.max2(m, fi);

    Problem p;
    p.name = "wong2";
    p.n = n;
    p.tape = tb.finish(m);
    p.C = box(n, -10.0, 10.0);
    p.start = {2, 3, 5, 5, 1, 2, 7, 3, 6, 10};
    p.f_ref = 24.3062;
    p.convex = true;
    check_start(p);
    return p;
}

Problem make_cb3i(int n) {
    if (n < 2) throw DimensionError("make_cb3i: n must be >= 2");
    TapeBuilder tb(n);
    std::vector<int> x(n);
    for (int i = 0; i < n; ++i) x[i] = tb.input(i);
    std::vector<std::pair<double, int>> terms;
    for (int i = 0; i + 1 < n; ++i) {
        int t1 = tb.add(tb.square(tb.square(x[i])), tb.square(x[i + 1]));
        int t2 = tb.add(tb.square(tb.affine(2.0, {{-1.0, x[i]}})),
                        tb.square(tb.affine(2.0, {{-1.0, x[i + 1]}})));
        int t3 = tb.scale(2.0, tb.exp(tb.affine(0.0, {{-1.0, x[i]}, {1.0, x[i + 1]}})));
        terms.emplace_back(1.0, tb.max2(tb.max2(t1, t2), t3));
    }

    Problem p;
    p.name = "cb3i";
    p.n = n;
    p.tape = tb.finish(tb.affine(0.0, std::move(terms)));
    p.C = box(n, -5.0, 5.0);
    p.start.assign(n, 2.0);
    p.f_ref = 2.0 * (n - 1);
    p.convex = true;
    check_start(p);
    return p;
}

Problem make_mifflin2(int n) {
    if (n < 2) throw DimensionError("make_mifflin2: n must be >= 2");
    TapeBuilder tb(n);
    std::vector<int> x(n);
    for (int i = 0; i < n; ++i) x[i] = tb.input(i);
    std::vector<std::pair<double, int>> terms;
    for (int i = 0; i + 1 < n; ++i) {
        int u = tb.affine(-1.0, {{1.0, tb.square(x[i])}, {1.0, tb.square(x[i + 1])}});
        int term = tb.affine(0.0, {{-1.0, x[i]}, {2.0, u}, {1.75, tb.abs(u)}});
        terms.emplace_back(1.0, term);
    }

    Problem p;
    p.name = "mifflin2";
    p.n = n;
    p.tape = tb.finish(tb.affine(0.0, std::move(terms)));
    p.C = box(n, -3.0, 3.0);
    p.start.assign(n, 1.0);
    if (n == 200) p.f_ref = -140.86;
    if (n == 1000) p.f_ref = -706.55;
    p.convex = false;
    check_start(p);
    return p;
}

Problem make_lasso(const Dataset& data, double rho, double bound) {
    const std::size_t p_rows = data.y.size();
    const int n = static_cast<int>(data.A.cols());
    if (p_rows == 0 || n == 0) throw DimensionError("make_lasso: empty dataset");
    if (rho < 0.0) throw DimensionError("make_lasso: rho must be >= 0");
    if (!(bound > 0.0)) throw DimensionError("make_lasso: bound must be > 0");

    const double intercept = std::accumulate(data.y.begin(), data.y.end(), 0.0) / p_rows;

    TapeBuilder tb(n);
    std::vector<int> x(n);
    for (int i = 0; i < n; ++i) x[i] = tb.input(i);
    std::vector<std::pair<double, int>> terms;
    terms.reserve(p_rows + n);
    for (std::size_t r = 0; r < p_rows; ++r) {
        std::vector<std::pair<double, int>> row;
        row.reserve(n);
        for (int j = 0; j < n; ++j) row.emplace_back(data.A(r, j), x[j]);
        terms.emplace_back(0.5, tb.square(tb.affine(intercept - data.y[r], std::move(row))));
    }
    for (int j = 0; j < n; ++j) terms.emplace_back(rho, tb.abs(x[j]));

    Problem prob;
    prob.name = "lasso";
    prob.n = n;
    prob.tape = tb.finish(tb.affine(0.0, std::move(terms)));
    prob.C = box(n, -bound, bound);
    prob.start.assign(n, 0.0);
    prob.convex = true;
    check_start(prob);
    return prob;
}

Dataset load_csv_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv_dataset: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_csv_dataset: empty file");
    std::vector<std::string> names;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) names.push_back(cell);
    }
    if (names.size() < 2) throw std::runtime_error("load_csv_dataset: need predictors and a response");
    const std::size_t ncol = names.size();

    std::vector<double> values;
    std::size_t nrow = 0;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t count = 0;
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw std::runtime_error("load_csv_dataset: non-numeric cell at line " +
                                         std::to_string(lineno));
            }
            if (pos != cell.size())
                throw std::runtime_error("load_csv_dataset: non-numeric cell at line " +
                                         std::to_string(lineno));
            values.push_back(v);
            ++count;
        }
        if (count != ncol)
            throw std::runtime_error("load_csv_dataset: inconsistent column count at line " +
                                     std::to_string(lineno));
        ++nrow;
    }
    if (nrow == 0) throw std::runtime_error("load_csv_dataset: no data rows");

    Dataset d;
    d.column_names.assign(names.begin(), names.end() - 1);
    const std::size_t n = ncol - 1;
    d.A = Matrix(nrow, n);
    d.y.resize(nrow);
    for (std::size_t r = 0; r < nrow; ++r) {
        for (std::size_t j = 0; j < n; ++j) d.A(r, j) = values[r * ncol + j];
        d.y[r] = values[r * ncol + n];
    }

    // Standardize predictors (center, unit Euclidean norm) unless the file
    // already ships them standardized.
    bool centered = true;
    for (std::size_t j = 0; j < n && centered; ++j) {
        double mean = 0.0;
        for (std::size_t r = 0; r < nrow; ++r) mean += d.A(r, j);
        if (std::abs(mean / nrow) > 1e-6) centered = false;
    }
    if (!centered) {
        for (std::size_t j = 0; j < n; ++j) {
            double mean = 0.0;
            for (std::size_t r = 0; r < nrow; ++r) mean += d.A(r, j);
            mean /= nrow;
            double norm2 = 0.0;
            for (std::size_t r = 0; r < nrow; ++r) {
                d.A(r, j) -= mean;
                norm2 += d.A(r, j) * d.A(r, j);
            }
            const double norm = std::sqrt(norm2);
            if (norm > 0.0)
                for (std::size_t r = 0; r < nrow; ++r) d.A(r, j) /= norm;
        }
    }
    return d;
}

double lasso_mse(const Dataset& data, const Vec& x) {
    const std::size_t p_rows = data.y.size();
    const double intercept = std::accumulate(data.y.begin(), data.y.end(), 0.0) / p_rows;
    double sse = 0.0;
    for (std::size_t r = 0; r < p_rows; ++r) {
        double pred = intercept;
        for (std::size_t j = 0; j < data.A.cols(); ++j) pred += data.A(r, j) * x[j];
        const double err = pred - data.y[r];
        sse += err * err;
    }
    return sse / p_rows;
}

}  // namespace asfw
