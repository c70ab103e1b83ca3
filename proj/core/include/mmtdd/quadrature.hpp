#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mmtdd::quad {

// Gauss-Legendre rule on [-1, 1]. Supported orders: 4, 6, 8, 10, 12, 16, 20,
// 24, 32, 64.
struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

const Rule& gauss_legendre(int n);

// Nodes and weights of a composite rule, ready for sum(w[k] * f(x[k])).
struct Nodes {
    std::vector<double> x;
    std::vector<double> w;

    std::size_t size() const { return x.size(); }
    void append(double a, double b, const Rule& rule);
};

// Composite rule over [breaks.front(), breaks.back()]. Each gap between
// consecutive breaks is split into equal panels no wider than max_width.
// Breaks need not be sorted; duplicates and out-of-range values are dropped.
Nodes composite(std::vector<double> breaks, double lo, double hi, double max_width,
                int order);

// Adaptive Gauss-Kronrod (15 point) on [a, b]; either limit may be infinite.
// Throws NumericError when the error estimate exceeds
// max(abs_tol, rel_tol * |I|).
double adaptive(const std::function<double(double)>& f, double a, double b,
                double abs_tol = 1e-9, double rel_tol = 1e-7, const char* what = "integral");

// Composite Simpson on a uniform grid of values (odd count, spacing h). An
// even count falls back to Simpson plus a final trapezoid panel.
double simpson(std::span<const double> y, double h);

}  // namespace mmtdd::quad
