#include "mmtdd/params.hpp"
#include "mmtdd/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace mmtdd;

TEST(Quadrature, GaussLegendreIsExactForPolynomials)
{
    for (int n : {4, 8, 16, 32}) {
        const auto& r = quad::gauss_legendre(n);
        double s = 0.0, m = 0.0;
        for (std::size_t k = 0; k < r.x.size(); ++k) {
            s += r.w[k];
            m += r.w[k] * std::pow(r.x[k], 2 * n - 2);
        }
        EXPECT_NEAR(s, 2.0, 1e-13);
        EXPECT_NEAR(m, 2.0 / (2 * n - 1), 1e-12);
    }
    EXPECT_THROW(quad::gauss_legendre(5), ParamError);
}

TEST(Quadrature, CompositeCoversTheRange)
{
    const auto nodes = quad::composite({3.0, 1.0, 1.0, 7.0}, 0.0, 10.0, 0.5, 8);
    double len = 0.0, cube = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        len += nodes.w[k];
        cube += nodes.w[k] * nodes.x[k] * nodes.x[k] * nodes.x[k];
    }
    EXPECT_NEAR(len, 10.0, 1e-12);
    EXPECT_NEAR(cube, 2500.0, 1e-9);
}

TEST(Quadrature, AdaptiveHandlesInfiniteRanges)
{
    EXPECT_NEAR(quad::adaptive([](double x) { return std::exp(-x); }, 0.0, INFINITY), 1.0, 1e-9);
    EXPECT_NEAR(quad::adaptive([](double x) { return 1.0 / (1.0 + x * x); }, -INFINITY, INFINITY), M_PI, 1e-8);
}

TEST(Quadrature, SimpsonMatchesClosedForm)
{
    const int n = 101;
    const double h = 1.0 / (n - 1);
    std::vector<double> y(n);
    for (int k = 0; k < n; ++k) y[k] = std::exp(k * h);
    EXPECT_NEAR(quad::simpson(y, h), std::exp(1.0) - 1.0, 1e-9);
    y.pop_back();  // even count takes the trapezoid fallback
    EXPECT_NEAR(quad::simpson(y, h), std::exp(1.0 - h) - 1.0, 1e-6);
}
