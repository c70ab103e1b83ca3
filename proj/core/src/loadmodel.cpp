#include "mmtdd/loadmodel.hpp"

#include "mmtdd/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mmtdd {

namespace {

constexpr double kShape = 3.5;

void check_eps(double eps)
{
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw ParamError("load mean must be finite and >= 0");
}

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

}  // namespace

double nb_pmf(double k, double eps, int n)
{
    check_eps(eps);
    if (n < 0) return 0.0;
    if (eps == 0.0) return n == 0 ? 1.0 : 0.0;
    const double lp = std::log(eps) - std::log(eps + kShape);
    const double lq = std::log(kShape) - std::log(eps + kShape);
    return std::exp(std::lgamma(n + k) - std::lgamma(n + 1.0) - std::lgamma(k) + n * lp + k * lq);
}

double typical_pmf(double eps, int n)
{
    if (n < 0) throw ParamError("typical_pmf: n must be >= 0");
    return nb_pmf(kShape, eps, n);
}

double tagged_pmf(double eps, int n)
{
    if (n < 1) throw ParamError("tagged_pmf: support starts at n = 1");
    return nb_pmf(kShape + 1.0, eps, n - 1);
}

double joint_pmf(double eps, double eta, int n1, int n2, double k)
{
    check_eps(eps);
    if (k != 3.5 && k != 4.5) throw ParamError("joint_pmf: k must be 3.5 or 4.5");
    if (!(eta >= 0.0 && eta <= 1.0)) throw ParamError("joint_pmf: eta must lie in [0,1]");
    if (n1 < 0 || n2 < 0) return 0.0;
    if ((eta == 0.0 && n2 > 0) || (eta == 1.0 && n1 > 0)) return 0.0;
    const int n = n1 + n2;
    const double lbin = std::lgamma(n + 1.0) - std::lgamma(n1 + 1.0) - std::lgamma(n2 + 1.0)
                        + xlogy(n2, eta) + xlogy(n1, 1.0 - eta);
    return nb_pmf(k, eps, n) * std::exp(lbin);
}

int truncation_limit(double eps)
{
    check_eps(eps);
    return std::max(static_cast<int>(std::ceil(6.0 * eps)), 20);
}

int support_limit(double k, double eps, double tail)
{
    int n = truncation_limit(eps);
    if (eps == 0.0) return n;
    double mass = 0.0;
    for (int j = 0; j <= n; ++j) mass += nb_pmf(k, eps, j);
    while (1.0 - mass >= tail) {
        if (n > 1000000)
            throw NumericError("load truncation: tail above " + std::to_string(tail)
                               + " after 1e6 terms (eps = " + std::to_string(eps) + ")");
        // Direct summation saturates near 1e-16; stop once terms are negligible.
        const double term = nb_pmf(k, eps, ++n);
        mass += term;
        if (term < 1e-18 && n > 10.0 * eps + 50) break;
    }
    return n;
}

std::vector<double> nb_table(double k, double eps, double tail)
{
    const int n = support_limit(k, eps, tail);
    std::vector<double> t(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) t[j] = nb_pmf(k, eps, j);
    return t;
}

double tagged_inverse_mean(double eps, double tail)
{
    const auto t = nb_table(kShape + 1.0, eps, tail);
    double acc = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) acc += t[j] / static_cast<double>(j + 1);
    return acc;
}

}  // namespace mmtdd
