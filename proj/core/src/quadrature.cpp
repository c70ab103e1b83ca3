#include "mmtdd/quadrature.hpp"

#include "mmtdd/params.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mmtdd::quad {

namespace {

template <int N>
Rule make_rule()
{
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    Rule r;
    // Boost stores the non-negative half; zero appears only for odd N.
    for (std::size_t k = a.size(); k-- > 0;) {
        if (a[k] == 0.0) continue;
        r.x.push_back(-a[k]);
        r.w.push_back(w[k]);
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        r.x.push_back(a[k]);
        r.w.push_back(w[k]);
    }
    return r;
}

Rule rule_for(int n)
{
    switch (n) {
    case 4: return make_rule<4>();
    case 6: return make_rule<6>();
    case 8: return make_rule<8>();
    case 10: return make_rule<10>();
    case 12: return make_rule<12>();
    case 16: return make_rule<16>();
    case 20: return make_rule<20>();
    case 24: return make_rule<24>();
    case 32: return make_rule<32>();
    case 64: return make_rule<64>();
    default: break;
    }
    throw ParamError("gauss_legendre: unsupported order " + std::to_string(n));
}

}  // namespace

const Rule& gauss_legendre(int n)
{
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, rule_for(n)).first;
    return it->second;
}

void Nodes::append(double a, double b, const Rule& rule)
{
    if (!(b > a)) return;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    for (std::size_t k = 0; k < rule.x.size(); ++k) {
        x.push_back(c + h * rule.x[k]);
        w.push_back(h * rule.w[k]);
    }
}

Nodes composite(std::vector<double> breaks, double lo, double hi, double max_width, int order)
{
    Nodes out;
    if (!(hi > lo)) return out;
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::erase_if(breaks, [&](double b) { return !(b >= lo && b <= hi) || !std::isfinite(b); });
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const Rule& rule = gauss_legendre(order);
    out.x.reserve(rule.x.size() * breaks.size() * 2);
    out.w.reserve(rule.x.size() * breaks.size() * 2);
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = breaks[k];
        const double b = breaks[k + 1];
        const int panels =
            max_width > 0.0 ? std::max(1, static_cast<int>(std::ceil((b - a) / max_width))) : 1;
        const double h = (b - a) / panels;
        for (int j = 0; j < panels; ++j) out.append(a + j * h, j + 1 == panels ? b : a + (j + 1) * h, rule);
    }
    return out;
}

double adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                double rel_tol, const char* what)
{
    double err = 0.0;
    double l1 = 0.0;
    const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 20, rel_tol * 0.1, &err, &l1);
    if (!std::isfinite(val) || err > std::max(abs_tol, rel_tol * std::abs(val))) {
        std::ostringstream os;
        os << "quadrature did not converge for " << what << " on [" << a << ", " << b
           << "]: value " << val << ", error estimate " << err;
        throw NumericError(os.str());
    }
    return val;
}

double simpson(std::span<const double> y, double h)
{
    const std::size_t n = y.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * h * (y[0] + y[1]);
    const std::size_t m = (n % 2 == 1) ? n : n - 1;
    double s = y[0] + y[m - 1];
    for (std::size_t k = 1; k + 1 < m; ++k) s += (k % 2 == 1 ? 4.0 : 2.0) * y[k];
    double total = s * h / 3.0;
    if (m != n) total += 0.5 * h * (y[n - 2] + y[n - 1]);
    return total;
}

}  // namespace mmtdd::quad
