#include "mmtdd/rng.hpp"

#include <cmath>
#include <random>

namespace mmtdd {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x)
{
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_words(std::initializer_list<std::uint64_t> w)
{
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (std::uint64_t x : w) h = mix64(h ^ mix64(x));
    return h;
}

double to_unit(std::uint64_t h) { return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53; }

CounterRng::result_type CounterRng::operator()() { return mix64(key_ + kGolden * ++ctr_); }

double CounterRng::exponential() { return -std::log(uniform()); }

std::uint64_t CounterRng::poisson(double mean)
{
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<std::uint64_t> d(mean);
    return d(*this);
}

std::uint64_t CounterRng::below(std::uint64_t n)
{
    if (n <= 1) return 0;
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

}  // namespace mmtdd
