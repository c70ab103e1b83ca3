#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace mmtdd {

// splitmix64 finalizer: a bijective avalanche mix.
std::uint64_t mix64(std::uint64_t x);

// Order-sensitive hash of a word sequence. Used to derive independent
// substreams and per-pair marks from (seed, drop, purpose, ids...).
std::uint64_t hash_words(std::initializer_list<std::uint64_t> w);

// Uniform in the open interval (0, 1) from the top 53 bits.
double to_unit(std::uint64_t h);

// Counter-based generator: output k is mix64(key + k * golden). Any two
// keys give statistically independent streams, and a stream is a pure
// function of its key, so work can be split across threads freely.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) : key_(key) {}
    CounterRng(std::initializer_list<std::uint64_t> words) : key_(hash_words(words)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    double uniform() { return to_unit((*this)()); }
    double exponential();
    std::uint64_t poisson(double mean);
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

}  // namespace mmtdd
