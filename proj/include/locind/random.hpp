#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace locind {

// SplitMix64 finalizer; a bijective mixing of a 64-bit counter.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Seed of an independent stream identified by a path of indices below a root
// seed, e.g. derive_seed(root, {structure, repetition}). Counter-based: the
// result depends only on the arguments, never on draw order.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path);

/*!
 * xoshiro256** generator seeded through SplitMix64.
 *
 * The uniform and exponential draws are implemented here rather than through
 * <random> distributions so that streams are identical on every platform.
 */
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }
    double exponential(double rate);
    bool bernoulli(double p) { return uniform() < p; }

  private:
    std::uint64_t s_[4];
};

} // namespace locind
