#include "locind/random.hpp"

#include <cmath>

namespace locind {

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t h = splitmix64(root);
    for (std::uint64_t p : path)
        h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ull));
    return h;
}

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k)
{
    return (x << k) | (x >> (64 - k));
}
} // namespace

Rng::Rng(std::uint64_t seed)
{
    // Distinct SplitMix64 inputs, so the state is never all zero.
    for (std::uint64_t i = 0; i < 4; ++i)
        s_[i] = splitmix64(seed + i * 0x9e3779b97f4a7c15ull);
}

Rng::result_type Rng::operator()()
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Rng::exponential(double rate)
{
    return -std::log(uniform_pos()) / rate;
}

} // namespace locind
