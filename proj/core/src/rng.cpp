#include "mpplab/rng.hpp"

#include <bit>
#include <cmath>

namespace mpplab {

std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

StreamRng::StreamRng(std::uint64_t master_seed, std::uint64_t stream)
{
    std::uint64_t state = mix64(master_seed) ^ std::rotl(mix64(stream ^ 0x6a09e667f3bcc909ULL), 17);
    for (auto& word : s_) {
        state += 0x9e3779b97f4a7c15ULL;
        word = mix64(state);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
        s_[0] = 1;
    }
}

StreamRng::result_type StreamRng::operator()() noexcept
{
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
}

double StreamRng::uniform() noexcept
{
    // (k + 0.5) / 2^53 for k in [0, 2^53): never 0, never 1.
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double StreamRng::exponential(double rate) noexcept
{
    return -std::log(uniform()) / rate;
}

} // namespace mpplab
