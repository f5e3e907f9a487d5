#pragma once

#include <cstdint>
#include <random>

namespace bsq {

// splitmix64 mixing step. Used to turn user seeds into well-spread engine
// seeds and to derive independent per-task streams from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Stream splitting rule: the derived seed depends only on (master, a, b), so
// adding repetitions or grid points never changes the seeds of existing ones.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ (a + 0x9e3779b97f4a7c15ull));
    h = splitmix64(h ^ (b + 0xd1b54a32d192ed03ull));
    return h;
}

// mt19937_64 mapped onto the open interval (0,1) via
//   u = ((x >> 11) + 0.5) * 2^-53,
// which can produce neither 0 nor 1. The mapping is spelled out instead of
// using std::uniform_real_distribution so that streams are bit-identical
// across standard library implementations.
class UniformOpen01 {
public:
    explicit UniformOpen01(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    double operator()() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace bsq
