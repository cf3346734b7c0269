#include "l0dag/rng.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>

namespace l0dag {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += kGamma;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * kGamma));
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

std::uint64_t CounterRng::next_u64() {
    return splitmix64(key_ + (counter_++) * kGamma);
}

double CounterRng::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * uniform());
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
    const unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
}

}  // namespace l0dag
