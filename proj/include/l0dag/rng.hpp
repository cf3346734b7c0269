#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace l0dag {

/// Counter-based generator: output k of stream (seed, stream) is splitmix64(key + k * gamma),
/// so any draw can be recomputed from (seed, stream, k) on any platform.
class CounterRng {
public:
    static constexpr std::string_view algorithm = "splitmix64-counter";
    static constexpr std::string_view gaussian_transform = "inverse-cdf: -sqrt(2)*erfc_inv(2u), u=(k>>11 + 0.5)/2^53";

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1), 53 bits.
    double uniform();

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via inverse CDF of one uniform draw.
    double normal();

    /// Integer in [0, bound) by 128-bit multiply-shift.
    std::uint64_t below(std::uint64_t bound);

    std::uint64_t counter() const { return counter_; }

    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent child seed; used for per-replication streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

}  // namespace l0dag
