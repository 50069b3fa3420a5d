#pragma once

#include <cstdint>

namespace rhlab {

/// SplitMix64 finalizer. A bijection on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

__extension__ using uint128 = unsigned __int128;

/// Maps a 64-bit word uniformly onto [0, bound) by multiply-shift.
constexpr std::uint64_t reduce(std::uint64_t word, std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<uint128>(word) * bound) >> 64);
}

/// Counter-based probe stream: the j-th probe of a key is a pure function of
/// (seed, key, j), so any position of the sequence is available in O(1).
class ProbeStream {
public:
    constexpr ProbeStream(std::uint64_t seed, std::uint64_t table_size) noexcept
        : seed_(mix64(seed ^ 0x5bd1e9955bd1e995ULL)), size_(table_size) {}

    /// Raw 64-bit probe word for (key, j).
    constexpr std::uint64_t word(std::uint64_t key, std::uint64_t j) const noexcept {
        const std::uint64_t base = mix64(key ^ seed_);
        return mix64(base + j * kGolden);
    }

    /// Slot index in [0, m) for the j-th probe of `key` (j >= 1).
    constexpr std::uint64_t operator()(std::uint64_t key, std::uint64_t j) const noexcept {
        return reduce(word(key, j), size_);
    }

    constexpr std::uint64_t table_size() const noexcept { return size_; }

private:
    std::uint64_t seed_;
    std::uint64_t size_;
};

/// Counter-based generator for deletion draws and sampling.
class CounterRng {
public:
    constexpr explicit CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed + kGolden)) {}

    constexpr std::uint64_t next() noexcept { return mix64(key_ ^ mix64(++counter_)); }

    /// Uniform integer in [0, bound).
    constexpr std::uint64_t below(std::uint64_t bound) noexcept { return reduce(next(), bound); }

    constexpr std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace rhlab
