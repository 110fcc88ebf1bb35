#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lockbench::simeval {

/// Bit-parallel pattern storage: one row of 64-bit words per signal, pattern
/// p of a signal lives in bit (p % 64) of word (p / 64). Unused tail bits of
/// the last word are kept zero.
class PatternBlock {
public:
    PatternBlock() = default;
    PatternBlock(std::size_t signals, std::size_t patterns);

    std::size_t signals() const noexcept { return signals_; }
    std::size_t patterns() const noexcept { return patterns_; }
    std::size_t words() const noexcept { return words_; }

    std::span<std::uint64_t> lanes(std::size_t signal) {
        return {data_.data() + signal * words_, words_};
    }
    std::span<const std::uint64_t> lanes(std::size_t signal) const {
        return {data_.data() + signal * words_, words_};
    }

    bool get(std::size_t signal, std::size_t pattern) const {
        return (lanes(signal)[pattern / 64] >> (pattern % 64)) & 1U;
    }
    void set(std::size_t signal, std::size_t pattern, bool value);

    /// Mask of the lanes of word `w` that hold real patterns.
    std::uint64_t valid_mask(std::size_t w) const noexcept;

    friend bool operator==(const PatternBlock&, const PatternBlock&) = default;

private:
    std::size_t signals_ = 0;
    std::size_t patterns_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> data_;
};

/// Counter-based uniform patterns: word w of signal i depends only on
/// (seed, i, w), so adding signals never changes existing ones.
PatternBlock random_patterns(std::size_t signals, std::size_t patterns, std::uint64_t seed);

/// All 2^signals assignments; pattern p sets signal i to bit i of p.
PatternBlock exhaustive_patterns(std::size_t signals);

/// Word `w` of signal `i` in the exhaustive enumeration.
constexpr std::uint64_t exhaustive_word(std::size_t i, std::size_t w) noexcept {
    constexpr std::uint64_t kLow[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL,
                                       0xF0F0F0F0F0F0F0F0ULL, 0xFF00FF00FF00FF00ULL,
                                       0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
    if (i < 6) return kLow[i];
    return ((w >> (i - 6)) & 1U) ? ~std::uint64_t{0} : 0;
}

}  // namespace lockbench::simeval
