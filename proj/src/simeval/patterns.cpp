#include "lockbench/simeval/patterns.hpp"

#include <stdexcept>

#include "lockbench/util/rng.hpp"

namespace lockbench::simeval {

PatternBlock::PatternBlock(std::size_t signals, std::size_t patterns)
    : signals_(signals),
      patterns_(patterns),
      words_((patterns + 63) / 64),
      data_(signals * words_, 0) {}

void PatternBlock::set(std::size_t signal, std::size_t pattern, bool value) {
    std::uint64_t& w = lanes(signal)[pattern / 64];
    const std::uint64_t bit = std::uint64_t{1} << (pattern % 64);
    w = value ? (w | bit) : (w & ~bit);
}

std::uint64_t PatternBlock::valid_mask(std::size_t w) const noexcept {
    const std::size_t rest = patterns_ - w * 64;
    return rest >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << rest) - 1);
}

PatternBlock random_patterns(std::size_t signals, std::size_t patterns, std::uint64_t seed) {
    PatternBlock block(signals, patterns);
    for (std::size_t i = 0; i < signals; ++i) {
        const std::uint64_t stream = derive_seed(seed, i);
        auto row = block.lanes(i);
        for (std::size_t w = 0; w < row.size(); ++w) {
            row[w] = mix64(stream + w) & block.valid_mask(w);
        }
    }
    return block;
}

PatternBlock exhaustive_patterns(std::size_t signals) {
    if (signals > 30) throw std::invalid_argument("exhaustive enumeration limited to 30 signals");
    const std::size_t count = std::size_t{1} << signals;
    PatternBlock block(signals, count);
    for (std::size_t i = 0; i < signals; ++i) {
        auto row = block.lanes(i);
        for (std::size_t w = 0; w < row.size(); ++w) {
            row[w] = exhaustive_word(i, w) & block.valid_mask(w);
        }
    }
    return block;
}

}  // namespace lockbench::simeval
