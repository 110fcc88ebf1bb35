#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lockbench/netcore/key_mapping.hpp"
#include "lockbench/netcore/netlist.hpp"

namespace lockbench::simeval {

struct CorruptionStats {
    double hd = 0.0;   ///< mean fraction of differing output bits
    double oer = 0.0;  ///< fraction of (key, pattern) pairs with any differing output
    std::size_t patterns_evaluated = 0;
    std::size_t keys_evaluated = 0;
    std::vector<double> hd_per_key;
    std::vector<double> oer_per_key;
};

/// Output corruption of `locked` against `original` under random wrong keys.
///
/// Draws `n_keys` distinct keys that all differ from the correct one and one
/// shared set of `n_patterns` input patterns. With n_keys == 0 the correct key
/// itself is probed once. Throws std::invalid_argument when n_keys > 2^K - 1
/// or the primary inputs/outputs do not match by name.
CorruptionStats corruption(const netcore::Netlist& original, const netcore::Netlist& locked,
                           const netcore::KeyMapping& mapping, std::size_t n_keys,
                           std::size_t n_patterns, std::uint64_t seed);

inline constexpr const char* kCorruptionCsvHeader = "circuit,scheme,K,seed,hd,oer";

std::string corruption_csv_row(const std::string& circuit, const std::string& scheme,
                               std::size_t K, std::uint64_t seed, const CorruptionStats& s);

}  // namespace lockbench::simeval
