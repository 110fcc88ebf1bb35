#include "lockbench/simeval/corruption.hpp"

#include <bit>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "lockbench/simeval/patterns.hpp"
#include "lockbench/simeval/simulator.hpp"
#include "lockbench/util/rng.hpp"

namespace lockbench::simeval {

CorruptionStats corruption(const netcore::Netlist& original, const netcore::Netlist& locked,
                           const netcore::KeyMapping& mapping, std::size_t n_keys,
                           std::size_t n_patterns, std::uint64_t seed) {
    if (n_patterns == 0) throw std::invalid_argument("corruption needs at least one pattern");
    const std::vector<std::uint8_t> correct = mapping.values_for(locked);
    const std::size_t K = correct.size();
    if (n_keys > 0 && (K == 0 || (K < 64 && n_keys > (std::uint64_t{1} << K) - 1))) {
        throw std::invalid_argument("requested " + std::to_string(n_keys) +
                                    " wrong keys but only 2^K - 1 exist");
    }
    if (original.inputs().size() != locked.inputs().size()) {
        throw std::invalid_argument("locked netlist has different primary inputs");
    }

    // Reorder the shared patterns into the locked netlist's input order.
    const PatternBlock patterns =
        random_patterns(original.inputs().size(), n_patterns, derive_seed(seed, 1));
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < original.inputs().size(); ++i) {
        pos.emplace(original.name(original.inputs()[i]), i);
    }
    PatternBlock locked_inputs(locked.inputs().size(), n_patterns);
    for (std::size_t i = 0; i < locked.inputs().size(); ++i) {
        auto it = pos.find(locked.name(locked.inputs()[i]));
        if (it == pos.end()) {
            throw std::invalid_argument("input '" + locked.name(locked.inputs()[i]) +
                                        "' missing from the original");
        }
        auto dst = locked_inputs.lanes(i);
        auto src = patterns.lanes(it->second);
        std::copy(src.begin(), src.end(), dst.begin());
    }

    const PatternBlock golden = simulate(original, patterns, {});
    std::unordered_map<std::string, std::size_t> opos;
    for (std::size_t i = 0; i < original.outputs().size(); ++i) {
        opos.emplace(original.output_name(i), i);
    }
    std::vector<std::size_t> omap;
    for (std::size_t i = 0; i < locked.outputs().size(); ++i) {
        auto it = opos.find(locked.output_name(i));
        if (it == opos.end() || locked.outputs().size() != original.outputs().size()) {
            throw std::invalid_argument("output ports differ between original and locked");
        }
        omap.push_back(it->second);
    }

    std::vector<std::vector<std::uint8_t>> keys;
    if (n_keys == 0) {
        keys.push_back(correct);
    } else {
        Rng rng(derive_seed(seed, 2));
        std::set<std::vector<std::uint8_t>> seen{correct};
        while (keys.size() < n_keys) {
            std::vector<std::uint8_t> k(K);
            for (auto& b : k) b = rng.coin() ? 1 : 0;
            if (seen.insert(k).second) keys.push_back(std::move(k));
        }
    }

    CorruptionStats stats;
    stats.patterns_evaluated = n_patterns;
    stats.keys_evaluated = keys.size();
    const std::size_t n_out = locked.outputs().size();
    for (const auto& key : keys) {
        const PatternBlock out = simulate(locked, locked_inputs, key);
        std::size_t bits = 0;
        std::size_t errs = 0;
        for (std::size_t w = 0; w < out.words(); ++w) {
            std::uint64_t any = 0;
            for (std::size_t o = 0; o < n_out; ++o) {
                const std::uint64_t d = out.lanes(o)[w] ^ golden.lanes(omap[o])[w];
                bits += static_cast<std::size_t>(std::popcount(d));
                any |= d;
            }
            errs += static_cast<std::size_t>(std::popcount(any));
        }
        const double hd = n_out == 0 ? 0.0
                                     : static_cast<double>(bits) /
                                           (static_cast<double>(n_out) * static_cast<double>(n_patterns));
        const double oer = static_cast<double>(errs) / static_cast<double>(n_patterns);
        stats.hd_per_key.push_back(hd);
        stats.oer_per_key.push_back(oer);
        stats.hd += hd;
        stats.oer += oer;
    }
    stats.hd /= static_cast<double>(keys.size());
    stats.oer /= static_cast<double>(keys.size());
    return stats;
}

std::string corruption_csv_row(const std::string& circuit, const std::string& scheme,
                               std::size_t K, std::uint64_t seed, const CorruptionStats& s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f", s.hd, s.oer);
    return circuit + "," + scheme + "," + std::to_string(K) + "," + std::to_string(seed) + "," + buf;
}

}  // namespace lockbench::simeval
