#include "lockbench/simeval/simulator.hpp"

#include <bit>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace lockbench::simeval {

CompiledNetlist::CompiledNetlist(const Netlist& n)
    : n_(&n), types_(n.size()), fanin_begin_(n.size() + 1, 0), position_(n.size(), 0) {
    for (GateId g = 0; g < n.size(); ++g) {
        types_[g] = n.type(g);
        fanin_begin_[g + 1] = fanin_begin_[g] + static_cast<std::uint32_t>(n.fanins(g).size());
    }
    fanin_ids_.reserve(fanin_begin_.back());
    for (GateId g = 0; g < n.size(); ++g) {
        auto f = n.fanins(g);
        fanin_ids_.insert(fanin_ids_.end(), f.begin(), f.end());
    }
    const auto& order = n.topo_order();
    order_ = order;
    for (std::size_t i = 0; i < order.size(); ++i) {
        position_[order[i]] = static_cast<std::uint32_t>(i);
        if (types_[order[i]] != GateType::Input) schedule_.push_back(order[i]);
    }
}

std::uint64_t CompiledNetlist::eval_gate(GateId g, const std::uint64_t* values) const noexcept {
    return eval_with(g, [values](GateId f) { return values[f]; });
}

void CompiledNetlist::evaluate(std::span<std::uint64_t> values) const noexcept {
    evaluate(values, schedule_);
}

void CompiledNetlist::evaluate(std::span<std::uint64_t> values,
                               std::span<const GateId> gates) const noexcept {
    std::uint64_t* v = values.data();
    for (GateId g : gates) v[g] = eval_gate(g, v);
}

namespace {

// How each source gate of a netlist is driven: from a pattern signal or a
// constant word.
struct Binding {
    std::vector<std::pair<GateId, std::size_t>> lanes;
    std::vector<std::pair<GateId, std::uint64_t>> constants;
};

Binding fixed_key_binding(const Netlist& n, std::span<const std::uint8_t> key) {
    if (key.size() != n.keys().size()) {
        throw std::invalid_argument("key has " + std::to_string(key.size()) + " bits, netlist has " +
                                    std::to_string(n.keys().size()) + " key-inputs");
    }
    Binding b;
    for (std::size_t i = 0; i < n.inputs().size(); ++i) b.lanes.emplace_back(n.inputs()[i], i);
    for (std::size_t i = 0; i < key.size(); ++i) {
        b.constants.emplace_back(n.keys()[i], key[i] ? ~std::uint64_t{0} : 0);
    }
    return b;
}

// Binding of `b`'s sources to the signal layout of `layout` (matched by name).
Binding matched_binding(const Netlist& b, const std::vector<std::string>& layout,
                        std::span<const std::uint8_t> key_b, bool keys_by_name) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < layout.size(); ++i) index.emplace(layout[i], i);
    Binding bind;
    for (GateId g : b.inputs()) {
        auto it = index.find(b.name(g));
        if (it == index.end()) {
            throw std::invalid_argument("primary input '" + b.name(g) + "' has no counterpart");
        }
        bind.lanes.emplace_back(g, it->second);
    }
    for (std::size_t i = 0; i < b.keys().size(); ++i) {
        const GateId g = b.keys()[i];
        if (keys_by_name) {
            auto it = index.find(b.name(g));
            if (it != index.end()) {
                bind.lanes.emplace_back(g, it->second);
            } else {
                bind.constants.emplace_back(g, 0);
            }
        } else {
            bind.constants.emplace_back(g, key_b[i] ? ~std::uint64_t{0} : 0);
        }
    }
    return bind;
}

std::vector<std::size_t> output_map(const Netlist& a, const Netlist& b) {
    if (a.outputs().size() != b.outputs().size()) {
        throw std::invalid_argument("netlists have different output counts");
    }
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < b.outputs().size(); ++i) index.emplace(b.output_name(i), i);
    std::vector<std::size_t> map;
    for (std::size_t i = 0; i < a.outputs().size(); ++i) {
        auto it = index.find(a.output_name(i));
        if (it == index.end()) {
            throw std::invalid_argument("output '" + a.output_name(i) + "' has no counterpart");
        }
        map.push_back(it->second);
    }
    return map;
}

template <typename Source>
void load_sources(const Binding& bind, std::vector<std::uint64_t>& values, Source&& source,
                  std::size_t w) {
    for (const auto& [g, lane] : bind.lanes) values[g] = source(lane, w);
    for (const auto& [g, c] : bind.constants) values[g] = c;
}

// Runs both netlists word by word; returns the number of patterns with an
// output difference (stops early when `stop_at_first`).
template <typename Source>
std::size_t count_mismatches(const Netlist& a, const Binding& bind_a, const Netlist& b,
                             const Binding& bind_b, std::size_t words, std::size_t patterns,
                             Source&& source, bool stop_at_first) {
    const CompiledNetlist ca(a);
    const CompiledNetlist cb(b);
    const auto omap = output_map(a, b);
    std::vector<std::uint64_t> va(a.size(), 0);
    std::vector<std::uint64_t> vb(b.size(), 0);
    std::size_t mismatches = 0;
    for (std::size_t w = 0; w < words; ++w) {
        load_sources(bind_a, va, source, w);
        load_sources(bind_b, vb, source, w);
        ca.evaluate(va);
        cb.evaluate(vb);
        std::uint64_t diff = 0;
        for (std::size_t i = 0; i < omap.size(); ++i) {
            diff |= va[a.outputs()[i]] ^ vb[b.outputs()[omap[i]]];
        }
        const std::size_t rest = patterns - w * 64;
        if (rest < 64) diff &= (std::uint64_t{1} << rest) - 1;
        mismatches += static_cast<std::size_t>(std::popcount(diff));
        if (stop_at_first && mismatches != 0) return mismatches;
    }
    return mismatches;
}

std::vector<std::string> input_names(const Netlist& n) {
    std::vector<std::string> names;
    for (GateId g : n.inputs()) names.push_back(n.name(g));
    return names;
}

void check_same_inputs(const Netlist& a, const Netlist& b) {
    if (a.inputs().size() != b.inputs().size()) {
        throw std::invalid_argument("netlists have different primary-input counts");
    }
}

}  // namespace

PatternBlock simulate(const Netlist& n, const PatternBlock& inputs,
                      std::span<const std::uint8_t> key) {
    if (inputs.signals() != n.inputs().size()) {
        throw std::invalid_argument("pattern block covers " + std::to_string(inputs.signals()) +
                                    " inputs, netlist has " + std::to_string(n.inputs().size()));
    }
    const Binding bind = fixed_key_binding(n, key);
    const CompiledNetlist c(n);
    PatternBlock out(n.outputs().size(), inputs.patterns());
    std::vector<std::uint64_t> values(n.size(), 0);
    auto source = [&](std::size_t lane, std::size_t w) { return inputs.lanes(lane)[w]; };
    for (std::size_t w = 0; w < inputs.words(); ++w) {
        load_sources(bind, values, source, w);
        c.evaluate(values);
        for (std::size_t o = 0; o < n.outputs().size(); ++o) {
            out.lanes(o)[w] = values[n.outputs()[o]] & inputs.valid_mask(w);
        }
    }
    return out;
}

PatternBlock simulate_free(const Netlist& n, const PatternBlock& sources) {
    if (sources.signals() != n.inputs().size() + n.keys().size()) {
        throw std::invalid_argument("pattern block must cover inputs and key-inputs");
    }
    const CompiledNetlist c(n);
    PatternBlock out(n.outputs().size(), sources.patterns());
    std::vector<std::uint64_t> values(n.size(), 0);
    const std::size_t ni = n.inputs().size();
    for (std::size_t w = 0; w < sources.words(); ++w) {
        for (std::size_t i = 0; i < ni; ++i) values[n.inputs()[i]] = sources.lanes(i)[w];
        for (std::size_t i = 0; i < n.keys().size(); ++i) {
            values[n.keys()[i]] = sources.lanes(ni + i)[w];
        }
        c.evaluate(values);
        for (std::size_t o = 0; o < n.outputs().size(); ++o) {
            out.lanes(o)[w] = values[n.outputs()[o]] & sources.valid_mask(w);
        }
    }
    return out;
}

bool equivalence_exhaustive(const Netlist& a, const Netlist& b, std::span<const std::uint8_t> key_a,
                            std::span<const std::uint8_t> key_b) {
    check_same_inputs(a, b);
    if (a.inputs().size() > 24) {
        throw std::invalid_argument("exhaustive equivalence limited to 24 primary inputs");
    }
    if (key_b.size() != b.keys().size()) throw std::invalid_argument("key size mismatch");
    const Binding ba = fixed_key_binding(a, key_a);
    const Binding bb = matched_binding(b, input_names(a), key_b, false);
    const std::size_t patterns = std::size_t{1} << a.inputs().size();
    const std::size_t words = (patterns + 63) / 64;
    return count_mismatches(a, ba, b, bb, words, patterns, exhaustive_word, true) == 0;
}

std::size_t random_mismatches(const Netlist& a, const Netlist& b,
                              std::span<const std::uint8_t> key_a,
                              std::span<const std::uint8_t> key_b, std::size_t n_patterns,
                              std::uint64_t seed) {
    check_same_inputs(a, b);
    if (key_b.size() != b.keys().size()) throw std::invalid_argument("key size mismatch");
    const Binding ba = fixed_key_binding(a, key_a);
    const Binding bb = matched_binding(b, input_names(a), key_b, false);
    const PatternBlock block = random_patterns(a.inputs().size(), n_patterns, seed);
    auto source = [&](std::size_t lane, std::size_t w) { return block.lanes(lane)[w]; };
    return count_mismatches(a, ba, b, bb, block.words(), n_patterns, source, false);
}

std::size_t random_mismatches_free_keys(const Netlist& a, const Netlist& b, std::size_t n_patterns,
                                        std::uint64_t seed) {
    check_same_inputs(a, b);
    std::vector<std::string> layout = input_names(a);
    for (GateId k : a.keys()) layout.push_back(a.name(k));
    Binding ba;
    for (std::size_t i = 0; i < a.inputs().size(); ++i) ba.lanes.emplace_back(a.inputs()[i], i);
    for (std::size_t i = 0; i < a.keys().size(); ++i) {
        ba.lanes.emplace_back(a.keys()[i], a.inputs().size() + i);
    }
    const Binding bb = matched_binding(b, layout, {}, true);
    const PatternBlock block = random_patterns(layout.size(), n_patterns, seed);
    auto source = [&](std::size_t lane, std::size_t w) { return block.lanes(lane)[w]; };
    return count_mismatches(a, ba, b, bb, block.words(), n_patterns, source, false);
}

}  // namespace lockbench::simeval
