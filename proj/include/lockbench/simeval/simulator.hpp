#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lockbench/netcore/netlist.hpp"
#include "lockbench/simeval/patterns.hpp"

namespace lockbench::simeval {

using netcore::GateId;
using netcore::GateType;
using netcore::Netlist;

/// Flattened evaluation schedule for one netlist. Holds a reference to the
/// netlist, which must outlive it.
class CompiledNetlist {
public:
    explicit CompiledNetlist(const Netlist& n);

    const Netlist& netlist() const noexcept { return *n_; }
    std::size_t size() const noexcept { return types_.size(); }

    /// Non-source gates (logic and OUTPUT markers) in topological order.
    std::span<const GateId> schedule() const noexcept { return schedule_; }
    /// Rank of a gate in the full topological order.
    std::uint32_t position(GateId g) const { return position_[g]; }

    std::uint64_t eval_gate(GateId g, const std::uint64_t* values) const noexcept;

    /// Evaluates gate g reading each fan-in value through `get(fanin)`.
    template <typename Get>
    std::uint64_t eval_with(GateId g, Get&& get) const noexcept {
        const GateId* f = fanin_ids_.data() + fanin_begin_[g];
        const std::uint32_t k = fanin_begin_[g + 1] - fanin_begin_[g];
        std::uint64_t v;
        switch (types_[g]) {
            case GateType::Const0: return 0;
            case GateType::Const1: return ~std::uint64_t{0};
            case GateType::Output:
            case GateType::Buf: return get(f[0]);
            case GateType::Not: return ~get(f[0]);
            case GateType::And:
            case GateType::Nand:
                v = get(f[0]);
                for (std::uint32_t i = 1; i < k; ++i) v &= get(f[i]);
                return types_[g] == GateType::And ? v : ~v;
            case GateType::Or:
            case GateType::Nor:
                v = get(f[0]);
                for (std::uint32_t i = 1; i < k; ++i) v |= get(f[i]);
                return types_[g] == GateType::Or ? v : ~v;
            case GateType::Xor:
            case GateType::Xnor:
                v = get(f[0]);
                for (std::uint32_t i = 1; i < k; ++i) v ^= get(f[i]);
                return types_[g] == GateType::Xor ? v : ~v;
            case GateType::Input: return get(g);
        }
        return 0;
    }

    /// One 64-pattern word over every gate. Source values must already be set.
    void evaluate(std::span<std::uint64_t> values) const noexcept;
    /// Same, restricted to `gates` (topologically ordered, sources excluded).
    void evaluate(std::span<std::uint64_t> values, std::span<const GateId> gates) const noexcept;

    std::span<const GateId> fanins(GateId g) const noexcept {
        return {fanin_ids_.data() + fanin_begin_[g], fanin_begin_[g + 1] - fanin_begin_[g]};
    }
    std::span<const GateId> fanouts(GateId g) const noexcept { return n_->fanouts(g); }
    GateType type(GateId g) const noexcept { return types_[g]; }
    /// Gate at a topological rank.
    GateId at_position(std::uint32_t p) const noexcept { return order_[p]; }

private:
    const Netlist* n_;
    std::vector<GateType> types_;
    std::vector<std::uint32_t> fanin_begin_;
    std::vector<GateId> fanin_ids_;
    std::vector<GateId> schedule_;
    std::vector<std::uint32_t> position_;
    std::vector<GateId> order_;
};

/// Primary-output values for `inputs` (one signal per n.inputs(), in order)
/// under a fixed key (one bit per n.keys(), in order).
/// Throws std::invalid_argument on a missing input or key assignment.
PatternBlock simulate(const Netlist& n, const PatternBlock& inputs,
                      std::span<const std::uint8_t> key);

/// Outputs when the keys are driven from the pattern block as well: signals
/// are n.inputs() followed by n.keys().
PatternBlock simulate_free(const Netlist& n, const PatternBlock& sources);

/// Exhaustive comparison over all primary-input assignments (keys fixed).
/// Inputs and outputs are matched by name. Throws std::invalid_argument on a
/// port mismatch or more than 24 primary inputs.
bool equivalence_exhaustive(const Netlist& a, const Netlist& b, std::span<const std::uint8_t> key_a,
                            std::span<const std::uint8_t> key_b);

/// Number of random patterns on which any output differs (keys fixed).
std::size_t random_mismatches(const Netlist& a, const Netlist& b,
                              std::span<const std::uint8_t> key_a,
                              std::span<const std::uint8_t> key_b, std::size_t n_patterns,
                              std::uint64_t seed);

/// Same with every key-input left free: the key-inputs of `a` are driven
/// randomly and matched by name in `b`; keys of `b` absent from `a` are 0.
std::size_t random_mismatches_free_keys(const Netlist& a, const Netlist& b, std::size_t n_patterns,
                                        std::uint64_t seed);

}  // namespace lockbench::simeval
