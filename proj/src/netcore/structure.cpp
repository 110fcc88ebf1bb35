#include "lockbench/netcore/structure.hpp"

#include <algorithm>
#include <stdexcept>

#include "lockbench/util/rng.hpp"

namespace lockbench::netcore {
namespace {

template <typename Graph>
std::vector<GateId> expand(const Graph& g, GateId seed, std::size_t size) {
    if (size == 0) throw std::invalid_argument("neighborhood size must be at least 1");
    if (seed >= g.size() || !g.alive(seed)) {
        throw std::out_of_range("neighborhood seed " + std::to_string(seed) + " does not exist");
    }
    std::vector<GateId> order{seed};
    std::vector<bool> visited(g.size(), false);
    visited[seed] = true;
    std::vector<GateId> pending_out{seed};
    std::vector<GateId> pending_in{seed};
    std::vector<GateId> scratch;
    std::vector<GateId> neighbours;
    bool outward = true;

    while (order.size() < size && !(pending_out.empty() && pending_in.empty())) {
        scratch.clear();
        std::swap(scratch, outward ? pending_out : pending_in);
        for (auto it = scratch.rbegin(); it != scratch.rend(); ++it) {
            auto adj = outward ? g.fanouts(*it) : g.fanins(*it);
            neighbours.assign(adj.begin(), adj.end());
            std::sort(neighbours.begin(), neighbours.end());
            for (GateId nb : neighbours) {
                if (visited[nb] || !g.alive(nb)) continue;
                if (g.type(nb) == GateType::Output || g.is_key(nb)) continue;
                visited[nb] = true;
                order.push_back(nb);
                pending_out.push_back(nb);
                pending_in.push_back(nb);
                if (order.size() == size) return order;
            }
        }
        outward = !outward;
    }
    return order;
}

// Gives Netlist the same query surface as the editor.
struct FrozenView {
    const Netlist& n;
    std::size_t size() const { return n.size(); }
    bool alive(GateId) const { return true; }
    GateType type(GateId g) const { return n.type(g); }
    bool is_key(GateId g) const { return n.is_key(g); }
    std::span<const GateId> fanins(GateId g) const { return n.fanins(g); }
    std::span<const GateId> fanouts(GateId g) const { return n.fanouts(g); }
};

}  // namespace

std::vector<GateId> neighborhood(const Netlist& n, GateId seed, std::size_t size) {
    return expand(FrozenView{n}, seed, size);
}

std::vector<GateId> neighborhood(const NetlistEditor& e, GateId seed, std::size_t size) {
    return expand(e, seed, size);
}

Netlist random_netlist(const RandomNetlistSpec& shape) {
    if (shape.inputs == 0 || shape.gates == 0 || shape.outputs == 0 || shape.max_fanin < 2) {
        throw std::invalid_argument("random_netlist needs inputs, gates, outputs and max_fanin >= 2");
    }
    static constexpr GateType kPool[] = {
        GateType::And, GateType::Nand, GateType::Or,  GateType::Nor, GateType::Xor,
        GateType::Xnor, GateType::Not, GateType::And, GateType::Or,  GateType::Nand,
        GateType::Nor, GateType::Not,  GateType::Buf};
    Rng rng(shape.seed);
    std::vector<Gate> gates;
    std::vector<GateId> inputs;
    for (std::size_t i = 0; i < shape.inputs; ++i) {
        inputs.push_back(static_cast<GateId>(gates.size()));
        gates.push_back({GateType::Input, {}, "i" + std::to_string(i)});
    }
    std::vector<GateId> unconsumed;
    std::vector<bool> consumed(shape.inputs + shape.gates, false);
    for (std::size_t i = 0; i < shape.gates; ++i) {
        const auto id = static_cast<GateId>(gates.size());
        GateType t = kPool[rng.uniform(std::size(kPool))];
        const std::size_t available = gates.size();
        std::size_t want = 1;
        if (arity(t).min >= 2) {
            if (available < 2) {
                t = GateType::Not;
            } else {
                want = 2 + rng.uniform(std::min(shape.max_fanin, available) - 1);
            }
        }
        std::vector<GateId> fanins;
        if (unconsumed.size() >= shape.outputs) {
            const std::size_t pick = rng.uniform(unconsumed.size());
            fanins.push_back(unconsumed[pick]);
            unconsumed.erase(unconsumed.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        while (fanins.size() < want) {
            const auto f = static_cast<GateId>(rng.uniform(available));
            if (std::find(fanins.begin(), fanins.end(), f) == fanins.end()) fanins.push_back(f);
        }
        for (GateId f : fanins) {
            if (!consumed[f] && f >= shape.inputs) std::erase(unconsumed, f);
            consumed[f] = true;
        }
        gates.push_back({t, std::move(fanins), "g" + std::to_string(i)});
        unconsumed.push_back(id);
    }

    std::vector<GateId> drivers = unconsumed;
    while (drivers.size() < shape.outputs && drivers.size() < shape.gates) {
        const auto d = static_cast<GateId>(shape.inputs + rng.uniform(shape.gates));
        if (std::find(drivers.begin(), drivers.end(), d) == drivers.end()) drivers.push_back(d);
    }
    std::sort(drivers.begin(), drivers.end());
    std::vector<GateId> outputs;
    for (GateId d : drivers) {
        outputs.push_back(static_cast<GateId>(gates.size()));
        gates.push_back({GateType::Output, {d}, gates[d].name});
    }
    return Netlist(std::move(gates), std::move(inputs), std::move(outputs), {}, "rand");
}

}  // namespace lockbench::netcore
