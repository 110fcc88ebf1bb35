#include "lockbench/netcore/editor.hpp"

#include <algorithm>
#include <utility>
#include <memory>
#include <stdexcept>

namespace lockbench::netcore {

NetlistEditor::NetlistEditor(const Netlist& n)
    : gates_(n.gates()),
      fanouts_(n.size()),
      alive_(n.size(), true),
      inputs_(n.inputs()),
      outputs_(n.outputs()),
      keys_(n.keys()),
      module_name_(n.module_name()) {
    for (GateId g = 0; g < gates_.size(); ++g) {
        auto fo = n.fanouts(g);
        fanouts_[g].assign(fo.begin(), fo.end());
        const Gate& gate = gates_[g];
        if (gate.type == GateType::Output) continue;
        by_name_.emplace(gate.name, g);
        if (gate.type == GateType::Const0 && const0_ == kNoGate) const0_ = g;
        if (gate.type == GateType::Const1 && const1_ == kNoGate) const1_ = g;
    }
}

bool NetlistEditor::is_key(GateId g) const {
    return gates_[g].type == GateType::Input &&
           std::find(keys_.begin(), keys_.end(), g) != keys_.end();
}

bool NetlistEditor::is_primary_input(GateId g) const {
    return gates_[g].type == GateType::Input &&
           std::find(inputs_.begin(), inputs_.end(), g) != inputs_.end();
}

bool NetlistEditor::drives_output(GateId g) const {
    return std::any_of(fanouts_[g].begin(), fanouts_[g].end(),
                       [&](GateId c) { return gates_[c].type == GateType::Output; });
}

std::optional<GateId> NetlistEditor::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

std::string NetlistEditor::fresh_name(std::string_view base) {
    std::string candidate(base);
    if (!candidate.empty() && by_name_.count(candidate) == 0) return candidate;
    for (;;) {
        candidate = std::string(base) + "_" + std::to_string(++name_counter_);
        if (by_name_.count(candidate) == 0) return candidate;
    }
}

GateId NetlistEditor::add_gate(GateType type, std::vector<GateId> fanins, std::string name) {
    if (type == GateType::Input || type == GateType::Output) {
        throw std::invalid_argument("add_gate cannot create port gates");
    }
    const Arity a = arity(type);
    if (fanins.size() < a.min || fanins.size() > a.max) {
        throw std::invalid_argument("add_gate: arity violation for " + std::string(to_string(type)));
    }
    if (name.empty()) {
        name = fresh_name("n" + std::to_string(gates_.size()));
    } else if (by_name_.count(name) != 0) {
        throw std::invalid_argument("signal name '" + name + "' already in use");
    }
    const auto id = static_cast<GateId>(gates_.size());
    for (GateId f : fanins) {
        if (f >= gates_.size() || !alive_[f] || gates_[f].type == GateType::Output) {
            throw std::invalid_argument("add_gate: invalid fan-in");
        }
    }
    gates_.push_back({type, fanins, name});
    fanouts_.emplace_back();
    alive_.push_back(true);
    by_name_.emplace(std::move(name), id);
    for (GateId f : fanins) add_fanout(f, id);
    return id;
}

GateId NetlistEditor::add_key_input(const std::string& name) {
    if (name.empty() || by_name_.count(name) != 0) {
        throw std::invalid_argument("key-input name '" + name + "' already in use");
    }
    const auto id = static_cast<GateId>(gates_.size());
    gates_.push_back({GateType::Input, {}, name});
    fanouts_.emplace_back();
    alive_.push_back(true);
    by_name_.emplace(name, id);
    keys_.push_back(id);
    return id;
}

GateId NetlistEditor::constant(bool value) {
    GateId& slot = value ? const1_ : const0_;
    if (slot != kNoGate && alive_[slot]) return slot;
    slot = add_gate(value ? GateType::Const1 : GateType::Const0, {},
                    fresh_name(value ? "const1" : "const0"));
    return slot;
}

void NetlistEditor::set_fanins(GateId g, std::vector<GateId> fanins) {
    const std::vector<GateId> old = std::exchange(gates_[g].fanins, std::move(fanins));
    for (GateId f : old) drop_fanout(f, g);
    for (GateId f : gates_[g].fanins) add_fanout(f, g);
}

void NetlistEditor::replace_fanin(GateId g, GateId from, GateId to) {
    bool changed = false;
    for (GateId& f : gates_[g].fanins) {
        if (f == from) {
            f = to;
            changed = true;
        }
    }
    if (!changed) return;
    drop_fanout(from, g);
    for (GateId f : gates_[g].fanins) {
        if (f == to) add_fanout(to, g);
    }
}

void NetlistEditor::replace_uses(GateId from, GateId to) {
    const std::vector<GateId> consumers = fanouts_[from];
    for (GateId c : consumers) {
        if (c == to) continue;
        replace_fanin(c, from, to);
    }
}

void NetlistEditor::rename(GateId g, const std::string& name) {
    if (gates_[g].name == name) return;
    if (by_name_.count(name) != 0) {
        throw std::invalid_argument("signal name '" + name + "' already in use");
    }
    by_name_.erase(gates_[g].name);
    gates_[g].name = name;
    by_name_.emplace(name, g);
}

void NetlistEditor::remove_input(GateId g) {
    if (gates_[g].type != GateType::Input) throw std::invalid_argument("not an input gate");
    if (!fanouts_[g].empty()) throw std::invalid_argument("input still has consumers");
    std::erase(inputs_, g);
    std::erase(keys_, g);
    alive_[g] = false;
    by_name_.erase(gates_[g].name);
}

void NetlistEditor::remove_if_dead(GateId g) {
    std::vector<GateId> work{g};
    while (!work.empty()) {
        const GateId cur = work.back();
        work.pop_back();
        if (!alive_[cur] || !is_logic(gates_[cur].type) || !fanouts_[cur].empty()) continue;
        alive_[cur] = false;
        by_name_.erase(gates_[cur].name);
        const std::vector<GateId> fanins = std::move(gates_[cur].fanins);
        gates_[cur].fanins.clear();
        for (GateId f : fanins) {
            drop_fanout(f, cur);
            work.push_back(f);
        }
    }
}

void NetlistEditor::remove_all_dead() {
    for (GateId g = static_cast<GateId>(gates_.size()); g-- > 0;) remove_if_dead(g);
}

void NetlistEditor::add_fanout(GateId driver, GateId consumer) {
    auto& fo = fanouts_[driver];
    if (std::find(fo.begin(), fo.end(), consumer) == fo.end()) fo.push_back(consumer);
}

void NetlistEditor::drop_fanout(GateId driver, GateId consumer) {
    const auto& fanins = gates_[consumer].fanins;
    if (std::find(fanins.begin(), fanins.end(), driver) != fanins.end()) return;
    std::erase(fanouts_[driver], consumer);
}

std::vector<GateId> NetlistEditor::topo_order() const {
    // vector<bool> has no contiguous storage to hand out as a span.
    std::unique_ptr<bool[]> flags(new bool[alive_.size()]);
    for (std::size_t i = 0; i < alive_.size(); ++i) flags[i] = alive_[i];
    return topological_order(gates_, fanouts_, std::span<const bool>(flags.get(), alive_.size()));
}

Netlist NetlistEditor::freeze() const {
    std::vector<Gate> gates = gates_;
    std::vector<bool> alive = alive_;
    std::unordered_map<std::string, GateId> names = by_name_;
    std::size_t counter = name_counter_;

    auto fresh = [&](const std::string& base) {
        for (;;) {
            std::string candidate = base + "_" + std::to_string(++counter);
            if (names.count(candidate) == 0) return candidate;
        }
    };
    auto set_name = [&](GateId g, const std::string& name) {
        names.erase(gates[g].name);
        gates[g].name = name;
        names[name] = g;
    };
    auto owns_port = [&](GateId d) {
        for (GateId o : outputs_) {
            if (gates[o].fanins[0] == d && gates[o].name == gates[d].name) return true;
        }
        return false;
    };

    for (GateId o : outputs_) {
        const std::string port = gates[o].name;
        const GateId d = gates[o].fanins[0];
        if (gates[d].name == port) continue;
        if (auto it = names.find(port); it != names.end() && it->second != d) {
            const GateId other = it->second;
            if (gates[other].type == GateType::Input) {
                throw std::logic_error("output port '" + port + "' collides with an input");
            }
            set_name(other, fresh(port));
        }
        if (gates[d].type != GateType::Input && !owns_port(d)) {
            set_name(d, port);
            continue;
        }
        const auto id = static_cast<GateId>(gates.size());
        if (is_constant(gates[d].type)) {
            gates.push_back({gates[d].type, {}, port});
        } else {
            gates.push_back({GateType::Buf, {d}, port});
        }
        alive.push_back(true);
        names[port] = id;
        gates[o].fanins[0] = id;
    }

    std::vector<GateId> remap(gates.size(), kNoGate);
    std::vector<Gate> out;
    out.reserve(gates.size());
    for (GateId g = 0; g < gates.size(); ++g) {
        if (!alive[g]) continue;
        remap[g] = static_cast<GateId>(out.size());
        out.push_back(gates[g]);
    }
    for (Gate& g : out) {
        for (GateId& f : g.fanins) {
            f = remap[f];
            if (f == kNoGate) throw std::logic_error("live gate reads a removed gate");
        }
    }
    auto remap_list = [&](const std::vector<GateId>& ids) {
        std::vector<GateId> r;
        r.reserve(ids.size());
        for (GateId g : ids) {
            if (alive[g]) r.push_back(remap[g]);
        }
        return r;
    };
    return Netlist(std::move(out), remap_list(inputs_), remap_list(outputs_), remap_list(keys_),
                   module_name_);
}

}  // namespace lockbench::netcore
