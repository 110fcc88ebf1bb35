#include "lockbench/netcore/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <queue>

namespace lockbench::netcore {

std::string_view to_string(GateType t) noexcept {
    switch (t) {
        case GateType::Input: return "INPUT";
        case GateType::Output: return "OUTPUT";
        case GateType::And: return "AND";
        case GateType::Nand: return "NAND";
        case GateType::Or: return "OR";
        case GateType::Nor: return "NOR";
        case GateType::Xor: return "XOR";
        case GateType::Xnor: return "XNOR";
        case GateType::Not: return "NOT";
        case GateType::Buf: return "BUF";
        case GateType::Const0: return "CONST0";
        case GateType::Const1: return "CONST1";
    }
    return "?";
}

std::optional<GateType> gate_type_from_keyword(std::string_view keyword) {
    std::string up(keyword);
    std::transform(up.begin(), up.end(), up.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (up == "AND") return GateType::And;
    if (up == "NAND") return GateType::Nand;
    if (up == "OR") return GateType::Or;
    if (up == "NOR") return GateType::Nor;
    if (up == "XOR") return GateType::Xor;
    if (up == "XNOR") return GateType::Xnor;
    if (up == "NOT" || up == "INV") return GateType::Not;
    if (up == "BUF" || up == "BUFF") return GateType::Buf;
    if (up == "CONST0" || up == "GND") return GateType::Const0;
    if (up == "CONST1" || up == "VDD") return GateType::Const1;
    return std::nullopt;
}

bool is_key_name(std::string_view name) {
    auto digits_after = [&](std::string_view prefix) {
        if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) return false;
        return std::all_of(name.begin() + static_cast<std::ptrdiff_t>(prefix.size()), name.end(),
                           [](unsigned char c) { return std::isdigit(c) != 0; });
    };
    return digits_after("k") || digits_after("keyinput");
}

Netlist::Netlist(std::vector<Gate> gates, std::vector<GateId> inputs, std::vector<GateId> outputs,
                 std::vector<GateId> keys, std::string module_name)
    : gates_(std::move(gates)),
      inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      keys_(std::move(keys)),
      module_name_(std::move(module_name)) {
    validate_and_index();
}

void Netlist::validate_and_index() {
    const auto n = static_cast<GateId>(gates_.size());
    fanouts_.assign(n, {});
    role_.assign(n, Role::None);

    auto assign_role = [&](const std::vector<GateId>& ids, Role r, GateType expected,
                           const char* what) {
        for (GateId id : ids) {
            if (id >= n) {
                throw ValidationError(ValidationError::Kind::BadPort,
                                      std::string(what) + " id out of range");
            }
            if (gates_[id].type != expected) {
                throw ValidationError(ValidationError::Kind::BadPort,
                                      std::string(what) + " '" + gates_[id].name +
                                          "' has the wrong gate type");
            }
            if (role_[id] != Role::None) {
                throw ValidationError(ValidationError::Kind::BadPort,
                                      "gate '" + gates_[id].name + "' listed twice as a port");
            }
            role_[id] = r;
        }
    };
    assign_role(inputs_, Role::Input, GateType::Input, "primary input");
    assign_role(keys_, Role::Key, GateType::Input, "key-input");
    assign_role(outputs_, Role::Output, GateType::Output, "primary output");

    for (GateId id = 0; id < n; ++id) {
        const Gate& g = gates_[id];
        if ((g.type == GateType::Input || g.type == GateType::Output) && role_[id] == Role::None) {
            throw ValidationError(ValidationError::Kind::BadPort,
                                  "port gate '" + g.name + "' is not listed as a port");
        }
        const Arity a = arity(g.type);
        if (g.fanins.size() < a.min || g.fanins.size() > a.max) {
            throw ValidationError(ValidationError::Kind::Arity,
                                  "gate '" + g.name + "' of type " + std::string(to_string(g.type)) +
                                      " has " + std::to_string(g.fanins.size()) + " fan-ins");
        }
        for (GateId f : g.fanins) {
            if (f >= n) {
                throw ValidationError(ValidationError::Kind::DanglingFanin,
                                      "gate '" + g.name + "' references a missing gate");
            }
            if (gates_[f].type == GateType::Output) {
                throw ValidationError(ValidationError::Kind::DanglingFanin,
                                      "gate '" + g.name + "' reads from an OUTPUT marker");
            }
            if (fanouts_[f].empty() || fanouts_[f].back() != id) fanouts_[f].push_back(id);
        }
        if (g.type == GateType::Output) continue;
        if (g.name.empty()) {
            throw ValidationError(ValidationError::Kind::DuplicateName, "unnamed signal gate");
        }
        if (!by_name_.emplace(g.name, id).second) {
            throw ValidationError(ValidationError::Kind::DuplicateName,
                                  "duplicate signal name '" + g.name + "'");
        }
    }

    std::unordered_map<std::string_view, bool> port_seen;
    for (GateId o : outputs_) {
        const Gate& g = gates_[o];
        const Gate& driver = gates_[g.fanins[0]];
        if (g.name != driver.name) {
            throw ValidationError(ValidationError::Kind::BadPort,
                                  "output port '" + g.name + "' is driven by '" + driver.name + "'");
        }
        if (!port_seen.emplace(g.name, true).second) {
            throw ValidationError(ValidationError::Kind::DuplicateName,
                                  "output port '" + g.name + "' declared twice");
        }
    }

    // Throws on a cycle.
    topo_ = topological_order(gates_, fanouts_);
}

std::optional<GateId> Netlist::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Netlist::key_index(GateId id) const {
    if (!is_key(id)) return std::nullopt;
    auto it = std::find(keys_.begin(), keys_.end(), id);
    return static_cast<std::size_t>(it - keys_.begin());
}

std::size_t Netlist::logic_gate_count() const {
    return static_cast<std::size_t>(std::count_if(
        gates_.begin(), gates_.end(), [](const Gate& g) { return is_logic(g.type); }));
}

std::vector<GateId> topological_order(std::span<const Gate> gates,
                                      std::span<const std::vector<GateId>> fanouts,
                                      std::span<const bool> alive) {
    const auto n = static_cast<GateId>(gates.size());
    auto is_alive = [&](GateId g) { return alive.empty() || alive[g]; };
    std::vector<std::uint32_t> pending(n, 0);
    std::priority_queue<GateId, std::vector<GateId>, std::greater<>> ready;
    std::size_t live = 0;
    for (GateId g = 0; g < n; ++g) {
        if (!is_alive(g)) continue;
        ++live;
        // Fan-out lists hold each consumer once, so count distinct fan-ins.
        const auto& fi = gates[g].fanins;
        std::uint32_t distinct = 0;
        for (std::size_t i = 0; i < fi.size(); ++i) {
            if (std::find(fi.begin(), fi.begin() + static_cast<std::ptrdiff_t>(i), fi[i]) ==
                fi.begin() + static_cast<std::ptrdiff_t>(i)) {
                ++distinct;
            }
        }
        pending[g] = distinct;
        if (pending[g] == 0) ready.push(g);
    }
    std::vector<GateId> order;
    order.reserve(live);
    while (!ready.empty()) {
        const GateId g = ready.top();
        ready.pop();
        order.push_back(g);
        for (GateId c : fanouts[g]) {
            if (!is_alive(c)) continue;
            if (--pending[c] == 0) ready.push(c);
        }
    }
    if (order.size() != live) {
        throw ValidationError(ValidationError::Kind::Cycle, "netlist contains a combinational cycle");
    }
    return order;
}

std::vector<GateId> topological_order(const Netlist& n) { return n.topo_order(); }

bool structurally_equal(const Netlist& a, const Netlist& b) {
    auto port_names = [](const Netlist& n, const std::vector<GateId>& ids) {
        std::vector<std::string> names;
        for (GateId id : ids) names.push_back(n.name(id));
        return names;
    };
    if (port_names(a, a.inputs()) != port_names(b, b.inputs())) return false;
    if (port_names(a, a.keys()) != port_names(b, b.keys())) return false;
    if (port_names(a, a.outputs()) != port_names(b, b.outputs())) return false;
    if (a.size() != b.size()) return false;
    for (GateId g = 0; g < a.size(); ++g) {
        const Gate& ga = a.gate(g);
        if (ga.type == GateType::Output) continue;
        auto other = b.find(ga.name);
        if (!other) return false;
        const Gate& gb = b.gate(*other);
        if (ga.type != gb.type || ga.fanins.size() != gb.fanins.size()) return false;
        for (std::size_t i = 0; i < ga.fanins.size(); ++i) {
            if (a.name(ga.fanins[i]) != b.name(gb.fanins[i])) return false;
        }
    }
    return true;
}

}  // namespace lockbench::netcore
