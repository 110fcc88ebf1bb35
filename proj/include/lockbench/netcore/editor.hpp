#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lockbench/netcore/netlist.hpp"

namespace lockbench::netcore {

/// Mutable working copy of a netlist used by the transformation passes.
///
/// Gate ids are stable while editing; removed gates are marked dead and
/// dropped by freeze(), which keeps the relative order of the survivors.
/// OUTPUT markers keep their port name for the whole session; freeze()
/// renames drivers (or adds a BUF) so that every port is driven by a gate of
/// the same name again.
class NetlistEditor {
public:
    explicit NetlistEditor(const Netlist& n);

    std::size_t size() const noexcept { return gates_.size(); }
    bool alive(GateId g) const { return alive_[g]; }
    const Gate& gate(GateId g) const { return gates_[g]; }
    GateType type(GateId g) const { return gates_[g].type; }
    std::span<const GateId> fanins(GateId g) const { return gates_[g].fanins; }
    std::span<const GateId> fanouts(GateId g) const { return fanouts_[g]; }
    const std::string& name(GateId g) const { return gates_[g].name; }

    const std::vector<GateId>& inputs() const noexcept { return inputs_; }
    const std::vector<GateId>& keys() const noexcept { return keys_; }
    const std::vector<GateId>& outputs() const noexcept { return outputs_; }
    bool is_key(GateId g) const;
    bool is_primary_input(GateId g) const;
    bool drives_output(GateId g) const;

    std::optional<GateId> find(std::string_view name) const;

    /// Returns `base` if unused, otherwise `base_<n>` for the first free n.
    std::string fresh_name(std::string_view base);

    /// Adds a logic gate. An empty name gets a generated one.
    GateId add_gate(GateType type, std::vector<GateId> fanins, std::string name = {});
    GateId add_key_input(const std::string& name);
    /// Shared CONST0/CONST1 gate, created on demand.
    GateId constant(bool value);

    void set_type(GateId g, GateType t) { gates_[g].type = t; }
    void set_fanins(GateId g, std::vector<GateId> fanins);
    void replace_fanin(GateId g, GateId from, GateId to);
    /// Re-points every consumer of `from` (OUTPUT markers included) to `to`.
    void replace_uses(GateId from, GateId to);
    void rename(GateId g, const std::string& name);

    /// Removes an INPUT gate from the port lists after its uses are gone.
    void remove_input(GateId g);

    /// Kills a logic gate with no consumers and, transitively, fan-ins that
    /// become unused. INPUT gates are never removed here.
    void remove_if_dead(GateId g);
    /// Sweeps every dead logic gate.
    void remove_all_dead();

    /// Live gates in topological order (gate-id tie-break).
    std::vector<GateId> topo_order() const;

    Netlist freeze() const;

private:
    void add_fanout(GateId driver, GateId consumer);
    void drop_fanout(GateId driver, GateId consumer);

    std::vector<Gate> gates_;
    std::vector<std::vector<GateId>> fanouts_;
    std::vector<bool> alive_;
    std::vector<GateId> inputs_;
    std::vector<GateId> outputs_;
    std::vector<GateId> keys_;
    std::string module_name_;
    std::unordered_map<std::string, GateId> by_name_;
    GateId const0_ = kNoGate;
    GateId const1_ = kNoGate;
    std::size_t name_counter_ = 0;
};

}  // namespace lockbench::netcore
