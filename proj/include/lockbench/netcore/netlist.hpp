#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lockbench/netcore/gate_type.hpp"

namespace lockbench::netcore {

using GateId = std::uint32_t;

inline constexpr GateId kNoGate = static_cast<GateId>(-1);

struct Gate {
    GateType type = GateType::Buf;
    std::vector<GateId> fanins;
    /// Signal name. OUTPUT markers carry the port name, which always equals
    /// the name of the gate driving them.
    std::string name;
};

/// Structural defects found while validating a netlist.
class ValidationError : public std::runtime_error {
public:
    enum class Kind { Cycle, DanglingFanin, Arity, DuplicateName, BadPort };

    ValidationError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Immutable, validated combinational netlist.
///
/// Primary inputs and key-inputs are both INPUT gates; the roles are kept in
/// separate ordered lists. Every primary output is an OUTPUT marker gate with
/// exactly one fan-in. Fan-out lists are derived at construction and include
/// the OUTPUT markers.
class Netlist {
public:
    Netlist() = default;

    /// Validates and takes ownership. Throws ValidationError.
    Netlist(std::vector<Gate> gates, std::vector<GateId> inputs, std::vector<GateId> outputs,
            std::vector<GateId> keys, std::string module_name = "top");

    std::size_t size() const noexcept { return gates_.size(); }
    const Gate& gate(GateId id) const { return gates_.at(id); }
    GateType type(GateId id) const { return gates_[id].type; }
    const std::string& name(GateId id) const { return gates_[id].name; }
    std::span<const GateId> fanins(GateId id) const { return gates_[id].fanins; }
    /// Distinct consumers, in ascending id order.
    std::span<const GateId> fanouts(GateId id) const { return fanouts_[id]; }
    const std::vector<Gate>& gates() const noexcept { return gates_; }

    const std::vector<GateId>& inputs() const noexcept { return inputs_; }
    const std::vector<GateId>& outputs() const noexcept { return outputs_; }
    const std::vector<GateId>& keys() const noexcept { return keys_; }
    const std::string& module_name() const noexcept { return module_name_; }

    bool is_key(GateId id) const { return role_[id] == Role::Key; }
    bool is_primary_input(GateId id) const { return role_[id] == Role::Input; }

    /// Driver of the i-th primary output.
    GateId output_driver(std::size_t i) const { return gates_[outputs_[i]].fanins[0]; }
    const std::string& output_name(std::size_t i) const { return gates_[outputs_[i]].name; }

    /// Looks up a signal (non-OUTPUT gate) by name.
    std::optional<GateId> find(std::string_view name) const;

    /// Position of a key-input within keys(), if the gate is one.
    std::optional<std::size_t> key_index(GateId id) const;

    /// Number of gates that are neither INPUT nor OUTPUT markers.
    std::size_t logic_gate_count() const;

    /// Cached result of topological_order().
    const std::vector<GateId>& topo_order() const noexcept { return topo_; }

private:
    enum class Role : std::uint8_t { None, Input, Key, Output };

    void validate_and_index();

    std::vector<Gate> gates_;
    std::vector<GateId> inputs_;
    std::vector<GateId> outputs_;
    std::vector<GateId> keys_;
    std::string module_name_ = "top";
    std::vector<std::vector<GateId>> fanouts_;
    std::vector<Role> role_;
    std::unordered_map<std::string, GateId> by_name_;
    std::vector<GateId> topo_;
};

/// Gate-id order in which every gate follows all of its fan-ins; ties broken
/// by the smaller id. Throws ValidationError(Cycle) on a cyclic graph.
std::vector<GateId> topological_order(const Netlist& n);

/// Same ordering rule over a raw gate list (used by validation and editors).
std::vector<GateId> topological_order(std::span<const Gate> gates,
                                      std::span<const std::vector<GateId>> fanouts,
                                      std::span<const bool> alive = {});

/// True when both netlists have the same ports and the same named gates with
/// the same types and fan-in names (ids may differ).
bool structurally_equal(const Netlist& a, const Netlist& b);

/// Key names follow the `k<digits>` or `keyinput<digits>` convention.
bool is_key_name(std::string_view name);

}  // namespace lockbench::netcore
