#include "assembler.hpp"

#include <algorithm>
#include <unordered_set>

namespace lockbench::netcore {

ParseError::ParseError(Kind kind, std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      kind_(kind),
      line_(line),
      column_(column) {}

namespace detail {

void NetlistAssembler::declare_input(const std::string& name, SourcePos pos) {
    Definition d{GateType::Input, {}, {}, pos, true};
    if (!defs_.emplace(name, std::move(d)).second) {
        throw ParseError(ParseError::Kind::DuplicateDefinition, pos.line, pos.column,
                         "signal '" + name + "' defined twice");
    }
    order_.push_back(name);
}

void NetlistAssembler::declare_output(const std::string& name, SourcePos pos) {
    for (const auto& [existing, p] : outputs_) {
        if (existing == name) {
            throw ParseError(ParseError::Kind::DuplicateDefinition, pos.line, pos.column,
                             "output '" + name + "' declared twice");
        }
    }
    outputs_.emplace_back(name, pos);
}

void NetlistAssembler::define_gate(const std::string& name, GateType type,
                                   std::vector<std::string> fanins, SourcePos pos,
                                   std::vector<SourcePos> fanin_pos) {
    const Arity a = arity(type);
    if (fanins.size() < a.min || fanins.size() > a.max) {
        throw ParseError(ParseError::Kind::Syntax, pos.line, pos.column,
                         "gate '" + name + "' of type " + std::string(to_string(type)) + " has " +
                             std::to_string(fanins.size()) + " inputs");
    }
    fanin_pos.resize(fanins.size(), pos);
    Definition d{type, std::move(fanins), std::move(fanin_pos), pos, false};
    if (!defs_.emplace(name, std::move(d)).second) {
        throw ParseError(ParseError::Kind::DuplicateDefinition, pos.line, pos.column,
                         "signal '" + name + "' defined twice");
    }
    order_.push_back(name);
}

Netlist NetlistAssembler::build() const {
    std::unordered_map<std::string, GateId> ids;
    std::vector<Gate> gates;
    std::vector<GateId> inputs;
    std::vector<GateId> keys;
    std::vector<GateId> outputs;
    gates.reserve(order_.size() + outputs_.size());

    // Inputs first (declaration order), then logic in definition order.
    for (const std::string& name : order_) {
        const Definition& d = defs_.at(name);
        if (!d.is_input) continue;
        const auto id = static_cast<GateId>(gates.size());
        ids.emplace(name, id);
        gates.push_back({GateType::Input, {}, name});
        (is_key_name(name) ? keys : inputs).push_back(id);
    }
    for (const std::string& name : order_) {
        const Definition& d = defs_.at(name);
        if (d.is_input) continue;
        ids.emplace(name, static_cast<GateId>(gates.size()));
        gates.push_back({d.type, {}, name});
    }
    for (const std::string& name : order_) {
        const Definition& d = defs_.at(name);
        if (d.is_input) continue;
        Gate& g = gates[ids.at(name)];
        g.fanins.reserve(d.fanins.size());
        for (std::size_t i = 0; i < d.fanins.size(); ++i) {
            auto it = ids.find(d.fanins[i]);
            if (it == ids.end()) {
                throw ParseError(ParseError::Kind::UndeclaredSignal, d.fanin_pos[i].line,
                                 d.fanin_pos[i].column,
                                 "undeclared signal '" + d.fanins[i] + "' used by '" + name + "'");
            }
            g.fanins.push_back(it->second);
        }
    }
    for (const auto& [name, pos] : outputs_) {
        auto it = ids.find(name);
        if (it == ids.end()) {
            throw ParseError(ParseError::Kind::UndeclaredSignal, pos.line, pos.column,
                             "output '" + name + "' is never driven");
        }
        outputs.push_back(static_cast<GateId>(gates.size()));
        gates.push_back({GateType::Output, {it->second}, name});
    }

    try {
        return Netlist(std::move(gates), std::move(inputs), std::move(outputs), std::move(keys),
                       module_name_);
    } catch (const ValidationError& e) {
        const auto kind = e.kind() == ValidationError::Kind::Cycle ? ParseError::Kind::Cycle
                                                                   : ParseError::Kind::Syntax;
        throw ParseError(kind, 0, 0, e.what());
    }
}

}  // namespace detail
}  // namespace lockbench::netcore
