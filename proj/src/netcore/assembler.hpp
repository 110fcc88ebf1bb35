#pragma once

// Shared back end of the BENCH and Verilog readers: collects declarations by
// name and resolves them into a validated Netlist.

#include <string>
#include <unordered_map>
#include <vector>

#include "lockbench/netcore/io.hpp"
#include "lockbench/netcore/netlist.hpp"

namespace lockbench::netcore::detail {

struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;
};

class NetlistAssembler {
public:
    void set_module_name(std::string name) { module_name_ = std::move(name); }

    void declare_input(const std::string& name, SourcePos pos);
    void declare_output(const std::string& name, SourcePos pos);
    void define_gate(const std::string& name, GateType type, std::vector<std::string> fanins,
                     SourcePos pos, std::vector<SourcePos> fanin_pos = {});

    Netlist build() const;

private:
    struct Definition {
        GateType type;
        std::vector<std::string> fanins;
        std::vector<SourcePos> fanin_pos;
        SourcePos pos;
        bool is_input = false;
    };

    std::string module_name_ = "top";
    std::vector<std::string> order_;  // definition order, inputs included
    std::unordered_map<std::string, Definition> defs_;
    std::vector<std::pair<std::string, SourcePos>> outputs_;
};

}  // namespace lockbench::netcore::detail
