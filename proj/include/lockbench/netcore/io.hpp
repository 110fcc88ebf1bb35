#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lockbench/netcore/netlist.hpp"

namespace lockbench::netcore {

class ParseError : public std::runtime_error {
public:
    enum class Kind { Syntax, UndeclaredSignal, DuplicateDefinition, Cycle, Unsupported };

    ParseError(Kind kind, std::size_t line, std::size_t column, const std::string& message);

    Kind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    Kind kind_;
    std::size_t line_;
    std::size_t column_;
};

enum class NetlistFormat { Bench, Verilog };

/// ISCAS BENCH: INPUT(x), OUTPUT(y), y = GATE(a, b, ...), '#' comments.
Netlist parse_bench(std::string_view text);

/// Single-module gate-level Verilog: input/output/wire declarations,
/// primitive instances (output port first) and `assign y = a | ~a | 1'b0 | 1'b1`.
Netlist parse_structural_verilog(std::string_view text);

std::string write_netlist(const Netlist& n, NetlistFormat format);

/// Picks the format from the extension (.v -> Verilog, otherwise BENCH).
NetlistFormat format_for_path(std::string_view path);
Netlist read_netlist_file(const std::string& path);
void write_netlist_file(const std::string& path, const Netlist& n);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace lockbench::netcore
