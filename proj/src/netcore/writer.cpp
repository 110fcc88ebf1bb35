#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "lockbench/netcore/io.hpp"

namespace lockbench::netcore {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_plain_identifier(std::string_view s) {
    static const std::unordered_set<std::string> kReserved = {
        "module", "endmodule", "input",  "output", "wire", "assign", "and",  "nand",
        "or",     "nor",       "xor",    "xnor",   "not",  "buf",    "reg",  "always",
        "initial", "begin",    "end",    "inout",  "supply0", "supply1"};
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$')) return false;
    }
    return kReserved.count(std::string(s)) == 0;
}

std::string verilog_name(std::string_view s) {
    if (is_plain_identifier(s)) return std::string(s);
    return "\\" + std::string(s) + " ";
}

std::string write_bench(const Netlist& n) {
    std::ostringstream out;
    out << "# " << n.module_name() << '\n';
    for (GateId g : n.inputs()) out << "INPUT(" << n.name(g) << ")\n";
    for (GateId g : n.keys()) out << "INPUT(" << n.name(g) << ")\n";
    for (GateId g : n.outputs()) out << "OUTPUT(" << n.name(g) << ")\n";
    for (GateId g : topological_order(n)) {
        const GateType t = n.type(g);
        if (!is_logic(t)) continue;
        out << n.name(g) << " = " << to_string(t) << '(';
        bool first = true;
        for (GateId f : n.fanins(g)) {
            if (!first) out << ", ";
            out << n.name(f);
            first = false;
        }
        out << ")\n";
    }
    return out.str();
}

std::string write_verilog(const Netlist& n) {
    std::ostringstream out;
    std::vector<std::string> ports;
    std::unordered_set<std::string> port_names;
    auto add_port = [&](const std::string& name) {
        if (port_names.insert(name).second) ports.push_back(name);
    };
    for (GateId g : n.inputs()) add_port(n.name(g));
    for (GateId g : n.keys()) add_port(n.name(g));
    for (GateId g : n.outputs()) add_port(n.name(g));

    out << "module " << verilog_name(n.module_name()) << '(';
    for (std::size_t i = 0; i < ports.size(); ++i) {
        if (i != 0) out << ", ";
        out << verilog_name(ports[i]);
    }
    out << ");\n";
    for (GateId g : n.inputs()) out << "  input " << verilog_name(n.name(g)) << ";\n";
    for (GateId g : n.keys()) out << "  input " << verilog_name(n.name(g)) << ";\n";
    for (GateId g : n.outputs()) out << "  output " << verilog_name(n.name(g)) << ";\n";

    const auto order = topological_order(n);
    for (GateId g : order) {
        if (!is_logic(n.type(g)) || port_names.count(n.name(g)) != 0) continue;
        out << "  wire " << verilog_name(n.name(g)) << ";\n";
    }
    std::size_t instance = 0;
    for (GateId g : order) {
        const GateType t = n.type(g);
        if (!is_logic(t)) continue;
        if (is_constant(t)) {
            out << "  assign " << verilog_name(n.name(g)) << " = "
                << (t == GateType::Const1 ? "1'b1" : "1'b0") << ";\n";
            continue;
        }
        out << "  " << lower(to_string(t)) << " g" << instance++ << '('
            << verilog_name(n.name(g));
        for (GateId f : n.fanins(g)) out << ", " << verilog_name(n.name(f));
        out << ");\n";
    }
    out << "endmodule\n";
    return out.str();
}

}  // namespace

std::string write_netlist(const Netlist& n, NetlistFormat format) {
    return format == NetlistFormat::Verilog ? write_verilog(n) : write_bench(n);
}

NetlistFormat format_for_path(std::string_view path) {
    const auto dot = path.rfind('.');
    if (dot != std::string_view::npos && lower(path.substr(dot)) == ".v") {
        return NetlistFormat::Verilog;
    }
    return NetlistFormat::Bench;
}

Netlist read_netlist_file(const std::string& path) {
    const std::string text = read_text_file(path);
    return format_for_path(path) == NetlistFormat::Verilog ? parse_structural_verilog(text)
                                                           : parse_bench(text);
}

void write_netlist_file(const std::string& path, const Netlist& n) {
    write_text_file(path, write_netlist(n, format_for_path(path)));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace lockbench::netcore
