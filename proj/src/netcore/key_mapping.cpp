#include "lockbench/netcore/key_mapping.hpp"

#include <sstream>
#include <unordered_map>

#include "lockbench/netcore/io.hpp"

namespace lockbench::netcore {

void KeyMapping::append(const KeyMapping& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

std::optional<bool> KeyMapping::find(std::string_view name) const {
    for (const KeyBit& b : bits_) {
        if (b.name == name) return b.value;
    }
    return std::nullopt;
}

std::vector<std::uint8_t> KeyMapping::values_for(const Netlist& n) const {
    std::unordered_map<std::string_view, bool> lookup;
    for (const KeyBit& b : bits_) lookup.emplace(b.name, b.value);
    std::vector<std::uint8_t> values;
    values.reserve(n.keys().size());
    for (GateId k : n.keys()) {
        auto it = lookup.find(n.name(k));
        if (it == lookup.end()) {
            throw std::invalid_argument("key mapping has no value for key-input '" + n.name(k) + "'");
        }
        values.push_back(it->second ? 1 : 0);
    }
    return values;
}

void KeyMapping::check_matches(const Netlist& n) const {
    if (bits_.size() != n.keys().size()) {
        throw std::invalid_argument("key mapping has " + std::to_string(bits_.size()) +
                                    " entries, netlist has " + std::to_string(n.keys().size()) +
                                    " key-inputs");
    }
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i].name != n.name(n.keys()[i])) {
            throw std::invalid_argument("key mapping entry '" + bits_[i].name +
                                        "' does not match key-input '" + n.name(n.keys()[i]) + "'");
        }
    }
}

KeyMapping parse_key_file(std::string_view text) {
    KeyMapping mapping;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto trim = [](std::string_view s) {
            const auto* ws = " \t\r";
            const auto b = s.find_first_not_of(ws);
            if (b == std::string_view::npos) return std::string_view{};
            return s.substr(b, s.find_last_not_of(ws) - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(ParseError::Kind::Syntax, line_no, 1, "expected name=bit");
        }
        std::string_view name = trim(line.substr(0, eq));
        std::string_view bit = trim(line.substr(eq + 1));
        if (name.empty() || (bit != "0" && bit != "1")) {
            throw ParseError(ParseError::Kind::Syntax, line_no, eq + 1, "expected name=0 or name=1");
        }
        if (mapping.find(name)) {
            throw ParseError(ParseError::Kind::DuplicateDefinition, line_no, 1,
                             "key '" + std::string(name) + "' listed twice");
        }
        mapping.push_back({std::string(name), bit == "1"});
        if (end == text.size()) break;
    }
    return mapping;
}

std::string write_key_file(const KeyMapping& mapping) {
    std::ostringstream out;
    for (const KeyBit& b : mapping.bits()) out << b.name << '=' << (b.value ? 1 : 0) << '\n';
    return out.str();
}

KeyMapping read_key_file(const std::string& path) { return parse_key_file(read_text_file(path)); }

void write_key_file(const std::string& path, const KeyMapping& mapping) {
    write_text_file(path, write_key_file(mapping));
}

}  // namespace lockbench::netcore
