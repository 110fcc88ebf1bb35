#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lockbench/netcore/netlist.hpp"

namespace lockbench::netcore {

struct KeyBit {
    std::string name;
    bool value = false;

    friend bool operator==(const KeyBit&, const KeyBit&) = default;
};

/// Ordered key-input name -> correct bit.
class KeyMapping {
public:
    KeyMapping() = default;
    explicit KeyMapping(std::vector<KeyBit> bits) : bits_(std::move(bits)) {}

    const std::vector<KeyBit>& bits() const noexcept { return bits_; }
    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }

    void push_back(KeyBit b) { bits_.push_back(std::move(b)); }
    void append(const KeyMapping& other);

    std::optional<bool> find(std::string_view name) const;

    /// Key values in the order of n.keys(). Throws std::invalid_argument when a
    /// key-input of n has no entry.
    std::vector<std::uint8_t> values_for(const Netlist& n) const;

    /// Throws std::invalid_argument unless the mapping covers exactly the
    /// key-inputs of n, in order.
    void check_matches(const Netlist& n) const;

    friend bool operator==(const KeyMapping&, const KeyMapping&) = default;

private:
    std::vector<KeyBit> bits_;
};

/// `name=bit` per line; blank lines and `#` comments ignored.
KeyMapping parse_key_file(std::string_view text);
std::string write_key_file(const KeyMapping& mapping);

KeyMapping read_key_file(const std::string& path);
void write_key_file(const std::string& path, const KeyMapping& mapping);

}  // namespace lockbench::netcore
