#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lockbench/netcore/editor.hpp"
#include "lockbench/netcore/key_mapping.hpp"
#include "lockbench/netcore/netlist.hpp"
#include "lockbench/util/rng.hpp"

namespace lockbench::locker {

using netcore::GateId;
using netcore::GateType;
using netcore::KeyMapping;
using netcore::Netlist;
using netcore::NetlistEditor;

enum class KeyGateKind : std::uint8_t { Xor, Xnor, And, Or, MuxAndOr, MuxNand, MuxNor };

std::string_view to_string(KeyGateKind k) noexcept;
std::optional<KeyGateKind> key_gate_kind_from_string(std::string_view s);
constexpr bool is_mux(KeyGateKind k) noexcept {
    return k == KeyGateKind::MuxAndOr || k == KeyGateKind::MuxNand || k == KeyGateKind::MuxNor;
}

struct Palette {
    std::string name;
    std::vector<KeyGateKind> allowed;

    bool contains(KeyGateKind k) const;

    static Palette xnor();
    static Palette cl_v1();
    static Palette cl_v2();
    static Palette cl_v3();
    static Palette cl_v4();
    /// "xnor", "cl_v1" ... "cl_v4". Throws std::invalid_argument otherwise.
    static Palette by_name(std::string_view name);
};

enum class Scheme : std::uint8_t { Rll, Fll, Sll };
std::string_view to_string(Scheme s) noexcept;
Scheme scheme_from_string(std::string_view s);

struct LockSite {
    std::string key_name;
    std::string net;  ///< name of the locked net in the returned netlist
    KeyGateKind kind;
    bool correct_bit = false;
    /// Placement score: fault impact (FLL), interference count (SLL), 0 (RLL).
    std::uint64_t score = 0;
};

struct LockRecord {
    Netlist locked;
    KeyMapping mapping;  ///< keys added by this lock, in insertion order
    std::vector<LockSite> sites;
};

class LockError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Insertion {
    GateId key_input = netcore::kNoGate;
    GateId output = netcore::kNoGate;  ///< gate now driving the old consumers
    bool correct_bit = false;
};

/// Inserts one key-gate on `net` in the editor. Every consumer of the net is
/// re-pointed to the key-gate output; OUTPUT markers of a primary input stay
/// on the input. When the net drives an output port the key-gate takes over
/// the net's name and the original driver is renamed.
/// Throws LockError on an invalid net or a key name already in use.
Insertion insert_key_gate(NetlistEditor& e, GateId net, KeyGateKind kind,
                          const std::string& key_name, Rng& rng);

/// Netlist-level convenience wrapper; returns the locked netlist and the
/// correct bit.
std::pair<Netlist, bool> insert_key_gate(const Netlist& n, GateId net, KeyGateKind kind,
                                         const std::string& key_name, Rng& rng);

/// Per gate: part of a key-gate structure (reads a key-input directly, or
/// only reads key-inputs and key-structure gates).
std::vector<bool> key_structure(const NetlistEditor& e);

/// Nets that may receive a key-gate, ascending by id: live, not a key-input,
/// constant or OUTPUT marker, not part of a key-gate structure, with at least
/// one consumer, and not already feeding only key-gate structures.
std::vector<GateId> lockable_nets(const NetlistEditor& e);

/// First unused name of the form k<i>, starting after the existing keys.
std::string next_key_name(const NetlistEditor& e);

LockRecord lock_rll(const Netlist& n, std::size_t K, const Palette& palette, Rng& rng);
LockRecord lock_fll(const Netlist& n, std::size_t K, const Palette& palette, Rng& rng,
                    std::size_t n_patterns = 2048);
LockRecord lock_sll(const Netlist& n, std::size_t K, Rng& rng);

/// Dispatch by scheme. SLL requires the X(N)OR palette.
LockRecord lock(const Netlist& n, Scheme scheme, std::size_t K, const Palette& palette, Rng& rng,
                std::size_t fll_patterns = 2048);

/// Editor-level variants used by multi-phase flows; they lock in place and
/// return the new sites (net names as of the editor state).
std::vector<LockSite> lock_in_place(NetlistEditor& e, Scheme scheme, std::size_t K,
                                    const Palette& palette, Rng& rng,
                                    std::size_t fll_patterns = 2048);

/// Correct bit implied by a plain key-gate type (XOR 0, XNOR 1, AND 1, OR 0).
std::optional<bool> type_decode(GateType t);

}  // namespace lockbench::locker
