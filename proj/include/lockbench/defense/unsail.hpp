#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lockbench/features/features.hpp"
#include "lockbench/locker/locker.hpp"

namespace lockbench::defense {

using netcore::Netlist;

struct UnsailConfig {
    std::size_t K = 0;  ///< total key bits, even; half are placed by each phase
    locker::Scheme scheme = locker::Scheme::Rll;
    locker::Palette palette = locker::Palette::xnor();
    std::size_t effort = 2;
    std::uint64_t seed = 0;
    bool fill_up = true;
};

/// How a second-phase key-gate was placed.
enum class Origin : std::uint8_t { DictionaryMatch, UTargeted, FillUp };
std::string_view to_string(Origin o) noexcept;

struct UnsailRecord {
    locker::LockRecord record;  ///< full key: first-phase keys, then second-phase keys
    std::size_t phase1_keys = 0;
    /// First-phase lock before resynthesis (the pre-view of those keys).
    Netlist phase1_locked;
    /// First-phase lock after resynthesis (where the second phase inserts).
    Netlist resynthesized;
    features::ChangeDictionary dictionary;
    /// One per second-phase key, in key order.
    std::vector<Origin> origins;
};

/// Raised when resynthesis left every first-phase key-gate unchanged.
class EmptyDictionaryError : public std::runtime_error {
public:
    EmptyDictionaryError()
        : std::runtime_error(
              "resynthesis changed no key-gate structure; raise the effort or change the seed") {}
};

/// Split-key locking with confusion-injecting second-phase insertion.
/// Throws std::invalid_argument for odd K or an SLL/palette mismatch,
/// EmptyDictionaryError, and locker::LockError when sites run out.
UnsailRecord unsail_lock(const Netlist& n, const UnsailConfig& cfg);

struct InjectionStats {
    std::size_t matched = 0;
    std::size_t u_targeted = 0;
    std::size_t fill_up = 0;
};

InjectionStats injection_stats(const UnsailRecord& r);

inline constexpr const char* kStatsCsvHeader = "K,matched,u_targeted,fill_up,entries,u_size";
std::string stats_csv_row(const UnsailRecord& r);

/// Key-gate kind that reproduces a region rooted at `root` (XOR, XNOR, AND,
/// OR map to the plain kinds; AND, NAND and NOR also root the MUX kinds),
/// restricted to the palette. Empty when none fits.
std::vector<locker::KeyGateKind> kinds_for_root(netcore::GateType root,
                                                const locker::Palette& palette);

/// The root type a single inverter-absorbing rewrite would give a region
/// rooted at `t` (XOR<->XNOR, AND->NOR, OR->NAND, NAND->OR, NOR->AND).
std::optional<netcore::GateType> rewritten_root(netcore::GateType t);

/// Ground truth labels for a finished lock: each key's region in `pre` versus
/// `post`, matched by key name.
std::vector<features::SubgraphSample> truth_labels(const Netlist& pre, const Netlist& post,
                                                   const std::vector<std::size_t>& sub_sizes);

/// Pre-resynthesis view of every key of an UNSAIL lock: first-phase keys
/// from the first-phase lock, second-phase keys from the final netlist.
std::vector<features::SubgraphSample> pre_samples(const UnsailRecord& r,
                                                  const std::vector<std::size_t>& sub_sizes);

/// Truth labels of an UNSAIL lock: first-phase keys against their
/// pre-resynthesis regions, second-phase keys unchanged.
std::vector<features::SubgraphSample> truth_labels(const UnsailRecord& r,
                                                   const std::vector<std::size_t>& sub_sizes);

}  // namespace lockbench::defense
