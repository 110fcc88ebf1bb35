#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lockbench/netcore/editor.hpp"
#include "lockbench/netcore/key_mapping.hpp"
#include "lockbench/netcore/netlist.hpp"
#include "lockbench/util/rng.hpp"

namespace lockbench::resynth {

using netcore::GateId;
using netcore::GateType;
using netcore::Netlist;
using netcore::NetlistEditor;

enum class Direction : std::uint8_t { Simplify, Perturb };

/// One rewrite, written as a pair of expressions over single-letter variables,
/// e.g. "NOT(XOR(a, b))" -> "XNOR(a, b)". `family` groups the variants that
/// share one matcher in the pass.
struct RewriteRule {
    std::string name;
    std::string family;
    std::string pattern;
    std::string replacement;
    Direction direction = Direction::Simplify;
};

/// Evaluates an expression template for every assignment of its variables.
/// Bit i of the result is the value under assignment i (variables sorted,
/// first variable is bit 0). At most 6 variables.
std::uint64_t template_truth_table(std::string_view expr, std::string_view variables);

class RuleRegistry {
public:
    /// Throws std::invalid_argument unless pattern and replacement agree on
    /// every input assignment, or when the name is already registered.
    void add(RewriteRule rule);
    const std::vector<RewriteRule>& rules() const noexcept { return rules_; }
    bool has_family(std::string_view family) const;

    /// The rules the pass implements.
    static const RuleRegistry& builtin();

private:
    std::vector<RewriteRule> rules_;
};

/// Number of rewrites applied, by rule family.
using RewriteCounts = std::map<std::string, std::size_t>;

/// One sweep: every live logic gate present at the start, in shuffled order,
/// gets the first rule family that matches. Returns the number of rewrites.
std::size_t sweep(NetlistEditor& e, Rng& rng, RewriteCounts* counts = nullptr);
/// Same, restricted to the listed gates.
std::size_t sweep_gates(NetlistEditor& e, std::vector<GateId> gates, Rng& rng,
                        RewriteCounts* counts = nullptr);

/// `effort` sweeps seeded by `seed`; effort 0 returns the input unchanged.
Netlist resynthesize(const Netlist& n, std::size_t effort, std::uint64_t seed,
                     RewriteCounts* counts = nullptr);

/// Folds constants in the editor to a fixpoint. A gate left with one fan-in
/// becomes a wire (its consumers read the fan-in) or an inverter. Returns the
/// number of rewritten gates. Dead gates are left in place.
std::size_t propagate_constants(NetlistEditor& e);

/// Ties the named inputs (primary or key) to constants, folds, and removes
/// logic that no longer reaches an output. Throws std::invalid_argument on an
/// unknown pin.
Netlist constant_propagate(const Netlist& n, const std::vector<netcore::KeyBit>& pins);

struct SynthReport {
    /// Logic gates (constants included, port markers excluded), indexed by
    /// netcore::index_of(GateType).
    std::array<std::size_t, netcore::kGateTypeCount> gate_count_by_type{};
    std::size_t total_gates = 0;
    std::size_t logic_depth = 0;  ///< longest input-to-output path in gates; constants count 0
    std::size_t literal_count = 0;

    std::size_t count(GateType t) const { return gate_count_by_type[netcore::index_of(t)]; }
    friend bool operator==(const SynthReport&, const SynthReport&) = default;
};

SynthReport report(const Netlist& n);

extern const char* const kReportCsvHeader;
std::string report_csv_row(std::string_view circuit, const SynthReport& r);

}  // namespace lockbench::resynth
