#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "lockbench/simeval/patterns.hpp"
#include "lockbench/simeval/simulator.hpp"

namespace lockbench::simeval {

/// Single stuck-at fault on a gate output.
struct Fault {
    GateId site = 0;
    bool stuck_at = false;
};

/// All stuck-at-0/1 faults on every gate output (sources and constants
/// included, OUTPUT markers excluded), ordered by gate id then value.
std::vector<Fault> all_faults(const Netlist& n);

/// Event-driven single-fault propagation over one 64-pattern word.
class FaultSimulator {
public:
    explicit FaultSimulator(const CompiledNetlist& c);

    struct Effect {
        std::uint64_t any_output = 0;  ///< patterns with at least one flipped output
        std::size_t flips = 0;         ///< flipped (pattern, output) bits
    };

    /// `good` must hold fault-free values for every gate in the fault's fan-out
    /// cone and their fan-ins. Only lanes in `mask` count. With `stop_early` the
    /// walk ends at the first flipped output and `flips` is partial.
    Effect propagate(std::span<const std::uint64_t> good, Fault f, std::uint64_t mask,
                     bool stop_early);

private:
    const CompiledNetlist& c_;
    std::vector<std::uint64_t> faulty_;
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint32_t> queued_;
    std::uint32_t epoch_ = 0;
    std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>> heap_;
};

/// Per-site input support: the sources (n.inputs() then n.keys(), indexed in
/// that order) that can influence any output reachable from the site.
class FaultSupport {
public:
    explicit FaultSupport(const CompiledNetlist& c);

    /// Source indices in the support of `site`.
    std::vector<std::size_t> sources(GateId site) const;
    /// Gates feeding the outputs reachable from `site`, topologically ordered,
    /// sources excluded.
    std::vector<GateId> cone(GateId site) const;

private:
    const CompiledNetlist& c_;
    std::size_t out_words_;
    std::size_t src_words_;
    std::vector<std::uint64_t> reach_;       // per gate: reachable output bitset
    std::vector<std::uint64_t> po_support_;  // per output: source bitset
    std::vector<GateId> source_ids_;
};

enum class FaultClass { Detectable, Undetectable, Unknown };

/// Decides detectability by enumerating every assignment of the fault's
/// support; Unknown when the support exceeds `limit` sources.
FaultClass classify_exhaustive(const CompiledNetlist& c, const FaultSupport& support, Fault f,
                               std::size_t limit);

struct FaultCoverageOptions {
    /// Undetected faults with a support up to this size are resolved exactly;
    /// detectable ones are counted as detected by a top-up pattern.
    std::size_t exhaustive_limit = 24;
    bool top_up = true;
};

struct FaultCoverage {
    std::size_t total = 0;
    std::size_t detected = 0;
    std::size_t detected_by_patterns = 0;
    std::size_t detected_by_top_up = 0;
    std::size_t undetectable = 0;
    std::size_t unknown = 0;
    double test_coverage = 0.0;   ///< detected / (total - undetectable - unknown)
    double fault_coverage = 0.0;  ///< detected / total
};

/// Stuck-at coverage of `patterns` (signals: n.inputs() then n.keys(); keys are
/// free inputs). Throws std::invalid_argument on an empty pattern set.
FaultCoverage fault_coverage(const Netlist& n, const PatternBlock& patterns,
                             const FaultCoverageOptions& opt = {});

/// Per gate: number of (pattern, output) flips caused by stuck-at-0 plus
/// stuck-at-1 on its output over `n_patterns` random patterns with free keys.
std::vector<std::uint64_t> fault_impact(const Netlist& n, std::size_t n_patterns,
                                        std::uint64_t seed);

}  // namespace lockbench::simeval
