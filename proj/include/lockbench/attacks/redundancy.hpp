#pragma once

#include "lockbench/attacks/report.hpp"
#include "lockbench/netcore/key_mapping.hpp"
#include "lockbench/netcore/netlist.hpp"

namespace lockbench::attacks {

/// Stuck-at faults of `n` proven undetectable by exhaustive simulation over
/// their input support; faults with a support above `cone_limit` sources are
/// skipped. Remaining key-inputs count as free sources.
std::size_t count_redundant(const netcore::Netlist& n, std::size_t cone_limit);

/// Per key: tie it to 0 and to 1, propagate, count redundancies; the bit
/// leaving fewer redundancies is guessed, equal counts abstain.
/// Throws std::invalid_argument for cone_limit 0. The report is scored.
AttackReport redundancy_attack(const netcore::Netlist& target, const netcore::KeyMapping& truth,
                               std::size_t cone_limit = 12);

}  // namespace lockbench::attacks
