#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lockbench/netcore/editor.hpp"
#include "lockbench/netcore/netlist.hpp"

namespace lockbench::netcore {

/// Deterministic local region around `seed`, at most `size` gates.
///
/// Starts at the seed, then alternates a fan-out step and a fan-in step.
/// Each step expands every gate not yet expanded in that direction, newest
/// first, adding unvisited neighbours in ascending gate-id order. Key-inputs
/// and OUTPUT markers are never part of a region. Stops once `size` gates are
/// collected or nothing is left to expand.
///
/// Throws std::out_of_range for an unknown seed and std::invalid_argument for
/// size 0.
std::vector<GateId> neighborhood(const Netlist& n, GateId seed, std::size_t size);
std::vector<GateId> neighborhood(const NetlistEditor& e, GateId seed, std::size_t size);

/// Parameters of the random DAG generator used by tests and benchmarks.
struct RandomNetlistSpec {
    std::size_t inputs = 8;
    std::size_t outputs = 4;
    std::size_t gates = 50;
    std::size_t max_fanin = 3;
    std::uint64_t seed = 1;
};

/// Random valid netlist drawn from the 2-input-or-wider gate vocabulary plus
/// NOT/BUF. Every gate has at least one consumer or drives an output.
Netlist random_netlist(const RandomNetlistSpec& shape);

}  // namespace lockbench::netcore
