#include "lockbench/attacks/redundancy.hpp"

#include <stdexcept>

#include "lockbench/resynth/resynth.hpp"
#include "lockbench/simeval/faults.hpp"
#include "lockbench/simeval/simulator.hpp"

namespace lockbench::attacks {

std::size_t count_redundant(const netcore::Netlist& n, std::size_t cone_limit) {
    const simeval::CompiledNetlist c(n);
    const simeval::FaultSupport support(c);
    std::size_t redundant = 0;
    for (const auto& f : simeval::all_faults(n)) {
        redundant += simeval::classify_exhaustive(c, support, f, cone_limit) ==
                     simeval::FaultClass::Undetectable;
    }
    return redundant;
}

AttackReport redundancy_attack(const netcore::Netlist& target, const netcore::KeyMapping& truth,
                               std::size_t cone_limit) {
    if (cone_limit < 1) throw std::invalid_argument("cone limit must be at least 1");
    AttackReport rep;
    for (netcore::GateId k : target.keys()) {
        const std::string& name = target.name(k);
        const std::size_t r0 = count_redundant(resynth::constant_propagate(target, {{name, false}}), cone_limit);
        const std::size_t r1 = count_redundant(resynth::constant_propagate(target, {{name, true}}), cone_limit);
        KeyGuess g{name, std::nullopt, 1.0, "redundancy"};
        if (r0 > r1) {
            g.guess = true;
        } else if (r1 > r0) {
            g.guess = false;
        } else {
            g.stage = "abstain";
        }
        rep.guesses.push_back(std::move(g));
    }
    score_into(rep, truth);
    return rep;
}

}  // namespace lockbench::attacks
