#include "lockbench/simeval/faults.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace lockbench::simeval {

std::vector<Fault> all_faults(const Netlist& n) {
    std::vector<Fault> faults;
    for (GateId g = 0; g < n.size(); ++g) {
        if (n.type(g) == GateType::Output) continue;
        faults.push_back({g, false});
        faults.push_back({g, true});
    }
    return faults;
}

FaultSimulator::FaultSimulator(const CompiledNetlist& c)
    : c_(c), faulty_(c.size(), 0), stamp_(c.size(), 0), queued_(c.size(), 0) {}

FaultSimulator::Effect FaultSimulator::propagate(std::span<const std::uint64_t> good, Fault f,
                                                 std::uint64_t mask, bool stop_early) {
    Effect effect;
    const std::uint64_t forced = f.stuck_at ? ~std::uint64_t{0} : 0;
    if (((forced ^ good[f.site]) & mask) == 0) return effect;
    if (++epoch_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        std::fill(queued_.begin(), queued_.end(), 0);
        epoch_ = 1;
    }
    while (!heap_.empty()) heap_.pop();

    faulty_[f.site] = forced;
    stamp_[f.site] = epoch_;
    auto push_fanouts = [&](GateId g) {
        for (GateId c : c_.fanouts(g)) {
            if (queued_[c] == epoch_) continue;
            queued_[c] = epoch_;
            heap_.push(c_.position(c));
        }
    };
    push_fanouts(f.site);
    auto value = [&](GateId g) { return stamp_[g] == epoch_ ? faulty_[g] : good[g]; };

    while (!heap_.empty()) {
        const GateId g = c_.at_position(heap_.top());
        heap_.pop();
        const std::uint64_t v = c_.eval_with(g, value);
        const std::uint64_t diff = (v ^ good[g]) & mask;
        if (diff == 0) continue;
        faulty_[g] = v;
        stamp_[g] = epoch_;
        if (c_.type(g) == GateType::Output) {
            effect.any_output |= diff;
            effect.flips += static_cast<std::size_t>(std::popcount(diff));
            if (stop_early) return effect;
            continue;
        }
        push_fanouts(g);
    }
    return effect;
}

FaultSupport::FaultSupport(const CompiledNetlist& c) : c_(c) {
    const Netlist& n = c.netlist();
    source_ids_ = n.inputs();
    source_ids_.insert(source_ids_.end(), n.keys().begin(), n.keys().end());
    out_words_ = (n.outputs().size() + 63) / 64;
    src_words_ = (source_ids_.size() + 63) / 64;

    // Reachable outputs, in reverse topological order.
    reach_.assign(n.size() * out_words_, 0);
    for (std::size_t i = 0; i < n.outputs().size(); ++i) {
        reach_[n.outputs()[i] * out_words_ + i / 64] |= std::uint64_t{1} << (i % 64);
    }
    const auto& order = n.topo_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        std::uint64_t* r = &reach_[*it * out_words_];
        for (GateId fo : n.fanouts(*it)) {
            const std::uint64_t* s = &reach_[fo * out_words_];
            for (std::size_t w = 0; w < out_words_; ++w) r[w] |= s[w];
        }
    }

    // Source support of every gate, forward; only outputs are kept.
    std::vector<std::uint64_t> support(n.size() * src_words_, 0);
    for (std::size_t i = 0; i < source_ids_.size(); ++i) {
        support[source_ids_[i] * src_words_ + i / 64] |= std::uint64_t{1} << (i % 64);
    }
    for (GateId g : order) {
        std::uint64_t* s = &support[g * src_words_];
        for (GateId f : n.fanins(g)) {
            const std::uint64_t* t = &support[f * src_words_];
            for (std::size_t w = 0; w < src_words_; ++w) s[w] |= t[w];
        }
    }
    po_support_.assign(n.outputs().size() * src_words_, 0);
    for (std::size_t i = 0; i < n.outputs().size(); ++i) {
        std::copy_n(&support[n.outputs()[i] * src_words_], src_words_,
                    &po_support_[i * src_words_]);
    }
}

std::vector<std::size_t> FaultSupport::sources(GateId site) const {
    std::vector<std::uint64_t> acc(src_words_, 0);
    const std::uint64_t* r = &reach_[site * out_words_];
    for (std::size_t w = 0; w < out_words_; ++w) {
        for (std::uint64_t bits = r[w]; bits != 0; bits &= bits - 1) {
            const std::size_t o = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
            for (std::size_t k = 0; k < src_words_; ++k) acc[k] |= po_support_[o * src_words_ + k];
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < src_words_; ++w) {
        for (std::uint64_t bits = acc[w]; bits != 0; bits &= bits - 1) {
            out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        }
    }
    return out;
}

std::vector<GateId> FaultSupport::cone(GateId site) const {
    const Netlist& n = c_.netlist();
    std::vector<bool> seen(n.size(), false);
    std::vector<GateId> stack;
    const std::uint64_t* r = &reach_[site * out_words_];
    for (std::size_t i = 0; i < n.outputs().size(); ++i) {
        if ((r[i / 64] >> (i % 64)) & 1U) {
            seen[n.outputs()[i]] = true;
            stack.push_back(n.outputs()[i]);
        }
    }
    std::vector<GateId> cone;
    while (!stack.empty()) {
        const GateId g = stack.back();
        stack.pop_back();
        if (n.type(g) != GateType::Input) cone.push_back(g);
        for (GateId f : n.fanins(g)) {
            if (!seen[f]) {
                seen[f] = true;
                stack.push_back(f);
            }
        }
    }
    std::sort(cone.begin(), cone.end(),
              [&](GateId a, GateId b) { return c_.position(a) < c_.position(b); });
    return cone;
}

FaultClass classify_exhaustive(const CompiledNetlist& c, const FaultSupport& support, Fault f,
                               std::size_t limit) {
    const Netlist& n = c.netlist();
    const auto srcs = support.sources(f.site);
    if (srcs.size() > limit || srcs.size() > 30) return FaultClass::Unknown;
    const auto cone = support.cone(f.site);
    if (cone.empty()) return FaultClass::Undetectable;

    std::vector<GateId> src_gates;
    for (std::size_t s : srcs) {
        src_gates.push_back(s < n.inputs().size() ? n.inputs()[s]
                                                  : n.keys()[s - n.inputs().size()]);
    }
    std::vector<std::uint64_t> values(n.size(), 0);
    FaultSimulator sim(c);
    const std::size_t patterns = std::size_t{1} << srcs.size();
    const std::size_t words = (patterns + 63) / 64;
    const std::uint64_t mask =
        patterns >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << patterns) - 1);
    for (std::size_t w = 0; w < words; ++w) {
        for (std::size_t i = 0; i < src_gates.size(); ++i) {
            values[src_gates[i]] = exhaustive_word(i, w);
        }
        c.evaluate(values, cone);
        if (sim.propagate(values, f, mask, true).any_output != 0) return FaultClass::Detectable;
    }
    return FaultClass::Undetectable;
}

namespace {

void load_free_sources(const Netlist& n, const PatternBlock& p, std::size_t w,
                       std::vector<std::uint64_t>& values) {
    const std::size_t ni = n.inputs().size();
    for (std::size_t i = 0; i < ni; ++i) values[n.inputs()[i]] = p.lanes(i)[w];
    for (std::size_t i = 0; i < n.keys().size(); ++i) values[n.keys()[i]] = p.lanes(ni + i)[w];
}

}  // namespace

FaultCoverage fault_coverage(const Netlist& n, const PatternBlock& patterns,
                             const FaultCoverageOptions& opt) {
    if (patterns.patterns() == 0) throw std::invalid_argument("fault simulation needs patterns");
    if (patterns.signals() != n.inputs().size() + n.keys().size()) {
        throw std::invalid_argument("patterns must cover primary inputs and key-inputs");
    }
    const CompiledNetlist c(n);
    FaultSimulator sim(c);
    const auto faults = all_faults(n);
    std::vector<bool> detected(faults.size(), false);
    std::vector<std::size_t> remaining(faults.size());
    for (std::size_t i = 0; i < faults.size(); ++i) remaining[i] = i;

    std::vector<std::uint64_t> good(n.size(), 0);
    for (std::size_t w = 0; w < patterns.words() && !remaining.empty(); ++w) {
        load_free_sources(n, patterns, w, good);
        c.evaluate(good);
        const std::uint64_t mask = patterns.valid_mask(w);
        std::erase_if(remaining, [&](std::size_t i) {
            if (sim.propagate(good, faults[i], mask, true).any_output == 0) return false;
            detected[i] = true;
            return true;
        });
    }

    FaultCoverage cov;
    cov.total = faults.size();
    cov.detected_by_patterns = faults.size() - remaining.size();
    const FaultSupport support(c);
    for (std::size_t i : remaining) {
        switch (classify_exhaustive(c, support, faults[i], opt.exhaustive_limit)) {
            case FaultClass::Detectable:
                if (opt.top_up) ++cov.detected_by_top_up;
                break;
            case FaultClass::Undetectable: ++cov.undetectable; break;
            case FaultClass::Unknown: ++cov.unknown; break;
        }
    }
    cov.detected = cov.detected_by_patterns + cov.detected_by_top_up;
    const std::size_t testable = cov.total - cov.undetectable - cov.unknown;
    cov.test_coverage =
        testable == 0 ? 1.0 : static_cast<double>(cov.detected) / static_cast<double>(testable);
    cov.fault_coverage =
        cov.total == 0 ? 1.0 : static_cast<double>(cov.detected) / static_cast<double>(cov.total);
    return cov;
}

std::vector<std::uint64_t> fault_impact(const Netlist& n, std::size_t n_patterns,
                                        std::uint64_t seed) {
    const CompiledNetlist c(n);
    FaultSimulator sim(c);
    const PatternBlock p = random_patterns(n.inputs().size() + n.keys().size(), n_patterns, seed);
    std::vector<std::uint64_t> impact(n.size(), 0);
    std::vector<std::uint64_t> good(n.size(), 0);
    for (std::size_t w = 0; w < p.words(); ++w) {
        load_free_sources(n, p, w, good);
        c.evaluate(good);
        const std::uint64_t mask = p.valid_mask(w);
        for (GateId g = 0; g < n.size(); ++g) {
            if (n.type(g) == GateType::Output) continue;
            impact[g] += sim.propagate(good, {g, false}, mask, false).flips;
            impact[g] += sim.propagate(good, {g, true}, mask, false).flips;
        }
    }
    return impact;
}

}  // namespace lockbench::simeval
