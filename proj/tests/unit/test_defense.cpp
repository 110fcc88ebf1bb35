#include <map>
#include <set>

#include "doctest.h"
#include "lockbench/defense/unsail.hpp"
#include "lockbench/netcore/io.hpp"
#include "lockbench/netcore/structure.hpp"
#include "lockbench/resynth/resynth.hpp"
#include "lockbench/simeval/simulator.hpp"
#include "test_support.hpp"

using namespace lockbench;
using namespace lockbench::netcore;
using namespace lockbench::defense;
using features::Label;

namespace {

Netlist load(const char* rel) {
    return read_netlist_file(test::source_dir() + "/benchmarks/" + rel);
}

// Two samples with equal sequences but different labels.
bool has_conflict(const std::vector<features::SubgraphSample>& samples) {
    std::map<features::Sequence, std::set<Label>> seen;
    for (const auto& s : samples) {
        auto& labels = seen[s.type_sequence];
        labels.insert(*s.label);
        if (labels.size() == 2) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("kinds_for_root and rewritten_root") {
    using locker::KeyGateKind;
    using locker::Palette;
    CHECK(kinds_for_root(GateType::And, Palette::cl_v4()) ==
          std::vector<KeyGateKind>{KeyGateKind::And, KeyGateKind::MuxAndOr});
    CHECK(kinds_for_root(GateType::And, Palette::xnor()).empty());
    CHECK(kinds_for_root(GateType::Nand, Palette::cl_v1()) == std::vector<KeyGateKind>{KeyGateKind::MuxNand});
    CHECK(kinds_for_root(GateType::Not, Palette::cl_v4()).empty());
    CHECK(*rewritten_root(GateType::Xor) == GateType::Xnor);
    CHECK(*rewritten_root(GateType::Nor) == GateType::And);
    CHECK_FALSE(rewritten_root(GateType::Buf).has_value());
}

TEST_CASE("UNSAIL locks are functionally correct") {
    const Netlist n = random_netlist({10, 4, 50, 3, 11});
    std::size_t done = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        UnsailConfig cfg;
        cfg.K = 8;
        cfg.seed = seed;
        cfg.palette = seed % 2 ? locker::Palette::cl_v4() : locker::Palette::xnor();
        UnsailRecord r;
        try {
            r = unsail_lock(n, cfg);
        } catch (const EmptyDictionaryError&) {
            continue;
        }
        ++done;
        REQUIRE(r.record.mapping.size() == 8);
        CHECK(r.record.locked.keys().size() == 8);
        r.record.mapping.check_matches(r.record.locked);
        const auto key = r.record.mapping.values_for(r.record.locked);
        CHECK(simeval::equivalence_exhaustive(n, r.record.locked, {}, key));
        const auto st = injection_stats(r);
        CHECK(st.matched + st.u_targeted + st.fill_up == 4);
        CHECK(r.origins.size() == 4);
    }
    CHECK(done >= 5);
}

TEST_CASE("UNSAIL argument and dictionary errors") {
    const Netlist n = random_netlist({10, 4, 80, 3, 2});
    UnsailConfig cfg;
    cfg.K = 7;
    CHECK_THROWS_AS(unsail_lock(n, cfg), std::invalid_argument);
    cfg.K = 8;
    cfg.effort = 0;
    CHECK_THROWS_AS(unsail_lock(n, cfg), EmptyDictionaryError);
    cfg.effort = 2;
    cfg.scheme = locker::Scheme::Sll;
    cfg.palette = locker::Palette::cl_v1();
    CHECK_THROWS_AS(unsail_lock(n, cfg), std::invalid_argument);
}

TEST_CASE("UNSAIL is deterministic and reports stats") {
    const Netlist n = load("iscas85/c880.v");
    UnsailConfig cfg;
    cfg.K = 32;
    cfg.seed = 5;
    const auto a = unsail_lock(n, cfg);
    const auto b = unsail_lock(n, cfg);
    CHECK(write_netlist(a.record.locked, NetlistFormat::Bench) == write_netlist(b.record.locked, NetlistFormat::Bench));
    CHECK(a.record.mapping == b.record.mapping);
    CHECK(a.origins == b.origins);
    const auto st = injection_stats(a);
    CHECK(st.matched + st.u_targeted + st.fill_up == 16);
    CHECK(stats_csv_row(a) == "32," + std::to_string(st.matched) + ',' + std::to_string(st.u_targeted) +
                                   ',' + std::to_string(st.fill_up) + ',' +
                                   std::to_string(a.dictionary.entries.size()) + ',' +
                                   std::to_string(a.dictionary.unchanged_U.size()));
    // Second-phase keys follow the first-phase ones.
    CHECK(a.record.mapping.bits()[16].name == "k16");
    CHECK(simeval::random_mismatches(n, a.record.locked, {}, a.record.mapping.values_for(a.record.locked),
                                     4096, 1) == 0);
}

TEST_CASE("fill-up engages when templates run short") {
    const Netlist n = random_netlist({8, 3, 40, 2, 4});
    bool engaged = false;
    bool refused = false;
    for (std::uint64_t seed = 0; seed < 20 && !(engaged && refused); ++seed) {
        UnsailConfig cfg;
        cfg.K = 20;
        cfg.seed = seed;
        try {
            const auto r = unsail_lock(n, cfg);
            if (injection_stats(r).fill_up > 0) {
                engaged = true;
                cfg.fill_up = false;
                CHECK_THROWS_AS(unsail_lock(n, cfg), locker::LockError);
                refused = true;
            }
        } catch (const EmptyDictionaryError&) {
        } catch (const locker::LockError&) {
        }
    }
    CHECK(engaged);
    CHECK(refused);
}

TEST_CASE("second-phase keys confuse the adversary's labels") {
    const Netlist n = load("iscas85/c1908.v");
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        UnsailConfig cfg;
        cfg.K = 64;
        cfg.seed = seed;
        const auto r = unsail_lock(n, cfg);
        if (injection_stats(r).matched == 0) continue;
        ++checked;
        // The adversary's own view: the release against its resynthesis.
        const auto adv = resynth::resynthesize(r.record.locked, cfg.effort, 1000 + seed);
        CHECK(has_conflict(truth_labels(r.record.locked, adv, {3})));
        // Ground truth: phase-2 regions are never rewritten by the defender.
        const auto truth = truth_labels(r, {3});
        for (std::size_t i = r.phase1_keys; i < truth.size(); ++i) {
            CHECK(*truth[i].label == Label::Unchanged);
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("UNSAIL lowers the Fisher ratio relative to RLL") {
    const Netlist n = load("iscas85/c1908.v");
    double unsail_sum = 0;
    double rll_sum = 0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        UnsailConfig cfg;
        cfg.K = 64;
        cfg.seed = seed;
        const auto r = unsail_lock(n, cfg);
        unsail_sum += features::f1_for_csv(features::fisher_f1(
            truth_labels(r.record.locked, resynth::resynthesize(r.record.locked, 2, seed + 50), {3})));
        Rng rng(derive_seed(seed, 1));
        const auto rll = locker::lock_rll(n, 64, locker::Palette::xnor(), rng);
        rll_sum += features::f1_for_csv(features::fisher_f1(
            truth_labels(rll.locked, resynth::resynthesize(rll.locked, 2, seed + 50), {3})));
    }
    MESSAGE("F1 unsail " << unsail_sum / 4 << " rll " << rll_sum / 4);
    CHECK(unsail_sum < rll_sum);
}
