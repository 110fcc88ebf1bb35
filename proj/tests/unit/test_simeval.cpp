#include <bit>

#include "doctest.h"
#include "lockbench/netcore/io.hpp"
#include "lockbench/netcore/structure.hpp"
#include "lockbench/simeval/corruption.hpp"
#include "lockbench/simeval/faults.hpp"
#include "lockbench/simeval/simulator.hpp"
#include "lockbench/util/rng.hpp"
#include "test_support.hpp"

using namespace lockbench::netcore;
using namespace lockbench::simeval;

namespace {

// One-pattern recursive evaluator used as an oracle for the word simulator.
bool scalar_eval(const Netlist& n, GateId g, const std::vector<bool>& src,
                 std::vector<int>& memo) {
    if (memo[g] >= 0) return memo[g] != 0;
    bool v = false;
    const auto fi = n.fanins(g);
    auto in = [&](std::size_t i) { return scalar_eval(n, fi[i], src, memo); };
    switch (n.type(g)) {
        case GateType::Input: v = src[g]; break;
        case GateType::Const0: v = false; break;
        case GateType::Const1: v = true; break;
        case GateType::Output:
        case GateType::Buf: v = in(0); break;
        case GateType::Not: v = !in(0); break;
        case GateType::And:
        case GateType::Nand:
            v = true;
            for (std::size_t i = 0; i < fi.size(); ++i) v = v && in(i);
            if (n.type(g) == GateType::Nand) v = !v;
            break;
        case GateType::Or:
        case GateType::Nor:
            v = false;
            for (std::size_t i = 0; i < fi.size(); ++i) v = v || in(i);
            if (n.type(g) == GateType::Nor) v = !v;
            break;
        case GateType::Xor:
        case GateType::Xnor:
            v = false;
            for (std::size_t i = 0; i < fi.size(); ++i) v = v != in(i);
            if (n.type(g) == GateType::Xnor) v = !v;
            break;
    }
    memo[g] = v ? 1 : 0;
    return v;
}

std::vector<bool> scalar_outputs(const Netlist& n, const std::vector<bool>& inputs,
                                 const std::vector<std::uint8_t>& key) {
    std::vector<bool> src(n.size(), false);
    for (std::size_t i = 0; i < n.inputs().size(); ++i) src[n.inputs()[i]] = inputs[i];
    for (std::size_t i = 0; i < n.keys().size(); ++i) src[n.keys()[i]] = key[i] != 0;
    std::vector<int> memo(n.size(), -1);
    std::vector<bool> out;
    for (GateId o : n.outputs()) out.push_back(scalar_eval(n, o, src, memo));
    return out;
}

// Brute-force detectability of a stuck-at fault by scalar simulation over
// every source assignment.
bool brute_detectable(const Netlist& n, Fault f) {
    std::vector<GateId> sources = n.inputs();
    sources.insert(sources.end(), n.keys().begin(), n.keys().end());
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << sources.size()); ++p) {
        std::vector<bool> src(n.size(), false);
        for (std::size_t i = 0; i < sources.size(); ++i) src[sources[i]] = (p >> i) & 1U;
        std::vector<int> good(n.size(), -1);
        std::vector<int> bad(n.size(), -1);
        bad[f.site] = f.stuck_at ? 1 : 0;
        for (GateId o : n.outputs()) {
            if (scalar_eval(n, o, src, good) != scalar_eval(n, o, src, bad)) return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("simulate: AND truth table") {
    const Netlist n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
    const PatternBlock out = simulate(n, exhaustive_patterns(2), {});
    CHECK(out.lanes(0)[0] == 0b1000);
    CHECK_THROWS_AS(simulate(n, exhaustive_patterns(1), {}), std::invalid_argument);
}

TEST_CASE("simulate agrees with the scalar evaluator") {
    lockbench::Rng rng(5);
    for (int t = 0; t < 1000; ++t) {
        const Netlist n = random_netlist({6, 3, 20 + rng.uniform(40), 4, rng.next()});
        std::vector<bool> in(n.inputs().size());
        PatternBlock block(n.inputs().size(), 1);
        for (std::size_t i = 0; i < in.size(); ++i) {
            in[i] = rng.coin();
            block.set(i, 0, in[i]);
        }
        const PatternBlock out = simulate(n, block, {});
        const auto ref = scalar_outputs(n, in, {});
        bool same = true;
        for (std::size_t o = 0; o < ref.size(); ++o) same = same && (out.get(o, 0) == ref[o]);
        CHECK(same);
    }
}

TEST_CASE("locked example: correct key restores, wrong XNOR bit inverts the net") {
    const Netlist orig = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\nx = NAND(a, b)\ny = OR(x, c)\n");
    const Netlist locked = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(k1)\nOUTPUT(y)\n"
        "x = NAND(a, b)\nkx = XOR(x, k1)\ny = OR(kx, c)\n");
    const std::vector<std::uint8_t> k0{0};
    const std::vector<std::uint8_t> k1{1};
    CHECK(equivalence_exhaustive(orig, locked, {}, k0));
    CHECK_FALSE(equivalence_exhaustive(orig, locked, {}, k1));

    // XNOR key-gate directly on the output: wrong bit inverts every pattern.
    const Netlist xn = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(k0)\nOUTPUT(y)\n"
                                   "x = AND(a, b)\ny = XNOR(x, k0)\n");
    const Netlist plain = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n");
    const PatternBlock all = exhaustive_patterns(2);
    const PatternBlock good = simulate(plain, all, {});
    const PatternBlock bad = simulate(xn, all, k0);
    CHECK((good.lanes(0)[0] ^ bad.lanes(0)[0]) == 0b1111);
    CHECK(equivalence_exhaustive(plain, xn, {}, k1));
    CHECK(random_mismatches(plain, xn, {}, k0, 1000, 3) == 1000);
    CHECK(random_mismatches(plain, xn, {}, k1, 1000, 3) == 0);
}

TEST_CASE("equivalence: self, port mismatch, input limit") {
    const Netlist n = random_netlist({10, 4, 60, 3, 11});
    CHECK(equivalence_exhaustive(n, n, {}, {}));
    const Netlist other = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n");
    CHECK_THROWS_AS(equivalence_exhaustive(n, other, {}, {}), std::invalid_argument);
    const Netlist wide = random_netlist({25, 2, 40, 3, 1});
    CHECK_THROWS_AS(equivalence_exhaustive(wide, wide, {}, {}), std::invalid_argument);
}

TEST_CASE("corruption") {
    const Netlist orig = parse_bench(
        "INPUT(a)\nINPUT(b)\nOUTPUT(y)\nOUTPUT(z)\ny = AND(a, b)\nz = OR(a, b)\n");
    const Netlist locked = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(k0)\nOUTPUT(y)\nOUTPUT(z)\n"
        "y_lk = AND(a, b)\ny = XOR(y_lk, k0)\nz = OR(a, b)\n");
    const KeyMapping m({{"k0", false}});
    const auto probe = corruption(orig, locked, m, 0, 4096, 9);
    CHECK(probe.hd == 0.0);
    CHECK(probe.oer == 0.0);
    const auto wrong = corruption(orig, locked, m, 1, 4096, 9);
    CHECK(wrong.hd == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(wrong.oer == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(corruption(orig, locked, m, 2, 100, 1), std::invalid_argument);
    for (std::size_t i = 0; i < wrong.hd_per_key.size(); ++i) {
        CHECK(wrong.hd_per_key[i] <= wrong.oer_per_key[i]);
    }
    CHECK(corruption_csv_row("c", "rll", 1, 9, wrong) == "c,rll,1,9,0.500000,1.000000");
}

TEST_CASE("fault coverage: AND gate and a redundant fault") {
    const Netlist n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
    const auto cov = fault_coverage(n, exhaustive_patterns(2), {24, false});
    CHECK(cov.test_coverage == 1.0);
    CHECK(cov.fault_coverage == 1.0);
    CHECK_THROWS_AS(fault_coverage(n, PatternBlock(2, 0)), std::invalid_argument);

    // y = OR(a, AND(a, b)) == a: the AND output stuck-at-0 is masked.
    const Netlist r = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\nt = AND(a, b)\ny = OR(a, t)\n");
    const auto rc = fault_coverage(r, exhaustive_patterns(2), {24, false});
    CHECK(rc.undetectable >= 1);
    CHECK(rc.test_coverage == 1.0);
    CHECK(rc.fault_coverage < 1.0);

    const CompiledNetlist c(r);
    const FaultSupport sup(c);
    CHECK(classify_exhaustive(c, sup, {*r.find("t"), false}, 24) == FaultClass::Undetectable);
    CHECK(classify_exhaustive(c, sup, {*r.find("t"), true}, 24) == FaultClass::Detectable);
    CHECK(classify_exhaustive(c, sup, {*r.find("t"), true}, 1) == FaultClass::Unknown);
}

TEST_CASE("exhaustive fault classification matches brute force") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Netlist n = random_netlist({6, 3, 30, 3, seed});
        const CompiledNetlist c(n);
        const FaultSupport sup(c);
        bool all_match = true;
        for (const Fault& f : all_faults(n)) {
            const bool expect = brute_detectable(n, f);
            const bool got = classify_exhaustive(c, sup, f, 24) == FaultClass::Detectable;
            all_match = all_match && (expect == got);
        }
        CHECK(all_match);
    }
}

TEST_CASE("fault impact ranks the wider cone higher and a dead net at zero") {
    const Netlist n = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\nOUTPUT(z)\n"
                                  "s = AND(a, b)\ny = XOR(s, c)\nz = XNOR(s, a)\n"
                                  "t = NOT(c)\ndead = AND(t, a)\nw = OR(dead, b)\n");
    const Netlist m = parse_bench(write_netlist(n, NetlistFormat::Bench));
    const auto impact = fault_impact(m, 512, 1);
    CHECK(impact[*m.find("s")] > impact[*m.find("t")]);
    CHECK(impact[*m.find("dead")] == 0);
}

TEST_CASE("original corpus circuits reach full test coverage") {
    const auto dir = lockbench::test::source_dir() + "/benchmarks/";
    for (const char* f : {"iscas85/c17.v", "iscas85/c432.v", "iscas85/c880.v"}) {
        CAPTURE(f);
        const Netlist n = read_netlist_file(dir + f);
        const auto cov = fault_coverage(n, random_patterns(n.inputs().size(), 10000, 1));
        CHECK(cov.test_coverage == 1.0);
    }
}
