#include <chrono>
#include <map>
#include <set>

#include "doctest.h"
#include "lockbench/netcore/editor.hpp"
#include "lockbench/netcore/io.hpp"
#include "lockbench/netcore/key_mapping.hpp"
#include "lockbench/netcore/structure.hpp"
#include "test_support.hpp"

using namespace lockbench::netcore;

namespace {

// Canonical form used as an isomorphism oracle: every signal is described by
// its type and the sorted-free ordered list of its fan-in names, keyed by name.
std::map<std::string, std::pair<std::string, std::vector<std::string>>> canon(const Netlist& n) {
    std::map<std::string, std::pair<std::string, std::vector<std::string>>> out;
    for (GateId g = 0; g < n.size(); ++g) {
        std::vector<std::string> fi;
        for (GateId f : n.fanins(g)) fi.push_back(n.name(f));
        const std::string key = (n.type(g) == GateType::Output ? "@out:" : "") + n.name(g);
        out[key] = {std::string(to_string(n.type(g))), fi};
    }
    return out;
}

ParseError::Kind parse_error_kind(const std::string& text, bool verilog = false) {
    try {
        if (verilog) {
            (void)parse_structural_verilog(text);
        } else {
            (void)parse_bench(text);
        }
    } catch (const ParseError& e) {
        return e.kind();
    }
    FAIL("expected a parse error");
    return ParseError::Kind::Syntax;
}

}  // namespace

TEST_CASE("bench: smallest circuit") {
    const Netlist n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
    CHECK(n.inputs().size() == 2);
    CHECK(n.outputs().size() == 1);
    CHECK(n.logic_gate_count() == 1);
    CHECK(n.type(*n.find("y")) == GateType::And);
    CHECK(n.keys().empty());
}

TEST_CASE("bench: errors") {
    CHECK(parse_error_kind("INPUT(a)\nOUTPUT(y)\ny = AND(a, z)\n") ==
          ParseError::Kind::UndeclaredSignal);
    CHECK(parse_error_kind("INPUT(a)\nINPUT(b)\nOUTPUT(g6)\n"
                           "g1 = NAND(a, g2)\ng2 = NAND(g1, b)\ng3 = NAND(a, b)\n"
                           "g4 = NAND(g3, a)\ng5 = NAND(g4, b)\ng6 = NAND(g5, g1)\n") ==
          ParseError::Kind::Cycle);
    CHECK(parse_error_kind("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\ny = BUF(a)\n") ==
          ParseError::Kind::DuplicateDefinition);
    CHECK(parse_error_kind("INPUT(a)\nOUTPUT(y)\ny = FOO(a)\n") == ParseError::Kind::Syntax);
    CHECK(parse_error_kind("INPUT(a)\nOUTPUT(y)\ny = DFF(a)\n") == ParseError::Kind::Unsupported);
    CHECK(parse_error_kind("INPUT(a)\nOUTPUT(y)\ny = AND(a)\n") == ParseError::Kind::Syntax);

    try {
        (void)parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, zz)\n");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 12);
    }
}

TEST_CASE("bench: comments, case-insensitive keywords, key-inputs") {
    const Netlist n = parse_bench(
        "# header\nINPUT(a)  # trailing\ninput(k0)\nOUTPUT(y)\ny = xor(a, k0)\n");
    CHECK(n.inputs().size() == 1);
    REQUIRE(n.keys().size() == 1);
    CHECK(n.name(n.keys()[0]) == "k0");
    const std::string text = write_netlist(n, NetlistFormat::Bench);
    CHECK(text.find("INPUT(k0)") != std::string::npos);
}

TEST_CASE("verilog: primitives, assign, escaped names, errors") {
    const Netlist n =
        parse_structural_verilog("module m(a,b,y); input a,b; output y; and g0(y,a,b); endmodule");
    CHECK(n.logic_gate_count() == 1);
    CHECK(n.module_name() == "m");

    const Netlist e = parse_structural_verilog(
        "// c\nmodule t(\\B[0] , c, y, z);\n input \\B[0] ;\n input c;\n output y, z;\n"
        " wire w;\n nand NAND2_1 (w, \\B[0] , c);\n assign y = ~w;\n assign z = 1'b0;\nendmodule\n");
    CHECK(e.find("B[0]").has_value());
    CHECK(e.type(*e.find("y")) == GateType::Not);
    CHECK(e.type(*e.find("z")) == GateType::Const0);
    const Netlist again = parse_structural_verilog(write_netlist(e, NetlistFormat::Verilog));
    CHECK(canon(again) == canon(e));

    CHECK(parse_error_kind("module m(a,y); input a; output y; reg r; always @(a) r = a; endmodule",
                           true) == ParseError::Kind::Unsupported);
    CHECK(parse_error_kind("module m(a,y); input a; output y; and g(y, a, q); endmodule", true) ==
          ParseError::Kind::UndeclaredSignal);
    CHECK(parse_error_kind("module m(a,y); input [3:0] a; output y; endmodule", true) ==
          ParseError::Kind::Unsupported);
}

TEST_CASE("write: one AND line") {
    const Netlist n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
    const std::string text = write_netlist(n, NetlistFormat::Bench);
    std::size_t count = 0;
    for (std::size_t p = text.find("= AND("); p != std::string::npos; p = text.find("= AND(", p + 1))
        ++count;
    CHECK(count == 1);
}

TEST_CASE("write/parse round trip on random netlists") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Netlist n = random_netlist({8, 4, 50, 3, seed});
        const Netlist b = parse_bench(write_netlist(n, NetlistFormat::Bench));
        const Netlist v = parse_structural_verilog(write_netlist(n, NetlistFormat::Verilog));
        CHECK(canon(b) == canon(n));
        CHECK(canon(v) == canon(n));
        CHECK(structurally_equal(b, n));
        // A second trip is a fixed point.
        CHECK(write_netlist(b, NetlistFormat::Bench) ==
              write_netlist(parse_bench(write_netlist(b, NetlistFormat::Bench)),
                            NetlistFormat::Bench));
    }
}

TEST_CASE("topological order") {
    const Netlist chain = parse_bench("INPUT(a)\nOUTPUT(y)\nn1 = NOT(a)\ny = NOT(n1)\n");
    std::vector<std::string> names;
    for (GateId g : topological_order(chain)) names.push_back(chain.name(g));
    CHECK(names == std::vector<std::string>{"a", "n1", "y", "y"});
    CHECK(chain.type(topological_order(chain).back()) == GateType::Output);

    const Netlist diamond =
        parse_bench("INPUT(a)\nOUTPUT(g3)\ng1 = NOT(a)\ng2 = BUF(a)\ng3 = AND(g1, g2)\n");
    const auto order = topological_order(diamond);
    CHECK(diamond.name(order.front()) == "a");
    CHECK(diamond.type(order.back()) == GateType::Output);
    CHECK(diamond.name(order[order.size() - 2]) == "g3");

    const Netlist big = random_netlist({32, 16, 1000, 4, 7});
    const auto o = topological_order(big);
    std::vector<std::size_t> pos(big.size());
    for (std::size_t i = 0; i < o.size(); ++i) pos[o[i]] = i;
    CHECK(o.size() == big.size());
    bool ok = true;
    for (GateId g = 0; g < big.size(); ++g) {
        for (GateId f : big.fanins(g)) ok = ok && pos[f] < pos[g];
    }
    CHECK(ok);
}

TEST_CASE("validation rejects structural defects") {
    using K = ValidationError::Kind;
    auto kind_of = [](std::vector<Gate> gates, std::vector<GateId> in, std::vector<GateId> out) {
        try {
            Netlist n(std::move(gates), std::move(in), std::move(out), {});
        } catch (const ValidationError& e) {
            return std::optional<K>(e.kind());
        }
        return std::optional<K>();
    };
    CHECK(kind_of({{GateType::Input, {}, "a"}, {GateType::Not, {5}, "n"}}, {0}, {}) ==
          K::DanglingFanin);
    CHECK(kind_of({{GateType::Input, {}, "a"}, {GateType::And, {0}, "n"}}, {0}, {}) == K::Arity);
    CHECK(kind_of({{GateType::Input, {}, "a"}, {GateType::Not, {0}, "a"}}, {0}, {}) ==
          K::DuplicateName);
    CHECK(kind_of({{GateType::Input, {}, "a"}, {GateType::And, {0, 2}, "x"},
                   {GateType::And, {0, 1}, "y"}},
                  {0}, {}) == K::Cycle);
    CHECK(!kind_of({{GateType::Input, {}, "a"}, {GateType::Not, {0}, "n"},
                    {GateType::Output, {1}, "n"}},
                   {0}, {2}));
}

TEST_CASE("neighborhood") {
    // k0 XOR key-gate feeding an AND with one sibling input.
    const Netlist n = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(s)\nINPUT(k0)\nOUTPUT(y)\n"
        "x = NAND(a, b)\nkg = XOR(x, k0)\ny = AND(kg, s)\n");
    const GateId kg = *n.find("kg");
    CHECK(neighborhood(n, kg, 1) == std::vector<GateId>{kg});
    CHECK(neighborhood(n, kg, 3) == std::vector<GateId>{kg, *n.find("y"), *n.find("s")});
    CHECK(neighborhood(n, kg, 6) == neighborhood(n, kg, 6));
    CHECK_THROWS_AS(neighborhood(n, 999, 3), std::out_of_range);
    CHECK_THROWS_AS(neighborhood(n, kg, 0), std::invalid_argument);

    // Seed drives only a PO: expansion goes through fan-ins.
    const GateId y = *n.find("y");
    const auto r = neighborhood(n, y, 5);
    CHECK(r.size() <= 5);
    CHECK(r == std::vector<GateId>{y, *n.find("s"), *n.find("kg"), *n.find("x"), *n.find("a")});

    // Prefix property across sizes.
    const Netlist big = random_netlist({16, 8, 300, 3, 3});
    for (GateId g = 16; g < 300; g += 7) {
        const auto six = neighborhood(big, g, 6);
        const auto three = neighborhood(big, g, 3);
        REQUIRE(three.size() <= six.size());
        CHECK(std::equal(three.begin(), three.end(), six.begin()));
    }
}

TEST_CASE("editor: edits and port repair") {
    const Netlist n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\nOUTPUT(z)\n"
                                  "y = AND(a, b)\nz = NOT(y)\n");
    NetlistEditor e(n);
    const GateId y = *e.find("y");
    const GateId k = e.add_key_input("k0");
    const GateId kg = e.add_gate(GateType::Xor, {y, k});
    e.replace_uses(y, kg);
    const Netlist locked = e.freeze();
    CHECK(locked.keys().size() == 1);
    // The key-gate took over the port name.
    CHECK(locked.type(*locked.find("y")) == GateType::Xor);
    CHECK(locked.type(*locked.find("z")) == GateType::Not);
    CHECK(locked.name(locked.fanins(*locked.find("z"))[0]) == "y");

    // Driver that already owns a port gets a BUF for the second one.
    NetlistEditor e2(n);
    e2.replace_uses(*e2.find("z"), *e2.find("y"));
    e2.remove_all_dead();
    const Netlist merged = e2.freeze();
    CHECK(merged.type(*merged.find("z")) == GateType::Buf);
    CHECK(merged.outputs().size() == 2);

    // Output driven directly by an input gets a BUF.
    NetlistEditor e3(parse_bench("INPUT(a)\nOUTPUT(y)\nn = NOT(a)\ny = NOT(n)\n"));
    e3.replace_uses(*e3.find("y"), *e3.find("a"));
    e3.remove_all_dead();
    const Netlist wired = e3.freeze();
    CHECK(wired.logic_gate_count() == 1);
    CHECK(wired.type(*wired.find("y")) == GateType::Buf);
}

TEST_CASE("key file round trip") {
    KeyMapping m({{"k0", true}, {"k1", false}, {"k2", true}});
    const std::string text = write_key_file(m);
    CHECK(text == "k0=1\nk1=0\nk2=1\n");
    CHECK(parse_key_file("# c\nk0=1\n\nk1 = 0\nk2=1") == m);
    CHECK_THROWS_AS(parse_key_file("k0=2\n"), ParseError);
    CHECK_THROWS_AS(parse_key_file("k0=1\nk0=0\n"), ParseError);
}

TEST_CASE("corpus files parse, and the largest one parses in under a second") {
    const auto dir = lockbench::test::source_dir() + "/benchmarks/";
    for (const char* f : {"iscas85/c17.v", "iscas85/c432.v", "iscas85/c880.v", "iscas85/c7552.v",
                          "epfl/int2float.v", "epfl/ctrl.v", "epfl/cavlc.v",
                          "itc99/b20_C.bench"}) {
        CAPTURE(f);
        const Netlist n = read_netlist_file(dir + f);
        CHECK(n.logic_gate_count() > 0);
        const Netlist again = parse_bench(write_netlist(n, NetlistFormat::Bench));
        CHECK(canon(again) == canon(n));
    }
    const auto t0 = std::chrono::steady_clock::now();
    const Netlist big = read_netlist_file(dir + "itc99/b17_Cg.v");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(big.logic_gate_count() > 10000);
    CHECK(secs < 1.0);
}

TEST_CASE("repeated fan-ins count once in fan-out lists and ordering") {
    const Netlist n = parse_bench("INPUT(a)\nOUTPUT(y)\nt = AND(a, a)\ny = XOR(t, t, a)\n");
    CHECK(n.fanouts(*n.find("a")).size() == 2);
    CHECK(n.fanouts(*n.find("t")).size() == 1);
    NetlistEditor e(n);
    CHECK(e.topo_order().size() == n.size());
}
