#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lockbench/features/features.hpp"
#include "lockbench/locker/locker.hpp"
#include "lockbench/netcore/io.hpp"
#include "lockbench/netcore/structure.hpp"
#include "lockbench/resynth/resynth.hpp"
#include "test_support.hpp"

using namespace lockbench;
using namespace lockbench::netcore;
using namespace lockbench::features;

namespace {

// Independent Fisher ratio: per feature, two-pass means and variances in
// long double over explicitly split classes.
double brute_f1(const std::vector<std::vector<double>>& rows, const std::vector<bool>& labels) {
    long double best = 0;
    for (std::size_t f = 0; f < rows[0].size(); ++f) {
        std::vector<long double> a;
        std::vector<long double> b;
        for (std::size_t i = 0; i < rows.size(); ++i) (labels[i] ? a : b).push_back(rows[i][f]);
        auto mean = [](const std::vector<long double>& v) {
            long double s = 0;
            for (auto x : v) s += x;
            return s / static_cast<long double>(v.size());
        };
        auto var = [&](const std::vector<long double>& v) {
            const long double m = mean(v);
            long double s = 0;
            for (auto x : v) s += (x - m) * (x - m);
            return s / static_cast<long double>(v.size());
        };
        const long double num = (mean(a) - mean(b)) * (mean(a) - mean(b));
        const long double den = var(a) + var(b);
        if (num == 0) continue;
        if (den == 0) return INFINITY;
        best = std::max(best, num / den);
    }
    return static_cast<double>(best);
}

Netlist load(const char* rel) {
    return read_netlist_file(test::source_dir() + "/benchmarks/" + rel);
}

}  // namespace

TEST_CASE("key_gate follows inverters and rejects unused keys") {
    const Netlist n = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(k0)\nINPUT(k1)\nINPUT(k2)\nOUTPUT(y)\n"
                                  "OUTPUT(k2)\nnk = NOT(k1)\nx = XOR(a, k0)\ny = XNOR(x, nk, b)\n");
    CHECK(n.name(key_gate(n, *n.find("k0"))) == "x");
    CHECK(n.name(key_gate(n, *n.find("k1"))) == "y");
    CHECK_THROWS_AS(key_gate(n, *n.find("k2")), FeatureError);
}

TEST_CASE("extract_samples: sequences, padding and counts") {
    const Netlist n = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(k0)\nOUTPUT(y)\n"
                                  "x = XOR(a, k0)\ny = AND(x, b)\n");
    const auto s = extract_samples(n, {3});
    REQUIRE(s.size() == 1);
    CHECK(s[0].type_sequence[0] == GateType::Xor);
    CHECK(s[0].type_sequence[1] == GateType::And);
    CHECK(s[0].one_hot.size() == 3 * kVocabulary);

    const Netlist tiny = parse_bench("INPUT(a)\nINPUT(k0)\nOUTPUT(y)\ny = XOR(a, k0)\n");
    const auto t = extract_samples(tiny, {3});
    CHECK(t[0].type_sequence.size() == 2);  // y, then a
    std::size_t ones = 0;
    for (std::size_t i = 2 * kVocabulary; i < 3 * kVocabulary; ++i) ones += t[0].one_hot[i];
    CHECK(ones == 0);
    CHECK_THROWS_AS(extract_samples(parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n"), {3}),
                    FeatureError);

    const Netlist c880 = load("iscas85/c880.v");
    Rng rng(2);
    const auto rec = locker::lock_rll(c880, 64, locker::Palette::xnor(), rng);
    const auto all = extract_samples(rec.locked, kDefaultSubSizes);
    CHECK(all.size() == 192);
    bool encoding_ok = true;
    for (const auto& smp : all) {
        CHECK(smp.type_sequence.size() <= smp.sub_size);
        CHECK(smp.type_sequence[0] == rec.locked.type(key_gate(rec.locked, *rec.locked.find(smp.key_name))));
        for (std::size_t p = 0; p < smp.sub_size; ++p) {
            std::size_t row = 0;
            for (std::size_t v = 0; v < kVocabulary; ++v) row += smp.one_hot[p * kVocabulary + v];
            encoding_ok = encoding_ok && row == (p < smp.type_sequence.size() ? 1U : 0U);
        }
    }
    CHECK(encoding_ok);
    CHECK(dataset_csv({}) == dataset_csv({}));
}

TEST_CASE("label_changes") {
    const Netlist n = random_netlist({10, 4, 150, 3, 3});
    Rng rng(1);
    const auto rec = locker::lock_rll(n, 10, locker::Palette::xnor(), rng);
    const auto pre = extract_samples(rec.locked, kDefaultSubSizes);
    for (const auto& s : label_changes(pre, pre)) CHECK(*s.label == Label::Unchanged);
    const auto same = extract_samples(resynth::resynthesize(rec.locked, 0, 4), kDefaultSubSizes);
    for (const auto& s : label_changes(pre, same)) CHECK(*s.label == Label::Unchanged);

    const auto post = extract_samples(resynth::resynthesize(rec.locked, 2, 4), kDefaultSubSizes);
    const auto lab = label_changes(pre, post);
    std::size_t changed = 0;
    std::size_t unchanged = 0;
    for (const auto& s : lab) (*s.label == Label::Changed ? changed : unchanged)++;
    CHECK(changed + unchanged == 10 * 3);

    auto fewer = pre;
    fewer.pop_back();
    CHECK_THROWS_AS(label_changes(fewer, post), std::invalid_argument);
    auto renamed = post;
    renamed[0].key_name = "zz";
    CHECK_THROWS_AS(label_changes(pre, renamed), std::invalid_argument);

    // XOR turned into XNOR is Changed.
    const Netlist a = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(k0)\nOUTPUT(y)\nx = XOR(a, k0)\ny = AND(x, b)\n");
    const Netlist b = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(k0)\nOUTPUT(y)\nx = XNOR(a, k0)\ny = AND(x, b)\n");
    CHECK(*label_changes(extract_samples(a, {3}), extract_samples(b, {3}))[0].label == Label::Changed);
}

TEST_CASE("fisher_f1 kernel") {
    CHECK(fisher_f1({{0}, {2}, {4}, {6}}, {true, true, false, false}) == doctest::Approx(8.0));
    CHECK(fisher_f1({{1, 3}, {3, 1}, {1, 3}, {3, 1}}, {true, true, false, false}) == 0.0);
    CHECK(std::isinf(fisher_f1({{0}, {0}, {1}, {1}}, {true, true, false, false})));
    CHECK(f1_for_csv(INFINITY) == 1e9);
    CHECK(f1_for_csv(2.5) == 2.5);
    CHECK_THROWS_AS(fisher_f1({{0}, {1}}, {true, true}), std::invalid_argument);

    Rng rng(99);
    for (int t = 0; t < 100; ++t) {
        const std::size_t rows = 4 + rng.uniform(40);
        const std::size_t width = 1 + rng.uniform(8);
        std::vector<std::vector<double>> x(rows, std::vector<double>(width));
        std::vector<bool> y(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            y[i] = i < 2 ? i == 0 : rng.coin();
            for (auto& v : x[i]) v = t % 2 ? static_cast<double>(rng.uniform(2)) : rng.unit() * 10;
        }
        const double got = fisher_f1(x, y);
        const double want = brute_f1(x, y);
        if (std::isinf(want)) {
            CHECK(std::isinf(got));
        } else {
            CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
        }
        std::vector<bool> flipped(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) flipped[i] = !y[i];
        const double swapped = fisher_f1(x, flipped);
        CHECK((swapped == got || std::abs(swapped - got) <= 1e-12 * std::max(1.0, got)));
    }
}

TEST_CASE("build_dictionary") {
    const Netlist a = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(k0)\nINPUT(k1)\nOUTPUT(y)\nOUTPUT(z)\n"
                                  "x = XOR(a, k0)\ny = AND(x, b)\nw = XOR(c, k1)\nz = AND(w, b)\n");
    const Netlist b = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(k0)\nINPUT(k1)\nOUTPUT(y)\nOUTPUT(z)\n"
                                  "x = XNOR(a, k0)\ny = AND(x, b)\nw = XNOR(c, k1)\nz = AND(w, b)\n");
    const auto pa = extract_samples(a, {3});
    const auto none = build_dictionary(pa, pa);
    CHECK(none.empty());
    CHECK(none.unchanged_U.size() == 1);

    const auto d = build_dictionary(pa, extract_samples(b, {3}));
    REQUIRE(d.entries.size() == 1);
    const auto& [post, pres] = *d.entries.begin();
    CHECK(post[0] == GateType::Xnor);
    REQUIRE(pres.size() == 1);
    CHECK(pres.begin()->first[0] == GateType::Xor);
    CHECK(pres.begin()->second == 2);
    CHECK(d.unchanged_U.empty());

    const Netlist n = random_netlist({10, 4, 200, 3, 8});
    Rng rng(3);
    const auto rec = locker::lock_rll(n, 30, locker::Palette::cl_v3(), rng);
    const auto pre = extract_samples(rec.locked, {3});
    const auto dict = build_dictionary(pre, extract_samples(resynth::resynthesize(rec.locked, 2, 1), {3}));
    for (const auto& [seq, _] : dict.entries) CHECK(dict.unchanged_U.count(seq) == 0);
}

TEST_CASE("dataset CSV round trip") {
    const Netlist n = random_netlist({10, 4, 120, 3, 5});
    Rng rng(6);
    const auto rec = locker::lock_rll(n, 6, locker::Palette::xnor(), rng);
    const auto pre = extract_samples(rec.locked, kDefaultSubSizes);
    const auto post = label_changes(pre, extract_samples(resynth::resynthesize(rec.locked, 1, 2), kDefaultSubSizes));
    std::vector<DatasetRow> rows;
    for (const auto& s : post) rows.push_back({"rand", "i0", s});
    rows.push_back({"rand", "i1", pre[0]});
    const std::string text = dataset_csv(rows);
    CHECK(text.rfind(std::string(kNeighborhoodTag) + "\n" + kDatasetHeader + "\n", 0) == 0);
    std::istringstream in(text);
    const auto back = read_dataset(in);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].sample.type_sequence == rows[i].sample.type_sequence);
        CHECK(back[i].sample.one_hot == rows[i].sample.one_hot);
        CHECK(back[i].sample.label == rows[i].sample.label);
        CHECK(back[i].instance == rows[i].instance);
    }
    CHECK(dataset_csv(back) == text);
    std::istringstream bad(std::string(kDatasetHeader) + "\nx,y,k0,3,Changed,AND,0101\n");
    CHECK_THROWS_AS(read_dataset(bad), std::runtime_error);
}

TEST_CASE("resynthesis at effort 2 changes a visible share of X(N)OR key-gates") {
    const Netlist n = load("iscas85/c880.v");
    double changed = 0;
    double total = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const auto rec = locker::lock_rll(n, 64, locker::Palette::xnor(), rng);
        const auto lab = label_changes(extract_samples(rec.locked, {3}),
                                       extract_samples(resynth::resynthesize(rec.locked, 2, seed), {3}));
        for (const auto& s : lab) {
            changed += *s.label == Label::Changed;
            total += 1;
        }
    }
    MESSAGE("changed share: " << changed / total);
    CHECK(changed / total >= 0.10);
}
