#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lockbench/harness/plan.hpp"
#include "lockbench/harness/run.hpp"
#include "lockbench/harness/summary.hpp"
#include "lockbench/netcore/io.hpp"
#include "lockbench/util/rng.hpp"
#include "test_support.hpp"

using namespace lockbench;
using namespace lockbench::harness;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        const auto t = std::chrono::steady_clock::now().time_since_epoch().count();
        path = fs::temp_directory_path() / ("lockbench_" + tag + "_" + std::to_string(t));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string circuit(const char* name) { return test::source_dir() + "/benchmarks/iscas85/" + name; }

std::string slurp(const fs::path& p) { return netcore::read_text_file(p.string()); }

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

std::size_t count_files(const fs::path& dir, const std::string& suffix) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) n += e.path().filename().string().ends_with(suffix);
    return n;
}

// A small, fast plan: c432, K=8, three instances, SAIL only.
ExperimentPlan small_plan() {
    ExperimentPlan p;
    p.circuits = {circuit("c432.v")};
    p.key_sizes = {8};
    p.defenses = {Defense::None};
    p.seeds = 3;
    p.seed = 5;
    p.attacks = {Attack::Sail};
    p.hd_keys = 20;
    p.hd_patterns = 500;
    p.fault_patterns = 256;
    return p;
}

}  // namespace

TEST_CASE("plan grammar: sections, lists, quoting and comments") {
    const std::string text = R"(# desk plan
seed = 9
seeds = 4   # per cell
effort = 3
out = "runs/x"

[corpus]
circuits = ["a.v", "/abs/b.bench"]

[lock]
schemes = rll, fll
palettes = [xnor, "cl_v3"]
K = [8, 16]
defenses = none, unsail

[attacks]
run = [sail, redundancy]
sub_sizes = [5, 3]
rf_sub = 6
ml1_sub = 3
trees = 10
margin = 0.5
cone_limit = 10

[eval]
hd_keys = 7
hd_patterns = 100
)";
    const auto p = parse_plan(text, "/base");
    CHECK(p.seed == 9);
    CHECK(p.seeds == 4);
    CHECK(p.effort == 3);
    CHECK(p.out == fs::path("runs/x"));
    REQUIRE(p.circuits.size() == 2);
    CHECK(p.circuits[0] == fs::path("/base/a.v"));
    CHECK(p.circuits[1] == fs::path("/abs/b.bench"));
    CHECK(p.schemes == std::vector<locker::Scheme>{locker::Scheme::Rll, locker::Scheme::Fll});
    CHECK(p.palettes == std::vector<std::string>{"xnor", "cl_v3"});
    CHECK(p.key_sizes == std::vector<std::size_t>{8, 16});
    CHECK(p.defenses == std::vector<Defense>{Defense::None, Defense::Unsail});
    CHECK(p.has(Attack::Sail));
    CHECK(!p.has(Attack::Sweep));
    CHECK(p.sub_sizes == std::vector<std::size_t>{3, 5, 6});  // rf_sub added, sorted
    CHECK(p.trees == 10);
    CHECK(p.margin == 0.5);
    CHECK(p.cone_limit == 10);
    CHECK(p.hd_keys == 7);
    CHECK(p.hd_patterns == 100);
    CHECK(p.fault_patterns == 1024);

    // Canonical text parses back to the same plan.
    const auto q = parse_plan(plan_text(p));
    CHECK(plan_text(q) == plan_text(p));
    CHECK(q.circuits == p.circuits);
    CHECK(q.margin == p.margin);
}

TEST_CASE("plan errors name the line") {
    auto error_of = [](const std::string& text) {
        try {
            parse_plan(text);
        } catch (const PlanError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    const std::string corpus = "[corpus]\ncircuits = a.v\n";
    CHECK(error_of(corpus + "[lock]\ncolour = red\n").find("plan line 4: unknown key 'lock.colour'") == 0);
    CHECK(error_of(corpus + "[extra]\n").find("plan line 3: unknown section") == 0);
    CHECK(error_of("seeds = 3\nseeds = 4\n" + corpus).find("plan line 2: duplicate key 'seeds'") == 0);
    CHECK(error_of("seeds = many\n" + corpus).find("plan line 1: seeds") == 0);
    CHECK(error_of(corpus + "seeds = 3\n").find("plan line 3: unknown key 'corpus.seeds'") == 0);
    CHECK(error_of(corpus + "[lock]\npalettes = plaid\n").find("plan line 4") == 0);
    CHECK(error_of(corpus + "[lock]\ndefenses = [none\n").find("plan line 4") == 0);
    CHECK(error_of(corpus + "just words\n").find("plan line 3: expected key = value") == 0);
    CHECK(error_of("seeds = 3\n").find("no circuits") != std::string::npos);
    CHECK(error_of("seeds = 1\n" + corpus).find("at least 2") != std::string::npos);
    CHECK_THROWS_AS(read_plan_file("/nonexistent/plan.toml"), PlanError);
}

TEST_CASE("expand orders cells with circuits outermost and derives seeds") {
    ExperimentPlan p;
    p.circuits = {"x/c1.v", "x/c2.v"};
    p.palettes = {"xnor", "cl_v1"};
    p.key_sizes = {64, 128};
    p.seed = 42;
    const auto cells = expand(p);
    REQUIRE(cells.size() == 2 * 2 * 2 * 2);
    CHECK(cells[0].id == "000_c1_rll_xnor_k64_none");
    CHECK(cells[1].id == "001_c1_rll_xnor_k64_unsail");
    CHECK(cells[2].id == "002_c1_rll_xnor_k128_none");
    CHECK(cells[15].id == "015_c2_rll_cl_v1_k128_unsail");
    std::set<std::uint64_t> seeds;
    for (const auto& c : cells) {
        CHECK(c.seed == derive_seed(42, c.index));
        REQUIRE(c.instance_seeds.size() == 20);
        CHECK(c.instance_seeds[7] == derive_seed(c.seed, 7));
        CHECK(c.holdout < 20);
        seeds.insert(c.seed);
    }
    CHECK(seeds.size() == cells.size());

    // Appending a circuit leaves the existing cells untouched.
    auto q = p;
    q.circuits.push_back("x/c3.v");
    const auto more = expand(q);
    REQUIRE(more.size() == 24);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        CHECK(more[i].id == cells[i].id);
        CHECK(more[i].seed == cells[i].seed);
        CHECK(more[i].holdout == cells[i].holdout);
    }
}

TEST_CASE("a plan shaped like the published study locks 2800 RLL instances") {
    ExperimentPlan p;
    for (const char* c : {"c432", "c499", "c880", "c1355", "c1908", "c2670", "c3540"}) {
        p.circuits.push_back(std::string(c) + ".v");
    }
    p.palettes = {"xnor", "cl_v1", "cl_v2", "cl_v3", "cl_v4"};
    p.key_sizes = {64, 128};
    p.seeds = 20;
    std::size_t instances = 0;
    for (const auto& c : expand(p)) instances += c.instance_seeds.size() * (c.scheme == locker::Scheme::Rll);
    CHECK(instances == 2800);
}

TEST_CASE("one cell with three seeds gives three locked files, one report and one row") {
    TempDir tmp("onecell");
    const auto st = run_plan(small_plan(), {tmp.path, 1, nullptr, {}});
    CHECK(st.completed == 1);
    CHECK(st.failed == 0);
    const auto cells = expand(small_plan());
    const fs::path dir = tmp.path / "cells" / cells[0].id;
    CHECK(count_files(dir / "instances", ".bench") == 3);
    CHECK(count_files(dir / "instances", ".key.txt") == 3);
    CHECK(count_files(dir, ".csv") == 2);  // sail.csv and row.csv
    CHECK(fs::exists(dir / "sail.csv"));
    CHECK(!fs::exists(dir / "error.txt"));
    const std::string summary = slurp(tmp.path / "summary.csv");
    CHECK(count_lines(summary) == 2);
    CHECK(summary.find(summary_header() + "\n") == 0);
    CHECK(summary.find(cells[0].id + ",c432,rll,xnor,8,none,") != std::string::npos);

    const auto rows = load_rows(tmp.path);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].at("status") == "ok");
    CHECK(rows[0].at("hd") != "");
    CHECK(rows[0].at("sweep") == "");  // not in the attack set
    CHECK(std::stod(rows[0].at("sail")) >= 0.0);
    CHECK(std::stod(rows[0].at("oer")) <= 1.0);
    CHECK(std::stod(rows[0].at("test_cov")) <= 1.0);

    // The manifest carries the plan and every seed.
    const std::string manifest = slurp(tmp.path / "manifest.json");
    CHECK(manifest.find(std::to_string(cells[0].seed)) != std::string::npos);
    CHECK(manifest.find("lockbench replay") != std::string::npos);
}

TEST_CASE("rerunning a plan skips completed cells; replay reproduces the summary") {
    TempDir tmp("resume");
    auto plan = small_plan();
    plan.palettes = {"xnor", "cl_v2"};
    plan.attacks = {Attack::Sail, Attack::Redundancy};
    const fs::path run = tmp.path / "run";
    const auto first = run_plan(plan, {run, 2, nullptr, {}});
    CHECK(first.completed == 2);
    const std::string summary = slurp(run / "summary.csv");
    const auto cells = expand(plan);
    const std::string timing = slurp(run / "cells" / cells[1].id / "timing.txt");

    const auto again = run_plan(plan, {run, 1, nullptr, {}});
    CHECK(again.skipped == 2);
    CHECK(again.completed == 0);
    CHECK(slurp(run / "summary.csv") == summary);
    CHECK(slurp(run / "cells" / cells[1].id / "timing.txt") == timing);

    // A cell without its completion marker is recomputed.
    fs::remove(run / "cells" / cells[0].id / "done");
    const auto partial = run_plan(plan, {run, 1, nullptr, {}});
    CHECK(partial.completed == 1);
    CHECK(partial.skipped == 1);
    CHECK(slurp(run / "summary.csv") == summary);

    const fs::path rep = tmp.path / "replay";
    const auto r = replay(run / "manifest.json", {rep, 1, nullptr, {}});
    CHECK(r.completed == 2);
    CHECK(slurp(rep / "summary.csv") == summary);

    // A single row replays from its manifest entry alone.
    const fs::path one = tmp.path / "one";
    replay(run / "manifest.json", {one, 1, nullptr, {cells[1].id}});
    CHECK(slurp(one / "cells" / cells[1].id / "row.csv") == slurp(run / "cells" / cells[1].id / "row.csv"));
    CHECK(!fs::exists(one / "cells" / cells[0].id));
}

TEST_CASE("a failing cell is recorded and the plan continues") {
    TempDir tmp("failure");
    auto plan = small_plan();
    plan.circuits = {circuit("c17.v"), circuit("c432.v")};  // c17 has too few sites for K=32
    plan.key_sizes = {32};
    const auto st = run_plan(plan, {tmp.path, 1, nullptr, {}});
    CHECK(st.failed == 1);
    CHECK(st.completed == 1);
    const auto cells = expand(plan);
    CHECK(fs::exists(tmp.path / "cells" / cells[0].id / "error.txt"));
    CHECK(!fs::exists(tmp.path / "cells" / cells[0].id / "done"));
    const auto rows = load_rows(tmp.path);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].at("status") == "failed");
    CHECK(rows[1].at("status") == "ok");
    CHECK(count_lines(slurp(tmp.path / "summary.csv")) == 3);

    // Failed cells are retried on the next run.
    const auto again = run_plan(plan, {tmp.path, 1, nullptr, {}});
    CHECK(again.failed == 1);
    CHECK(again.skipped == 1);
}

TEST_CASE("missing corpus files are rejected before any cell runs") {
    TempDir tmp("missing");
    auto plan = small_plan();
    plan.circuits.push_back(tmp.path / "absent.bench");
    CHECK_THROWS(run_plan(plan, {tmp.path / "run", 1, nullptr, {}}));
    CHECK(!fs::exists(tmp.path / "run" / "cells"));
}

TEST_CASE("summarize averages cells and reports deltas in percentage points") {
    TempDir tmp("summary");
    auto write_cell = [&](std::size_t index, const std::string& circuit_name, const std::string& palette,
                          Defense d, double sail, bool ok = true) {
        CellResult r;
        r.cell.index = index;
        char idx[16];
        std::snprintf(idx, sizeof idx, "%03zu", index);
        r.cell.id = std::string(idx) + "_" + circuit_name;
        r.cell.circuit_name = circuit_name;
        r.cell.palette = palette;
        r.cell.K = 64;
        r.cell.defense = d;
        r.ok = ok;
        if (ok) r.metrics = {{"sail", sail}, {"f1", 2.0 * sail}};
        const fs::path dir = tmp.path / "cells" / r.cell.id;
        fs::create_directories(dir);
        netcore::write_text_file((dir / "row.csv").string(), summary_header() + "\n" + summary_row(r) + "\n");
    };

    CHECK_THROWS_AS(summarize(tmp.path), std::runtime_error);

    write_cell(0, "a", "xnor", Defense::None, 0.8);
    {
        const auto s = summarize(tmp.path);
        CHECK(s.csv.find("palette,*,*,xnor,*,none,1,0.800000,") != std::string::npos);
        CHECK(fs::exists(tmp.path / "aggregate.csv"));
    }

    write_cell(1, "b", "xnor", Defense::None, 0.6);
    write_cell(2, "a", "xnor", Defense::Unsail, 0.5);
    write_cell(3, "c", "xnor", Defense::None, 0.0, false);
    const auto s = summarize(tmp.path);
    CHECK(s.csv.find(std::string(kAggregateHeaderPrefix) + ",sail,") == 0);
    CHECK(s.csv.find("cell,a,rll,xnor,64,none,1,0.800000,") != std::string::npos);
    CHECK(s.csv.find("cell,c,rll,xnor,64,none,0,,") != std::string::npos);
    // Two cells 0.8 and 0.6 average to 0.7; the failed cell is left out.
    CHECK(s.csv.find("palette,*,*,xnor,*,none,2,0.700000,") != std::string::npos);
    CHECK(s.csv.find("palette,*,*,xnor,*,unsail,1,0.500000,") != std::string::npos);
    // Fractions become percentage points; f1 stays a raw difference.
    const auto delta = s.csv.find("delta,a,rll,xnor,64,unsail-none,2,-30.000000,");
    CHECK(delta != std::string::npos);
    CHECK(s.csv.find("palette_delta,*,*,xnor,*,unsail-none,1,-30.000000,") != std::string::npos);
    std::istringstream in(s.csv.substr(delta));
    std::string line;
    std::getline(in, line);
    CHECK(line.find(",-0.600000,") != std::string::npos);
    CHECK(s.table.find("-30.00pp") != std::string::npos);
    CHECK(slurp(tmp.path / "aggregate.csv") == s.csv);
}
