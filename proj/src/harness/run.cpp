#include "lockbench/harness/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "lockbench/attacks/redundancy.hpp"
#include "lockbench/attacks/sail.hpp"
#include "lockbench/attacks/sweep.hpp"
#include "lockbench/defense/unsail.hpp"
#include "lockbench/netcore/io.hpp"
#include "lockbench/resynth/resynth.hpp"
#include "lockbench/simeval/corruption.hpp"
#include "lockbench/simeval/faults.hpp"
#include "lockbench/simeval/patterns.hpp"

namespace lockbench::harness {

namespace fs = std::filesystem;
using features::SubgraphSample;
using netcore::KeyMapping;
using netcore::Netlist;

std::string summary_header() {
    std::string h = "cell,circuit,scheme,palette,K,defense,seed,holdout,status";
    for (const char* c : kMetricColumns) h += std::string(",") + c;
    return h;
}

std::string summary_row(const CellResult& r) {
    const auto& c = r.cell;
    std::ostringstream os;
    os << c.id << ',' << c.circuit_name << ',' << locker::to_string(c.scheme) << ',' << c.palette << ',' << c.K
       << ',' << to_string(c.defense) << ',' << c.seed << ',' << c.holdout << ',' << (r.ok ? "ok" : "failed");
    for (const char* col : kMetricColumns) {
        os << ',';
        const auto it = r.metrics.find(col);
        if (it == r.metrics.end()) continue;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", it->second);
        os << buf;
    }
    return os.str();
}

namespace {

struct Instance {
    Netlist target;  ///< the released netlist
    KeyMapping mapping;
    Netlist view;    ///< netlist the adversary-view labels start from
    std::vector<SubgraphSample> pre;
    std::vector<SubgraphSample> post;
    std::optional<defense::InjectionStats> stats;
};

// No-defense lock of one instance seed: the unsynthesized lock and its release.
std::pair<locker::LockRecord, Netlist> plain_lock(const Netlist& n, const CellSpec& c, const locker::Palette& p,
                                                  std::size_t effort, std::uint64_t s) {
    Rng rng(derive_seed(s, 1));
    auto rec = locker::lock(n, c.scheme, c.K, p, rng);
    Netlist post = resynth::resynthesize(rec.locked, effort, derive_seed(s, 2));
    return {std::move(rec), std::move(post)};
}

Instance make_instance(const Netlist& n, const ExperimentPlan& plan, const CellSpec& c, const locker::Palette& p,
                       std::uint64_t s) {
    Instance inst;
    if (c.defense == Defense::None) {
        auto [rec, post] = plain_lock(n, c, p, plan.effort, s);
        inst.pre = features::extract_samples(rec.locked, plan.sub_sizes);
        inst.view = std::move(rec.locked);
        inst.target = std::move(post);
        inst.mapping = std::move(rec.mapping);
    } else {
        defense::UnsailConfig cfg;
        cfg.K = c.K;
        cfg.scheme = c.scheme;
        cfg.palette = p;
        cfg.effort = plan.effort;
        cfg.seed = s;
        auto r = defense::unsail_lock(n, cfg);
        inst.pre = defense::pre_samples(r, plan.sub_sizes);
        inst.stats = defense::injection_stats(r);
        inst.target = r.record.locked;
        inst.view = r.record.locked;
        inst.mapping = std::move(r.record.mapping);
    }
    inst.post = features::extract_samples(inst.target, plan.sub_sizes);
    return inst;
}

std::vector<SubgraphSample> at_sub(const std::vector<attacks::SamplePair>& pairs, std::size_t sub) {
    std::vector<SubgraphSample> out;
    for (const auto& p : pairs) {
        if (p.post.sub_size == sub) out.push_back(p.post);
    }
    return out;
}

void write_report(const fs::path& path, const attacks::AttackReport& r, const KeyMapping& truth) {
    netcore::write_text_file(path.string(), attacks::report_csv(r, truth));
}

}  // namespace

CellResult run_cell(const ExperimentPlan& plan, const CellSpec& c, const fs::path& dir) {
    const Netlist n = netcore::read_netlist_file(c.circuit.string());
    const auto palette = locker::Palette::by_name(c.palette);
    fs::create_directories(dir / "instances");

    std::vector<Instance> insts;
    for (std::size_t j = 0; j < c.instance_seeds.size(); ++j) {
        insts.push_back(make_instance(n, plan, c, palette, c.instance_seeds[j]));
        const std::string stem = (dir / "instances" / ("i" + std::to_string(j))).string();
        netcore::write_netlist_file(stem + ".bench", insts.back().target);
        netcore::write_key_file(stem + ".key.txt", insts.back().mapping);
    }
    const std::size_t h = c.holdout;
    const Instance& held = insts.at(h);
    const std::uint64_t s_h = c.instance_seeds[h];

    CellResult r;
    r.cell = c;
    auto& m = r.metrics;

    attacks::SailOptions sail;
    sail.sub_sizes = plan.sub_sizes;
    sail.rf_sub = plan.rf_sub;
    sail.n_trees = plan.trees;
    sail.palette = palette;
    sail.seed = derive_seed(c.seed, 0x5a1);

    const auto truth_pairs = attacks::make_pairs(held.pre, held.post, held.mapping);
    const auto truth_ml1 = at_sub(truth_pairs, plan.ml1_sub);
    if (!truth_ml1.empty()) {
        const auto changed = std::count_if(truth_ml1.begin(), truth_ml1.end(),
                                           [](const SubgraphSample& s) { return *s.label == features::Label::Changed; });
        m["changed"] = static_cast<double>(changed) / static_cast<double>(truth_ml1.size());
    }
    m["decode"] = attacks::decode_attack(held.target, held.mapping, sail).accuracy;
    {
        const auto base = plain_lock(n, c, palette, 0, s_h);
        m["baseline"] = attacks::decode_attack(base.first.locked, base.first.mapping, sail).accuracy;
    }

    if (plan.has(Attack::Sail)) {
        std::vector<attacks::SamplePair> pairs;
        for (std::size_t j = 0; j < insts.size(); ++j) {
            if (j == h) continue;
            auto p = attacks::make_pairs(insts[j].pre, insts[j].post, insts[j].mapping);
            pairs.insert(pairs.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
        }
        attacks::SailOptions ml1 = sail;
        ml1.rf_sub = plan.ml1_sub;
        m["ml1"] = attacks::ml1_accuracy(attacks::train_sail(pairs, ml1), truth_ml1);
        const auto models = attacks::train_sail(pairs, sail);
        const auto rep = attacks::sail_attack(held.target, models, held.mapping, sail);
        m["sail"] = rep.accuracy;
        m["ml2"] = *rep.ml2_accuracy;
        write_report(dir / "sail.csv", rep, held.mapping);
    }

    if (plan.has(Attack::Sweep)) {
        // The attacker reproduces the known locking algorithm, not the defense.
        std::vector<attacks::TrainingLock> training;
        for (std::size_t j = 0; j < insts.size(); ++j) {
            if (j == h) continue;
            if (c.defense == Defense::None) {
                training.emplace_back(insts[j].target, insts[j].mapping);
            } else {
                auto [rec, post] = plain_lock(n, c, palette, plan.effort, c.instance_seeds[j]);
                training.emplace_back(std::move(post), std::move(rec.mapping));
            }
        }
        const attacks::SweepOptions so{plan.sweep_effort, derive_seed(c.seed, 0x5e)};
        const auto model = attacks::train_sweep(training, so);
        const auto rep = attacks::sweep_attack(model, held.target, held.mapping, plan.margin, so);
        m["sweep"] = rep.accuracy;
        write_report(dir / "sweep.csv", rep, held.mapping);
    }

    if (plan.has(Attack::Redundancy)) {
        const auto rep = attacks::redundancy_attack(held.target, held.mapping, plan.cone_limit);
        m["redundancy"] = rep.accuracy;
        write_report(dir / "redundancy.csv", rep, held.mapping);
    }

    {
        const Netlist adv = resynth::resynthesize(held.view, plan.effort, derive_seed(s_h, 0xf1));
        const auto labeled = defense::truth_labels(held.view, adv, {plan.ml1_sub});
        try {
            m["f1"] = features::f1_for_csv(features::fisher_f1(labeled));
        } catch (const std::invalid_argument&) {
            // a single label class has no Fisher ratio
        }
    }

    if (plan.hd_keys > 0 && plan.hd_patterns > 0) {
        std::size_t keys = plan.hd_keys;
        if (c.K < 63) keys = std::min<std::size_t>(keys, (std::size_t{1} << c.K) - 1);
        const auto cs = simeval::corruption(n, held.target, held.mapping, keys, plan.hd_patterns, derive_seed(s_h, 0xc0));
        m["hd"] = cs.hd;
        m["oer"] = cs.oer;
    }

    if (plan.fault_patterns > 0) {
        const auto& t = held.target;
        const auto pats = simeval::random_patterns(t.inputs().size() + t.keys().size(), plan.fault_patterns,
                                                   derive_seed(s_h, 0xfc));
        simeval::FaultCoverageOptions fo;
        fo.exhaustive_limit = plan.fault_exhaustive_limit;
        const auto fc = simeval::fault_coverage(t, pats, fo);
        m["fault_cov"] = fc.fault_coverage;
        m["test_cov"] = fc.test_coverage;
    }

    if (held.stats) {
        m["matched"] = static_cast<double>(held.stats->matched);
        m["u_targeted"] = static_cast<double>(held.stats->u_targeted);
        m["fill_up"] = static_cast<double>(held.stats->fill_up);
    }
    r.ok = true;
    return r;
}

namespace {

using nlohmann::json;

json cell_json(const CellSpec& c) {
    return {{"index", c.index},
            {"id", c.id},
            {"circuit", c.circuit.string()},
            {"scheme", std::string(locker::to_string(c.scheme))},
            {"palette", c.palette},
            {"K", c.K},
            {"defense", std::string(to_string(c.defense))},
            {"seed", c.seed},
            {"instance_seeds", c.instance_seeds},
            {"holdout", c.holdout}};
}

CellSpec cell_from_json(const json& j) {
    CellSpec c;
    c.index = j.at("index").get<std::size_t>();
    c.id = j.at("id").get<std::string>();
    c.circuit = j.at("circuit").get<std::string>();
    c.circuit_name = c.circuit.stem().string();
    c.scheme = locker::scheme_from_string(j.at("scheme").get<std::string>());
    c.palette = j.at("palette").get<std::string>();
    c.K = j.at("K").get<std::size_t>();
    c.defense = defense_from_string(j.at("defense").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.instance_seeds = j.at("instance_seeds").get<std::vector<std::uint64_t>>();
    c.holdout = j.at("holdout").get<std::size_t>();
    return c;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

RunStats run_cells(const ExperimentPlan& plan, const std::vector<CellSpec>& all, const RunOptions& opt) {
    std::vector<CellSpec> cells;
    for (const auto& c : all) {
        if (opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), c.id) != opt.only.end()) {
            cells.push_back(c);
        }
    }
    if (!opt.only.empty() && cells.size() != opt.only.size()) {
        throw std::invalid_argument("unknown cell id requested");
    }
    fs::create_directories(opt.out / "cells");

    RunStats stats;
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto log = [&](const std::string& msg) {
        if (!opt.log) return;
        std::lock_guard<std::mutex> lock(mu);
        *opt.log << msg << std::endl;
    };
    auto work = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const CellSpec& c = cells[i];
            const fs::path dir = opt.out / "cells" / c.id;
            const fs::path done = dir / "done";
            if (fs::exists(done) && read_text(done) == std::to_string(c.seed) + "\n" && fs::exists(dir / "row.csv")) {
                std::lock_guard<std::mutex> lock(mu);
                ++stats.skipped;
                continue;
            }
            fs::remove(done);
            fs::remove(dir / "error.txt");
            log("cell " + c.id + " started");
            const auto t0 = std::chrono::steady_clock::now();
            CellResult r;
            try {
                r = run_cell(plan, c, dir);
            } catch (const std::exception& e) {
                r = CellResult{};
                r.cell = c;
                r.error = e.what();
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            fs::create_directories(dir);
            netcore::write_text_file((dir / "row.csv").string(), summary_header() + "\n" + summary_row(r) + "\n");
            netcore::write_text_file((dir / "timing.txt").string(), std::to_string(secs) + "\n");
            if (r.ok) {
                netcore::write_text_file(done.string(), std::to_string(c.seed) + "\n");
                log("cell " + c.id + " done in " + std::to_string(secs) + " s");
            } else {
                netcore::write_text_file((dir / "error.txt").string(), r.error + "\n");
                log("cell " + c.id + " FAILED: " + r.error);
            }
            std::lock_guard<std::mutex> lock(mu);
            ++(r.ok ? stats.completed : stats.failed);
        }
    };
    const std::size_t n_workers = std::max<std::size_t>(1, std::min(opt.workers, cells.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::string summary = summary_header() + "\n";
    for (const auto& c : all) {
        const fs::path row = opt.out / "cells" / c.id / "row.csv";
        if (!fs::exists(row)) continue;
        std::istringstream in(read_text(row));
        std::string line;
        std::getline(in, line);
        std::getline(in, line);
        summary += line + "\n";
    }
    netcore::write_text_file((opt.out / "summary.csv").string(), summary);
    return stats;
}

}  // namespace

RunStats run_plan(const ExperimentPlan& plan_in, const RunOptions& opt) {
    ExperimentPlan plan = plan_in;
    for (auto& c : plan.circuits) {
        if (!fs::exists(c)) throw std::runtime_error("missing corpus file " + c.string());
        c = fs::absolute(c).lexically_normal();
    }
    plan.out = opt.out;
    const auto cells = expand(plan);
    fs::create_directories(opt.out);
    json manifest;
    manifest["plan"] = plan_text(plan);
    manifest["replay"] = "lockbench replay " + (opt.out / "manifest.json").string() + " --out <dir> [--cell <id>]";
    manifest["cells"] = json::array();
    for (const auto& c : cells) manifest["cells"].push_back(cell_json(c));
    netcore::write_text_file((opt.out / "manifest.json").string(), manifest.dump(2) + "\n");
    return run_cells(plan, cells, opt);
}

RunStats replay(const fs::path& manifest_path, const RunOptions& opt) {
    const json manifest = json::parse(read_text(manifest_path));
    ExperimentPlan plan = parse_plan(manifest.at("plan").get<std::string>());
    std::vector<CellSpec> cells;
    for (const auto& j : manifest.at("cells")) cells.push_back(cell_from_json(j));
    for (const auto& c : cells) {
        if (!fs::exists(c.circuit)) throw std::runtime_error("missing corpus file " + c.circuit.string());
    }
    plan.out = opt.out;
    fs::create_directories(opt.out);
    netcore::write_text_file((opt.out / "manifest.json").string(), manifest.dump(2) + "\n");
    return run_cells(plan, cells, opt);
}

std::vector<std::map<std::string, std::string>> load_rows(const fs::path& run_dir) {
    std::vector<fs::path> files;
    if (fs::is_directory(run_dir / "cells")) {
        for (const auto& e : fs::directory_iterator(run_dir / "cells")) {
            if (fs::exists(e.path() / "row.csv")) files.push_back(e.path() / "row.csv");
        }
    }
    if (files.empty()) throw std::runtime_error("no cell results in " + run_dir.string());
    auto index = [](const fs::path& f) { return std::stoull(f.parent_path().filename().string()); };
    std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) { return index(a) < index(b); });
    std::vector<std::map<std::string, std::string>> rows;
    for (const auto& f : files) {
        std::istringstream in(read_text(f));
        std::string header;
        std::string line;
        std::getline(in, header);
        std::getline(in, line);
        const auto keys = split(header);
        const auto values = split(line);
        if (keys.size() != values.size()) throw std::runtime_error("malformed row file " + f.string());
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < keys.size(); ++i) row[keys[i]] = values[i];
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace lockbench::harness
