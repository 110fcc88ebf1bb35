#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lockbench/attacks/redundancy.hpp"
#include "lockbench/attacks/sail.hpp"
#include "lockbench/attacks/sweep.hpp"
#include "lockbench/defense/unsail.hpp"
#include "lockbench/features/features.hpp"
#include "lockbench/harness/run.hpp"
#include "lockbench/harness/summary.hpp"
#include "lockbench/locker/locker.hpp"
#include "lockbench/netcore/io.hpp"
#include "lockbench/netcore/key_mapping.hpp"
#include "lockbench/resynth/resynth.hpp"
#include "lockbench/simeval/corruption.hpp"
#include "lockbench/util/rng.hpp"

namespace fs = std::filesystem;
using namespace lockbench;
using netcore::KeyMapping;
using netcore::Netlist;

namespace {

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        netcore::write_text_file(path, text);
    }
}

// Training triples <id>.pre.bench, <id>.post.bench, <id>.key.txt in id order.
std::vector<attacks::TrainingInstance> read_train_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("training directory not found: " + dir.string());
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        const std::string suffix = ".key.txt";
        if (name.size() > suffix.size() && name.ends_with(suffix)) {
            ids.push_back(name.substr(0, name.size() - suffix.size()));
        }
    }
    std::sort(ids.begin(), ids.end());
    if (ids.empty()) throw std::runtime_error("no <id>.key.txt files in " + dir.string());
    std::vector<attacks::TrainingInstance> out;
    for (const auto& id : ids) {
        attacks::TrainingInstance t;
        t.pre = netcore::read_netlist_file((dir / (id + ".pre.bench")).string());
        t.post = netcore::read_netlist_file((dir / (id + ".post.bench")).string());
        t.mapping = netcore::read_key_file((dir / (id + ".key.txt")).string());
        out.push_back(std::move(t));
    }
    return out;
}

void write_train_dir(const fs::path& dir, const std::vector<attacks::TrainingInstance>& corpus) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "t%03zu", i);
        netcore::write_netlist_file((dir / (std::string(id) + ".pre.bench")).string(), corpus[i].pre);
        netcore::write_netlist_file((dir / (std::string(id) + ".post.bench")).string(), corpus[i].post);
        netcore::write_key_file((dir / (std::string(id) + ".key.txt")).string(), corpus[i].mapping);
    }
}

struct RelockArgs {
    std::string scheme = "rll";
    std::string palette = "xnor";
    std::size_t K = 0;  // 0: the target's key count
    std::size_t instances = 19;
    std::size_t effort = 2;
    std::uint64_t seed = 0;

    void add_to(CLI::App* app) {
        app->add_option("--scheme", scheme, "relock scheme")->check(CLI::IsMember({"rll", "fll", "sll"}));
        app->add_option("--palette", palette, "key-gate palette")
            ->check(CLI::IsMember({"xnor", "cl_v1", "cl_v2", "cl_v3", "cl_v4"}));
        app->add_option("--relock-K", K, "keys per relock (default: the target's key count)");
        app->add_option("--instances", instances, "relocked training instances");
        app->add_option("--effort", effort, "resynthesis effort of the relocks");
        app->add_option("--seed", seed, "seed");
    }

    attacks::TrainingSetup setup(const Netlist& target) const {
        attacks::TrainingSetup s;
        s.scheme = locker::scheme_from_string(scheme);
        s.palette = locker::Palette::by_name(palette);
        s.K = K ? K : target.keys().size();
        s.n_instances = instances;
        s.effort = effort;
        s.seed = seed;
        return s;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logic locking benchmark: locking, resynthesis, learning attacks and the UNSAIL defense"};
    app.require_subcommand(1);

    // lock
    auto* lock = app.add_subcommand("lock", "Insert key-gates into a netlist");
    std::string l_scheme = "rll", l_palette = "xnor", l_in, l_out, l_key;
    std::size_t l_K = 0;
    std::uint64_t l_seed = 0;
    lock->add_option("--scheme", l_scheme)->check(CLI::IsMember({"rll", "fll", "sll"}));
    lock->add_option("--palette", l_palette)->check(CLI::IsMember({"xnor", "cl_v1", "cl_v2", "cl_v3", "cl_v4"}));
    lock->add_option("-K", l_K, "key bits")->required();
    lock->add_option("--seed", l_seed);
    lock->add_option("-i", l_in, "input netlist")->required()->check(CLI::ExistingFile);
    lock->add_option("-o", l_out, "locked netlist")->required();
    lock->add_option("--key-out", l_key, "key file")->required();

    // resynth
    auto* rs = app.add_subcommand("resynth", "Function-preserving randomized resynthesis");
    std::string r_in, r_out;
    std::size_t r_effort = 2;
    std::uint64_t r_seed = 0;
    rs->add_option("-i", r_in)->required()->check(CLI::ExistingFile);
    rs->add_option("-o", r_out)->required();
    rs->add_option("--effort", r_effort);
    rs->add_option("--seed", r_seed);

    // report
    auto* rep = app.add_subcommand("report", "Print gate counts, depth and literals as a CSV row");
    std::string p_in;
    bool p_header = false;
    rep->add_option("-i", p_in)->required()->check(CLI::ExistingFile);
    rep->add_flag("--header", p_header, "print the CSV header first");

    // unsail
    auto* un = app.add_subcommand("unsail", "Lock with the UNSAIL defense");
    std::string u_in, u_out, u_key, u_stats, u_scheme = "rll", u_palette = "xnor";
    std::size_t u_K = 0, u_effort = 2;
    std::uint64_t u_seed = 0;
    bool u_no_fill = false;
    un->add_option("-i", u_in)->required()->check(CLI::ExistingFile);
    un->add_option("-K", u_K, "total key bits (even)")->required();
    un->add_option("--scheme", u_scheme)->check(CLI::IsMember({"rll", "fll", "sll"}));
    un->add_option("--palette", u_palette)->check(CLI::IsMember({"xnor", "cl_v1", "cl_v2", "cl_v3", "cl_v4"}));
    un->add_option("--effort", u_effort);
    un->add_option("--seed", u_seed);
    un->add_option("-o", u_out)->required();
    un->add_option("--key-out", u_key)->required();
    un->add_option("--stats-out", u_stats);
    un->add_flag("--no-fill-up", u_no_fill, "leave unmatched second-phase keys out");

    // eval
    auto* ev = app.add_subcommand("eval", "Output corruption (HD, OER) under random wrong keys");
    std::string e_orig, e_locked, e_key, e_scheme = "rll";
    std::size_t e_keys = 100, e_patterns = 10000;
    std::uint64_t e_seed = 0;
    ev->add_option("--original", e_orig)->required()->check(CLI::ExistingFile);
    ev->add_option("--locked", e_locked)->required()->check(CLI::ExistingFile);
    ev->add_option("--key", e_key)->required()->check(CLI::ExistingFile);
    ev->add_option("--keys", e_keys, "wrong keys (0 probes the correct key)");
    ev->add_option("--patterns", e_patterns);
    ev->add_option("--seed", e_seed);
    ev->add_option("--scheme", e_scheme, "label for the CSV row");

    // extract
    auto* ex = app.add_subcommand("extract", "Key-gate neighborhood dataset CSV");
    std::string x_pre, x_post, x_out = "-", x_circuit, x_instance = "0";
    std::vector<std::size_t> x_subs = features::kDefaultSubSizes;
    ex->add_option("--pre", x_pre, "netlist before resynthesis")->required()->check(CLI::ExistingFile);
    ex->add_option("--post", x_post, "netlist after resynthesis (adds Changed labels)")->check(CLI::ExistingFile);
    ex->add_option("--sub", x_subs, "sub-sizes")->delimiter(',');
    ex->add_option("--circuit", x_circuit);
    ex->add_option("--instance", x_instance);
    ex->add_option("-o", x_out);

    // gen-train
    auto* gt = app.add_subcommand("gen-train", "Relock a target and write a training directory");
    std::string g_target, g_out;
    RelockArgs g_relock;
    gt->add_option("--target", g_target)->required()->check(CLI::ExistingFile);
    gt->add_option("--out", g_out)->required();
    g_relock.add_to(gt);

    // attack
    auto* at = app.add_subcommand("attack", "Attack a locked netlist and score it against the key");
    std::string a_kind, a_target, a_truth, a_train, a_report = "-";
    double a_margin = 0.0;
    std::size_t a_cone = 12, a_trees = 50, a_rf_sub = 6, a_sweep_effort = 1;
    std::vector<std::size_t> a_subs = features::kDefaultSubSizes;
    RelockArgs a_relock;
    at->add_option("kind", a_kind)->required()->check(CLI::IsMember({"sail", "sweep", "redundancy"}));
    at->add_option("--target", a_target)->required()->check(CLI::ExistingFile);
    at->add_option("--truth", a_truth)->required()->check(CLI::ExistingFile);
    at->add_option("--train-dir", a_train, "training triples; relocks of the target when absent");
    at->add_option("--margin", a_margin, "SWEEP abstention margin");
    at->add_option("--cone-limit", a_cone, "redundancy support limit");
    at->add_option("--trees", a_trees);
    at->add_option("--sub", a_subs, "SAIL sub-sizes")->delimiter(',');
    at->add_option("--rf-sub", a_rf_sub);
    at->add_option("--sweep-effort", a_sweep_effort);
    at->add_option("--report", a_report, "report CSV");
    a_relock.add_to(at);

    // run
    auto* run = app.add_subcommand("run", "Run an experiment plan");
    std::string n_plan, n_out;
    std::size_t n_workers = 1;
    std::vector<std::string> n_cells;
    run->add_option("--plan", n_plan)->required()->check(CLI::ExistingFile);
    run->add_option("--out", n_out, "run directory (default: the plan's out)");
    run->add_option("--workers", n_workers)->check(CLI::PositiveNumber);
    run->add_option("--cell", n_cells, "only these cell ids");

    // replay
    auto* rp = app.add_subcommand("replay", "Rerun cells recorded in a manifest");
    std::string q_manifest, q_out;
    std::size_t q_workers = 1;
    std::vector<std::string> q_cells;
    rp->add_option("manifest", q_manifest)->required()->check(CLI::ExistingFile);
    rp->add_option("--out", q_out)->required();
    rp->add_option("--workers", q_workers)->check(CLI::PositiveNumber);
    rp->add_option("--cell", q_cells, "only these cell ids");

    // summarize
    auto* sm = app.add_subcommand("summarize", "Aggregate a run directory");
    std::string s_dir;
    sm->add_option("run_dir", s_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*lock) {
            const Netlist n = netcore::read_netlist_file(l_in);
            Rng rng(l_seed);
            const auto rec = locker::lock(n, locker::scheme_from_string(l_scheme), l_K,
                                          locker::Palette::by_name(l_palette), rng);
            netcore::write_netlist_file(l_out, rec.locked);
            netcore::write_key_file(l_key, rec.mapping);
        } else if (*rs) {
            const Netlist n = netcore::read_netlist_file(r_in);
            netcore::write_netlist_file(r_out, resynth::resynthesize(n, r_effort, r_seed));
        } else if (*rep) {
            const Netlist n = netcore::read_netlist_file(p_in);
            if (p_header) std::cout << resynth::kReportCsvHeader << '\n';
            std::cout << resynth::report_csv_row(fs::path(p_in).stem().string(), resynth::report(n)) << '\n';
        } else if (*un) {
            const Netlist n = netcore::read_netlist_file(u_in);
            defense::UnsailConfig cfg;
            cfg.K = u_K;
            cfg.scheme = locker::scheme_from_string(u_scheme);
            cfg.palette = locker::Palette::by_name(u_palette);
            cfg.effort = u_effort;
            cfg.seed = u_seed;
            cfg.fill_up = !u_no_fill;
            const auto rec = defense::unsail_lock(n, cfg);
            netcore::write_netlist_file(u_out, rec.record.locked);
            netcore::write_key_file(u_key, rec.record.mapping);
            if (!u_stats.empty()) {
                netcore::write_text_file(u_stats,
                                         std::string(defense::kStatsCsvHeader) + "\n" + defense::stats_csv_row(rec) + "\n");
            }
        } else if (*ev) {
            const Netlist orig = netcore::read_netlist_file(e_orig);
            const Netlist locked = netcore::read_netlist_file(e_locked);
            const KeyMapping key = netcore::read_key_file(e_key);
            const auto s = simeval::corruption(orig, locked, key, e_keys, e_patterns, e_seed);
            std::cout << simeval::kCorruptionCsvHeader << '\n'
                      << simeval::corruption_csv_row(fs::path(e_orig).stem().string(), e_scheme, key.size(), e_seed, s)
                      << '\n';
        } else if (*ex) {
            const Netlist pre = netcore::read_netlist_file(x_pre);
            auto samples = features::extract_samples(pre, x_subs);
            if (!x_post.empty()) {
                samples = features::label_changes(samples,
                                                  features::extract_samples(netcore::read_netlist_file(x_post), x_subs));
            }
            std::vector<features::DatasetRow> rows;
            const std::string circuit = x_circuit.empty() ? fs::path(x_pre).stem().string() : x_circuit;
            for (auto& s : samples) rows.push_back({circuit, x_instance, std::move(s)});
            write_output(x_out, features::dataset_csv(rows));
        } else if (*gt) {
            const Netlist target = netcore::read_netlist_file(g_target);
            write_train_dir(g_out, attacks::gen_training_data(target, g_relock.setup(target)));
        } else if (*at) {
            const Netlist target = netcore::read_netlist_file(a_target);
            const KeyMapping truth = netcore::read_key_file(a_truth);
            auto corpus = [&] {
                return a_train.empty() ? attacks::gen_training_data(target, a_relock.setup(target))
                                       : read_train_dir(a_train);
            };
            attacks::AttackReport report;
            if (a_kind == "sail") {
                attacks::SailOptions opt;
                opt.sub_sizes = a_subs;
                if (std::find(opt.sub_sizes.begin(), opt.sub_sizes.end(), a_rf_sub) == opt.sub_sizes.end()) {
                    opt.sub_sizes.push_back(a_rf_sub);
                    std::sort(opt.sub_sizes.begin(), opt.sub_sizes.end());
                }
                opt.rf_sub = a_rf_sub;
                opt.n_trees = a_trees;
                opt.palette = locker::Palette::by_name(a_relock.palette);
                opt.seed = a_relock.seed;
                std::vector<attacks::SamplePair> pairs;
                for (const auto& inst : corpus()) {
                    auto p = attacks::make_pairs(inst, opt.sub_sizes);
                    pairs.insert(pairs.end(), p.begin(), p.end());
                }
                report = attacks::sail_attack(target, attacks::train_sail(pairs, opt), truth, opt);
            } else if (a_kind == "sweep") {
                std::vector<attacks::TrainingLock> training;
                for (auto& inst : corpus()) training.emplace_back(std::move(inst.post), std::move(inst.mapping));
                report = attacks::sweep_attack(training, target, truth, a_margin,
                                               {a_sweep_effort, derive_seed(a_relock.seed, 0x5e)});
            } else {
                report = attacks::redundancy_attack(target, truth, a_cone);
            }
            write_output(a_report, attacks::report_csv(report, truth));
            const auto s = attacks::score(report, truth);
            std::cerr << a_kind << ": accuracy " << s.accuracy << " (" << s.correct << "/" << s.total
                      << " correct, " << s.decided << " decided)\n";
        } else if (*run) {
            auto plan = harness::read_plan_file(n_plan);
            harness::RunOptions opt;
            opt.out = n_out.empty() ? plan.out : fs::path(n_out);
            if (opt.out.empty()) throw std::runtime_error("no output directory (--out or out = in the plan)");
            opt.workers = n_workers;
            opt.log = &std::cerr;
            opt.only = n_cells;
            const auto st = harness::run_plan(plan, opt);
            std::cerr << "completed " << st.completed << ", skipped " << st.skipped << ", failed " << st.failed
                      << '\n';
            return st.failed ? 3 : 0;
        } else if (*rp) {
            harness::RunOptions opt;
            opt.out = q_out;
            opt.workers = q_workers;
            opt.log = &std::cerr;
            opt.only = q_cells;
            const auto st = harness::replay(q_manifest, opt);
            std::cerr << "completed " << st.completed << ", skipped " << st.skipped << ", failed " << st.failed
                      << '\n';
            return st.failed ? 3 : 0;
        } else if (*sm) {
            const auto s = harness::summarize(s_dir);
            std::cout << s.table;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
