#include "lockbench/harness/plan.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lockbench/util/rng.hpp"

namespace lockbench::harness {

std::string_view to_string(Defense d) noexcept { return d == Defense::None ? "none" : "unsail"; }

Defense defense_from_string(std::string_view s) {
    if (s == "none" || s == "rll") return Defense::None;
    if (s == "unsail") return Defense::Unsail;
    throw std::invalid_argument("unknown defense '" + std::string(s) + "'");
}

std::string_view to_string(Attack a) noexcept {
    switch (a) {
        case Attack::Sail: return "sail";
        case Attack::Sweep: return "sweep";
        case Attack::Redundancy: return "redundancy";
    }
    return "?";
}

Attack attack_from_string(std::string_view s) {
    if (s == "sail") return Attack::Sail;
    if (s == "sweep") return Attack::Sweep;
    if (s == "redundancy") return Attack::Redundancy;
    throw std::invalid_argument("unknown attack '" + std::string(s) + "'");
}

bool ExperimentPlan::has(Attack a) const { return std::find(attacks.begin(), attacks.end(), a) != attacks.end(); }

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Drops a '#' comment that is not inside double quotes.
std::string_view strip_comment(std::string_view s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return std::string(s.substr(1, s.size() - 2));
    if (s.find('"') != std::string_view::npos) throw std::invalid_argument("unbalanced quote");
    return std::string(s);
}

// A value is a scalar, a bracketed list, or a bare comma-separated list.
std::vector<std::string> items(std::string_view v) {
    v = trim(v);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') throw std::invalid_argument("unterminated list");
        v = trim(v.substr(1, v.size() - 2));
    }
    std::vector<std::string> out;
    if (v.empty()) return out;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i <= v.size(); ++i) {
        if (i < v.size() && v[i] == '"') quoted = !quoted;
        if (i == v.size() || (v[i] == ',' && !quoted)) {
            const std::string item = unquote(v.substr(start, i - start));
            if (item.empty()) throw std::invalid_argument("empty list item");
            out.push_back(item);
            start = i + 1;
        }
    }
    return out;
}

std::string scalar(std::string_view v) {
    const auto xs = items(v);
    if (xs.size() != 1) throw std::invalid_argument("expected a single value");
    return xs[0];
}

std::uint64_t to_uint(const std::string& s) {
    std::uint64_t x = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
    return x;
}

double to_double(const std::string& s) {
    double x = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument("expected a number, got '" + s + "'");
    return x;
}

template <typename T, typename F>
std::vector<T> map_items(std::string_view v, F f) {
    std::vector<T> out;
    for (const auto& s : items(v)) out.push_back(f(s));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::string join(const std::vector<std::string>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
    return s + "]";
}

template <typename T, typename F>
std::string join_map(const std::vector<T>& xs, F f) {
    std::vector<std::string> s;
    for (const auto& x : xs) s.push_back(f(x));
    return join(s);
}

std::string number(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

ExperimentPlan parse_plan(std::string_view text, const std::filesystem::path& base_dir) {
    ExperimentPlan p;
    using Setter = std::function<void(std::string_view)>;
    auto size = [](std::size_t& dst) { return [&dst](std::string_view v) { dst = to_uint(scalar(v)); }; };
    auto sizes = [](std::vector<std::size_t>& dst) {
        return [&dst](std::string_view v) {
            dst = map_items<std::size_t>(v, [](const std::string& s) { return static_cast<std::size_t>(to_uint(s)); });
        };
    };
    const std::map<std::string, Setter> setters = {
        {"seed", [&](std::string_view v) { p.seed = to_uint(scalar(v)); }},
        {"seeds", size(p.seeds)},
        {"effort", size(p.effort)},
        {"out", [&](std::string_view v) { p.out = scalar(v); }},
        {"corpus.circuits",
         [&](std::string_view v) {
             p.circuits = map_items<std::filesystem::path>(v, [&](const std::string& s) {
                 const std::filesystem::path path(s);
                 return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
             });
         }},
        {"lock.schemes",
         [&](std::string_view v) { p.schemes = map_items<locker::Scheme>(v, locker::scheme_from_string); }},
        {"lock.palettes",
         [&](std::string_view v) {
             p.palettes = map_items<std::string>(v, [](const std::string& s) {
                 locker::Palette::by_name(s);
                 return s;
             });
         }},
        {"lock.K", sizes(p.key_sizes)},
        {"lock.defenses", [&](std::string_view v) { p.defenses = map_items<Defense>(v, defense_from_string); }},
        {"attacks.run", [&](std::string_view v) { p.attacks = map_items<Attack>(v, attack_from_string); }},
        {"attacks.sub_sizes", sizes(p.sub_sizes)},
        {"attacks.rf_sub", size(p.rf_sub)},
        {"attacks.ml1_sub", size(p.ml1_sub)},
        {"attacks.trees", size(p.trees)},
        {"attacks.sweep_effort", size(p.sweep_effort)},
        {"attacks.margin", [&](std::string_view v) { p.margin = to_double(scalar(v)); }},
        {"attacks.cone_limit", size(p.cone_limit)},
        {"eval.hd_keys", size(p.hd_keys)},
        {"eval.hd_patterns", size(p.hd_patterns)},
        {"eval.fault_patterns", size(p.fault_patterns)},
        {"eval.fault_exhaustive_limit", size(p.fault_exhaustive_limit)},
    };
    const std::set<std::string> sections = {"", "plan", "corpus", "lock", "attacks", "eval"};

    std::string section;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
        auto fail = [&](const std::string& what) {
            throw PlanError("plan line " + std::to_string(line_no) + ": " + what);
        };
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!sections.count(section)) fail("unknown section [" + section + "]");
            if (section == "plan") section.clear();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected key = value");
        const std::string key = std::string(trim(line.substr(0, eq)));
        const std::string full = section.empty() ? key : section + "." + key;
        const auto it = setters.find(full);
        if (it == setters.end()) fail("unknown key '" + full + "'");
        if (!seen.insert(full).second) fail("duplicate key '" + full + "'");
        try {
            it->second(line.substr(eq + 1));
        } catch (const std::invalid_argument& e) {
            fail(full + ": " + e.what());
        }
    }
    if (p.circuits.empty()) throw PlanError("plan lists no circuits ([corpus] circuits)");
    if (p.seeds < 2) throw PlanError("seeds must be at least 2 (one instance is held out)");
    if (std::find(p.sub_sizes.begin(), p.sub_sizes.end(), p.rf_sub) == p.sub_sizes.end()) {
        p.sub_sizes.push_back(p.rf_sub);
    }
    std::sort(p.sub_sizes.begin(), p.sub_sizes.end());
    p.sub_sizes.erase(std::unique(p.sub_sizes.begin(), p.sub_sizes.end()), p.sub_sizes.end());
    return p;
}

ExperimentPlan read_plan_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw PlanError("cannot read plan file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_plan(ss.str(), path.parent_path());
}

std::string plan_text(const ExperimentPlan& p) {
    auto quoted = [](const std::filesystem::path& x) { return '"' + x.string() + '"'; };
    auto str = [](auto x) { return std::string(to_string(x)); };
    auto num = [](std::size_t x) { return std::to_string(x); };
    std::ostringstream os;
    os << "seed = " << p.seed << "\nseeds = " << p.seeds << "\neffort = " << p.effort << '\n';
    if (!p.out.empty()) os << "out = " << quoted(p.out) << '\n';
    os << "\n[corpus]\ncircuits = " << join_map(p.circuits, quoted) << '\n';
    os << "\n[lock]\nschemes = " << join_map(p.schemes, str) << "\npalettes = " << join(p.palettes)
       << "\nK = " << join_map(p.key_sizes, num) << "\ndefenses = " << join_map(p.defenses, str) << '\n';
    os << "\n[attacks]\nrun = " << join_map(p.attacks, str) << "\nsub_sizes = " << join_map(p.sub_sizes, num)
       << "\nrf_sub = " << p.rf_sub << "\nml1_sub = " << p.ml1_sub << "\ntrees = " << p.trees
       << "\nsweep_effort = " << p.sweep_effort << "\nmargin = " << number(p.margin)
       << "\ncone_limit = " << p.cone_limit << '\n';
    os << "\n[eval]\nhd_keys = " << p.hd_keys << "\nhd_patterns = " << p.hd_patterns
       << "\nfault_patterns = " << p.fault_patterns << "\nfault_exhaustive_limit = " << p.fault_exhaustive_limit
       << '\n';
    return os.str();
}

std::vector<CellSpec> expand(const ExperimentPlan& p) {
    std::vector<CellSpec> cells;
    for (const auto& circuit : p.circuits) {
        for (const auto scheme : p.schemes) {
            for (const auto& palette : p.palettes) {
                for (const std::size_t K : p.key_sizes) {
                    for (const Defense d : p.defenses) {
                        CellSpec c;
                        c.index = cells.size();
                        c.circuit = circuit;
                        c.circuit_name = circuit.stem().string();
                        c.scheme = scheme;
                        c.palette = palette;
                        c.K = K;
                        c.defense = d;
                        c.seed = derive_seed(p.seed, c.index);
                        for (std::size_t j = 0; j < p.seeds; ++j) c.instance_seeds.push_back(derive_seed(c.seed, j));
                        c.holdout = static_cast<std::size_t>(derive_seed(c.seed, 0x401d) % p.seeds);
                        char idx[16];
                        std::snprintf(idx, sizeof idx, "%03zu", c.index);
                        c.id = std::string(idx) + "_" + c.circuit_name + "_" + std::string(locker::to_string(scheme)) +
                               "_" + palette + "_k" + std::to_string(K) + "_" + std::string(to_string(d));
                        cells.push_back(std::move(c));
                    }
                }
            }
        }
    }
    return cells;
}

}  // namespace lockbench::harness
