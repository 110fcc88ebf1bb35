#include "lockbench/harness/summary.hpp"

#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "lockbench/harness/run.hpp"
#include "lockbench/netcore/io.hpp"

namespace lockbench::harness {

namespace {

using Row = std::map<std::string, std::string>;

bool is_fraction(std::string_view col) {
    return col != "f1" && col != "matched" && col != "u_targeted" && col != "fill_up";
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

std::optional<double> value(const Row& r, const char* col) {
    const auto it = r.find(col);
    if (it == r.end() || it->second.empty()) return std::nullopt;
    return std::stod(it->second);
}

struct Mean {
    double sum = 0;
    std::size_t n = 0;
    void add(double x) {
        sum += x;
        ++n;
    }
    std::string str() const { return n ? fmt(sum / static_cast<double>(n)) : ""; }
    std::optional<double> get() const {
        return n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
    }
};

using Means = std::map<std::string, Mean>;

// Group keys in first-appearance order.
template <typename V>
struct Ordered {
    std::vector<std::string> keys;
    std::map<std::string, V> values;
    V& operator[](const std::string& k) {
        if (!values.count(k)) keys.push_back(k);
        return values[k];
    }
};

std::string line(const std::string& kind, const std::string& circuit, const std::string& scheme,
                 const std::string& palette, const std::string& K, const std::string& defense, std::size_t cells,
                 const Means& m) {
    std::string s = kind + "," + circuit + "," + scheme + "," + palette + "," + K + "," + defense + "," +
                    std::to_string(cells);
    for (const char* col : kMetricColumns) {
        s += ",";
        const auto it = m.find(col);
        if (it != m.end()) s += it->second.str();
    }
    return s + "\n";
}

}  // namespace

Summary summarize(const std::filesystem::path& run_dir) {
    const auto rows = load_rows(run_dir);
    Summary out;
    std::string& csv = out.csv;
    csv = kAggregateHeaderPrefix;
    for (const char* col : kMetricColumns) csv += std::string(",") + col;
    csv += "\n";

    struct Group {
        std::string palette;
        std::string defense;
        std::size_t cells = 0;
        Means m;
    };
    Ordered<Group> by_palette;
    struct Pair {
        const Row* none = nullptr;
        const Row* unsail = nullptr;
    };
    Ordered<Pair> pairs;

    for (const auto& r : rows) {
        const bool ok = r.at("status") == "ok";
        Means m;
        for (const char* col : kMetricColumns) {
            if (const auto v = value(r, col)) m[col].add(*v);
        }
        // Recorded values are written back verbatim.
        std::string s = "cell," + r.at("circuit") + "," + r.at("scheme") + "," + r.at("palette") + "," + r.at("K") +
                        "," + r.at("defense") + "," + (ok ? "1" : "0");
        for (const char* col : kMetricColumns) s += "," + r.at(col);
        csv += s + "\n";
        if (!ok) continue;

        auto& g = by_palette[r.at("palette") + "|" + r.at("defense")];
        g.palette = r.at("palette");
        g.defense = r.at("defense");
        ++g.cells;
        for (const auto& [col, mean] : m) g.m[col].add(mean.sum);

        auto& p = pairs[r.at("circuit") + "|" + r.at("scheme") + "|" + r.at("palette") + "|" + r.at("K")];
        (r.at("defense") == "unsail" ? p.unsail : p.none) = &r;
    }

    for (const auto& k : by_palette.keys) {
        const auto& g = by_palette.values[k];
        csv += line("palette", "*", "*", g.palette, "*", g.defense, g.cells, g.m);
    }

    Ordered<Group> palette_delta;
    for (const auto& k : pairs.keys) {
        const auto& p = pairs.values[k];
        if (!p.none || !p.unsail) continue;
        Means d;
        for (const char* col : kMetricColumns) {
            const auto a = value(*p.none, col);
            const auto b = value(*p.unsail, col);
            if (a && b) d[col].add((*b - *a) * (is_fraction(col) ? 100.0 : 1.0));
        }
        const Row& r = *p.none;
        csv += line("delta", r.at("circuit"), r.at("scheme"), r.at("palette"), r.at("K"), "unsail-none", 2, d);
        auto& g = palette_delta[r.at("palette")];
        g.palette = r.at("palette");
        g.defense = "unsail-none";
        ++g.cells;
        for (const auto& [col, mean] : d) g.m[col].add(mean.sum);
    }
    for (const auto& k : palette_delta.keys) {
        const auto& g = palette_delta.values[k];
        csv += line("palette_delta", "*", "*", g.palette, "*", g.defense, g.cells, g.m);
    }

    const std::vector<const char*> shown = {"sail", "ml1", "sweep", "redundancy", "f1", "oer", "test_cov"};
    std::string& t = out.table;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-8s %-12s %5s", "palette", "defense", "cells");
    t += buf;
    for (const char* col : shown) {
        std::snprintf(buf, sizeof buf, " %10s", col);
        t += buf;
    }
    t += "\n";
    auto table_row = [&](const Group& g, bool delta) {
        std::snprintf(buf, sizeof buf, "%-8s %-12s %5zu", g.palette.c_str(), g.defense.c_str(), g.cells);
        t += buf;
        for (const char* col : shown) {
            const auto it = g.m.find(col);
            const auto v = it == g.m.end() ? std::nullopt : it->second.get();
            if (!v) {
                std::snprintf(buf, sizeof buf, " %10s", "-");
            } else if (delta && is_fraction(col)) {
                std::snprintf(buf, sizeof buf, " %+8.2fpp", *v);
            } else {
                std::snprintf(buf, sizeof buf, " %10.4f", *v);
            }
            t += buf;
        }
        t += "\n";
    };
    for (const auto& k : by_palette.keys) table_row(by_palette.values[k], false);
    for (const auto& k : palette_delta.keys) table_row(palette_delta.values[k], true);

    netcore::write_text_file((run_dir / "aggregate.csv").string(), csv);
    return out;
}

}  // namespace lockbench::harness
