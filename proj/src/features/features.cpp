#include "lockbench/features/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "lockbench/netcore/structure.hpp"

namespace lockbench::features {

std::string_view to_string(Label l) noexcept {
    return l == Label::Changed ? "Changed" : "Unchanged";
}

Label label_from_string(std::string_view s) {
    if (s == "Changed") return Label::Changed;
    if (s == "Unchanged") return Label::Unchanged;
    throw std::invalid_argument("unknown label '" + std::string(s) + "'");
}

namespace {

template <class Graph>
GateId key_gate_in(const Graph& n, GateId key) {
    auto wire_like = [&](GateId g) {
        return n.type(g) == GateType::Not || n.type(g) == GateType::Buf;
    };
    std::vector<GateId> level;
    for (GateId c : n.fanouts(key)) {
        if (n.type(c) != GateType::Output) level.push_back(c);
    }
    if (level.empty()) throw FeatureError("key-input '" + n.name(key) + "' has no consumer");
    const GateId fallback = *std::min_element(level.begin(), level.end());
    std::vector<bool> seen(n.size(), false);
    while (!level.empty()) {
        GateId best = netcore::kNoGate;
        std::vector<GateId> next;
        for (GateId g : level) {
            if (seen[g]) continue;
            seen[g] = true;
            if (!wire_like(g)) {
                best = std::min(best, g);
                continue;
            }
            for (GateId c : n.fanouts(g)) {
                if (n.type(c) != GateType::Output) next.push_back(c);
            }
        }
        if (best != netcore::kNoGate) return best;
        level = std::move(next);
    }
    return fallback;
}

template <class Graph>
Sequence key_sequence_in(const Graph& n, GateId key, std::size_t sub) {
    Sequence seq;
    for (GateId g : netcore::neighborhood(n, key_gate_in(n, key), sub)) seq.push_back(n.type(g));
    return seq;
}

}  // namespace

GateId key_gate(const Netlist& n, GateId key) { return key_gate_in(n, key); }
GateId key_gate(const netcore::NetlistEditor& e, GateId key) { return key_gate_in(e, key); }

Sequence key_sequence(const Netlist& n, GateId key, std::size_t sub) {
    return key_sequence_in(n, key, sub);
}
Sequence key_sequence(const netcore::NetlistEditor& e, GateId key, std::size_t sub) {
    return key_sequence_in(e, key, sub);
}

std::vector<std::uint8_t> one_hot(const Sequence& seq, std::size_t sub_size) {
    std::vector<std::uint8_t> v(sub_size * kVocabulary, 0);
    for (std::size_t i = 0; i < seq.size() && i < sub_size; ++i) {
        v[i * kVocabulary + netcore::index_of(seq[i])] = 1;
    }
    return v;
}

std::string sequence_string(const Sequence& seq) {
    std::string s;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) s += '-';
        s += netcore::to_string(seq[i]);
    }
    return s;
}

Sequence sequence_from_string(std::string_view s) {
    Sequence seq;
    while (!s.empty()) {
        const auto dash = s.find('-');
        const std::string_view tok = s.substr(0, dash);
        auto it = std::find_if(netcore::kAllGateTypes.begin(), netcore::kAllGateTypes.end(),
                               [&](GateType t) { return netcore::to_string(t) == tok; });
        if (it == netcore::kAllGateTypes.end()) {
            throw std::invalid_argument("unknown gate type '" + std::string(tok) + "'");
        }
        seq.push_back(*it);
        if (dash == std::string_view::npos) break;
        s.remove_prefix(dash + 1);
    }
    return seq;
}

std::vector<SubgraphSample> extract_samples(const Netlist& n,
                                            const std::vector<std::size_t>& sub_sizes) {
    if (n.keys().empty()) throw FeatureError("netlist has no key-inputs");
    std::size_t largest = 0;
    for (std::size_t s : sub_sizes) largest = std::max(largest, s);
    std::vector<SubgraphSample> out;
    out.reserve(n.keys().size() * sub_sizes.size());
    for (GateId k : n.keys()) {
        const GateId root = key_gate(n, k);
        // Regions are prefixes of one another, so one walk serves every size.
        const auto region = netcore::neighborhood(n, root, largest);
        for (std::size_t s : sub_sizes) {
            SubgraphSample smp;
            smp.key_name = n.name(k);
            smp.sub_size = s;
            for (std::size_t i = 0; i < region.size() && i < s; ++i) {
                smp.type_sequence.push_back(n.type(region[i]));
            }
            smp.one_hot = one_hot(smp.type_sequence, s);
            out.push_back(std::move(smp));
        }
    }
    return out;
}

namespace {

using SampleKey = std::pair<std::string, std::size_t>;

std::map<SampleKey, const SubgraphSample*> index_samples(const std::vector<SubgraphSample>& v) {
    std::map<SampleKey, const SubgraphSample*> idx;
    for (const auto& s : v) {
        if (!idx.emplace(SampleKey{s.key_name, s.sub_size}, &s).second) {
            throw std::invalid_argument("duplicate sample for key '" + s.key_name + "'");
        }
    }
    return idx;
}

}  // namespace

std::vector<SubgraphSample> label_changes(const std::vector<SubgraphSample>& pre,
                                          const std::vector<SubgraphSample>& post) {
    const auto idx = index_samples(pre);
    if (idx.size() != post.size()) {
        throw std::invalid_argument("pre and post samples cover different keys");
    }
    std::vector<SubgraphSample> out = post;
    for (auto& s : out) {
        auto it = idx.find({s.key_name, s.sub_size});
        if (it == idx.end()) {
            throw std::invalid_argument("key '" + s.key_name + "' missing from pre samples");
        }
        s.label = it->second->type_sequence == s.type_sequence ? Label::Unchanged : Label::Changed;
    }
    return out;
}

double fisher_f1(const std::vector<std::vector<double>>& rows, const std::vector<bool>& labels) {
    if (rows.size() != labels.size()) throw std::invalid_argument("rows and labels differ in size");
    const std::size_t n1 = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
    const std::size_t n0 = labels.size() - n1;
    if (n0 == 0 || n1 == 0) throw std::invalid_argument("Fisher ratio needs two classes");
    const std::size_t d = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != d) throw std::invalid_argument("rows differ in width");
    }
    double best = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
        double sum[2] = {0, 0};
        for (std::size_t i = 0; i < rows.size(); ++i) sum[labels[i]] += rows[i][f];
        const double mu[2] = {sum[0] / static_cast<double>(n0), sum[1] / static_cast<double>(n1)};
        double ss[2] = {0, 0};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double dv = rows[i][f] - mu[labels[i]];
            ss[labels[i]] += dv * dv;
        }
        const double num = (mu[0] - mu[1]) * (mu[0] - mu[1]);
        if (num == 0.0) continue;
        const double den = ss[0] / static_cast<double>(n0) + ss[1] / static_cast<double>(n1);
        const double v = den == 0.0 ? std::numeric_limits<double>::infinity() : num / den;
        best = std::max(best, v);
    }
    return best;
}

double fisher_f1(const std::vector<SubgraphSample>& samples) {
    std::vector<std::vector<double>> rows;
    std::vector<bool> labels;
    for (const auto& s : samples) {
        if (!s.label) throw std::invalid_argument("unlabeled sample");
        rows.emplace_back(s.one_hot.begin(), s.one_hot.end());
        labels.push_back(*s.label == Label::Changed);
    }
    if (rows.empty()) throw std::invalid_argument("Fisher ratio needs two classes");
    return fisher_f1(rows, labels);
}

double f1_for_csv(double f1) noexcept { return std::isinf(f1) ? kF1CsvCap : std::min(f1, kF1CsvCap); }

ChangeDictionary build_dictionary(const std::vector<SubgraphSample>& pre,
                                  const std::vector<SubgraphSample>& post) {
    const auto labeled = label_changes(pre, post);
    const auto idx = index_samples(pre);
    ChangeDictionary dict;
    for (const auto& s : labeled) {
        if (*s.label == Label::Changed) {
            ++dict.entries[s.type_sequence][idx.at({s.key_name, s.sub_size})->type_sequence];
        } else {
            dict.unchanged_U.insert(s.type_sequence);
        }
    }
    for (const auto& [seq, _] : dict.entries) dict.unchanged_U.erase(seq);
    return dict;
}

void write_dataset(std::ostream& out, const std::vector<DatasetRow>& rows) {
    out << kNeighborhoodTag << '\n' << kDatasetHeader << '\n';
    for (const auto& r : rows) {
        const auto& s = r.sample;
        out << r.circuit << ',' << r.instance << ',' << s.key_name << ',' << s.sub_size << ','
            << (s.label ? to_string(*s.label) : "") << ',' << sequence_string(s.type_sequence)
            << ',';
        for (auto b : s.one_hot) out << static_cast<char>('0' + b);
        out << '\n';
    }
}

std::string dataset_csv(const std::vector<DatasetRow>& rows) {
    std::ostringstream os;
    write_dataset(os, rows);
    return os.str();
}

std::vector<DatasetRow> read_dataset(std::istream& in) {
    std::vector<DatasetRow> rows;
    bool header = false;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != kDatasetHeader) throw std::runtime_error("dataset: unexpected header");
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 7) {
            throw std::runtime_error("dataset line " + std::to_string(line_no) + ": expected 7 fields");
        }
        DatasetRow r{f[0], f[1], {}};
        r.sample.key_name = f[2];
        try {
            r.sample.sub_size = std::stoul(f[3]);
            if (!f[4].empty()) r.sample.label = label_from_string(f[4]);
            r.sample.type_sequence = sequence_from_string(f[5]);
        } catch (const std::exception& e) {
            throw std::runtime_error("dataset line " + std::to_string(line_no) + ": " + e.what());
        }
        if (f[6].size() != r.sample.sub_size * kVocabulary) {
            throw std::runtime_error("dataset line " + std::to_string(line_no) + ": bad one-hot width");
        }
        for (char c : f[6]) r.sample.one_hot.push_back(static_cast<std::uint8_t>(c == '1'));
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace lockbench::features
