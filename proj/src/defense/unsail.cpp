#include "lockbench/defense/unsail.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "lockbench/resynth/resynth.hpp"

namespace lockbench::defense {

using features::Sequence;
using locker::KeyGateKind;
using netcore::GateId;
using netcore::GateType;
using netcore::NetlistEditor;

std::string_view to_string(Origin o) noexcept {
    switch (o) {
        case Origin::DictionaryMatch: return "matched";
        case Origin::UTargeted: return "u_targeted";
        case Origin::FillUp: return "fill_up";
    }
    return "?";
}

std::vector<KeyGateKind> kinds_for_root(GateType root, const locker::Palette& palette) {
    std::vector<KeyGateKind> all;
    switch (root) {
        case GateType::Xor: all = {KeyGateKind::Xor}; break;
        case GateType::Xnor: all = {KeyGateKind::Xnor}; break;
        case GateType::And: all = {KeyGateKind::And, KeyGateKind::MuxAndOr}; break;
        case GateType::Or: all = {KeyGateKind::Or}; break;
        case GateType::Nand: all = {KeyGateKind::MuxNand}; break;
        case GateType::Nor: all = {KeyGateKind::MuxNor}; break;
        default: break;
    }
    std::vector<KeyGateKind> out;
    for (KeyGateKind k : all) {
        if (palette.contains(k)) out.push_back(k);
    }
    return out;
}

std::optional<GateType> rewritten_root(GateType t) {
    switch (t) {
        case GateType::Xor: return GateType::Xnor;
        case GateType::Xnor: return GateType::Xor;
        case GateType::And: return GateType::Nor;
        case GateType::Or: return GateType::Nand;
        case GateType::Nand: return GateType::Or;
        case GateType::Nor: return GateType::And;
        default: return std::nullopt;
    }
}

namespace {

constexpr std::size_t kRewriteAttempts = 3;

// Inserts a key-gate and can take it out again, leaving the editor's live
// structure as it was.
class TrialInsertion {
public:
    TrialInsertion(NetlistEditor& e, GateId net, KeyGateKind kind, Rng& rng)
        : e_(e), net_(net), old_name_(e.name(net)) {
        ins_ = locker::insert_key_gate(e, net, kind, locker::next_key_name(e), rng);
    }

    const locker::Insertion& insertion() const { return ins_; }

    void undo() {
        if (e_.name(net_) != old_name_) {
            e_.rename(ins_.output, e_.fresh_name(old_name_ + "_undo"));
            e_.rename(net_, old_name_);
        }
        e_.replace_uses(ins_.output, net_);
        e_.remove_if_dead(ins_.output);
        e_.remove_input(ins_.key_input);
    }

private:
    NetlistEditor& e_;
    GateId net_;
    std::string old_name_;
    locker::Insertion ins_;
};

}  // namespace

UnsailRecord unsail_lock(const Netlist& n, const UnsailConfig& cfg) {
    if (cfg.K % 2 != 0) throw std::invalid_argument("UNSAIL needs an even key size");
    if (cfg.palette.allowed.empty()) throw std::invalid_argument("palette is empty");
    if (cfg.scheme == locker::Scheme::Sll && cfg.palette.name != "xnor") {
        throw std::invalid_argument("SLL uses the X(N)OR palette");
    }
    const std::size_t half = cfg.K / 2;
    UnsailRecord out;
    out.phase1_keys = half;

    // Phase 1: lock half the key and resynthesize.
    Rng rng1(derive_seed(cfg.seed, 1));
    out.record = locker::lock(n, cfg.scheme, half, cfg.palette, rng1);
    out.phase1_locked = out.record.locked;
    out.resynthesized = resynth::resynthesize(out.phase1_locked, cfg.effort, derive_seed(cfg.seed, 2));
    if (half == 0) {
        out.record.locked = out.resynthesized;
        return out;
    }

    // Dictionary of observed changes at sub=3.
    const auto pre = features::extract_samples(out.phase1_locked, {3});
    const auto post = features::extract_samples(out.resynthesized, {3});
    out.dictionary = features::build_dictionary(pre, post);
    if (out.dictionary.empty()) throw EmptyDictionaryError();
    const auto& entries = out.dictionary.entries;
    const auto& U = out.dictionary.unchanged_U;

    // Phase 2: template search over shuffled candidate nets.
    NetlistEditor e(out.resynthesized);
    Rng rng(derive_seed(cfg.seed, 3));
    std::vector<GateId> candidates = locker::lockable_nets(e);
    rng.shuffle(candidates);
    std::vector<bool> used(candidates.size(), false);
    std::vector<KeyGateKind> placed_kinds;
    std::vector<locker::LockSite> sites;

    // Earlier insertions can turn a candidate into key structure.
    std::vector<bool> ks;
    bool ks_stale = true;
    auto is_key_structure = [&](GateId g) {
        if (ks_stale) {
            ks = locker::key_structure(e);
            ks_stale = false;
        }
        return static_cast<bool>(ks[g]);
    };

    auto record = [&](const std::string& net, KeyGateKind kind, const locker::Insertion& ins, Origin o) {
        sites.push_back({e.name(ins.key_input), net, kind, ins.correct_bit, 0});
        out.origins.push_back(o);
        ks_stale = true;
    };

    // A dictionary match only counts when the entry's usual pre-sequence
    // decodes to a different bit than the one this key-gate carries, or
    // does not decode by type at all.
    std::map<Sequence, std::optional<bool>> pre_bit;
    for (const auto& [post_seq, pres] : entries) {
        const Sequence* best = nullptr;
        std::size_t best_count = 0;
        for (const auto& [pre_seq, c] : pres) {
            if (c > best_count) {
                best = &pre_seq;
                best_count = c;
            }
        }
        pre_bit[post_seq] = locker::type_decode((*best)[0]);
    }
    auto classify = [&](const NetlistEditor& ed, GateId key, bool bit) -> std::optional<Origin> {
        Sequence seq;
        try {
            seq = features::key_sequence(ed, key, 3);
        } catch (const features::FeatureError&) {
            return std::nullopt;
        }
        if (auto it = pre_bit.find(seq); it != pre_bit.end()) {
            if (!it->second || *it->second != bit) return Origin::DictionaryMatch;
            return std::nullopt;
        }
        if (const auto r = rewritten_root(seq[0])) {
            Sequence image = seq;
            image[0] = *r;
            if (U.count(image) != 0) return Origin::UTargeted;
        }
        return std::nullopt;
    };

    for (std::size_t ci = 0; ci < candidates.size() && sites.size() < half; ++ci) {
        const GateId net = candidates[ci];
        if (!e.alive(net) || is_key_structure(net)) continue;
        std::vector<KeyGateKind> kinds = cfg.palette.allowed;
        rng.shuffle(kinds);
        for (KeyGateKind kind : kinds) {
            const std::size_t first_new = e.size();
            std::optional<TrialInsertion> attempt;
            try {
                attempt.emplace(e, net, kind, rng);
            } catch (const locker::LockError&) {
                break;  // an adopted rewrite left the net without consumers
            }
            TrialInsertion& trial = *attempt;
            const auto& ins = trial.insertion();
            const std::string site = e.name(net);
            std::optional<Origin> origin = classify(e, ins.key_input, ins.correct_bit);
            // Otherwise try the structure in a locally rewritten form.
            for (std::size_t a = 0; !origin && a < kRewriteAttempts; ++a) {
                NetlistEditor copy = e;
                std::vector<GateId> fresh;
                for (GateId g = static_cast<GateId>(first_new); g < copy.size(); ++g) {
                    if (copy.alive(g) && netcore::is_logic(copy.type(g))) fresh.push_back(g);
                }
                if (resynth::sweep_gates(copy, std::move(fresh), rng) == 0) continue;
                origin = classify(copy, ins.key_input, ins.correct_bit);
                if (origin) e = std::move(copy);
            }
            if (!origin) {
                trial.undo();
                continue;
            }
            record(site, kind, ins, *origin);
            placed_kinds.push_back(kind);
            used[ci] = true;
            break;
        }
    }

    // Fill-up: reuse the kinds already placed at further sites.
    if (sites.size() < half) {
        if (!cfg.fill_up) {
            throw locker::LockError("UNSAIL found " + std::to_string(sites.size()) + " of " +
                                    std::to_string(half) + " template sites and fill-up is off");
        }
        std::vector<KeyGateKind> reuse = placed_kinds;
        if (reuse.empty()) {
            std::vector<std::pair<std::size_t, Sequence>> ranked;
            for (const auto& [seq, pres] : entries) {
                std::size_t count = 0;
                for (const auto& [_, c] : pres) count += c;
                ranked.push_back({count, seq});
            }
            std::stable_sort(ranked.begin(), ranked.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            for (const auto& [_, seq] : ranked) {
                for (KeyGateKind k : kinds_for_root(seq[0], cfg.palette)) reuse.push_back(k);
            }
        }
        if (reuse.empty()) reuse = cfg.palette.allowed;
        std::size_t next = 0;
        for (std::size_t ci = 0; ci < candidates.size() && sites.size() < half; ++ci) {
            if (used[ci]) continue;
            const GateId net = candidates[ci];
            if (!e.alive(net) || is_key_structure(net)) continue;
            const KeyGateKind kind = reuse[next++ % reuse.size()];
            locker::Insertion ins;
            try {
                ins = locker::insert_key_gate(e, net, kind, locker::next_key_name(e), rng);
            } catch (const locker::LockError&) {
                continue;
            }
            record(e.name(net), kind, ins, Origin::FillUp);
            used[ci] = true;
        }
        if (sites.size() < half) {
            throw locker::LockError("UNSAIL ran out of lockable nets");
        }
    }

    out.record.locked = e.freeze();
    for (const auto& s : sites) {
        out.record.mapping.push_back({s.key_name, s.correct_bit});
        out.record.sites.push_back(s);
    }
    return out;
}

InjectionStats injection_stats(const UnsailRecord& r) {
    InjectionStats s;
    for (Origin o : r.origins) {
        switch (o) {
            case Origin::DictionaryMatch: ++s.matched; break;
            case Origin::UTargeted: ++s.u_targeted; break;
            case Origin::FillUp: ++s.fill_up; break;
        }
    }
    return s;
}

std::string stats_csv_row(const UnsailRecord& r) {
    const auto s = injection_stats(r);
    return std::to_string(r.record.mapping.size()) + ',' + std::to_string(s.matched) + ',' +
           std::to_string(s.u_targeted) + ',' + std::to_string(s.fill_up) + ',' +
           std::to_string(r.dictionary.entries.size()) + ',' +
           std::to_string(r.dictionary.unchanged_U.size());
}

std::vector<features::SubgraphSample> truth_labels(const Netlist& pre, const Netlist& post,
                                                   const std::vector<std::size_t>& sub_sizes) {
    return features::label_changes(features::extract_samples(pre, sub_sizes),
                                   features::extract_samples(post, sub_sizes));
}

std::vector<features::SubgraphSample> pre_samples(const UnsailRecord& r,
                                                  const std::vector<std::size_t>& sub_sizes) {
    auto out = features::extract_samples(r.phase1_locked, sub_sizes);
    std::set<std::string> first;
    for (std::size_t i = 0; i < r.phase1_keys; ++i) first.insert(r.record.mapping.bits()[i].name);
    for (auto& s : features::extract_samples(r.record.locked, sub_sizes)) {
        if (first.count(s.key_name) == 0) out.push_back(std::move(s));
    }
    return out;
}

std::vector<features::SubgraphSample> truth_labels(const UnsailRecord& r,
                                                   const std::vector<std::size_t>& sub_sizes) {
    return features::label_changes(pre_samples(r, sub_sizes),
                                   features::extract_samples(r.record.locked, sub_sizes));
}

}  // namespace lockbench::defense
