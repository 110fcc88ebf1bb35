#include "lockbench/attacks/sail.hpp"

#include <algorithm>

#include "lockbench/resynth/resynth.hpp"

namespace lockbench::attacks {

using features::Label;
using locker::KeyGateKind;
using netcore::GateType;

std::vector<TrainingInstance> gen_training_data(const Netlist& locked, const TrainingSetup& setup) {
    std::vector<TrainingInstance> out;
    out.reserve(setup.n_instances);
    for (std::size_t i = 0; i < setup.n_instances; ++i) {
        Rng rng(derive_seed(setup.seed, 2 * i));
        auto rec = locker::lock(locked, setup.scheme, setup.K, setup.palette, rng);
        Netlist post = resynth::resynthesize(rec.locked, setup.effort, derive_seed(setup.seed, 2 * i + 1));
        out.push_back({std::move(rec.locked), std::move(post), std::move(rec.mapping)});
    }
    return out;
}

std::vector<SamplePair> make_pairs(const std::vector<SubgraphSample>& pre,
                                   const std::vector<SubgraphSample>& post, const KeyMapping& keys) {
    std::map<std::pair<std::string, std::size_t>, const SubgraphSample*> idx;
    for (const auto& s : pre) idx[{s.key_name, s.sub_size}] = &s;
    std::vector<SamplePair> out;
    for (const auto& s : post) {
        if (!keys.find(s.key_name)) continue;
        auto it = idx.find({s.key_name, s.sub_size});
        if (it == idx.end()) throw std::invalid_argument("no pre sample for key '" + s.key_name + "'");
        SamplePair p{*it->second, s};
        p.post.label = p.pre.type_sequence == p.post.type_sequence ? Label::Unchanged : Label::Changed;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<SamplePair> make_pairs(const TrainingInstance& inst,
                                   const std::vector<std::size_t>& sub_sizes) {
    return make_pairs(features::extract_samples(inst.pre, sub_sizes),
                      features::extract_samples(inst.post, sub_sizes), inst.mapping);
}

void ReconModel::add(const SamplePair& p) {
    ++stores_[p.post.sub_size][p.post.type_sequence][p.pre.type_sequence];
}

std::optional<Sequence> ReconModel::predict(const std::map<std::size_t, Sequence>& posts) const {
    auto frequency = [&](std::size_t sub, const Sequence& pre) {
        auto st = stores_.find(sub);
        auto q = posts.find(sub);
        if (st == stores_.end() || q == posts.end()) return 0.0;
        auto hit = st->second.find(q->second);
        if (hit == st->second.end()) return 0.0;
        std::size_t total = 0;
        for (const auto& [_, c] : hit->second) total += c;
        const Sequence prefix(pre.begin(), pre.begin() + static_cast<std::ptrdiff_t>(std::min(sub, pre.size())));
        auto c = hit->second.find(prefix);
        return c == hit->second.end() ? 0.0 : static_cast<double>(c->second) / static_cast<double>(total);
    };
    for (auto it = posts.rbegin(); it != posts.rend(); ++it) {
        auto st = stores_.find(it->first);
        if (st == stores_.end()) continue;
        auto hit = st->second.find(it->second);
        if (hit == st->second.end()) continue;
        const Sequence* best = nullptr;
        double best_score = -1;
        for (const auto& [pre, _] : hit->second) {
            double score = 0;
            for (const auto& [sub, __] : posts) {
                if (sub <= it->first) score += frequency(sub, pre);
            }
            if (score > best_score) {
                best_score = score;
                best = &pre;
            }
        }
        return *best;
    }
    return std::nullopt;
}

std::optional<bool> decode_sequence(const Sequence& seq, const locker::Palette& palette) {
    if (seq.empty()) return std::nullopt;
    auto mux_shape = [&](GateType out, GateType sibling) {
        return seq.size() >= 3 && seq[1] == out && seq[2] == sibling;
    };
    // Position 3 is the root's data input, position 4 the other branch's
    // data input or the net's inverter; exactly one of them must be a NOT.
    auto mux = [&](bool not_means_one) -> std::optional<bool> {
        if (seq.size() < 5) return std::nullopt;
        const bool d = seq[3] == GateType::Not;
        const bool e = seq[4] == GateType::Not;
        if (d == e) return std::nullopt;
        return d ? not_means_one : !not_means_one;
    };
    switch (seq[0]) {
        case GateType::Xor:
            if (palette.contains(KeyGateKind::Xor)) return false;
            break;
        case GateType::Xnor:
            if (palette.contains(KeyGateKind::Xnor)) return true;
            break;
        case GateType::Or:
            if (palette.contains(KeyGateKind::Or)) return false;
            break;
        case GateType::And:
            if (palette.contains(KeyGateKind::MuxAndOr) && mux_shape(GateType::Or, GateType::And)) {
                return mux(false);
            }
            if (palette.contains(KeyGateKind::And)) return true;
            break;
        case GateType::Nand:
            if (palette.contains(KeyGateKind::MuxNand) && mux_shape(GateType::Nand, GateType::Nand)) {
                return mux(false);
            }
            break;
        case GateType::Nor:
            if (palette.contains(KeyGateKind::MuxNor) && mux_shape(GateType::Nor, GateType::Nor)) {
                return mux(true);
            }
            break;
        default: break;
    }
    return std::nullopt;
}

std::vector<double> as_row(const SubgraphSample& s) { return {s.one_hot.begin(), s.one_hot.end()}; }

Label SailModels::classify(const SubgraphSample& s) const {
    if (!rf) return constant;
    return rf->predict(as_row(s)) ? Label::Changed : Label::Unchanged;
}

SailModels train_sail(const std::vector<SamplePair>& pairs, const SailOptions& opt) {
    SailModels m;
    m.rf_sub = opt.rf_sub;
    std::vector<std::vector<double>> rows;
    std::vector<bool> labels;
    for (const auto& p : pairs) {
        m.recon.add(p);
        if (p.post.sub_size != opt.rf_sub) continue;
        rows.push_back(as_row(p.post));
        labels.push_back(*p.post.label == Label::Changed);
    }
    if (rows.empty()) throw AttackError("no training samples at sub-size " + std::to_string(opt.rf_sub));
    const auto changed = std::count(labels.begin(), labels.end(), true);
    if (changed == 0 || static_cast<std::size_t>(changed) == labels.size()) {
        m.constant = changed ? Label::Changed : Label::Unchanged;
    } else {
        m.rf = RandomForest::train(rows, labels, {opt.n_trees, 0, opt.seed});
    }
    return m;
}

namespace {

std::vector<std::size_t> attack_subs(const SailOptions& opt) {
    auto subs = opt.sub_sizes;
    if (std::find(subs.begin(), subs.end(), opt.rf_sub) == subs.end()) subs.push_back(opt.rf_sub);
    std::sort(subs.begin(), subs.end());
    return subs;
}

// Per key (in netlist key order): sub-size -> sample.
std::vector<std::map<std::size_t, SubgraphSample>> samples_by_key(const Netlist& n,
                                                                  const std::vector<std::size_t>& subs) {
    std::vector<std::map<std::size_t, SubgraphSample>> out;
    std::map<std::string, std::size_t> slot;
    for (auto& s : features::extract_samples(n, subs)) {
        auto [it, fresh] = slot.emplace(s.key_name, out.size());
        if (fresh) out.emplace_back();
        const std::size_t sub = s.sub_size;
        out[it->second].emplace(sub, std::move(s));
    }
    return out;
}

void decide(KeyGuess& g, const Sequence& seq, const locker::Palette& palette, Rng& coin) {
    if (const auto bit = decode_sequence(seq, palette)) {
        g.guess = *bit;
        g.confidence = 1.0;
    } else {
        g.guess = coin.coin();
        g.confidence = 0.5;
        g.stage += ":coin";
    }
}

}  // namespace

AttackReport sail_attack(const Netlist& target, const SailModels& models, const KeyMapping& truth,
                         const SailOptions& opt, const std::vector<SubgraphSample>* truth_labels) {
    const auto subs = attack_subs(opt);
    Rng coin(derive_seed(opt.seed, 0x5a11));
    Rng coin2(derive_seed(opt.seed, 0x5a12));
    AttackReport rep;
    AttackReport ml2;
    for (const auto& by_sub : samples_by_key(target, subs)) {
        const auto& largest = by_sub.rbegin()->second;
        std::map<std::size_t, Sequence> posts;
        for (const auto& [sub, s] : by_sub) posts[sub] = s.type_sequence;
        const auto pre = models.recon.predict(posts);
        const Sequence& reconstructed = pre ? *pre : largest.type_sequence;

        KeyGuess only{largest.key_name, std::nullopt, 1.0, pre ? "reconstructed" : "identity"};
        decide(only, reconstructed, opt.palette, coin2);
        ml2.guesses.push_back(only);

        KeyGuess g{largest.key_name, std::nullopt, 1.0, ""};
        if (models.classify(by_sub.at(opt.rf_sub)) == Label::Unchanged) {
            g.stage = "unchanged";
            decide(g, largest.type_sequence, opt.palette, coin);
        } else {
            g.stage = pre ? "reconstructed" : "identity";
            decide(g, reconstructed, opt.palette, coin);
        }
        rep.guesses.push_back(std::move(g));
    }
    rep.ml2_accuracy = score(ml2, truth).accuracy;
    if (truth_labels) rep.ml1_accuracy = ml1_accuracy(models, *truth_labels);
    score_into(rep, truth);
    return rep;
}

AttackReport decode_attack(const Netlist& target, const KeyMapping& truth, const SailOptions& opt) {
    Rng coin(derive_seed(opt.seed, 0x5a11));
    AttackReport rep;
    for (const auto& by_sub : samples_by_key(target, attack_subs(opt))) {
        const auto& largest = by_sub.rbegin()->second;
        KeyGuess g{largest.key_name, std::nullopt, 1.0, "decode"};
        decide(g, largest.type_sequence, opt.palette, coin);
        rep.guesses.push_back(std::move(g));
    }
    score_into(rep, truth);
    return rep;
}

double ml1_accuracy(const SailModels& models, const std::vector<SubgraphSample>& labeled) {
    std::size_t ok = 0;
    std::size_t n = 0;
    for (const auto& s : labeled) {
        if (s.sub_size != models.rf_sub) continue;
        if (!s.label) throw std::invalid_argument("unlabeled sample");
        ok += models.classify(s) == *s.label;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("no labeled samples at the classifier's sub-size");
    return static_cast<double>(ok) / static_cast<double>(n);
}

}  // namespace lockbench::attacks
