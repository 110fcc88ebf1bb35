#include "lockbench/locker/locker.hpp"

#include <algorithm>
#include <stdexcept>

#include "lockbench/simeval/faults.hpp"

namespace lockbench::locker {

std::string_view to_string(KeyGateKind k) noexcept {
    switch (k) {
        case KeyGateKind::Xor: return "XOR_KG";
        case KeyGateKind::Xnor: return "XNOR_KG";
        case KeyGateKind::And: return "AND_KG";
        case KeyGateKind::Or: return "OR_KG";
        case KeyGateKind::MuxAndOr: return "MUX_ANDOR_KG";
        case KeyGateKind::MuxNand: return "MUX_NAND_KG";
        case KeyGateKind::MuxNor: return "MUX_NOR_KG";
    }
    return "?";
}

std::optional<KeyGateKind> key_gate_kind_from_string(std::string_view s) {
    for (auto k : {KeyGateKind::Xor, KeyGateKind::Xnor, KeyGateKind::And, KeyGateKind::Or,
                   KeyGateKind::MuxAndOr, KeyGateKind::MuxNand, KeyGateKind::MuxNor}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

bool Palette::contains(KeyGateKind k) const {
    return std::find(allowed.begin(), allowed.end(), k) != allowed.end();
}

Palette Palette::xnor() { return {"xnor", {KeyGateKind::Xor, KeyGateKind::Xnor}}; }
Palette Palette::cl_v1() { return {"cl_v1", {KeyGateKind::MuxAndOr, KeyGateKind::MuxNand}}; }
Palette Palette::cl_v2() {
    return {"cl_v2", {KeyGateKind::MuxAndOr, KeyGateKind::MuxNand, KeyGateKind::MuxNor}};
}
Palette Palette::cl_v3() {
    return {"cl_v3",
            {KeyGateKind::MuxAndOr, KeyGateKind::MuxNand, KeyGateKind::MuxNor, KeyGateKind::Xor,
             KeyGateKind::Xnor}};
}
Palette Palette::cl_v4() {
    return {"cl_v4",
            {KeyGateKind::MuxAndOr, KeyGateKind::MuxNand, KeyGateKind::MuxNor, KeyGateKind::Xor,
             KeyGateKind::Xnor, KeyGateKind::And, KeyGateKind::Or}};
}

Palette Palette::by_name(std::string_view name) {
    if (name == "xnor") return xnor();
    if (name == "cl_v1") return cl_v1();
    if (name == "cl_v2") return cl_v2();
    if (name == "cl_v3") return cl_v3();
    if (name == "cl_v4") return cl_v4();
    throw std::invalid_argument("unknown palette '" + std::string(name) + "'");
}

std::string_view to_string(Scheme s) noexcept {
    switch (s) {
        case Scheme::Rll: return "rll";
        case Scheme::Fll: return "fll";
        case Scheme::Sll: return "sll";
    }
    return "?";
}

Scheme scheme_from_string(std::string_view s) {
    if (s == "rll") return Scheme::Rll;
    if (s == "fll") return Scheme::Fll;
    if (s == "sll") return Scheme::Sll;
    throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

std::optional<bool> type_decode(GateType t) {
    switch (t) {
        case GateType::Xor: return false;
        case GateType::Xnor: return true;
        case GateType::And: return true;
        case GateType::Or: return false;
        default: return std::nullopt;
    }
}

Insertion insert_key_gate(NetlistEditor& e, GateId net, KeyGateKind kind,
                          const std::string& key_name, Rng& rng) {
    if (net >= e.size() || !e.alive(net)) throw LockError("lock site does not exist");
    const GateType t = e.type(net);
    if (t == GateType::Output || netcore::is_constant(t) || e.is_key(net)) {
        throw LockError("net '" + e.name(net) + "' cannot carry a key-gate");
    }
    if (e.find(key_name)) throw LockError("key name '" + key_name + "' already in use");

    const bool is_input = t == GateType::Input;
    std::vector<GateId> consumers;
    bool feeds_port = false;
    for (GateId c : e.fanouts(net)) {
        if (e.type(c) == GateType::Output) {
            if (is_input) continue;
            feeds_port = true;
        }
        consumers.push_back(c);
    }
    if (consumers.empty()) throw LockError("net '" + e.name(net) + "' has no consumer to lock");

    Insertion ins;
    const GateId k = e.add_key_input(key_name);
    ins.key_input = k;
    const std::string base = key_name + "_";
    auto simple = [&](GateType gt, bool bit) {
        ins.output = e.add_gate(gt, {net, k}, e.fresh_name(base + "kg"));
        ins.correct_bit = bit;
    };
    switch (kind) {
        case KeyGateKind::Xor: simple(GateType::Xor, false); break;
        case KeyGateKind::Xnor: simple(GateType::Xnor, true); break;
        case KeyGateKind::And: simple(GateType::And, true); break;
        case KeyGateKind::Or: simple(GateType::Or, false); break;
        case KeyGateKind::MuxAndOr:
        case KeyGateKind::MuxNand:
        case KeyGateKind::MuxNor: {
            const bool net_on_true = rng.coin();
            const GateId inv = e.add_gate(GateType::Not, {net}, e.fresh_name(base + "inv"));
            const GateId ns = e.add_gate(GateType::Not, {k}, e.fresh_name(base + "ns"));
            const GateId tw = net_on_true ? net : inv;
            const GateId fw = net_on_true ? inv : net;
            GateId n1;
            GateId n2;
            if (kind == KeyGateKind::MuxAndOr) {
                n1 = e.add_gate(GateType::And, {k, tw}, e.fresh_name(base + "t"));
                n2 = e.add_gate(GateType::And, {ns, fw}, e.fresh_name(base + "f"));
                ins.output = e.add_gate(GateType::Or, {n1, n2}, e.fresh_name(base + "kg"));
            } else if (kind == KeyGateKind::MuxNand) {
                n1 = e.add_gate(GateType::Nand, {k, tw}, e.fresh_name(base + "t"));
                n2 = e.add_gate(GateType::Nand, {ns, fw}, e.fresh_name(base + "f"));
                ins.output = e.add_gate(GateType::Nand, {n1, n2}, e.fresh_name(base + "kg"));
            } else {
                n1 = e.add_gate(GateType::Nor, {ns, tw}, e.fresh_name(base + "t"));
                n2 = e.add_gate(GateType::Nor, {k, fw}, e.fresh_name(base + "f"));
                ins.output = e.add_gate(GateType::Nor, {n1, n2}, e.fresh_name(base + "kg"));
            }
            ins.correct_bit = net_on_true;
            break;
        }
    }
    for (GateId c : consumers) e.replace_fanin(c, net, ins.output);
    if (feeds_port) {
        const std::string old = e.name(net);
        e.rename(net, e.fresh_name(old + "_lk"));
        e.rename(ins.output, old);
    }
    return ins;
}

std::pair<Netlist, bool> insert_key_gate(const Netlist& n, GateId net, KeyGateKind kind,
                                         const std::string& key_name, Rng& rng) {
    NetlistEditor e(n);
    const Insertion ins = insert_key_gate(e, net, kind, key_name, rng);
    return {e.freeze(), ins.correct_bit};
}

std::vector<bool> key_structure(const NetlistEditor& e) {
    const auto order = e.topo_order();
    std::vector<bool> literal(e.size(), false);
    std::vector<bool> ks(e.size(), false);
    for (GateId g : order) {
        const GateType t = e.type(g);
        if (t == GateType::Input) {
            literal[g] = e.is_key(g);
            continue;
        }
        if (!netcore::is_logic(t) || netcore::is_constant(t)) continue;
        const auto fi = e.fanins(g);
        bool reads_literal = false;
        bool all_ks = true;
        for (GateId f : fi) {
            reads_literal = reads_literal || literal[f];
            all_ks = all_ks && (ks[f] || literal[f]);
        }
        if ((t == GateType::Not || t == GateType::Buf) && literal[fi[0]]) literal[g] = true;
        ks[g] = reads_literal || all_ks;
    }
    // Inverters that only feed key-gate structures belong to them (MUX false path).
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const GateId g = *it;
        const GateType t = e.type(g);
        if (ks[g] || (t != GateType::Not && t != GateType::Buf)) continue;
        const auto fo = e.fanouts(g);
        if (fo.empty()) continue;
        ks[g] = std::all_of(fo.begin(), fo.end(), [&](GateId c) { return ks[c]; });
    }
    return ks;
}

std::vector<GateId> lockable_nets(const NetlistEditor& e) {
    const auto ks = key_structure(e);
    std::vector<GateId> nets;
    for (GateId g = 0; g < e.size(); ++g) {
        if (!e.alive(g) || ks[g]) continue;
        const GateType t = e.type(g);
        if (t == GateType::Output || netcore::is_constant(t) || e.is_key(g)) continue;
        std::size_t logic_consumers = 0;
        std::size_t ks_consumers = 0;
        bool port = false;
        for (GateId c : e.fanouts(g)) {
            if (e.type(c) == GateType::Output) {
                port = true;
                continue;
            }
            ++logic_consumers;
            if (ks[c]) ++ks_consumers;
        }
        if (t == GateType::Input) port = false;
        if (logic_consumers == 0 && !port) continue;
        if (logic_consumers > 0 && ks_consumers == logic_consumers) continue;
        nets.push_back(g);
    }
    return nets;
}

std::string next_key_name(const NetlistEditor& e) {
    for (std::size_t i = e.keys().size();; ++i) {
        std::string name = "k" + std::to_string(i);
        if (!e.find(name)) return name;
    }
}

namespace {

std::vector<GateId> cone_of(const NetlistEditor& e, GateId s, std::vector<std::uint32_t>& stamp,
                            std::uint32_t epoch) {
    std::vector<GateId> out;
    for (int dir = 0; dir < 2; ++dir) {
        std::vector<GateId> stack{s};
        while (!stack.empty()) {
            const GateId g = stack.back();
            stack.pop_back();
            auto next = dir == 0 ? e.fanins(g) : e.fanouts(g);
            for (GateId x : next) {
                if (stamp[x] == epoch || !e.alive(x)) continue;
                stamp[x] = epoch;
                out.push_back(x);
                stack.push_back(x);
            }
        }
    }
    return out;
}

struct Choice {
    GateId net;
    std::uint64_t score;
};

std::vector<Choice> choose_sll(const NetlistEditor& e, std::vector<GateId> candidates,
                               std::size_t K, Rng& rng) {
    std::vector<std::uint64_t> counter(e.size(), 0);
    std::vector<std::uint32_t> stamp(e.size(), 0);
    std::vector<Choice> chosen;
    for (std::uint32_t round = 1; chosen.size() < K; ++round) {
        std::uint64_t best = 0;
        for (GateId c : candidates) best = std::max(best, counter[c]);
        std::vector<std::size_t> tied;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (counter[candidates[i]] == best) tied.push_back(i);
        }
        const std::size_t pick = tied[rng.uniform(tied.size())];
        const GateId s = candidates[pick];
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
        chosen.push_back({s, best});
        stamp[s] = round;
        for (GateId g : cone_of(e, s, stamp, round)) ++counter[g];
    }
    return chosen;
}

std::vector<Choice> choose_fll(NetlistEditor& e, const std::vector<GateId>& candidates,
                               std::size_t K, Rng& rng, std::size_t n_patterns) {
    const Netlist frozen = e.freeze();
    const auto impact = simeval::fault_impact(frozen, n_patterns, rng.next());
    std::vector<Choice> scored;
    for (GateId c : candidates) {
        const auto f = frozen.find(e.name(c));
        scored.push_back({c, f ? impact[*f] : 0});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const Choice& a, const Choice& b) {
        return a.score != b.score ? a.score > b.score : a.net < b.net;
    });
    scored.resize(K);
    return scored;
}

}  // namespace

std::vector<LockSite> lock_in_place(NetlistEditor& e, Scheme scheme, std::size_t K,
                                    const Palette& palette, Rng& rng, std::size_t fll_patterns) {
    if (palette.allowed.empty()) throw std::invalid_argument("palette is empty");
    if (scheme == Scheme::Sll && !(palette.allowed.size() == 2 &&
                                   palette.contains(KeyGateKind::Xor) &&
                                   palette.contains(KeyGateKind::Xnor))) {
        throw std::invalid_argument("SLL uses the X(N)OR palette");
    }
    if (K == 0) return {};
    std::vector<GateId> candidates = lockable_nets(e);
    if (K > candidates.size()) {
        throw LockError("requested " + std::to_string(K) + " key-gates but only " +
                        std::to_string(candidates.size()) + " lockable nets exist");
    }
    std::vector<Choice> chosen;
    switch (scheme) {
        case Scheme::Rll:
            rng.shuffle(candidates);
            for (std::size_t i = 0; i < K; ++i) chosen.push_back({candidates[i], 0});
            break;
        case Scheme::Fll: chosen = choose_fll(e, candidates, K, rng, fll_patterns); break;
        case Scheme::Sll: chosen = choose_sll(e, std::move(candidates), K, rng); break;
    }
    std::vector<LockSite> sites;
    for (const Choice& c : chosen) {
        const KeyGateKind kind = palette.allowed[rng.uniform(palette.allowed.size())];
        const std::string key = next_key_name(e);
        const Insertion ins = insert_key_gate(e, c.net, kind, key, rng);
        sites.push_back({key, e.name(c.net), kind, ins.correct_bit, c.score});
    }
    return sites;
}

LockRecord lock(const Netlist& n, Scheme scheme, std::size_t K, const Palette& palette, Rng& rng,
                std::size_t fll_patterns) {
    NetlistEditor e(n);
    auto sites = lock_in_place(e, scheme, K, palette, rng, fll_patterns);
    LockRecord rec{e.freeze(), {}, std::move(sites)};
    for (const LockSite& s : rec.sites) rec.mapping.push_back({s.key_name, s.correct_bit});
    return rec;
}

LockRecord lock_rll(const Netlist& n, std::size_t K, const Palette& palette, Rng& rng) {
    return lock(n, Scheme::Rll, K, palette, rng);
}

LockRecord lock_fll(const Netlist& n, std::size_t K, const Palette& palette, Rng& rng,
                    std::size_t n_patterns) {
    return lock(n, Scheme::Fll, K, palette, rng, n_patterns);
}

LockRecord lock_sll(const Netlist& n, std::size_t K, Rng& rng) {
    return lock(n, Scheme::Sll, K, Palette::xnor(), rng);
}

}  // namespace lockbench::locker
