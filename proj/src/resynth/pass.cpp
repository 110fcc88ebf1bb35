#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "lockbench/resynth/resynth.hpp"

namespace lockbench::resynth {

namespace {

using Fanins = std::vector<GateId>;

Fanins fanins_of(const NetlistEditor& e, GateId g) {
    const auto fi = e.fanins(g);
    return {fi.begin(), fi.end()};
}

GateType flip(GateType t) { return *netcore::complement(t); }

void to_wire(NetlistEditor& e, GateId g, GateId src) {
    e.replace_uses(g, src);
    e.remove_if_dead(g);
}

void to_constant(NetlistEditor& e, GateId g, bool v) { to_wire(e, g, e.constant(v)); }

bool fold_constants(NetlistEditor& e, GateId g) {
    const GateType t = e.type(g);
    const Fanins fi = fanins_of(e, g);
    auto is_const = [&](GateId f) { return netcore::is_constant(e.type(f)); };
    if (std::none_of(fi.begin(), fi.end(), is_const)) return false;
    auto value = [&](GateId f) { return e.type(f) == GateType::Const1; };
    Fanins rest;
    for (GateId f : fi) {
        if (!is_const(f)) rest.push_back(f);
    }
    switch (t) {
        case GateType::Not: to_constant(e, g, !value(fi[0])); return true;
        case GateType::Buf: to_constant(e, g, value(fi[0])); return true;
        case GateType::And:
        case GateType::Nand:
        case GateType::Or:
        case GateType::Nor: {
            const bool ctrl = t == GateType::Or || t == GateType::Nor;
            const bool inv = t == GateType::Nand || t == GateType::Nor;
            for (GateId f : fi) {
                if (is_const(f) && value(f) == ctrl) {
                    to_constant(e, g, ctrl != inv);
                    return true;
                }
            }
            if (rest.empty()) {
                to_constant(e, g, !ctrl != inv);
            } else if (rest.size() == 1) {
                if (inv) {
                    e.set_type(g, GateType::Not);
                    e.set_fanins(g, rest);
                } else {
                    to_wire(e, g, rest[0]);
                }
            } else {
                e.set_fanins(g, rest);
            }
            return true;
        }
        case GateType::Xor:
        case GateType::Xnor: {
            bool inv = t == GateType::Xnor;
            for (GateId f : fi) {
                if (is_const(f) && value(f)) inv = !inv;
            }
            if (rest.empty()) {
                to_constant(e, g, inv);
            } else if (rest.size() == 1) {
                if (inv) {
                    e.set_type(g, GateType::Not);
                    e.set_fanins(g, rest);
                } else {
                    to_wire(e, g, rest[0]);
                }
            } else {
                e.set_type(g, inv ? GateType::Xnor : GateType::Xor);
                e.set_fanins(g, rest);
            }
            return true;
        }
        default: return false;
    }
}

class Pass {
public:
    Pass(NetlistEditor& e, Rng& rng) : e_(e), rng_(rng) {}

    const char* apply(GateId g) {
        const GateType t = e_.type(g);
        if (t == GateType::Buf) {
            to_wire(e_, g, e_.fanins(g)[0]);
            return "buf_elimination";
        }
        if (t == GateType::Not && e_.type(e_.fanins(g)[0]) == GateType::Not) {
            to_wire(e_, g, e_.fanins(e_.fanins(g)[0])[0]);
            return "double_inverter";
        }
        if (fold_constants(e_, g)) return "constant_propagation";
        if (merge_duplicate(g)) return "duplicate_merge";
        if (t == GateType::Xor || t == GateType::Xnor) {
            if (rng_.coin()) {
                if (absorb_inverter(g)) return "xnor_inverter";
            } else {
                push_inverter(g);
                return "xnor_inverter";
            }
        }
        if (t == GateType::And || t == GateType::Or || t == GateType::Nand || t == GateType::Nor) {
            if (rng_.coin()) {
                if (join_inverters(g)) return "de_morgan";
            } else if (t == GateType::Nand || t == GateType::Nor) {
                split_inverters(g);
                return "de_morgan";
            }
        }
        if ((t == GateType::And || t == GateType::Or) && regroup(g)) return "associativity";
        return nullptr;
    }

private:
    GateId add_not(GateId src) { return e_.add_gate(GateType::Not, {src}, e_.fresh_name("rs")); }

    bool merge_duplicate(GateId g) {
        const auto fi = e_.fanins(g);
        if (fi.empty()) return false;
        Fanins mine(fi.begin(), fi.end());
        std::sort(mine.begin(), mine.end());
        for (GateId h : e_.fanouts(fi[0])) {
            if (h == g || !e_.alive(h) || e_.type(h) != e_.type(g)) continue;
            const auto hf = e_.fanins(h);
            if (hf.size() != mine.size()) continue;
            Fanins other(hf.begin(), hf.end());
            std::sort(other.begin(), other.end());
            if (other != mine) continue;
            const GateId keep = std::min(g, h);
            const GateId drop = std::max(g, h);
            to_wire(e_, drop, keep);
            return true;
        }
        return false;
    }

    bool absorb_inverter(GateId g) {
        const auto fo = e_.fanouts(g);
        if (fo.size() == 1 && e_.type(fo[0]) == GateType::Not) {
            const GateId n = fo[0];
            e_.set_type(g, flip(e_.type(g)));
            to_wire(e_, n, g);
            return true;
        }
        Fanins fi = fanins_of(e_, g);
        for (GateId& f : fi) {
            if (e_.type(f) != GateType::Not) continue;
            const GateId inv = f;
            f = e_.fanins(inv)[0];
            e_.set_fanins(g, fi);
            e_.set_type(g, flip(e_.type(g)));
            e_.remove_if_dead(inv);
            return true;
        }
        return false;
    }

    void push_inverter(GateId g) {
        e_.set_type(g, flip(e_.type(g)));
        if (rng_.coin()) {
            const GateId n = add_not(g);
            e_.replace_uses(g, n);
        } else {
            Fanins fi = fanins_of(e_, g);
            const std::size_t i = rng_.uniform(fi.size());
            fi[i] = add_not(fi[i]);
            e_.set_fanins(g, fi);
        }
    }

    bool join_inverters(GateId g) {
        Fanins fi = fanins_of(e_, g);
        for (GateId f : fi) {
            if (e_.type(f) != GateType::Not) return false;
        }
        const Fanins nots = fi;
        for (GateId& f : fi) f = e_.fanins(f)[0];
        GateType t = e_.type(g);
        switch (t) {
            case GateType::And: t = GateType::Nor; break;
            case GateType::Or: t = GateType::Nand; break;
            case GateType::Nand: t = GateType::Or; break;
            default: t = GateType::And; break;
        }
        e_.set_type(g, t);
        e_.set_fanins(g, fi);
        for (GateId n : nots) e_.remove_if_dead(n);
        return true;
    }

    void split_inverters(GateId g) {
        Fanins fi = fanins_of(e_, g);
        for (GateId& f : fi) f = add_not(f);
        e_.set_type(g, e_.type(g) == GateType::Nand ? GateType::Or : GateType::And);
        e_.set_fanins(g, fi);
    }

    bool regroup(GateId g) {
        Fanins gf = fanins_of(e_, g);
        for (std::size_t hi = 0; hi < gf.size(); ++hi) {
            const GateId h = gf[hi];
            if (e_.type(h) != e_.type(g) || e_.fanouts(h).size() != 1) continue;
            std::vector<std::size_t> others;
            for (std::size_t j = 0; j < gf.size(); ++j) {
                if (gf[j] != h) others.push_back(j);
            }
            if (others.empty()) continue;
            Fanins hf = fanins_of(e_, h);
            const std::size_t xi = rng_.uniform(hf.size());
            const std::size_t yi = others[rng_.uniform(others.size())];
            std::swap(hf[xi], gf[yi]);
            e_.set_fanins(h, hf);
            e_.set_fanins(g, gf);
            return true;
        }
        return false;
    }

    NetlistEditor& e_;
    Rng& rng_;
};

bool rewritable(const NetlistEditor& e, GateId g) {
    const GateType t = e.type(g);
    return e.alive(g) && netcore::is_logic(t) && !netcore::is_constant(t);
}

}  // namespace

std::size_t sweep(NetlistEditor& e, Rng& rng, RewriteCounts* counts) {
    std::vector<GateId> order;
    for (GateId g = 0; g < e.size(); ++g) {
        if (rewritable(e, g)) order.push_back(g);
    }
    return sweep_gates(e, std::move(order), rng, counts);
}

std::size_t sweep_gates(NetlistEditor& e, std::vector<GateId> order, Rng& rng,
                        RewriteCounts* counts) {
    rng.shuffle(order);
    Pass pass(e, rng);
    std::size_t applied = 0;
    for (GateId g : order) {
        if (!rewritable(e, g)) continue;
        const char* family = pass.apply(g);
        if (family == nullptr) continue;
        ++applied;
        if (counts) ++(*counts)[family];
    }
    return applied;
}

Netlist resynthesize(const Netlist& n, std::size_t effort, std::uint64_t seed,
                     RewriteCounts* counts) {
    if (effort == 0) return n;
    NetlistEditor e(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < effort; ++i) sweep(e, rng, counts);
    e.remove_all_dead();
    return e.freeze();
}

std::size_t propagate_constants(NetlistEditor& e) {
    std::size_t total = 0;
    for (bool changed = true; changed;) {
        changed = false;
        for (GateId g : e.topo_order()) {
            if (!rewritable(e, g)) continue;
            if (fold_constants(e, g)) {
                ++total;
                changed = true;
            }
        }
    }
    return total;
}

Netlist constant_propagate(const Netlist& n, const std::vector<netcore::KeyBit>& pins) {
    NetlistEditor e(n);
    for (const auto& pin : pins) {
        const auto id = e.find(pin.name);
        if (!id || e.type(*id) != GateType::Input) {
            throw std::invalid_argument("unknown pin '" + pin.name + "'");
        }
        e.replace_uses(*id, e.constant(pin.value));
        e.remove_input(*id);
    }
    propagate_constants(e);
    e.remove_all_dead();
    return e.freeze();
}

SynthReport report(const Netlist& n) {
    SynthReport r;
    std::vector<std::size_t> depth(n.size(), 0);
    for (GateId g : n.topo_order()) {
        const GateType t = n.type(g);
        std::size_t d = 0;
        for (GateId f : n.fanins(g)) d = std::max(d, depth[f]);
        if (t == GateType::Output) {
            depth[g] = d;
            r.logic_depth = std::max(r.logic_depth, d);
            continue;
        }
        if (!netcore::is_logic(t)) continue;
        ++r.gate_count_by_type[netcore::index_of(t)];
        ++r.total_gates;
        r.literal_count += n.fanins(g).size();
        depth[g] = netcore::is_constant(t) ? 0 : d + 1;
    }
    return r;
}

const char* const kReportCsvHeader =
    "circuit,total,depth,literals,and,nand,or,nor,xor,xnor,not,buf,const0,const1";

std::string report_csv_row(std::string_view circuit, const SynthReport& r) {
    std::string row(circuit);
    for (std::size_t v : {r.total_gates, r.logic_depth, r.literal_count}) {
        row += ',' + std::to_string(v);
    }
    for (GateType t : netcore::kAllGateTypes) {
        if (netcore::is_logic(t)) row += ',' + std::to_string(r.count(t));
    }
    return row;
}

}  // namespace lockbench::resynth
