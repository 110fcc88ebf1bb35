#include "lockbench/attacks/sweep.hpp"

#include <cmath>

#include "lockbench/attacks/forest.hpp"
#include "lockbench/resynth/resynth.hpp"

namespace lockbench::attacks {

std::vector<double> sweep_features(const netcore::Netlist& n, const std::string& key, bool bit,
                                   const SweepOptions& opt) {
    const auto tied = resynth::constant_propagate(n, {{key, bit}});
    const auto r = resynth::report(resynth::resynthesize(tied, opt.effort, opt.seed));
    std::vector<double> f(r.gate_count_by_type.begin(), r.gate_count_by_type.end());
    f.push_back(static_cast<double>(r.total_gates));
    f.push_back(static_cast<double>(r.logic_depth));
    f.push_back(static_cast<double>(r.literal_count));
    return f;
}

std::vector<double> sweep_delta(const netcore::Netlist& n, const std::string& key,
                                const SweepOptions& opt) {
    auto one = sweep_features(n, key, true, opt);
    const auto zero = sweep_features(n, key, false, opt);
    for (std::size_t i = 0; i < one.size(); ++i) one[i] -= zero[i];
    return one;
}

double SweepModel::score(const std::vector<double>& delta) const {
    double s = 0;
    for (std::size_t i = 0; i < weights.size() && i < delta.size(); ++i) s += weights[i] * delta[i];
    return s;
}

SweepModel train_sweep(const std::vector<TrainingLock>& training, const SweepOptions& opt) {
    std::vector<double> sum[2] = {std::vector<double>(kSweepFeatures, 0.0),
                                  std::vector<double>(kSweepFeatures, 0.0)};
    std::size_t count[2] = {0, 0};
    for (const auto& [n, mapping] : training) {
        for (const auto& b : mapping.bits()) {
            const auto d = sweep_delta(n, b.name, opt);
            for (std::size_t i = 0; i < kSweepFeatures; ++i) sum[b.value][i] += d[i];
            ++count[b.value];
        }
    }
    if (count[0] + count[1] == 0) throw AttackError("SWEEP needs at least one training key");
    SweepModel m;
    m.weights.resize(kSweepFeatures);
    for (std::size_t i = 0; i < kSweepFeatures; ++i) {
        const double m1 = count[1] ? sum[1][i] / static_cast<double>(count[1]) : 0.0;
        const double m0 = count[0] ? sum[0][i] / static_cast<double>(count[0]) : 0.0;
        m.weights[i] = m1 - m0;
    }
    return m;
}

AttackReport sweep_attack(const SweepModel& model, const netcore::Netlist& target,
                          const netcore::KeyMapping& truth, double margin, const SweepOptions& opt) {
    AttackReport rep;
    for (netcore::GateId k : target.keys()) {
        const std::string& name = target.name(k);
        const double s = model.score(sweep_delta(target, name, opt));
        KeyGuess g{name, std::nullopt, std::abs(s), "sweep"};
        if (s > margin) {
            g.guess = true;
        } else if (s < -margin) {
            g.guess = false;
        } else {
            g.stage = "abstain";
        }
        rep.guesses.push_back(std::move(g));
    }
    score_into(rep, truth);
    return rep;
}

AttackReport sweep_attack(const std::vector<TrainingLock>& training, const netcore::Netlist& target,
                          const netcore::KeyMapping& truth, double margin, const SweepOptions& opt) {
    return sweep_attack(train_sweep(training, opt), target, truth, margin, opt);
}

}  // namespace lockbench::attacks
