#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lockbench/attacks/report.hpp"
#include "lockbench/netcore/key_mapping.hpp"
#include "lockbench/netcore/netlist.hpp"

namespace lockbench::attacks {

struct SweepOptions {
    std::size_t effort = 1;  ///< resynthesis applied after each constant propagation
    std::uint64_t seed = 0;
};

/// Per-type gate counts, total gates, depth and literals (15 entries).
inline constexpr std::size_t kSweepFeatures = 15;

/// Report of `n` with `key` tied to `bit`, propagated and resynthesized.
std::vector<double> sweep_features(const netcore::Netlist& n, const std::string& key, bool bit,
                                   const SweepOptions& opt);

/// features(key = 1) - features(key = 0)
std::vector<double> sweep_delta(const netcore::Netlist& n, const std::string& key,
                                const SweepOptions& opt);

struct SweepModel {
    /// Per feature: mean delta over keys with bit 1 minus mean over bit 0.
    std::vector<double> weights;

    /// weights . delta; positive favors bit 1.
    double score(const std::vector<double>& delta) const;
};

using TrainingLock = std::pair<netcore::Netlist, netcore::KeyMapping>;

/// Throws AttackError on an empty training set.
SweepModel train_sweep(const std::vector<TrainingLock>& training, const SweepOptions& opt);

/// |score| <= margin abstains. The report is scored against `truth`.
AttackReport sweep_attack(const SweepModel& model, const netcore::Netlist& target,
                          const netcore::KeyMapping& truth, double margin, const SweepOptions& opt);
AttackReport sweep_attack(const std::vector<TrainingLock>& training, const netcore::Netlist& target,
                          const netcore::KeyMapping& truth, double margin = 0.0,
                          const SweepOptions& opt = {});

}  // namespace lockbench::attacks
