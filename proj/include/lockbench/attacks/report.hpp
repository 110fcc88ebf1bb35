#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lockbench/netcore/key_mapping.hpp"

namespace lockbench::attacks {

struct KeyGuess {
    std::string key;
    std::optional<bool> guess;  ///< nullopt: abstained
    double confidence = 1.0;
    std::string stage;
};

struct AttackReport {
    std::vector<KeyGuess> guesses;
    std::optional<double> ml1_accuracy;
    std::optional<double> ml2_accuracy;
    double accuracy = 0.0;  ///< set by score()
};

struct Score {
    std::size_t correct = 0;
    std::size_t decided = 0;
    std::size_t total = 0;
    double accuracy = 0.0;  ///< correct / total; abstentions count as wrong
};

/// Throws std::invalid_argument unless the report and the mapping cover the
/// same key names.
Score score(const AttackReport& report, const netcore::KeyMapping& truth);
/// score() and store the accuracy in the report.
Score score_into(AttackReport& report, const netcore::KeyMapping& truth);

inline constexpr const char* kReportCsvHeader = "key,guess,truth,correct,stage";

/// A '#' line with the accuracy (correct / K, abstentions wrong), the header,
/// then one row per key with guess 0, 1 or X.
std::string report_csv(const AttackReport& report, const netcore::KeyMapping& truth);

}  // namespace lockbench::attacks
