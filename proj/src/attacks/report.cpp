#include "lockbench/attacks/report.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace lockbench::attacks {

Score score(const AttackReport& report, const netcore::KeyMapping& truth) {
    std::set<std::string> names;
    for (const auto& g : report.guesses) {
        if (!names.insert(g.key).second) throw std::invalid_argument("duplicate key '" + g.key + "' in report");
    }
    if (names.size() != truth.size()) throw std::invalid_argument("report and key file differ in size");
    Score s;
    s.total = truth.size();
    for (const auto& g : report.guesses) {
        const auto t = truth.find(g.key);
        if (!t) throw std::invalid_argument("key '" + g.key + "' missing from the key file");
        if (!g.guess) continue;
        ++s.decided;
        s.correct += *g.guess == *t;
    }
    s.accuracy = s.total ? static_cast<double>(s.correct) / static_cast<double>(s.total) : 0.0;
    return s;
}

Score score_into(AttackReport& report, const netcore::KeyMapping& truth) {
    const Score s = score(report, truth);
    report.accuracy = s.accuracy;
    return s;
}

std::string report_csv(const AttackReport& report, const netcore::KeyMapping& truth) {
    const Score s = score(report, truth);
    std::ostringstream os;
    os << "# accuracy=" << s.accuracy << " correct=" << s.correct << " decided=" << s.decided
       << " K=" << s.total << " (accuracy = correct / K, abstentions count as wrong)\n";
    os << kReportCsvHeader << '\n';
    for (const auto& g : report.guesses) {
        const bool t = *truth.find(g.key);
        os << g.key << ',' << (g.guess ? (*g.guess ? "1" : "0") : "X") << ',' << t << ','
           << (g.guess && *g.guess == t ? 1 : 0) << ',' << g.stage << '\n';
    }
    return os.str();
}

}  // namespace lockbench::attacks
