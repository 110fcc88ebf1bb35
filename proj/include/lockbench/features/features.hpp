#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lockbench/netcore/editor.hpp"
#include "lockbench/netcore/netlist.hpp"

namespace lockbench::features {

using netcore::GateId;
using netcore::GateType;
using netcore::Netlist;

using Sequence = std::vector<GateType>;

inline constexpr std::size_t kVocabulary = netcore::kGateTypeCount;
inline const std::vector<std::size_t> kDefaultSubSizes{3, 5, 6};

enum class Label : std::uint8_t { Unchanged, Changed };
std::string_view to_string(Label l) noexcept;
Label label_from_string(std::string_view s);

struct SubgraphSample {
    std::string key_name;
    std::size_t sub_size = 0;
    Sequence type_sequence;
    std::vector<std::uint8_t> one_hot;  ///< sub_size * kVocabulary entries
    std::optional<Label> label;
};

class FeatureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The key-gate of a key-input: its lowest-id consumer that is not NOT/BUF,
/// looking through chains of inverters and buffers level by level. When only
/// inverters/buffers are found, the lowest-id direct consumer. Throws
/// FeatureError when the key drives no logic.
GateId key_gate(const Netlist& n, GateId key);
GateId key_gate(const netcore::NetlistEditor& e, GateId key);

/// Type sequence of the size-`sub` region around the key-gate of `key`.
Sequence key_sequence(const Netlist& n, GateId key, std::size_t sub);
Sequence key_sequence(const netcore::NetlistEditor& e, GateId key, std::size_t sub);

std::vector<std::uint8_t> one_hot(const Sequence& seq, std::size_t sub_size);

/// "XOR-AND-NOT"
std::string sequence_string(const Sequence& seq);
Sequence sequence_from_string(std::string_view s);

/// One sample per (key-input in n.keys() order, sub size in the given order).
std::vector<SubgraphSample> extract_samples(const Netlist& n,
                                            const std::vector<std::size_t>& sub_sizes);

/// Post samples labeled against pre: Unchanged iff the sequences are equal.
/// Throws std::invalid_argument unless both cover the same (key, sub) pairs.
std::vector<SubgraphSample> label_changes(const std::vector<SubgraphSample>& pre,
                                          const std::vector<SubgraphSample>& post);

/// Maximum over features of (mu1 - mu2)^2 / (var1 + var2) with population
/// variances. A zero numerator gives 0; a zero denominator with a nonzero
/// numerator gives +inf. Throws std::invalid_argument unless both classes are
/// present and rows have equal width.
double fisher_f1(const std::vector<std::vector<double>>& rows, const std::vector<bool>& labels);
/// Over the one-hot encodings of labeled samples, Changed vs Unchanged.
double fisher_f1(const std::vector<SubgraphSample>& samples);

inline constexpr double kF1CsvCap = 1e9;
/// Value written to CSV files: +inf becomes kF1CsvCap.
double f1_for_csv(double f1) noexcept;

struct ChangeDictionary {
    /// post sequence -> (pre sequence -> count)
    std::map<Sequence, std::map<Sequence, std::size_t>> entries;
    /// Sequences only ever observed unchanged.
    std::set<Sequence> unchanged_U;

    bool empty() const noexcept { return entries.empty(); }
};

/// Changed pairs accumulate into entries; unchanged sequences into U. A
/// sequence seen both ways stays in entries only.
ChangeDictionary build_dictionary(const std::vector<SubgraphSample>& pre,
                                  const std::vector<SubgraphSample>& post);

struct DatasetRow {
    std::string circuit;
    std::string instance;
    SubgraphSample sample;
};

inline constexpr const char* kDatasetHeader = "circuit,instance,key,sub,label,seq,onehot";
/// Recorded in the first line of every dataset file.
inline constexpr const char* kNeighborhoodTag =
    "# neighborhood: key-gate root, fan-out first, alternating, ascending ids";

void write_dataset(std::ostream& out, const std::vector<DatasetRow>& rows);
std::string dataset_csv(const std::vector<DatasetRow>& rows);
/// Skips '#' lines; throws std::runtime_error on malformed rows.
std::vector<DatasetRow> read_dataset(std::istream& in);

}  // namespace lockbench::features
