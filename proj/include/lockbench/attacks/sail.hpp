#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lockbench/attacks/forest.hpp"
#include "lockbench/attacks/report.hpp"
#include "lockbench/features/features.hpp"
#include "lockbench/locker/locker.hpp"

namespace lockbench::attacks {

using features::Sequence;
using features::SubgraphSample;
using netcore::KeyMapping;
using netcore::Netlist;

/// One relocked-and-resynthesized training instance. Only the keys in
/// `mapping` (those added by the relock) produce training samples.
struct TrainingInstance {
    Netlist pre;
    Netlist post;
    KeyMapping mapping;
};

struct TrainingSetup {
    locker::Scheme scheme = locker::Scheme::Rll;
    locker::Palette palette = locker::Palette::xnor();
    std::size_t K = 64;  ///< keys added per relock
    std::size_t n_instances = 19;
    std::size_t effort = 2;
    std::uint64_t seed = 0;
};

/// Relocks `locked` with fresh keys and resynthesizes, n_instances times.
/// Throws locker::LockError when the relock runs out of sites.
std::vector<TrainingInstance> gen_training_data(const Netlist& locked, const TrainingSetup& setup);

/// A key's region before and after resynthesis; `post` carries the label.
struct SamplePair {
    SubgraphSample pre;
    SubgraphSample post;
};

/// Pairs pre and post samples by (key, sub) for the keys in `keys`.
/// Throws std::invalid_argument when one side is missing.
std::vector<SamplePair> make_pairs(const std::vector<SubgraphSample>& pre,
                                   const std::vector<SubgraphSample>& post, const KeyMapping& keys);
std::vector<SamplePair> make_pairs(const TrainingInstance& inst,
                                   const std::vector<std::size_t>& sub_sizes);

/// Post-sequence to pre-sequence retrieval with cumulative voting across
/// sub-sizes.
class ReconModel {
public:
    void add(const SamplePair& p);
    bool empty() const noexcept { return stores_.empty(); }

    /// `posts` maps sub-size to the observed post-sequence. Candidates come
    /// from the largest sub-size with an exact hit; each scores the sum over
    /// sub-sizes up to that one of its prefix's relative frequency. Ties go
    /// to the smaller sequence. nullopt when nothing matches.
    std::optional<Sequence> predict(const std::map<std::size_t, Sequence>& posts) const;

private:
    // sub -> post -> pre -> count
    std::map<std::size_t, std::map<Sequence, std::map<Sequence, std::size_t>>> stores_;
};

/// Key bit read from a key-gate region sequence under the palette's kinds.
/// Plain kinds decode by root type; MUX roots by the position of the
/// inverted data input (needs sub >= 5). nullopt when undecidable.
std::optional<bool> decode_sequence(const Sequence& seq, const locker::Palette& palette);

struct SailOptions {
    std::vector<std::size_t> sub_sizes = features::kDefaultSubSizes;
    std::size_t rf_sub = 6;  ///< sub-size the change classifier reads
    std::size_t n_trees = 50;
    locker::Palette palette = locker::Palette::xnor();
    std::uint64_t seed = 0;
};

struct SailModels {
    /// Absent when every training sample had the same label; `constant`
    /// then stands in for the classifier.
    std::optional<RandomForest> rf;
    features::Label constant = features::Label::Unchanged;
    ReconModel recon;
    std::size_t rf_sub = 6;

    features::Label classify(const SubgraphSample& s) const;
};

std::vector<double> as_row(const SubgraphSample& s);

/// Throws AttackError on an empty corpus.
SailModels train_sail(const std::vector<SamplePair>& pairs, const SailOptions& opt);

/// Change prediction on the target's keys, reconstruction of predicted
/// changes, and decoding. `truth_labels` (post samples with labels at
/// rf_sub) enables the classifier accuracy. The report is scored.
AttackReport sail_attack(const Netlist& target, const SailModels& models, const KeyMapping& truth,
                         const SailOptions& opt,
                         const std::vector<SubgraphSample>* truth_labels = nullptr);

/// Type-decode baseline: every region decoded as observed.
AttackReport decode_attack(const Netlist& target, const KeyMapping& truth, const SailOptions& opt);

/// Labeled samples at one sub-size: classifier accuracy against the labels.
double ml1_accuracy(const SailModels& models, const std::vector<SubgraphSample>& labeled);

}  // namespace lockbench::attacks
