#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lockbench::attacks {

class AttackError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ForestOptions {
    std::size_t n_trees = 50;
    std::size_t mtry = 0;  ///< features tried per node; 0 means ceil(sqrt(d))
    std::uint64_t seed = 0;
};

/// Binary random forest: CART trees with Gini splits on bootstrap resamples.
/// Class `true` is the positive (Changed) class; vote ties go to it.
class RandomForest {
public:
    struct Node {
        std::int32_t feature = -1;  ///< -1 marks a leaf
        double threshold = 0.0;     ///< go left when x[feature] <= threshold
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::uint32_t positives = 0;
        std::uint32_t negatives = 0;

        friend bool operator==(const Node&, const Node&) = default;
    };
    using Tree = std::vector<Node>;

    /// Throws AttackError when `labels` hold a single class, and
    /// std::invalid_argument on empty or ragged input.
    static RandomForest train(const std::vector<std::vector<double>>& rows,
                              const std::vector<bool>& labels, const ForestOptions& opt = {});

    /// Trees voting for the positive class.
    std::size_t votes(const std::vector<double>& row) const;
    bool predict(const std::vector<double>& row) const;
    std::size_t n_trees() const noexcept { return trees_.size(); }
    std::size_t n_features() const noexcept { return n_features_; }
    const std::vector<Tree>& trees() const noexcept { return trees_; }

    friend bool operator==(const RandomForest&, const RandomForest&) = default;

private:
    std::size_t n_features_ = 0;
    std::vector<Tree> trees_;
};

/// Fraction of rows whose prediction equals the label.
double accuracy(const RandomForest& rf, const std::vector<std::vector<double>>& rows,
                const std::vector<bool>& labels);

}  // namespace lockbench::attacks
