#include "lockbench/attacks/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lockbench/util/rng.hpp"

namespace lockbench::attacks {

namespace {

double gini(double pos, double n) {
    if (n == 0) return 0.0;
    const double p = pos / n;
    return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<double>>& rows, const std::vector<bool>& labels,
                std::size_t mtry, Rng& rng)
        : rows_(rows), labels_(labels), mtry_(mtry), rng_(rng), order_(rows.front().size()) {
        std::iota(order_.begin(), order_.end(), 0);
    }

    RandomForest::Tree build(std::vector<std::size_t> idx) {
        tree_.clear();
        grow(idx);
        return std::move(tree_);
    }

private:
    struct Split {
        std::size_t feature = 0;
        double threshold = 0.0;
        double impurity = INFINITY;
    };

    std::int32_t grow(std::vector<std::size_t>& idx) {
        const auto id = static_cast<std::int32_t>(tree_.size());
        tree_.emplace_back();
        std::uint32_t pos = 0;
        for (std::size_t i : idx) pos += labels_[i];
        tree_[id].positives = pos;
        tree_[id].negatives = static_cast<std::uint32_t>(idx.size()) - pos;
        if (pos == 0 || pos == idx.size()) return id;

        const Split s = best_split(idx);
        if (std::isinf(s.impurity)) return id;
        std::vector<std::size_t> l;
        std::vector<std::size_t> r;
        for (std::size_t i : idx) (rows_[i][s.feature] <= s.threshold ? l : r).push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        tree_[id].feature = static_cast<std::int32_t>(s.feature);
        tree_[id].threshold = s.threshold;
        const std::int32_t left = grow(l);
        const std::int32_t right = grow(r);
        tree_[id].left = left;
        tree_[id].right = right;
        return id;
    }

    // Features are visited in a random order until mtry of them have offered
    // a split (or none are left).
    Split best_split(const std::vector<std::size_t>& idx) {
        rng_.shuffle(order_);
        Split best;
        std::size_t tried = 0;
        std::vector<std::pair<double, bool>> col(idx.size());
        const double n = static_cast<double>(idx.size());
        for (std::size_t f : order_) {
            if (tried >= mtry_) break;
            for (std::size_t j = 0; j < idx.size(); ++j) col[j] = {rows_[idx[j]][f], labels_[idx[j]]};
            std::sort(col.begin(), col.end());
            if (col.front().first == col.back().first) continue;
            ++tried;
            double total_pos = 0;
            for (const auto& c : col) total_pos += c.second;
            double left_pos = 0;
            for (std::size_t j = 0; j + 1 < col.size(); ++j) {
                left_pos += col[j].second;
                if (col[j].first == col[j + 1].first) continue;
                const double nl = static_cast<double>(j + 1);
                const double nr = n - nl;
                const double imp = nl * gini(left_pos, nl) + nr * gini(total_pos - left_pos, nr);
                if (imp < best.impurity) {
                    best.impurity = imp;
                    best.feature = f;
                    best.threshold = col[j].first + (col[j + 1].first - col[j].first) / 2;
                }
            }
        }
        return best;
    }

    const std::vector<std::vector<double>>& rows_;
    const std::vector<bool>& labels_;
    std::size_t mtry_;
    Rng& rng_;
    std::vector<std::size_t> order_;
    RandomForest::Tree tree_;
};

bool tree_vote(const RandomForest::Tree& t, const std::vector<double>& row) {
    std::int32_t at = 0;
    while (t[at].feature >= 0) {
        at = row[t[at].feature] <= t[at].threshold ? t[at].left : t[at].right;
    }
    return t[at].positives >= t[at].negatives;
}

}  // namespace

RandomForest RandomForest::train(const std::vector<std::vector<double>>& rows,
                                 const std::vector<bool>& labels, const ForestOptions& opt) {
    if (rows.empty() || rows.size() != labels.size()) {
        throw std::invalid_argument("forest needs one label per row and at least one row");
    }
    const std::size_t d = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != d) throw std::invalid_argument("rows differ in width");
    }
    const auto pos = std::count(labels.begin(), labels.end(), true);
    if (pos == 0 || static_cast<std::size_t>(pos) == labels.size()) {
        throw AttackError("training data holds a single class");
    }
    if (opt.n_trees == 0) throw std::invalid_argument("forest needs at least one tree");
    const std::size_t mtry =
        opt.mtry ? opt.mtry : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));

    RandomForest rf;
    rf.n_features_ = d;
    for (std::size_t t = 0; t < opt.n_trees; ++t) {
        Rng rng(derive_seed(opt.seed, t));
        std::vector<std::size_t> sample(rows.size());
        for (auto& i : sample) i = rng.uniform(rows.size());
        TreeBuilder b(rows, labels, std::max<std::size_t>(1, mtry), rng);
        rf.trees_.push_back(b.build(std::move(sample)));
    }
    return rf;
}

std::size_t RandomForest::votes(const std::vector<double>& row) const {
    if (row.size() != n_features_) throw std::invalid_argument("feature width mismatch");
    std::size_t v = 0;
    for (const auto& t : trees_) v += tree_vote(t, row);
    return v;
}

bool RandomForest::predict(const std::vector<double>& row) const {
    return 2 * votes(row) >= trees_.size();
}

double accuracy(const RandomForest& rf, const std::vector<std::vector<double>>& rows,
                const std::vector<bool>& labels) {
    if (rows.empty()) return 0.0;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) ok += rf.predict(rows[i]) == labels[i];
    return static_cast<double>(ok) / static_cast<double>(rows.size());
}

}  // namespace lockbench::attacks
