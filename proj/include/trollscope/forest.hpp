#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include "trollscope/category.hpp"
#include "trollscope/random.hpp"
#include "trollscope/sparse.hpp"
#include "trollscope/textprep.hpp"

namespace trollscope::forest {

struct NodeClassCounts {
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const noexcept;
};

/// sum_k p_k (1 - p_k). Throws Error{EmptyNode}.
double gini(const NodeClassCounts& node);
/// -sum_k p_k log2 p_k with 0 log 0 = 0. Throws Error{EmptyNode}.
double entropy(const NodeClassCounts& node);

enum class Impurity { Gini, Entropy };

double impurity(Impurity measure, const NodeClassCounts& node);

/// Rows with class indices in [0, n_classes).
struct LabeledRows {
    const std::vector<SparseVector>* rows = nullptr;
    const std::vector<std::uint32_t>* labels = nullptr;
    std::size_t n_classes = 0;
};

struct Split {
    std::uint32_t feature = 0;
    double threshold = 0.0;
    double impurity_decrease = 0.0;
};

/// Best axis-aligned split of the rows at `members` over `candidate_features`,
/// scanning midpoints between consecutive distinct values (x <= threshold goes
/// left). Only splits whose count-weighted child impurity is strictly below the
/// parent's qualify, and both children must hold at least min_leaf rows.
/// Ties go to the smaller (feature, threshold). nullopt when nothing qualifies.
std::optional<Split> best_split(const LabeledRows& data, const std::vector<std::size_t>& members,
                                const std::vector<std::uint32_t>& candidate_features, Impurity measure,
                                std::size_t min_leaf = 1);

/// Flat pre-order tree. A node with feature < 0 is a leaf.
struct TreeNode {
    std::int64_t feature = -1;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::vector<std::uint64_t> counts;
    std::uint32_t prediction = 0;  // class index, argmax of counts

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    std::uint32_t predict(const SparseVector& x) const;
    std::size_t depth() const;
    friend bool operator==(const Tree&, const Tree&) = default;
};

struct ForestConfig {
    std::uint32_t n_trees = 100;
    /// Features sampled per node; ceil(sqrt(V)) when absent.
    std::optional<std::uint32_t> mtry;
    /// Depth 0 is a single leaf. Unlimited when absent.
    std::optional<std::uint32_t> max_depth;
    std::uint32_t min_leaf = 1;
    Impurity impurity = Impurity::Gini;
    bool bootstrap = true;
    std::uint64_t seed = 0;

    std::uint32_t resolved_mtry(std::size_t n_features) const;
    void validate(std::size_t n_features) const;
};

/// Grows one tree on the rows at `members` (repeats allowed, e.g. a bootstrap).
/// Throws Error{EmptyData}.
Tree grow_tree(const LabeledRows& data, const std::vector<std::size_t>& members, std::size_t n_features,
               const ForestConfig& config, Rng& rng);

struct ForestModel {
    std::vector<AccountCategory> classes;
    std::size_t n_features = 0;
    Impurity impurity = Impurity::Gini;
    std::vector<Tree> trees;
    FeatureSpace feature_space;

    friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

/// Tree t is grown from a bootstrap drawn with an RNG seeded from (seed, t).
/// Classes are the distinct labels in declaration order. Throws Error{EmptyData},
/// Error{DimensionMismatch}.
ForestModel train_forest(const DocTermMatrix& features, const std::vector<AccountCategory>& labels,
                         const ForestConfig& config);

struct ForestPrediction {
    AccountCategory category;
    std::vector<std::uint32_t> votes;  // parallel to model.classes
};

/// Majority vote; ties go to the earlier class.
ForestPrediction predict_forest(const ForestModel& model, const SparseVector& x);

void save(std::ostream& out, const ForestModel& model);
ForestModel load(std::istream& in);

}  // namespace trollscope::forest
