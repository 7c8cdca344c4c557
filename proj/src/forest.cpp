#include "trollscope/forest.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "serial.hpp"
#include "trollscope/error.hpp"

namespace trollscope::forest {

namespace {
constexpr double kImpurityEps = 1e-12;
}

std::uint64_t NodeClassCounts::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double gini(const NodeClassCounts& node) {
    const auto total = node.total();
    if (total == 0) throw Error(ErrorCode::EmptyNode, "gini of an empty node");
    double g = 0.0;
    for (auto c : node.counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        g += p * (1.0 - p);
    }
    return g;
}

double entropy(const NodeClassCounts& node) {
    const auto total = node.total();
    if (total == 0) throw Error(ErrorCode::EmptyNode, "entropy of an empty node");
    double h = 0.0;
    for (auto c : node.counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

double impurity(Impurity measure, const NodeClassCounts& node) {
    return measure == Impurity::Gini ? gini(node) : entropy(node);
}

std::optional<Split> best_split(const LabeledRows& data, const std::vector<std::size_t>& members,
                                const std::vector<std::uint32_t>& candidate_features, Impurity measure,
                                std::size_t min_leaf) {
    const std::size_t n = members.size();
    if (n < 2) return std::nullopt;
    const auto& rows = *data.rows;
    const auto& labels = *data.labels;

    NodeClassCounts parent{std::vector<std::uint64_t>(data.n_classes, 0)};
    for (auto m : members) ++parent.counts[labels[m]];
    const double parent_impurity = impurity(measure, parent);
    if (parent_impurity <= kImpurityEps) return std::nullopt;

    std::vector<std::uint32_t> features = candidate_features;
    std::sort(features.begin(), features.end());
    features.erase(std::unique(features.begin(), features.end()), features.end());

    std::optional<Split> best;
    std::vector<std::pair<double, std::uint32_t>> column(n);
    NodeClassCounts left{std::vector<std::uint64_t>(data.n_classes)};
    NodeClassCounts right{std::vector<std::uint64_t>(data.n_classes)};
    const auto dn = static_cast<double>(n);

    for (auto f : features) {
        for (std::size_t i = 0; i < n; ++i) column[i] = {rows[members[i]].at(f), labels[members[i]]};
        std::sort(column.begin(), column.end());
        if (column.front().first == column.back().first) continue;

        std::fill(left.counts.begin(), left.counts.end(), 0);
        right.counts = parent.counts;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            ++left.counts[column[i].second];
            --right.counts[column[i].second];
            const double lo = column[i].first;
            const double hi = column[i + 1].first;
            if (lo == hi) continue;
            const std::size_t n_left = i + 1;
            if (n_left < min_leaf || n - n_left < min_leaf) continue;

            const double weighted = (static_cast<double>(n_left) * impurity(measure, left) +
                                     static_cast<double>(n - n_left) * impurity(measure, right)) /
                                    dn;
            if (!(weighted < parent_impurity - kImpurityEps)) continue;
            const double decrease = parent_impurity - weighted;
            if (best && !(decrease > best->impurity_decrease + kImpurityEps)) continue;

            double threshold = lo + (hi - lo) / 2.0;
            if (!(threshold < hi)) threshold = lo;
            best = Split{f, threshold, decrease};
        }
    }
    return best;
}

// ---------------------------------------------------------------------------

std::uint32_t Tree::predict(const SparseVector& x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& node = nodes[i];
        i = x.at(static_cast<std::uint32_t>(node.feature)) <= node.threshold ? node.left : node.right;
    }
    return nodes[i].prediction;
}

std::size_t Tree::depth() const {
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        deepest = std::max(deepest, d[i]);
        if (!nodes[i].is_leaf()) {
            d[nodes[i].left] = d[i] + 1;
            d[nodes[i].right] = d[i] + 1;
        }
    }
    return deepest;
}

std::uint32_t ForestConfig::resolved_mtry(std::size_t n_features) const {
    if (mtry) return *mtry;
    return static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(n_features))));
}

void ForestConfig::validate(std::size_t n_features) const {
    if (n_trees == 0) throw Error(ErrorCode::InvalidArgument, "n_trees must be positive");
    if (min_leaf == 0) throw Error(ErrorCode::InvalidArgument, "min_leaf must be positive");
    const auto m = resolved_mtry(n_features);
    if (m < 1 || m > n_features) {
        throw Error(ErrorCode::InvalidArgument, "mtry must lie in [1, " + std::to_string(n_features) + "]");
    }
}

namespace {

std::vector<std::uint32_t> sample_features(std::size_t n_features, std::uint32_t mtry, Rng& rng) {
    std::vector<std::uint32_t> out;
    out.reserve(mtry);
    if (mtry >= n_features) {
        out.resize(n_features);
        std::iota(out.begin(), out.end(), 0u);
        return out;
    }
    if (2 * static_cast<std::size_t>(mtry) > n_features) {
        std::vector<std::uint32_t> all(n_features);
        std::iota(all.begin(), all.end(), 0u);
        for (std::uint32_t i = 0; i < mtry; ++i) {
            const auto j = i + uniform_index(rng, n_features - i);
            std::swap(all[i], all[j]);
            out.push_back(all[i]);
        }
        return out;
    }
    std::unordered_set<std::uint32_t> seen;
    while (out.size() < mtry) {
        const auto f = static_cast<std::uint32_t>(uniform_index(rng, n_features));
        if (seen.insert(f).second) out.push_back(f);
    }
    return out;
}

TreeNode make_leaf(const LabeledRows& data, const std::vector<std::size_t>& members) {
    TreeNode leaf;
    leaf.counts.assign(data.n_classes, 0);
    for (auto m : members) ++leaf.counts[(*data.labels)[m]];
    leaf.prediction = static_cast<std::uint32_t>(
        std::max_element(leaf.counts.begin(), leaf.counts.end()) - leaf.counts.begin());
    return leaf;
}

class Grower {
public:
    Grower(const LabeledRows& data, std::size_t n_features, const ForestConfig& config, Rng& rng)
        : data_(data), n_features_(n_features), config_(config), rng_(rng),
          mtry_(config.resolved_mtry(n_features)) {}

    std::uint32_t grow(const std::vector<std::size_t>& members, std::uint32_t depth) {
        const auto index = static_cast<std::uint32_t>(tree_.nodes.size());
        tree_.nodes.push_back(make_leaf(data_, members));
        if (config_.max_depth && depth >= *config_.max_depth) return index;

        const auto candidates = sample_features(n_features_, mtry_, rng_);
        const auto split = best_split(data_, members, candidates, config_.impurity, config_.min_leaf);
        if (!split) return index;

        std::vector<std::size_t> left, right;
        for (auto m : members) {
            ((*data_.rows)[m].at(split->feature) <= split->threshold ? left : right).push_back(m);
        }
        const auto l = grow(left, depth + 1);
        const auto r = grow(right, depth + 1);
        auto& node = tree_.nodes[index];
        node.feature = split->feature;
        node.threshold = split->threshold;
        node.left = l;
        node.right = r;
        node.counts.clear();
        node.prediction = 0;
        return index;
    }

    Tree take() { return std::move(tree_); }

private:
    const LabeledRows& data_;
    std::size_t n_features_;
    const ForestConfig& config_;
    Rng& rng_;
    std::uint32_t mtry_;
    Tree tree_;
};

}  // namespace

Tree grow_tree(const LabeledRows& data, const std::vector<std::size_t>& members, std::size_t n_features,
               const ForestConfig& config, Rng& rng) {
    if (members.empty()) throw Error(ErrorCode::EmptyData, "cannot grow a tree from no rows");
    if (data.n_classes == 0) throw Error(ErrorCode::InvalidArgument, "no classes");
    config.validate(n_features);
    Grower grower(data, n_features, config, rng);
    grower.grow(members, 0);
    return grower.take();
}

ForestModel train_forest(const DocTermMatrix& features, const std::vector<AccountCategory>& labels,
                         const ForestConfig& config) {
    if (features.n_docs() == 0) throw Error(ErrorCode::EmptyData, "no training rows");
    if (labels.size() != features.n_docs()) {
        throw Error(ErrorCode::DimensionMismatch, "labels and rows differ in length");
    }
    config.validate(features.n_terms);

    ForestModel model;
    for (auto c : kAllCategories) {
        if (std::find(labels.begin(), labels.end(), c) != labels.end()) model.classes.push_back(c);
    }
    model.n_features = features.n_terms;
    model.impurity = config.impurity;
    model.feature_space.n_terms = features.n_terms;
    model.feature_space.weighting = features.weighting;

    std::vector<std::uint32_t> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        y[i] = static_cast<std::uint32_t>(std::find(model.classes.begin(), model.classes.end(), labels[i]) -
                                          model.classes.begin());
    }
    const LabeledRows data{&features.rows, &y, model.classes.size()};
    const std::size_t n = features.n_docs();

    auto grow_one = [&](std::uint32_t t) {
        Rng rng(derive_seed(config.seed, t));
        std::vector<std::size_t> members(n);
        if (config.bootstrap) {
            for (auto& m : members) m = static_cast<std::size_t>(uniform_index(rng, n));
        } else {
            std::iota(members.begin(), members.end(), std::size_t{0});
        }
        return grow_tree(data, members, features.n_terms, config, rng);
    };

    model.trees.resize(config.n_trees);
    const std::uint32_t workers = std::max(1u, std::min(std::thread::hardware_concurrency(), config.n_trees));
    std::vector<std::future<void>> jobs;
    for (std::uint32_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::uint32_t t = w; t < config.n_trees; t += workers) model.trees[t] = grow_one(t);
        }));
    }
    for (auto& j : jobs) j.get();
    return model;
}

ForestPrediction predict_forest(const ForestModel& model, const SparseVector& x) {
    if (x.dim != model.n_features) {
        throw Error(ErrorCode::DimensionMismatch, "input has dimension " + std::to_string(x.dim) +
                                                      ", forest expects " + std::to_string(model.n_features));
    }
    ForestPrediction p;
    p.votes.assign(model.classes.size(), 0);
    for (const auto& tree : model.trees) ++p.votes[tree.predict(x)];
    const auto best = std::max_element(p.votes.begin(), p.votes.end()) - p.votes.begin();
    p.category = model.classes.at(static_cast<std::size_t>(best));
    return p;
}

// ---------------------------------------------------------------------------

namespace {

void write_node(std::ostream& out, const Tree& tree, std::uint32_t i) {
    const auto& node = tree.nodes[i];
    if (node.is_leaf()) {
        out << "L " << node.prediction;
        for (auto c : node.counts) out << ' ' << c;
        out << '\n';
        return;
    }
    out << "I " << node.feature << ' ' << serial::hex(node.threshold) << '\n';
    write_node(out, tree, node.left);
    write_node(out, tree, node.right);
}

std::uint32_t read_node(serial::TokenReader& r, Tree& tree, std::size_t n_classes, std::size_t n_features) {
    const auto index = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    const auto kind = r.word();
    if (kind == "L") {
        TreeNode leaf;
        leaf.prediction = static_cast<std::uint32_t>(r.uint());
        if (leaf.prediction >= n_classes) serial::TokenReader::fail("leaf prediction out of range");
        leaf.counts.resize(n_classes);
        for (auto& c : leaf.counts) c = r.uint();
        tree.nodes[index] = std::move(leaf);
        return index;
    }
    if (kind != "I") serial::TokenReader::fail("expected tree node, found '" + kind + "'");
    TreeNode node;
    node.feature = r.sint();
    if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= n_features) {
        serial::TokenReader::fail("split feature out of range");
    }
    node.threshold = r.real();
    node.left = read_node(r, tree, n_classes, n_features);
    node.right = read_node(r, tree, n_classes, n_features);
    tree.nodes[index] = std::move(node);
    return index;
}

}  // namespace

void save(std::ostream& out, const ForestModel& model) {
    out << "trollscope-forest 1\n";
    out << "classes " << model.classes.size();
    for (auto c : model.classes) out << ' ' << to_string(c);
    out << '\n';
    out << "impurity " << (model.impurity == Impurity::Gini ? "gini" : "entropy") << '\n';
    out << "feature_space " << serial::hex(model.feature_space.vocab_fingerprint) << ' '
        << model.feature_space.n_terms << ' ' << to_string(model.feature_space.weighting) << '\n';
    out << "n_features " << model.n_features << '\n';
    out << "trees " << model.trees.size() << '\n';
    for (const auto& tree : model.trees) {
        out << "tree " << tree.nodes.size() << '\n';
        write_node(out, tree, 0);
    }
    out << "end\n";
}

ForestModel load(std::istream& in) {
    serial::TokenReader r(in);
    r.expect("trollscope-forest");
    if (r.uint() != 1) serial::TokenReader::fail("unsupported forest model version");
    ForestModel m;
    r.expect("classes");
    const auto n_classes = r.uint();
    for (std::uint64_t i = 0; i < n_classes; ++i) {
        auto c = try_parse_category(r.word());
        if (!c) serial::TokenReader::fail("unknown class in model file");
        m.classes.push_back(*c);
    }
    r.expect("impurity");
    const auto imp = r.word();
    if (imp == "gini") {
        m.impurity = Impurity::Gini;
    } else if (imp == "entropy") {
        m.impurity = Impurity::Entropy;
    } else {
        serial::TokenReader::fail("unknown impurity '" + imp + "'");
    }
    r.expect("feature_space");
    m.feature_space.vocab_fingerprint = r.uint(16);
    m.feature_space.n_terms = r.uint();
    auto weighting = try_parse_weighting(r.word());
    if (!weighting) serial::TokenReader::fail("unknown weighting");
    m.feature_space.weighting = *weighting;
    r.expect("n_features");
    m.n_features = r.uint();
    r.expect("trees");
    const auto n_trees = r.uint();
    for (std::uint64_t t = 0; t < n_trees; ++t) {
        r.expect("tree");
        const auto n_nodes = r.uint();
        Tree tree;
        tree.nodes.reserve(n_nodes);
        read_node(r, tree, m.classes.size(), m.n_features);
        if (tree.nodes.size() != n_nodes) serial::TokenReader::fail("tree node count mismatch");
        m.trees.push_back(std::move(tree));
    }
    r.expect("end");
    return m;
}

}  // namespace trollscope::forest
