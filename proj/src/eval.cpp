#include "trollscope/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "trollscope/csv.hpp"
#include "trollscope/error.hpp"
#include "trollscope/random.hpp"

namespace trollscope::eval {

std::vector<std::size_t> largest_remainder_quotas(const std::vector<std::size_t>& class_sizes, std::size_t n) {
    const auto total = std::accumulate(class_sizes.begin(), class_sizes.end(), std::size_t{0});
    if (n > total) {
        throw Error(ErrorCode::SampleTooLarge,
                    "requested " + std::to_string(n) + " of " + std::to_string(total) + " records");
    }
    std::vector<std::size_t> quotas(class_sizes.size());
    if (total == 0) return quotas;

    // Exact integer arithmetic: n * size = quota * total + rem.
    std::vector<uint128_t> rems(class_sizes.size());
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < class_sizes.size(); ++k) {
        const auto prod = static_cast<uint128_t>(n) * class_sizes[k];
        quotas[k] = static_cast<std::size_t>(prod / total);
        rems[k] = prod % total;
        assigned += quotas[k];
    }
    std::vector<std::size_t> order(class_sizes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rems[a] > rems[b]; });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++quotas[order[i]];
    return quotas;
}

namespace {

SampleSplit sample_by_class(const std::vector<std::size_t>& class_of, std::size_t n_classes, std::size_t n,
                            std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> members(n_classes);
    for (std::size_t i = 0; i < class_of.size(); ++i) members[class_of[i]].push_back(i);
    std::vector<std::size_t> sizes(n_classes);
    for (std::size_t k = 0; k < n_classes; ++k) sizes[k] = members[k].size();
    const auto quotas = largest_remainder_quotas(sizes, n);

    std::vector<char> chosen(class_of.size(), 0);
    for (std::size_t k = 0; k < n_classes; ++k) {
        Rng rng(derive_seed(seed, k));
        shuffle(members[k].begin(), members[k].end(), rng);
        for (std::size_t i = 0; i < quotas[k]; ++i) chosen[members[k][i]] = 1;
    }
    SampleSplit out;
    out.sample.reserve(n);
    out.remainder.reserve(class_of.size() - n);
    for (std::size_t i = 0; i < class_of.size(); ++i) (chosen[i] ? out.sample : out.remainder).push_back(i);
    return out;
}

}  // namespace

SampleSplit stratified_sample(const std::vector<AccountCategory>& labels, std::size_t n, std::uint64_t seed) {
    std::vector<AccountCategory> classes;
    for (auto c : kAllCategories) {
        if (std::find(labels.begin(), labels.end(), c) != labels.end()) classes.push_back(c);
    }
    return stratified_sample(labels, classes, n, seed);
}

SampleSplit stratified_sample(const std::vector<AccountCategory>& labels, const std::vector<AccountCategory>& classes,
                              std::size_t n, std::uint64_t seed) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample size must be positive");
    if (n > labels.size()) {
        throw Error(ErrorCode::SampleTooLarge,
                    "requested " + std::to_string(n) + " of " + std::to_string(labels.size()) + " records");
    }
    std::vector<std::size_t> class_of(labels.size());
    std::vector<std::size_t> sizes(classes.size(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto it = std::find(classes.begin(), classes.end(), labels[i]);
        if (it == classes.end()) {
            throw Error(ErrorCode::UnknownClass, std::string(to_string(labels[i])) + " is not a declared class");
        }
        class_of[i] = static_cast<std::size_t>(it - classes.begin());
        ++sizes[class_of[i]];
    }
    for (std::size_t k = 0; k < classes.size(); ++k) {
        if (sizes[k] == 0) throw Error(ErrorCode::EmptyClass, std::string(to_string(classes[k])) + " has no records");
    }
    return sample_by_class(class_of, classes.size(), n, seed);
}

TrainTestSplit train_test_split(const std::vector<AccountCategory>& labels, std::size_t train_size,
                                std::optional<std::size_t> test_size, std::uint64_t seed) {
    auto first = stratified_sample(labels, train_size, derive_seed(seed, "train"));
    TrainTestSplit out;
    out.train = std::move(first.sample);
    if (!test_size) {
        out.test = std::move(first.remainder);
        return out;
    }
    if (*test_size > first.remainder.size()) {
        throw Error(ErrorCode::SampleTooLarge, "requested a test set of " + std::to_string(*test_size) + " but only " +
                                                   std::to_string(first.remainder.size()) + " records remain");
    }
    std::vector<AccountCategory> rest;
    rest.reserve(first.remainder.size());
    for (auto i : first.remainder) rest.push_back(labels[i]);
    const auto second = stratified_sample(rest, *test_size, derive_seed(seed, "test"));
    for (auto j : second.sample) out.test.push_back(first.remainder[j]);
    return out;
}

// ---------------------------------------------------------------------------

std::uint64_t ConfusionMatrix::total() const noexcept {
    std::uint64_t t = 0;
    for (const auto& row : cells) t = std::accumulate(row.begin(), row.end(), t);
    return t;
}

std::uint64_t ConfusionMatrix::row_total(std::size_t predicted) const {
    const auto& row = cells.at(predicted);
    return std::accumulate(row.begin(), row.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::column_total(std::size_t truth) const {
    std::uint64_t t = 0;
    for (const auto& row : cells) t += row.at(truth);
    return t;
}

ConfusionMatrix confusion_matrix(const std::vector<Outcome>& pairs, const std::vector<AccountCategory>& classes) {
    ConfusionMatrix m;
    m.classes = classes;
    m.cells.assign(classes.size(), std::vector<std::uint64_t>(classes.size(), 0));
    auto index = [&](AccountCategory c) {
        const auto it = std::find(classes.begin(), classes.end(), c);
        if (it == classes.end()) {
            throw Error(ErrorCode::UnknownClass, std::string(to_string(c)) + " is not a declared class");
        }
        return static_cast<std::size_t>(it - classes.begin());
    };
    for (const auto& p : pairs) ++m.cells[index(p.predicted)][index(p.truth)];
    return m;
}

std::vector<std::optional<double>> per_class_accuracy(const ConfusionMatrix& matrix) {
    std::vector<std::optional<double>> acc(matrix.size());
    for (std::size_t k = 0; k < matrix.size(); ++k) {
        const auto row = matrix.row_total(k);
        if (row > 0) acc[k] = 100.0 * static_cast<double>(matrix.cells[k][k]) / static_cast<double>(row);
    }
    return acc;
}

std::optional<double> overall_accuracy(const ConfusionMatrix& matrix) {
    const auto total = matrix.total();
    if (total == 0) return std::nullopt;
    std::uint64_t diag = 0;
    for (std::size_t k = 0; k < matrix.size(); ++k) diag += matrix.cells[k][k];
    return static_cast<double>(diag) / static_cast<double>(total);
}

VerdictReport classify_accounts(const std::vector<AccountPrediction>& predictions) {
    if (predictions.empty()) throw Error(ErrorCode::EmptyInput, "no predictions to tally");
    std::unordered_map<std::string, std::size_t> slot;
    VerdictReport report;
    for (const auto& p : predictions) {
        auto [it, fresh] = slot.try_emplace(p.account, report.verdicts.size());
        if (fresh) {
            AccountVerdict v;
            v.account = p.account;
            v.votes.assign(kCategoryCount, 0);
            report.verdicts.push_back(std::move(v));
        }
        auto& v = report.verdicts[it->second];
        ++v.votes[static_cast<std::size_t>(p.predicted)];
        ++v.n_items;
    }
    std::sort(report.verdicts.begin(), report.verdicts.end(),
              [](const AccountVerdict& a, const AccountVerdict& b) { return a.account < b.account; });

    std::vector<std::uint64_t> hist(kCategoryCount + 1, 0);
    for (auto& v : report.verdicts) {
        const auto top = *std::max_element(v.votes.begin(), v.votes.end());
        if (std::count(v.votes.begin(), v.votes.end(), top) == 1) {
            const auto k = static_cast<std::size_t>(std::find(v.votes.begin(), v.votes.end(), top) - v.votes.begin());
            v.verdict = kAllCategories[k];
            ++hist[k];
        } else {
            ++hist[kCategoryCount];
        }
    }
    for (std::size_t k = 0; k < kCategoryCount; ++k) {
        report.histogram.emplace_back(std::string(to_string(kAllCategories[k])), hist[k]);
    }
    report.histogram.emplace_back(std::string(kTie), hist[kCategoryCount]);
    return report;
}

// ---------------------------------------------------------------------------

namespace {

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

}  // namespace

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& matrix) {
    std::vector<std::string> header{"predicted"};
    for (auto c : matrix.classes) header.emplace_back(to_string(c));
    csv::write_row(out, header);
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        std::vector<std::string> row{std::string(to_string(matrix.classes[i]))};
        for (auto v : matrix.cells[i]) row.push_back(std::to_string(v));
        csv::write_row(out, row);
    }
}

void write_accuracy_csv(std::ostream& out, const ConfusionMatrix& matrix) {
    csv::write_row(out, {"category", "accuracy_pct", "correct", "predicted_total"});
    const auto acc = per_class_accuracy(matrix);
    for (std::size_t k = 0; k < matrix.size(); ++k) {
        csv::write_row(out, {std::string(to_string(matrix.classes[k])), acc[k] ? fixed(*acc[k], 4) : "",
                             std::to_string(matrix.cells[k][k]), std::to_string(matrix.row_total(k))});
    }
}

void write_verdicts_csv(std::ostream& out, const VerdictReport& report) {
    std::vector<std::string> header{"account", "verdict", "n_items"};
    for (auto c : kAllCategories) header.emplace_back(to_string(c));
    csv::write_row(out, header);
    for (const auto& v : report.verdicts) {
        std::vector<std::string> row{v.account, std::string(v.verdict ? to_string(*v.verdict) : kTie),
                                     std::to_string(v.n_items)};
        for (auto n : v.votes) row.push_back(std::to_string(n));
        csv::write_row(out, row);
    }
}

void write_histogram_csv(std::ostream& out, const VerdictReport& report) {
    csv::write_row(out, {"verdict", "accounts"});
    for (const auto& [name, n] : report.histogram) csv::write_row(out, {name, std::to_string(n)});
}

}  // namespace trollscope::eval
