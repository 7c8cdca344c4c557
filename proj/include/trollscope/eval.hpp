#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trollscope/category.hpp"

namespace trollscope::eval {

/// Per-class quotas summing exactly to n: floor(n * size / total) plus one for
/// the classes with the largest fractional remainders (earlier class wins ties).
std::vector<std::size_t> largest_remainder_quotas(const std::vector<std::size_t>& class_sizes, std::size_t n);

/// Positions into the labelled input, each list in ascending order.
struct SampleSplit {
    std::vector<std::size_t> sample;
    std::vector<std::size_t> remainder;
};

/// Stratified sample of n positions. Classes are the distinct labels; within a
/// class the positions are chosen by a seeded shuffle.
/// Throws Error{SampleTooLarge}, Error{InvalidArgument} for n = 0.
SampleSplit stratified_sample(const std::vector<AccountCategory>& labels, std::size_t n, std::uint64_t seed);

/// As above over a declared class list; Error{EmptyClass} when a declared
/// class has no records, Error{UnknownClass} for a label outside the list.
SampleSplit stratified_sample(const std::vector<AccountCategory>& labels, const std::vector<AccountCategory>& classes,
                              std::size_t n, std::uint64_t seed);

struct TrainTestSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// A stratified training sample, then a stratified test sample drawn from what
/// is left. test_size absent means the whole remainder.
TrainTestSplit train_test_split(const std::vector<AccountCategory>& labels, std::size_t train_size,
                                std::optional<std::size_t> test_size, std::uint64_t seed);

/// Rows are predicted classes, columns true classes.
struct ConfusionMatrix {
    std::vector<AccountCategory> classes;
    std::vector<std::vector<std::uint64_t>> cells;

    std::size_t size() const noexcept { return classes.size(); }
    std::uint64_t total() const noexcept;
    std::uint64_t row_total(std::size_t predicted) const;
    std::uint64_t column_total(std::size_t truth) const;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct Outcome {
    AccountCategory predicted;
    AccountCategory truth;
};

/// Throws Error{UnknownClass} when either side is outside `classes`.
ConfusionMatrix confusion_matrix(const std::vector<Outcome>& pairs, const std::vector<AccountCategory>& classes);

/// 100 * diagonal / predicted-row total; nullopt for rows with no predictions.
std::vector<std::optional<double>> per_class_accuracy(const ConfusionMatrix& matrix);

/// Fraction of all items on the diagonal; nullopt for an empty matrix.
std::optional<double> overall_accuracy(const ConfusionMatrix& matrix);

struct AccountVerdict {
    std::string account;
    /// nullopt is a Tie.
    std::optional<AccountCategory> verdict;
    /// Indexed by AccountCategory value.
    std::vector<std::uint64_t> votes;
    std::uint64_t n_items = 0;

    bool tie() const noexcept { return !verdict; }
};

struct VerdictReport {
    /// Sorted by account.
    std::vector<AccountVerdict> verdicts;
    /// Every category in declaration order, then Tie.
    std::vector<std::pair<std::string, std::uint64_t>> histogram;
};

struct AccountPrediction {
    std::string account;
    AccountCategory predicted;
};

/// Throws Error{EmptyInput}.
VerdictReport classify_accounts(const std::vector<AccountPrediction>& predictions);

inline constexpr std::string_view kTie = "Tie";

/// "predicted,<truth classes...>" header then one row per predicted class.
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& matrix);
/// "category,accuracy_pct,correct,predicted_total"; undefined rows leave accuracy empty.
void write_accuracy_csv(std::ostream& out, const ConfusionMatrix& matrix);
/// "account,verdict,n_items,<one column per category>".
void write_verdicts_csv(std::ostream& out, const VerdictReport& report);
/// "verdict,accounts" in category order then Tie.
void write_histogram_csv(std::ostream& out, const VerdictReport& report);

}  // namespace trollscope::eval
