#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "../support/check_error.hpp"
#include "trollscope/eval.hpp"
#include "trollscope/random.hpp"

using namespace trollscope;
using namespace trollscope::eval;

namespace {

constexpr auto L = AccountCategory::LeftTroll;
constexpr auto R = AccountCategory::RightTroll;

const std::vector<AccountCategory> kTableClasses = {AccountCategory::Fearmonger, AccountCategory::HashtagGamer,
                                                    AccountCategory::LeftTroll, AccountCategory::NewsFeed,
                                                    AccountCategory::RightTroll};

// Rows are predictions, columns the truth.
const std::vector<std::vector<std::uint64_t>> kTable1 = {
    {72, 6, 7, 0, 17},
    {2, 742, 85, 39, 95},
    {36, 1250, 4562, 523, 1641},
    {12, 505, 1497, 13092, 2243},
    {79, 2681, 5609, 2881, 15532},
};

std::vector<Outcome> table_pairs(const std::vector<std::vector<std::uint64_t>>& table,
                                 const std::vector<AccountCategory>& classes) {
    std::vector<Outcome> pairs;
    for (std::size_t p = 0; p < table.size(); ++p) {
        for (std::size_t t = 0; t < table.size(); ++t) {
            for (std::uint64_t n = 0; n < table[p][t]; ++n) pairs.push_back({classes[p], classes[t]});
        }
    }
    return pairs;
}

std::vector<AccountCategory> labels_60_40() {
    std::vector<AccountCategory> y(100, L);
    for (std::size_t i = 0; i < 40; ++i) y[i * 2 + 1] = R;
    return y;
}

std::vector<AccountPrediction> votes_for(const std::string& account, const std::vector<AccountCategory>& preds) {
    std::vector<AccountPrediction> out;
    for (auto p : preds) out.push_back({account, p});
    return out;
}

}  // namespace

TEST_CASE("largest remainder quotas") {
    CHECK(largest_remainder_quotas({60, 40}, 10) == std::vector<std::size_t>{6, 4});
    CHECK(largest_remainder_quotas({1, 1, 1}, 2) == std::vector<std::size_t>{1, 1, 0});
    CHECK(largest_remainder_quotas({5, 3}, 0) == std::vector<std::size_t>{0, 0});
    CHECK_ERROR(largest_remainder_quotas({2, 2}, 5), ErrorCode::SampleTooLarge);
}

TEST_CASE("quotas sum to n and stay within one of the exact share") {
    for (std::size_t k = 1; k <= 4; ++k) {
        std::vector<std::size_t> sizes(k, 1);
        // Every size vector with entries in [1, 6].
        while (true) {
            const auto total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
            for (std::size_t n = 0; n <= total; ++n) {
                const auto q = largest_remainder_quotas(sizes, n);
                CHECK(std::accumulate(q.begin(), q.end(), std::size_t{0}) == n);
                for (std::size_t c = 0; c < k; ++c) {
                    const double exact = static_cast<double>(n) * static_cast<double>(sizes[c]) / static_cast<double>(total);
                    CHECK(std::abs(static_cast<double>(q[c]) - exact) < 1.0);
                    CHECK(q[c] <= sizes[c]);
                }
            }
            std::size_t i = 0;
            while (i < k && sizes[i] == 6) sizes[i++] = 1;
            if (i == k) break;
            ++sizes[i];
        }
    }
}

TEST_CASE("stratified sample respects quotas and partitions the input") {
    const auto y = labels_60_40();
    const auto s = stratified_sample(y, 10, 3);
    CHECK(s.sample.size() == 10);
    CHECK(std::count_if(s.sample.begin(), s.sample.end(), [&](auto i) { return y[i] == L; }) == 6);
    CHECK(std::is_sorted(s.sample.begin(), s.sample.end()));
    CHECK(std::is_sorted(s.remainder.begin(), s.remainder.end()));
    std::vector<std::size_t> all = s.sample;
    all.insert(all.end(), s.remainder.begin(), s.remainder.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expected(100);
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    CHECK(all == expected);

    const auto everything = stratified_sample(y, 100, 3);
    CHECK(everything.sample == expected);
    CHECK(everything.remainder.empty());

    CHECK(stratified_sample(y, 10, 3).sample == s.sample);
    CHECK(stratified_sample(y, 10, 4).sample != s.sample);
}

TEST_CASE("stratified sample errors") {
    const auto y = labels_60_40();
    CHECK_ERROR(stratified_sample(y, 101, 1), ErrorCode::SampleTooLarge);
    CHECK_ERROR(stratified_sample(y, 0, 1), ErrorCode::InvalidArgument);
    CHECK_ERROR(stratified_sample(y, {L, R, AccountCategory::NewsFeed}, 5, 1), ErrorCode::EmptyClass);
    CHECK_ERROR(stratified_sample(y, {L}, 5, 1), ErrorCode::UnknownClass);
}

TEST_CASE("per-class sample counts track the class fractions") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<AccountCategory> y;
        const std::size_t n_records = 20 + uniform_index(rng, 200);
        for (std::size_t i = 0; i < n_records; ++i) y.push_back(kAllCategories[uniform_index(rng, 4)]);
        const std::size_t n = 1 + uniform_index(rng, n_records);
        const auto s = stratified_sample(y, n, static_cast<std::uint64_t>(trial));
        for (std::size_t c = 0; c < 4; ++c) {
            const auto cls = kAllCategories[c];
            const auto in_class = std::count(y.begin(), y.end(), cls);
            const auto picked = std::count_if(s.sample.begin(), s.sample.end(), [&](auto i) { return y[i] == cls; });
            CHECK(std::abs(static_cast<double>(picked) -
                           static_cast<double>(n) * static_cast<double>(in_class) / static_cast<double>(n_records)) < 1.0);
        }
    }
}

TEST_CASE("train/test split") {
    const auto y = labels_60_40();
    const auto split = train_test_split(y, 50, std::nullopt, 7);
    CHECK(split.train.size() == 50);
    CHECK(split.test.size() == 50);
    std::set<std::size_t> seen(split.train.begin(), split.train.end());
    for (auto i : split.test) CHECK(seen.insert(i).second);

    const auto sized = train_test_split(y, 50, 20, 7);
    CHECK(sized.train == split.train);
    CHECK(sized.test.size() == 20);
    CHECK(std::count_if(sized.test.begin(), sized.test.end(), [&](auto i) { return y[i] == L; }) == 12);
    CHECK_ERROR(train_test_split(y, 50, 51, 7), ErrorCode::SampleTooLarge);
}

TEST_CASE("confusion matrix orientation and Table 1 accuracies") {
    const auto pairs = table_pairs(kTable1, kTableClasses);
    const auto m = confusion_matrix(pairs, kTableClasses);
    CHECK(m.cells == kTable1);
    CHECK(m.total() == 53208);
    CHECK(m.row_total(0) == 102);
    CHECK(m.column_total(0) == 72 + 2 + 36 + 12 + 79);

    const auto acc = per_class_accuracy(m);
    const std::vector<double> published = {70.6, 77.1, 56.9, 75.5, 58.0};
    for (std::size_t k = 0; k < 5; ++k) {
        REQUIRE(acc[k]);
        CHECK(std::round(*acc[k] * 10) / 10 == doctest::Approx(published[k]));
    }
    CHECK(*acc[0] == doctest::Approx(7200.0 / 102.0));

    std::ostringstream out;
    write_confusion_csv(out, m);
    CHECK(out.str().rfind("predicted,Fearmonger,HashtagGamer,LeftTroll,NewsFeed,RightTroll\nFearmonger,72,6,7,0,17\n", 0) == 0);
    std::ostringstream accuracy;
    write_accuracy_csv(accuracy, m);
    CHECK(accuracy.str().rfind("category,accuracy_pct,correct,predicted_total\nFearmonger,70.5882,72,102\n", 0) == 0);
}

TEST_CASE("confusion matrix basics") {
    const std::vector<AccountCategory> classes = {L, R};
    const auto diag = confusion_matrix({{L, L}, {R, R}, {R, R}}, classes);
    CHECK(diag.cells == std::vector<std::vector<std::uint64_t>>{{1, 0}, {0, 2}});
    for (const auto& a : per_class_accuracy(diag)) CHECK(*a == 100.0);
    CHECK(*overall_accuracy(diag) == 1.0);

    const auto empty = confusion_matrix({}, classes);
    CHECK(empty.total() == 0);
    CHECK_FALSE(per_class_accuracy(empty)[0]);
    CHECK_FALSE(overall_accuracy(empty));
    CHECK_ERROR(confusion_matrix({{L, AccountCategory::NewsFeed}}, classes), ErrorCode::UnknownClass);

    std::ostringstream out;
    write_accuracy_csv(out, empty);
    CHECK(out.str() == "category,accuracy_pct,correct,predicted_total\nLeftTroll,,0,0\nRightTroll,,0,0\n");
}

TEST_CASE("matrix totals match the inputs") {
    Rng rng(4);
    std::vector<Outcome> pairs;
    std::vector<std::uint64_t> truth_counts(5, 0);
    for (int i = 0; i < 400; ++i) {
        const auto t = uniform_index(rng, 5), p = uniform_index(rng, 5);
        pairs.push_back({kTableClasses[p], kTableClasses[t]});
        ++truth_counts[t];
    }
    const auto m = confusion_matrix(pairs, kTableClasses);
    CHECK(m.total() == 400);
    for (std::size_t t = 0; t < 5; ++t) CHECK(m.column_total(t) == truth_counts[t]);
}

TEST_CASE("permuting classes permutes the accuracies") {
    const auto pairs = table_pairs(kTable1, kTableClasses);
    const auto base = per_class_accuracy(confusion_matrix(pairs, kTableClasses));
    std::vector<std::size_t> perm = {3, 0, 4, 1, 2};
    std::vector<AccountCategory> permuted;
    for (auto i : perm) permuted.push_back(kTableClasses[i]);
    const auto moved = per_class_accuracy(confusion_matrix(pairs, permuted));
    for (std::size_t k = 0; k < 5; ++k) CHECK(*moved[k] == *base[perm[k]]);
}

TEST_CASE("account verdicts") {
    auto preds = votes_for("a", {L, L, R});
    const auto tie = votes_for("b", {L, L, R, R});
    preds.insert(preds.end(), tie.begin(), tie.end());
    preds.push_back({"c", AccountCategory::HashtagGamer});
    const auto report = classify_accounts(preds);
    REQUIRE(report.verdicts.size() == 3);
    CHECK(report.verdicts[0].account == "a");
    CHECK(report.verdicts[0].verdict == L);
    CHECK(report.verdicts[0].n_items == 3);
    CHECK(report.verdicts[1].tie());
    CHECK(report.verdicts[2].verdict == AccountCategory::HashtagGamer);

    REQUIRE(report.histogram.size() == kCategoryCount + 1);
    CHECK(report.histogram.back() == std::pair<std::string, std::uint64_t>{"Tie", 1});
    std::uint64_t total = 0;
    for (const auto& [name, n] : report.histogram) total += n;
    CHECK(total == 3);

    std::ostringstream out;
    write_verdicts_csv(out, report);
    CHECK(out.str().find("\nb,Tie,4,") != std::string::npos);
    std::ostringstream hist;
    write_histogram_csv(hist, report);
    CHECK(hist.str().rfind("verdict,accounts\n", 0) == 0);
    CHECK(hist.str().find("\nTie,1\n") != std::string::npos);

    CHECK_ERROR(classify_accounts({}), ErrorCode::EmptyInput);
}

TEST_CASE("95 accounts in, 95 verdicts out") {
    Rng rng(95);
    std::vector<AccountPrediction> preds;
    for (int a = 0; a < 95; ++a) {
        const auto n = 1 + uniform_index(rng, 6);
        for (std::size_t i = 0; i < n; ++i) {
            preds.push_back({"page" + std::to_string(a), kAllCategories[uniform_index(rng, 3)]});
        }
    }
    shuffle(preds.begin(), preds.end(), rng);
    const auto report = classify_accounts(preds);
    CHECK(report.verdicts.size() == 95);
    std::uint64_t total = 0;
    for (const auto& [name, n] : report.histogram) total += n;
    CHECK(total == 95);
    for (const auto& v : report.verdicts) {
        const auto top = *std::max_element(v.votes.begin(), v.votes.end());
        CHECK(v.tie() == (std::count(v.votes.begin(), v.votes.end(), top) > 1));
    }
}
