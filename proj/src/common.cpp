#include <algorithm>

#include "trollscope/category.hpp"
#include "trollscope/error.hpp"
#include "trollscope/sparse.hpp"

namespace trollscope {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::MissingSection: return "MissingSection";
        case ErrorCode::UnparseableMetric: return "UnparseableMetric";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::ConflictingLabels: return "ConflictingLabels";
        case ErrorCode::DuplicateDocId: return "DuplicateDocId";
        case ErrorCode::UnknownCategory: return "UnknownCategory";
        case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::EmptyMatrix: return "EmptyMatrix";
        case ErrorCode::InvalidHyperparameter: return "InvalidHyperparameter";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::VocabMismatch: return "VocabMismatch";
        case ErrorCode::InsufficientDocuments: return "InsufficientDocuments";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::ClassWithNoExamples: return "ClassWithNoExamples";
        case ErrorCode::UnsupportedKernel: return "UnsupportedKernel";
        case ErrorCode::ZeroWeight: return "ZeroWeight";
        case ErrorCode::EmptyNode: return "EmptyNode";
        case ErrorCode::EmptyData: return "EmptyData";
        case ErrorCode::SampleTooLarge: return "SampleTooLarge";
        case ErrorCode::EmptyClass: return "EmptyClass";
        case ErrorCode::UnknownClass: return "UnknownClass";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
        case ErrorCode::BadModelFile: return "BadModelFile";
    }
    return "Error";
}

std::string_view to_string(AccountCategory c) noexcept {
    switch (c) {
        case AccountCategory::Commercial: return "Commercial";
        case AccountCategory::Fearmonger: return "Fearmonger";
        case AccountCategory::HashtagGamer: return "HashtagGamer";
        case AccountCategory::LeftTroll: return "LeftTroll";
        case AccountCategory::NewsFeed: return "NewsFeed";
        case AccountCategory::NonEnglish: return "NonEnglish";
        case AccountCategory::RightTroll: return "RightTroll";
        case AccountCategory::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::optional<AccountCategory> try_parse_category(std::string_view text) noexcept {
    for (auto c : kAllCategories) {
        if (text == to_string(c)) return c;
    }
    // display forms
    if (text == "Hashtag Gamer") return AccountCategory::HashtagGamer;
    if (text == "Left Troll") return AccountCategory::LeftTroll;
    if (text == "News Feed") return AccountCategory::NewsFeed;
    if (text == "Non-English") return AccountCategory::NonEnglish;
    if (text == "Right Troll") return AccountCategory::RightTroll;
    return std::nullopt;
}

AccountCategory parse_category(std::string_view text) {
    if (auto c = try_parse_category(text)) return *c;
    throw Error(ErrorCode::UnknownCategory, "'" + std::string(text) + "' is not an account category");
}

double SparseVector::at(std::uint32_t i) const noexcept {
    auto it = std::lower_bound(entries.begin(), entries.end(), i,
                               [](const SparseEntry& e, std::uint32_t k) { return e.index < k; });
    return (it != entries.end() && it->index == i) ? it->value : 0.0;
}

double SparseVector::squared_norm() const noexcept {
    double s = 0.0;
    for (const auto& e : entries) s += e.value * e.value;
    return s;
}

bool SparseVector::well_formed() const noexcept {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].index >= dim) return false;
        if (i && entries[i - 1].index >= entries[i].index) return false;
    }
    return true;
}

namespace {
void check_dims(const SparseVector& x, const SparseVector& y) {
    if (x.dim != y.dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "vector dimensions " + std::to_string(x.dim) + " and " + std::to_string(y.dim));
    }
}
}  // namespace

double dot(const SparseVector& x, const SparseVector& y) {
    check_dims(x, y);
    double s = 0.0;
    auto a = x.entries.begin();
    auto b = y.entries.begin();
    while (a != x.entries.end() && b != y.entries.end()) {
        if (a->index < b->index) {
            ++a;
        } else if (b->index < a->index) {
            ++b;
        } else {
            s += a->value * b->value;
            ++a;
            ++b;
        }
    }
    return s;
}

double squared_distance(const SparseVector& x, const SparseVector& y) {
    check_dims(x, y);
    double s = 0.0;
    auto a = x.entries.begin();
    auto b = y.entries.begin();
    while (a != x.entries.end() || b != y.entries.end()) {
        double d;
        if (b == y.entries.end() || (a != x.entries.end() && a->index < b->index)) {
            d = a->value;
            ++a;
        } else if (a == x.entries.end() || b->index < a->index) {
            d = b->value;
            ++b;
        } else {
            d = a->value - b->value;
            ++a;
            ++b;
        }
        s += d * d;
    }
    return s;
}

SparseVector from_dense(const std::vector<double>& dense) {
    SparseVector v;
    v.dim = dense.size();
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] != 0.0) v.entries.push_back({static_cast<std::uint32_t>(i), dense[i]});
    }
    return v;
}

}  // namespace trollscope
