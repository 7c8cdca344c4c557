#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "trollscope/category.hpp"

namespace trollscope {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Parses "YYYY-MM-DD HH:MM[:SS]" (also with 'T' and trailing 'Z') and the
/// US style "M/D/YYYY H:MM[:SS]". Returns nullopt for anything else or an
/// invalid calendar date.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Canonical "YYYY-MM-DD HH:MM:SS" (UTC).
std::string format_timestamp(Timestamp ts);
std::string format_date(Date d);

// ---------------------------------------------------------------------------
// Tweets

struct TweetRecord {
    std::string handle;
    std::string content;
    Timestamp publish_ts{};
    std::uint64_t followers = 0;
    bool is_retweet = false;
    AccountCategory category = AccountCategory::Unknown;

    friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
};

/// Column names for the tweet CSV. The first four are required.
struct TweetSchema {
    std::string handle = "author";
    std::string content = "content";
    std::string publish = "publish_date";
    std::string category = "account_category";
    std::string followers = "followers";
    std::string retweet = "retweet";
};

struct RowIssue {
    std::size_t line = 0;
    std::string message;
};

struct TweetParseOptions {
    TweetSchema schema;
    /// In strict mode the first malformed row throws Error{MalformedRow}.
    bool strict = false;
};

struct TweetParseReport {
    std::size_t rows_read = 0;
    std::size_t records = 0;
    std::vector<RowIssue> issues;
};

/// Streams records one at a time; the row text is never held twice.
TweetParseReport for_each_tweet(std::istream& in, const TweetParseOptions& options,
                                const std::function<void(TweetRecord&&)>& sink);

struct TweetParseResult {
    std::vector<TweetRecord> records;
    TweetParseReport report;
};

TweetParseResult parse_tweet_csv(std::istream& in, const TweetParseOptions& options = {});

/// Writes records with the schema's column names, timestamps in canonical form.
void write_tweet_csv(std::ostream& out, const std::vector<TweetRecord>& records,
                     const TweetSchema& schema = {});

// ---------------------------------------------------------------------------
// Facebook ads

enum class Redaction { None, Partial };

struct AccountUnknown {
    friend bool operator==(AccountUnknown, AccountUnknown) = default;
};
struct AccountEvent {
    friend bool operator==(AccountEvent, AccountEvent) = default;
};
using AdAccount = std::variant<std::string, AccountUnknown, AccountEvent>;

std::string account_display(const AdAccount& account);

struct AdRecord {
    std::string ad_id;
    std::string text;
    std::string landing_page;
    AdAccount account = AccountUnknown{};
    std::optional<std::uint64_t> clicks;
    std::optional<std::uint64_t> impressions;
    std::optional<Timestamp> creation_ts;
    Redaction redaction = Redaction::None;

    friend bool operator==(const AdRecord&, const AdRecord&) = default;
};

/// Result marker for an ad whose text was fully redacted.
struct Dropped {
    std::string ad_id;
};

using AdParseResult = std::variant<AdRecord, Dropped>;

/// Parses the text layer of one ad document. Sections are lines starting with
/// a known label ("Ad ID", "Ad Text", "Ad Landing Page", "Ad Targeting",
/// "Ad Impressions", "Ad Clicks", "Ad Spend", "Ad Creation Date",
/// "Ad End Date"), optionally followed by ':'. Lines without a label continue
/// the previous section. The targeting section is discarded.
AdParseResult parse_ad_record(std::string_view block);

/// Removes runs of two or more '?' and normalizes whitespace. Sets `removed`
/// when at least one run was found.
std::string strip_redactions(std::string_view text, bool& removed);

/// True when nothing but '?', whitespace and punctuation remains.
bool fully_redacted(std::string_view text);

/// Account derived from a landing page URL.
AdAccount account_from_landing_page(std::string_view url);

// ---------------------------------------------------------------------------
// Weekly counts

struct WeeklyCount {
    Date week_start;
    std::uint64_t count = 0;

    friend bool operator==(const WeeklyCount&, const WeeklyCount&) = default;
};

struct WeeklySeries {
    std::vector<WeeklyCount> weeks;
    /// Records with no timestamp.
    std::size_t untimestamped = 0;
    /// Timestamped records outside the requested range.
    std::size_t out_of_range = 0;
};

struct TimeRange {
    Timestamp begin;
    Timestamp end;  // inclusive
};

/// Monday of the ISO week containing ts.
Date iso_week_start(Timestamp ts);

WeeklySeries weekly_counts(const std::vector<std::optional<Timestamp>>& stamps,
                           std::optional<TimeRange> range = std::nullopt);
WeeklySeries weekly_counts(const std::vector<AdRecord>& records,
                           std::optional<TimeRange> range = std::nullopt);
WeeklySeries weekly_counts(const std::vector<TweetRecord>& records,
                           std::optional<TimeRange> range = std::nullopt);

void write_weekly_csv(std::ostream& out, const WeeklySeries& series);

// ---------------------------------------------------------------------------
// Corpus

enum class Source { Twitter, Facebook, Synthetic };

std::string_view to_string(Source s) noexcept;
std::optional<Source> try_parse_source(std::string_view text) noexcept;

struct Document {
    std::string doc_id;
    /// Owning account (tweet handle or ad account); doc_id when grouped per account.
    std::string account;
    std::string text;
    std::optional<AccountCategory> label;
    Source source = Source::Synthetic;
    std::optional<Timestamp> timestamp;

    friend bool operator==(const Document&, const Document&) = default;
};

/// Ordered documents with unique ids.
class Corpus {
public:
    Corpus() = default;

    /// Throws Error{DuplicateDocId}.
    void add(Document doc);

    const std::vector<Document>& documents() const noexcept { return docs_; }
    std::size_t size() const noexcept { return docs_.size(); }
    bool empty() const noexcept { return docs_.empty(); }
    const Document& operator[](std::size_t i) const { return docs_[i]; }

    bool has_labels() const noexcept;

    /// Sub-corpus with the documents at the given positions, in that order.
    Corpus subset(const std::vector<std::size_t>& positions) const;

private:
    std::vector<Document> docs_;
    std::unordered_set<std::string> ids_;
};

enum class Grouping { PerMessage, PerAccount };

/// Account key used when grouping ads whose account is a sentinel.
inline constexpr std::string_view kUnknownAccountKey = "[unknown]";
inline constexpr std::string_view kEventAccountKey = "[event]";

Corpus to_corpus(const std::vector<TweetRecord>& records, Grouping grouping);
Corpus to_corpus(const std::vector<AdRecord>& records, Grouping grouping);

/// Corpus CSV: doc_id,account,label,source,timestamp,text
void write_corpus_csv(std::ostream& out, const Corpus& corpus);
Corpus read_corpus_csv(std::istream& in);

}  // namespace trollscope
