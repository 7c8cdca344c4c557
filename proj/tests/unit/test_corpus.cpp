#include <doctest.h>

#include <fstream>
#include <sstream>

#include "../support/check_error.hpp"
#include "trollscope/corpus.hpp"

using namespace trollscope;
using namespace std::chrono;

namespace {

Timestamp ts(int y, unsigned m, unsigned d, int hh = 0, int mm = 0, int ss = 0) {
    return sys_days{year{y} / month{m} / day{d}} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string fixture(const std::string& name) {
    std::ifstream in(std::string(TROLLSCOPE_FIXTURES) + "/" + name, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kHeader = "author,content,publish_date,followers,retweet,account_category\n";

}  // namespace

TEST_CASE("timestamps in ISO and US layouts") {
    CHECK(parse_timestamp("2016-10-01 19:58:00") == ts(2016, 10, 1, 19, 58));
    CHECK(parse_timestamp("2016-10-01T19:58:07Z") == ts(2016, 10, 1, 19, 58, 7));
    CHECK(parse_timestamp("2016-10-01 19:58") == ts(2016, 10, 1, 19, 58));
    CHECK(parse_timestamp("10/1/2016 19:58") == ts(2016, 10, 1, 19, 58));
    CHECK(parse_timestamp("2016-10-01") == ts(2016, 10, 1));
    CHECK_FALSE(parse_timestamp("2016-02-30 00:00"));
    CHECK_FALSE(parse_timestamp("yesterday"));
    CHECK_FALSE(parse_timestamp(""));
    CHECK(format_timestamp(ts(2017, 1, 2, 3, 4, 5)) == "2017-01-02 03:04:05");
}

TEST_CASE("parse_tweet_csv maps fields") {
    std::istringstream in(std::string(kHeader) + "TEN_GOP,\"Build the wall, now\",10/1/2016 19:58,147767,1,RightTroll\n");
    const auto result = parse_tweet_csv(in);
    REQUIRE(result.records.size() == 1);
    const auto& r = result.records[0];
    CHECK(r.handle == "TEN_GOP");
    CHECK(r.content == "Build the wall, now");
    CHECK(r.publish_ts == ts(2016, 10, 1, 19, 58));
    CHECK(r.followers == 147767);
    CHECK(r.is_retweet);
    CHECK(r.category == AccountCategory::RightTroll);
}

TEST_CASE("unknown category rows are rejected individually") {
    const std::string text = std::string(kHeader) + "a,hello there,10/1/2016 19:58,1,0,Centrist\n" +
                             "b,fine text,10/1/2016 19:58,1,0,LeftTroll\n";
    {
        std::istringstream in(text);
        const auto result = parse_tweet_csv(in);
        CHECK(result.records.size() == 1);
        REQUIRE(result.report.issues.size() == 1);
        CHECK(result.report.issues[0].line == 2);
        CHECK(result.report.rows_read == 2);
    }
    {
        std::istringstream in(text);
        TweetParseOptions strict;
        strict.strict = true;
        CHECK_ERROR(parse_tweet_csv(in, strict), ErrorCode::MalformedRow);
    }
}

TEST_CASE("rows with empty content or bad dates are malformed") {
    const std::string text = std::string(kHeader) + "a,   ,10/1/2016 19:58,1,0,LeftTroll\n" +
                             "b,words,not a date,1,0,LeftTroll\n" + "c,words,10/1/2016 19:58,-3,0,LeftTroll\n";
    std::istringstream in(text);
    const auto result = parse_tweet_csv(in);
    CHECK(result.records.empty());
    CHECK(result.report.issues.size() == 3);
}

TEST_CASE("missing required column") {
    std::istringstream in(fixture("tweets_no_category.csv"));
    CHECK_ERROR(parse_tweet_csv(in), ErrorCode::MissingColumn);
    std::istringstream empty("");
    CHECK_ERROR(parse_tweet_csv(empty), ErrorCode::MissingColumn);
}

TEST_CASE("custom schema") {
    std::istringstream in("handle,text,date,label\nx,hello world,2016-01-01 00:00,NewsFeed\n");
    TweetParseOptions options;
    options.schema.handle = "handle";
    options.schema.content = "text";
    options.schema.publish = "date";
    options.schema.category = "label";
    const auto result = parse_tweet_csv(in, options);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].category == AccountCategory::NewsFeed);
    CHECK(result.records[0].followers == 0);
}

TEST_CASE("tweet CSV round-trips through write_tweet_csv") {
    std::istringstream in(fixture("tweets.csv"));
    const auto first = parse_tweet_csv(in);
    REQUIRE(first.records.size() == 13);
    std::ostringstream out;
    write_tweet_csv(out, first.records);
    std::istringstream again(out.str());
    const auto second = parse_tweet_csv(again);
    CHECK(second.records == first.records);
    std::ostringstream out2;
    write_tweet_csv(out2, second.records);
    CHECK(out2.str() == out.str());
}

TEST_CASE("for_each_tweet streams records in order") {
    std::istringstream in(fixture("tweets.csv"));
    std::vector<std::string> handles;
    const auto report = for_each_tweet(in, {}, [&](TweetRecord&& r) { handles.push_back(r.handle); });
    CHECK(report.records == 13);
    CHECK(handles.front() == "TEN_GOP");
    CHECK(handles.back() == "ScaryNewsOnline");
}

TEST_CASE("ad records: redaction rules") {
    CHECK(std::holds_alternative<Dropped>(parse_ad_record("Ad ID 7\nAd Text ?????? ??????\n")));
    CHECK(std::holds_alternative<Dropped>(parse_ad_record("Ad ID 7\nAd Text ??? ... ???" "!\n")));
    CHECK(fully_redacted("?????? ??????"));
    CHECK(fully_redacted("  ?? , ?? "));
    CHECK_FALSE(fully_redacted("?? a ??"));

    const auto kept = parse_ad_record("Ad ID 8\nAd Text Join ???? us ?????? today\n");
    REQUIRE(std::holds_alternative<AdRecord>(kept));
    const auto& ad = std::get<AdRecord>(kept);
    CHECK(ad.text == "Join us today");
    CHECK(ad.redaction == Redaction::Partial);

    bool removed = false;
    CHECK(strip_redactions("Is it? Yes", removed) == "Is it? Yes");
    CHECK_FALSE(removed);
    CHECK(strip_redactions("a ?? b", removed) == "a b");
    CHECK(removed);
}

TEST_CASE("ad records: sections and metrics") {
    const auto parsed = parse_ad_record(
        "Ad ID 101\n"
        "Ad Text First line\n"
        "second line\n"
        "Ad Landing Page https://www.facebook.com/Black-Matters-1234567/\n"
        "Ad Targeting Location: United States\n"
        "Age: 18 - 65+\n"
        "Ad Impressions 12,345\n"
        "Ad Clicks: 67\n"
        "Ad Creation Date 06/08/16 02:36:43 AM PDT\n");
    REQUIRE(std::holds_alternative<AdRecord>(parsed));
    const auto& ad = std::get<AdRecord>(parsed);
    CHECK(ad.ad_id == "101");
    CHECK(ad.text == "First line second line");
    CHECK(ad.redaction == Redaction::None);
    CHECK(account_display(ad.account) == "Black Matters");
    CHECK(ad.impressions == 12345u);
    CHECK(ad.clicks == 67u);
    REQUIRE(ad.creation_ts);
    CHECK(*ad.creation_ts == ts(2016, 6, 8, 9, 36, 43));
    CHECK(ad.text.find("United States") == std::string::npos);
}

TEST_CASE("ad records: errors") {
    CHECK_ERROR(parse_ad_record("Ad Text hello\n"), ErrorCode::MissingSection);
    CHECK_ERROR(parse_ad_record("Ad ID 3\nAd Landing Page x\n"), ErrorCode::MissingSection);
    CHECK_ERROR(parse_ad_record("Ad ID 3\nAd Text hi there\nAd Clicks many\n"), ErrorCode::UnparseableMetric);
    CHECK_ERROR(parse_ad_record("Ad ID 3\nAd Text hi there\nAd Impressions 12x\n"), ErrorCode::UnparseableMetric);
}

TEST_CASE("account names from landing pages") {
    CHECK(account_display(account_from_landing_page("https://www.facebook.com/Black-Matters/")) == "Black Matters");
    CHECK(account_display(account_from_landing_page("https://facebook.com/Being_Patriotic_1601685693432389")) ==
          "Being Patriotic");
    CHECK(account_display(account_from_landing_page("https://www.facebook.com/Blacktivist-1489163121104221/")) ==
          "Blacktivist");
    CHECK(std::holds_alternative<AccountUnknown>(account_from_landing_page("http://www.musicfb.info/download")));
    CHECK(std::holds_alternative<AccountUnknown>(account_from_landing_page("")));
    CHECK(std::holds_alternative<AccountEvent>(
        account_from_landing_page("https://www.facebook.com/events/1783279811952124/")));
    CHECK(account_display(AccountUnknown{}) == "[unknown]");
    CHECK(account_display(AccountEvent{}) == "[event]");
}

TEST_CASE("ISO weeks start on Monday") {
    CHECK(iso_week_start(ts(2016, 10, 1, 19)) == sys_days{2016y / September / 26});  // Saturday
    CHECK(iso_week_start(ts(2016, 9, 26)) == sys_days{2016y / September / 26});      // Monday
    CHECK(iso_week_start(ts(2016, 10, 2, 23, 59)) == sys_days{2016y / September / 26});  // Sunday
}

TEST_CASE("weekly counts zero-fill gaps") {
    const auto one = weekly_counts(std::vector<std::optional<Timestamp>>{ts(2016, 6, 8)});
    REQUIRE(one.weeks.size() == 1);
    CHECK(one.weeks[0].count == 1);

    const auto two = weekly_counts(std::vector<std::optional<Timestamp>>{ts(2016, 6, 8), ts(2016, 6, 29), std::nullopt});
    REQUIRE(two.weeks.size() == 4);
    CHECK(two.weeks[0].count == 1);
    CHECK(two.weeks[1].count == 0);
    CHECK(two.weeks[2].count == 0);
    CHECK(two.weeks[3].count == 1);
    CHECK(two.untimestamped == 1);

    CHECK_ERROR(weekly_counts(std::vector<std::optional<Timestamp>>{std::nullopt}), ErrorCode::EmptyInput);

    const auto ranged = weekly_counts(std::vector<std::optional<Timestamp>>{ts(2015, 3, 2), ts(2016, 1, 1), ts(2017, 11, 30)},
                                      TimeRange{ts(2015, 3, 1), ts(2016, 12, 31)});
    CHECK(ranged.out_of_range == 1);
    std::uint64_t total = 0;
    for (const auto& w : ranged.weeks) total += w.count;
    CHECK(total == 2);

    std::ostringstream out;
    write_weekly_csv(out, two);
    CHECK(out.str() == "week_start,count\n2016-06-06,1\n2016-06-13,0\n2016-06-20,0\n2016-06-27,1\n");
}

TEST_CASE("weekly totals equal timestamped records") {
    std::istringstream in(fixture("tweets.csv"));
    const auto records = parse_tweet_csv(in).records;
    const auto series = weekly_counts(records);
    std::uint64_t total = 0;
    for (const auto& w : series.weeks) total += w.count;
    CHECK(total == records.size());
    for (std::size_t i = 1; i < series.weeks.size(); ++i) {
        CHECK(series.weeks[i].week_start - series.weeks[i - 1].week_start == days{7});
    }
}

TEST_CASE("to_corpus grouping") {
    std::istringstream in(fixture("tweets.csv"));
    const auto records = parse_tweet_csv(in).records;
    const auto per_message = to_corpus(records, Grouping::PerMessage);
    CHECK(per_message.size() == records.size());
    CHECK(per_message[0].doc_id == "t0");
    CHECK(per_message[0].label == AccountCategory::RightTroll);

    const auto per_account = to_corpus(records, Grouping::PerAccount);
    CHECK(per_account.size() == 5);
    for (const auto& d : per_account.documents()) CHECK(d.label.has_value());

    std::vector<TweetRecord> two = {records[0], records[1]};
    CHECK(to_corpus(two, Grouping::PerAccount).size() == 1);
    two[1].category = AccountCategory::LeftTroll;
    CHECK_ERROR(to_corpus(two, Grouping::PerAccount), ErrorCode::ConflictingLabels);
    CHECK_ERROR(to_corpus(std::vector<TweetRecord>{}, Grouping::PerMessage), ErrorCode::EmptyInput);
}

TEST_CASE("ads grouped per account are unlabelled") {
    std::vector<AdRecord> ads;
    for (int i = 0; i < 95; ++i) {
        AdRecord a;
        a.ad_id = std::to_string(i);
        a.text = "text " + std::to_string(i);
        a.account = "Page " + std::to_string(i);
        ads.push_back(a);
        a.ad_id += "b";
        ads.push_back(a);
    }
    const auto corpus = to_corpus(ads, Grouping::PerAccount);
    CHECK(corpus.size() == 95);
    CHECK_FALSE(corpus.has_labels());
}

TEST_CASE("corpus rejects duplicate ids and round-trips through CSV") {
    Corpus c;
    c.add({"a", "acct", "some text, with comma", AccountCategory::LeftTroll, Source::Twitter, ts(2016, 1, 2, 3, 4, 5)});
    c.add({"b", "", "line one\nline two", std::nullopt, Source::Facebook, std::nullopt});
    CHECK_ERROR(c.add({"a", "", "x", std::nullopt, Source::Synthetic, std::nullopt}), ErrorCode::DuplicateDocId);

    std::ostringstream out;
    write_corpus_csv(out, c);
    std::istringstream in(out.str());
    const auto back = read_corpus_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back.documents() == c.documents());

    const auto sub = c.subset({1});
    REQUIRE(sub.size() == 1);
    CHECK(sub[0].doc_id == "b");
}
