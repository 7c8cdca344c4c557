#include "trollscope/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "trollscope/csv.hpp"
#include "trollscope/error.hpp"

namespace trollscope {

namespace {

using namespace std::chrono;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

template <typename T>
bool parse_uint(std::string_view s, T& out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

std::optional<Timestamp> make_timestamp(int y, unsigned mo, unsigned d, int h, int mi, int sec) {
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec > 60) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    text = trim(text);
    const std::string s(text);
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, n = 0;
    char sep = 0;

    // ISO: 2017-01-02 14:39[:05][Z]
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi, &n) == 6 &&
        (sep == ' ' || sep == 'T')) {
        std::string_view rest = std::string_view(s).substr(static_cast<std::size_t>(n));
        if (rest.size() >= 3 && rest[0] == ':') {
            int m2 = 0;
            if (std::sscanf(s.c_str() + n, ":%2d%n", &sec, &m2) != 1) return std::nullopt;
            rest.remove_prefix(static_cast<std::size_t>(m2));
        }
        if (!(rest.empty() || rest == "Z")) return std::nullopt;
        return make_timestamp(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, sec);
    }
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &n) == 3 &&
        static_cast<std::size_t>(n) == s.size()) {
        return make_timestamp(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), 0, 0, 0);
    }
    // US: 1/2/2017 14:39[:05]
    n = 0;
    if (std::sscanf(s.c_str(), "%2d/%2d/%4d %2d:%2d%n", &mo, &d, &y, &h, &mi, &n) == 5) {
        std::string_view rest = std::string_view(s).substr(static_cast<std::size_t>(n));
        if (!rest.empty()) {
            int m2 = 0;
            if (std::sscanf(s.c_str() + n, ":%2d%n", &sec, &m2) != 1 ||
                static_cast<std::size_t>(n + m2) != s.size()) {
                return std::nullopt;
            }
        }
        return make_timestamp(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, sec);
    }
    return std::nullopt;
}

std::string format_timestamp(Timestamp ts) {
    const auto day_point = floor<days>(ts);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{ts - day_point};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()), int(hms.hours().count()),
                  int(hms.minutes().count()), int(hms.seconds().count()));
    return buf;
}

std::string format_date(Date d) {
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

// ---------------------------------------------------------------------------
// Tweets

TweetParseReport for_each_tweet(std::istream& in, const TweetParseOptions& options,
                                const std::function<void(TweetRecord&&)>& sink) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header) throw Error(ErrorCode::MissingColumn, "tweet CSV has no header row");
    if (!header->empty() && header->front().starts_with("\xEF\xBB\xBF")) {
        header->front().erase(0, 3);
    }

    auto find = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header->size(); ++i) {
            if ((*header)[i] == name) return i;
        }
        return std::nullopt;
    };
    auto require = [&](const std::string& name) {
        auto idx = find(name);
        if (!idx) throw Error(ErrorCode::MissingColumn, "tweet CSV header lacks column '" + name + "'");
        return *idx;
    };
    const auto& schema = options.schema;
    const std::size_t c_handle = require(schema.handle);
    const std::size_t c_content = require(schema.content);
    const std::size_t c_publish = require(schema.publish);
    const std::size_t c_category = require(schema.category);
    const auto c_followers = find(schema.followers);
    const auto c_retweet = find(schema.retweet);

    TweetParseReport report;
    auto reject = [&](std::size_t line, std::string message) {
        if (options.strict) {
            throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": " + message);
        }
        report.issues.push_back({line, std::move(message)});
    };

    while (auto row = reader.next()) {
        if (row->size() == 1 && row->front().empty()) continue;
        ++report.rows_read;
        const std::size_t line = reader.line();
        if (row->size() != header->size()) {
            reject(line, "expected " + std::to_string(header->size()) + " fields, found " +
                             std::to_string(row->size()));
            continue;
        }
        auto& fields = *row;
        TweetRecord rec;
        auto category = try_parse_category(trim(fields[c_category]));
        if (!category) {
            reject(line, "unknown account category '" + fields[c_category] + "'");
            continue;
        }
        rec.category = *category;
        if (trim(fields[c_content]).empty()) {
            reject(line, "empty content");
            continue;
        }
        auto ts = parse_timestamp(fields[c_publish]);
        if (!ts) {
            reject(line, "unparseable publish date '" + fields[c_publish] + "'");
            continue;
        }
        rec.publish_ts = *ts;
        if (c_followers) {
            const auto f = trim(fields[*c_followers]);
            if (!f.empty() && !parse_uint(f, rec.followers)) {
                reject(line, "followers is not a non-negative integer");
                continue;
            }
        }
        if (c_retweet) {
            const auto r = trim(fields[*c_retweet]);
            if (r == "1" || iequals(r, "true")) {
                rec.is_retweet = true;
            } else if (!(r.empty() || r == "0" || iequals(r, "false"))) {
                reject(line, "retweet flag '" + std::string(r) + "' is not boolean");
                continue;
            }
        }
        rec.handle = std::move(fields[c_handle]);
        rec.content = std::move(fields[c_content]);
        ++report.records;
        sink(std::move(rec));
    }
    return report;
}

TweetParseResult parse_tweet_csv(std::istream& in, const TweetParseOptions& options) {
    TweetParseResult result;
    result.report = for_each_tweet(in, options,
                                   [&](TweetRecord&& r) { result.records.push_back(std::move(r)); });
    return result;
}

void write_tweet_csv(std::ostream& out, const std::vector<TweetRecord>& records,
                     const TweetSchema& schema) {
    csv::write_row(out, {schema.handle, schema.content, schema.publish, schema.followers,
                         schema.retweet, schema.category});
    for (const auto& r : records) {
        csv::write_row(out, {r.handle, r.content, format_timestamp(r.publish_ts),
                             std::to_string(r.followers), r.is_retweet ? "1" : "0",
                             std::string(to_string(r.category))});
    }
}

// ---------------------------------------------------------------------------
// Ads

std::string account_display(const AdAccount& account) {
    if (const auto* name = std::get_if<std::string>(&account)) return *name;
    if (std::holds_alternative<AccountEvent>(account)) return std::string(kEventAccountKey);
    return std::string(kUnknownAccountKey);
}

namespace {

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

enum class Section { None, Id, Text, Landing, Targeting, Impressions, Clicks, Spend, Created, Ended };

struct Label {
    std::string_view text;
    Section section;
};

// Longest labels first so "Ad Text" never shadows a longer label.
constexpr std::array<Label, 9> kLabels = {{
    {"Ad Creation Date", Section::Created},
    {"Ad Landing Page", Section::Landing},
    {"Ad Impressions", Section::Impressions},
    {"Ad Targeting", Section::Targeting},
    {"Ad End Date", Section::Ended},
    {"Ad Clicks", Section::Clicks},
    {"Ad Spend", Section::Spend},
    {"Ad Text", Section::Text},
    {"Ad ID", Section::Id},
}};

std::optional<std::uint64_t> parse_metric(std::string_view name, std::string_view value) {
    value = trim(value);
    if (value.empty()) return std::nullopt;
    std::string digits;
    for (char c : value) {
        if (c == ',') continue;
        digits.push_back(c);
    }
    std::uint64_t n = 0;
    if (!parse_uint(std::string_view(digits), n)) {
        throw Error(ErrorCode::UnparseableMetric,
                    std::string(name) + " value '" + std::string(value) + "' is not a count");
    }
    return n;
}

int tz_offset_hours(std::string_view tz, bool& known) {
    static const std::array<std::pair<std::string_view, int>, 12> table = {{
        {"UTC", 0}, {"GMT", 0}, {"Z", 0},   {"PDT", -7}, {"PST", -8}, {"MDT", -6},
        {"MST", -7}, {"CDT", -5}, {"CST", -6}, {"EDT", -4}, {"EST", -5}, {"", 0},
    }};
    for (const auto& [name, off] : table) {
        if (tz == name) {
            known = true;
            return off;
        }
    }
    known = false;
    return 0;
}

Timestamp parse_ad_date(std::string_view value) {
    value = trim(value);
    if (auto ts = parse_timestamp(value)) return *ts;
    // "06/08/16 02:36:43 AM PDT"
    int mo = 0, d = 0, y = 0, h = 0, mi = 0, s = 0, n = 0;
    char ampm[3] = {};
    const std::string str(value);
    if (std::sscanf(str.c_str(), "%2d/%2d/%4d %2d:%2d:%2d %2[AaPp]%*[Mm]%n", &mo, &d, &y, &h, &mi,
                    &s, ampm, &n) == 7 &&
        n > 0) {
        if (y < 100) y += 2000;
        if (h < 1 || h > 12) {
            throw Error(ErrorCode::UnparseableMetric, "creation date hour out of range");
        }
        const bool pm = ampm[0] == 'P' || ampm[0] == 'p';
        h = (h % 12) + (pm ? 12 : 0);
        bool known = false;
        const int offset = tz_offset_hours(trim(std::string_view(str).substr(n)), known);
        auto local = make_timestamp(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, s);
        if (known && local) return *local - std::chrono::hours{offset};
    }
    throw Error(ErrorCode::UnparseableMetric, "creation date '" + str + "' is not recognized");
}

std::vector<std::string_view> url_path_segments(std::string_view path) {
    std::vector<std::string_view> segs;
    while (!path.empty()) {
        const auto slash = path.find('/');
        auto seg = path.substr(0, slash);
        if (!seg.empty()) segs.push_back(seg);
        if (slash == std::string_view::npos) break;
        path.remove_prefix(slash + 1);
    }
    return segs;
}

bool all_digits(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string strip_redactions(std::string_view text, bool& removed) {
    removed = false;
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '?') {
            std::size_t j = i;
            while (j < text.size() && text[j] == '?') ++j;
            if (j - i >= 2) {
                removed = true;
                out.push_back(' ');
            } else {
                out.push_back('?');
            }
            i = j;
        } else {
            out.push_back(text[i++]);
        }
    }
    return normalize_whitespace(out);
}

bool fully_redacted(std::string_view text) {
    return std::all_of(text.begin(), text.end(), [](char c) {
        const auto u = static_cast<unsigned char>(c);
        return c == '?' || std::isspace(u) || (u < 0x80 && std::ispunct(u));
    });
}

AdAccount account_from_landing_page(std::string_view url) {
    url = trim(url);
    if (const auto scheme = url.find("://"); scheme != std::string_view::npos) {
        url.remove_prefix(scheme + 3);
    }
    const auto host_end = url.find_first_of("/?#");
    std::string host(url.substr(0, host_end));
    std::transform(host.begin(), host.end(), host.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (const auto colon = host.find(':'); colon != std::string::npos) host.resize(colon);

    const bool on_platform = host == "facebook.com" || host == "fb.com" ||
                             host.ends_with(".facebook.com") || host.ends_with(".fb.com");
    if (!on_platform) return AccountUnknown{};

    std::string_view path = host_end == std::string_view::npos ? std::string_view{} : url.substr(host_end);
    path = path.substr(0, path.find_first_of("?#"));
    auto segs = url_path_segments(path);
    if (std::find(segs.begin(), segs.end(), "events") != segs.end()) return AccountEvent{};

    while (!segs.empty() && all_digits(segs.back())) segs.pop_back();
    if (segs.empty()) return AccountUnknown{};

    std::string_view seg = segs.back();
    if (const auto sep = seg.find_last_of("-_"); sep != std::string_view::npos && sep > 0 &&
                                                 all_digits(seg.substr(sep + 1))) {
        seg = seg.substr(0, sep);
    }
    std::string name(seg);
    std::replace(name.begin(), name.end(), '-', ' ');
    std::replace(name.begin(), name.end(), '_', ' ');
    name = normalize_whitespace(name);
    if (name.empty()) return AccountUnknown{};
    return name;
}

AdParseResult parse_ad_record(std::string_view block) {
    std::map<Section, std::string> sections;
    Section current = Section::None;

    while (!block.empty()) {
        const auto nl = block.find('\n');
        std::string_view line = block.substr(0, nl);
        block = nl == std::string_view::npos ? std::string_view{} : block.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        const std::string_view stripped = trim(line);
        bool labeled = false;
        for (const auto& label : kLabels) {
            if (!stripped.starts_with(label.text)) continue;
            std::string_view rest = stripped.substr(label.text.size());
            if (!rest.empty() && rest.front() != ':' && !std::isspace(static_cast<unsigned char>(rest.front()))) {
                continue;
            }
            if (!rest.empty() && rest.front() == ':') rest.remove_prefix(1);
            current = label.section;
            auto& body = sections[current];
            if (!body.empty()) body.push_back('\n');
            body += trim(rest);
            labeled = true;
            break;
        }
        if (!labeled && current != Section::None) {
            auto& body = sections[current];
            body.push_back('\n');
            body += line;
        }
    }

    if (!sections.contains(Section::Id) || trim(sections[Section::Id]).empty()) {
        throw Error(ErrorCode::MissingSection, "ad has no 'Ad ID' section");
    }
    if (!sections.contains(Section::Text)) {
        throw Error(ErrorCode::MissingSection, "ad has no 'Ad Text' section");
    }

    const std::string ad_id(trim(sections[Section::Id]));
    const std::string& raw_text = sections[Section::Text];
    if (fully_redacted(raw_text)) return Dropped{ad_id};

    AdRecord rec;
    rec.ad_id = ad_id;
    bool removed = false;
    rec.text = strip_redactions(raw_text, removed);
    rec.redaction = removed ? Redaction::Partial : Redaction::None;
    rec.landing_page = normalize_whitespace(sections[Section::Landing]);
    rec.account = account_from_landing_page(rec.landing_page);
    if (auto it = sections.find(Section::Clicks); it != sections.end()) {
        rec.clicks = parse_metric("Ad Clicks", it->second);
    }
    if (auto it = sections.find(Section::Impressions); it != sections.end()) {
        rec.impressions = parse_metric("Ad Impressions", it->second);
    }
    if (auto it = sections.find(Section::Created); it != sections.end() && !trim(it->second).empty()) {
        rec.creation_ts = parse_ad_date(it->second);
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Weekly counts

Date iso_week_start(Timestamp ts) {
    const auto d = floor<days>(ts);
    const weekday wd{d};
    return d - days{wd.iso_encoding() - 1};
}

WeeklySeries weekly_counts(const std::vector<std::optional<Timestamp>>& stamps,
                           std::optional<TimeRange> range) {
    WeeklySeries series;
    std::vector<Timestamp> kept;
    bool any = false;
    for (const auto& ts : stamps) {
        if (!ts) {
            ++series.untimestamped;
            continue;
        }
        any = true;
        if (range && (*ts < range->begin || *ts > range->end)) {
            ++series.out_of_range;
            continue;
        }
        kept.push_back(*ts);
    }
    if (!any) throw Error(ErrorCode::EmptyInput, "no timestamped records");

    Date first, last;
    if (range) {
        first = iso_week_start(range->begin);
        last = iso_week_start(range->end);
    } else {
        const auto [lo, hi] = std::minmax_element(kept.begin(), kept.end());
        first = iso_week_start(*lo);
        last = iso_week_start(*hi);
    }
    if (last < first) return series;
    const auto n_weeks = static_cast<std::size_t>((last - first).count() / 7 + 1);
    series.weeks.resize(n_weeks);
    for (std::size_t i = 0; i < n_weeks; ++i) series.weeks[i].week_start = first + days{7 * i};
    for (const auto& ts : kept) {
        const auto idx = static_cast<std::size_t>((iso_week_start(ts) - first).count() / 7);
        ++series.weeks[idx].count;
    }
    return series;
}

WeeklySeries weekly_counts(const std::vector<AdRecord>& records, std::optional<TimeRange> range) {
    std::vector<std::optional<Timestamp>> stamps;
    stamps.reserve(records.size());
    for (const auto& r : records) stamps.push_back(r.creation_ts);
    return weekly_counts(stamps, range);
}

WeeklySeries weekly_counts(const std::vector<TweetRecord>& records, std::optional<TimeRange> range) {
    std::vector<std::optional<Timestamp>> stamps;
    stamps.reserve(records.size());
    for (const auto& r : records) stamps.emplace_back(r.publish_ts);
    return weekly_counts(stamps, range);
}

void write_weekly_csv(std::ostream& out, const WeeklySeries& series) {
    out << "week_start,count\n";
    for (const auto& w : series.weeks) out << format_date(w.week_start) << ',' << w.count << '\n';
}

// ---------------------------------------------------------------------------
// Corpus

std::string_view to_string(Source s) noexcept {
    switch (s) {
        case Source::Twitter: return "twitter";
        case Source::Facebook: return "facebook";
        case Source::Synthetic: return "synthetic";
    }
    return "synthetic";
}

std::optional<Source> try_parse_source(std::string_view text) noexcept {
    for (auto s : {Source::Twitter, Source::Facebook, Source::Synthetic}) {
        if (text == to_string(s)) return s;
    }
    return std::nullopt;
}

void Corpus::add(Document doc) {
    if (!ids_.insert(doc.doc_id).second) {
        throw Error(ErrorCode::DuplicateDocId, "document id '" + doc.doc_id + "' appears twice");
    }
    docs_.push_back(std::move(doc));
}

bool Corpus::has_labels() const noexcept {
    return std::any_of(docs_.begin(), docs_.end(), [](const Document& d) { return d.label.has_value(); });
}

Corpus Corpus::subset(const std::vector<std::size_t>& positions) const {
    Corpus out;
    for (auto p : positions) out.add(docs_.at(p));
    return out;
}

namespace {

struct AccountGroup {
    Document doc;
    bool first = true;
};

void merge_into(AccountGroup& g, std::string_view text, std::optional<Timestamp> ts) {
    if (!g.first) g.doc.text.push_back('\n');
    g.doc.text += text;
    if (ts && (!g.doc.timestamp || *ts < *g.doc.timestamp)) g.doc.timestamp = ts;
    g.first = false;
}

}  // namespace

Corpus to_corpus(const std::vector<TweetRecord>& records, Grouping grouping) {
    if (records.empty()) throw Error(ErrorCode::EmptyInput, "no tweet records");
    Corpus corpus;
    if (grouping == Grouping::PerMessage) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            corpus.add({"t" + std::to_string(i), r.handle, r.content, r.category, Source::Twitter,
                        r.publish_ts});
        }
        return corpus;
    }
    std::vector<AccountGroup> groups;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& r : records) {
        auto [it, fresh] = index.try_emplace(r.handle, groups.size());
        if (fresh) {
            groups.push_back({Document{r.handle, r.handle, {}, r.category, Source::Twitter, {}}, true});
        }
        auto& g = groups[it->second];
        if (g.doc.label != r.category) {
            throw Error(ErrorCode::ConflictingLabels,
                        "account '" + r.handle + "' carries categories " +
                            std::string(to_string(*g.doc.label)) + " and " +
                            std::string(to_string(r.category)));
        }
        merge_into(g, r.content, r.publish_ts);
    }
    for (auto& g : groups) corpus.add(std::move(g.doc));
    return corpus;
}

Corpus to_corpus(const std::vector<AdRecord>& records, Grouping grouping) {
    if (records.empty()) throw Error(ErrorCode::EmptyInput, "no ad records");
    Corpus corpus;
    if (grouping == Grouping::PerMessage) {
        for (const auto& r : records) {
            corpus.add({r.ad_id, account_display(r.account), r.text, std::nullopt, Source::Facebook,
                        r.creation_ts});
        }
        return corpus;
    }
    std::vector<AccountGroup> groups;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& r : records) {
        const auto key = account_display(r.account);
        auto [it, fresh] = index.try_emplace(key, groups.size());
        if (fresh) groups.push_back({Document{key, key, {}, std::nullopt, Source::Facebook, {}}, true});
        merge_into(groups[it->second], r.text, r.creation_ts);
    }
    for (auto& g : groups) corpus.add(std::move(g.doc));
    return corpus;
}

void write_corpus_csv(std::ostream& out, const Corpus& corpus) {
    csv::write_row(out, {"doc_id", "account", "label", "source", "timestamp", "text"});
    for (const auto& d : corpus.documents()) {
        csv::write_row(out, {d.doc_id, d.account, d.label ? std::string(to_string(*d.label)) : "",
                             std::string(to_string(d.source)),
                             d.timestamp ? format_timestamp(*d.timestamp) : "", d.text});
    }
}

Corpus read_corpus_csv(std::istream& in) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header) throw Error(ErrorCode::MissingColumn, "corpus CSV has no header row");
    const std::array<std::string_view, 6> names = {"doc_id", "account", "label", "source", "timestamp", "text"};
    std::array<std::size_t, 6> col{};
    for (std::size_t k = 0; k < names.size(); ++k) {
        auto it = std::find(header->begin(), header->end(), names[k]);
        if (it == header->end()) {
            throw Error(ErrorCode::MissingColumn, "corpus CSV lacks column '" + std::string(names[k]) + "'");
        }
        col[k] = static_cast<std::size_t>(it - header->begin());
    }
    Corpus corpus;
    while (auto row = reader.next()) {
        if (row->size() == 1 && row->front().empty()) continue;
        if (row->size() != header->size()) {
            throw Error(ErrorCode::MalformedRow, "corpus CSV line " + std::to_string(reader.line()) +
                                                     " has " + std::to_string(row->size()) + " fields");
        }
        auto& f = *row;
        Document d;
        d.doc_id = f[col[0]];
        d.account = f[col[1]];
        if (!f[col[2]].empty()) {
            auto c = try_parse_category(f[col[2]]);
            if (!c) {
                throw Error(ErrorCode::MalformedRow, "corpus CSV line " + std::to_string(reader.line()) +
                                                         ": unknown category '" + f[col[2]] + "'");
            }
            d.label = c;
        }
        auto src = try_parse_source(f[col[3]]);
        if (!src) {
            throw Error(ErrorCode::MalformedRow, "corpus CSV line " + std::to_string(reader.line()) +
                                                     ": unknown source '" + f[col[3]] + "'");
        }
        d.source = *src;
        if (!f[col[4]].empty()) {
            d.timestamp = parse_timestamp(f[col[4]]);
            if (!d.timestamp) {
                throw Error(ErrorCode::MalformedRow,
                            "corpus CSV line " + std::to_string(reader.line()) + ": bad timestamp");
            }
        }
        d.text = f[col[5]];
        corpus.add(std::move(d));
    }
    return corpus;
}

}  // namespace trollscope
