#include "trollscope/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trollscope/corpus.hpp"
#include "trollscope/csv.hpp"
#include "trollscope/error.hpp"
#include "trollscope/eval.hpp"
#include "trollscope/forest.hpp"
#include "trollscope/lda.hpp"
#include "trollscope/random.hpp"
#include "trollscope/svm.hpp"
#include "trollscope/textprep.hpp"

namespace fs = std::filesystem;

namespace trollscope::cli {

namespace {

// ---------------------------------------------------------------------------
// Settings: defaults < config file < command-line flags.

struct Key {
    std::string name;
    std::string fallback;  // empty means unset
    std::string help;
    bool required = false;
};

const std::vector<Key> kPipelineKeys = {
    {"stoplist", "default", "stoplist file, 'default' for the bundled list or 'none'"},
    {"stemming", "true", "apply the English Snowball stemmer"},
    {"min_df", "1", "minimum document frequency of a kept term"},
    {"max_df_frac", "1.0", "maximum document frequency fraction of a kept term"},
};

const std::vector<Key> kSplitKeys = {
    {"classes", "", "comma-separated categories to train on (default: all labels present)"},
    {"train_size", "", "training sample size (overrides train_frac)"},
    {"train_frac", "0.8", "training fraction when train_size is unset"},
    {"test_size", "", "test sample size (default: everything not in training)"},
    {"weighting", "tfidf", "feature weighting: tfidf or counts"},
};

const std::vector<Key> kGibbsKeys = {
    {"alpha", "", "document-topic prior (default 50/k)"},
    {"eta", "0.01", "topic-word prior"},
    {"iterations", "1000", "Gibbs sweeps"},
    {"burn_in", "500", "sweeps discarded before sampling"},
    {"sample_lag", "10", "sweeps between retained samples"},
};

std::vector<Key> concat(std::initializer_list<std::vector<Key>> parts) {
    std::vector<Key> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

struct CommandSpec {
    std::string name;
    std::string description;
    std::vector<Key> keys;
};

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> specs = {
        {"ingest-tweets",
         "Parse a tweet CSV into a corpus",
         {{"input", "", "tweet CSV file", true},
          {"out", "", "output directory", true},
          {"grouping", "message", "message or account"},
          {"strict", "false", "fail on the first malformed row"},
          {"handle_column", "author", "column holding the account handle"},
          {"content_column", "content", "column holding the tweet text"},
          {"publish_column", "publish_date", "column holding the publish time"},
          {"category_column", "account_category", "column holding the account category"}}},
        {"ingest-ads",
         "Parse ad record files into a corpus",
         {{"input", "", "ad record file or directory of them", true},
          {"out", "", "output directory", true},
          {"grouping", "message", "message or account"},
          {"strict", "false", "fail on the first unparseable record"}}},
        {"report",
         "Term-frequency and corpus summary reports",
         concat({{{"corpus", "", "corpus CSV", true},
                  {"out", "", "output directory", true},
                  {"k", "30", "number of terms"},
                  {"category", "", "restrict to one category"}},
                 {kPipelineKeys[0], kPipelineKeys[1]}})},
        {"train-svm",
         "Train and evaluate a one-vs-rest SVM",
         concat({{{"corpus", "", "labelled corpus CSV", true}, {"out", "", "output directory", true}},
                 kPipelineKeys,
                 kSplitKeys,
                 {{"kernel", "linear", "linear, radial or polynomial"},
                  {"gamma", "", "kernel gamma (default 1/V)"},
                  {"degree", "3", "polynomial degree"},
                  {"coef0", "0", "polynomial offset"},
                  {"c", "1.0", "soft-margin trade-off"},
                  {"epochs", "20", "passes over the data"},
                  {"tolerance", "0.001", "KKT stopping threshold"},
                  {"seed", "0", "random seed"}}})},
        {"train-forest",
         "Train and evaluate a random forest",
         concat({{{"corpus", "", "labelled corpus CSV", true}, {"out", "", "output directory", true}},
                 kPipelineKeys,
                 kSplitKeys,
                 {{"n_trees", "100", "number of trees"},
                  {"mtry", "", "features sampled per node (default ceil(sqrt(V)))"},
                  {"max_depth", "", "depth limit (default unlimited)"},
                  {"min_leaf", "1", "minimum rows per leaf"},
                  {"impurity", "gini", "gini or entropy"},
                  {"bootstrap", "true", "bootstrap each tree's rows"},
                  {"seed", "0", "random seed"}}})},
        {"classify",
         "Classify an unlabelled corpus and tally account verdicts",
         {{"model", "", "model file from train-svm or train-forest", true},
          {"corpus", "", "corpus CSV", true},
          {"out", "", "output directory", true},
          {"vocab", "", "vocabulary file (default: vocabulary.tsv beside the model)"},
          kPipelineKeys[0],
          kPipelineKeys[1]}},
        {"lda-fit",
         "Fit an LDA topic model",
         concat({{{"corpus", "", "corpus CSV", true},
                  {"out", "", "output directory", true},
                  {"k", "", "number of topics", true},
                  {"top_n", "30", "words reported per topic"}},
                 kPipelineKeys,
                 kGibbsKeys,
                 {{"seed", "0", "random seed"}}})},
        {"lda-select-k",
         "Choose the number of topics by held-out perplexity",
         concat({{{"corpus", "", "corpus CSV", true},
                  {"out", "", "output directory", true},
                  {"k_range", "", "candidates as 'a..b' or 'a,b,c'", true},
                  {"train_frac", "0.8", "fraction of documents used for fitting"}},
                 kPipelineKeys,
                 kGibbsKeys,
                 {{"seed", "0", "random seed"}}})},
        {"topics",
         "lda-fit with --k, lda-select-k with --k-range",
         concat({{{"corpus", "", "corpus CSV", true},
                  {"out", "", "output directory", true},
                  {"k", "", "number of topics"},
                  {"k_range", "", "candidates as 'a..b' or 'a,b,c'"},
                  {"top_n", "30", "words reported per topic"},
                  {"train_frac", "0.8", "fraction of documents used for fitting"}},
                 kPipelineKeys,
                 kGibbsKeys,
                 {{"seed", "0", "random seed"}}})},
    };
    return specs;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string dashed(std::string s) {
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
}

class Settings {
public:
    Settings(const CommandSpec& spec) : spec_(spec) {
        for (const auto& k : spec.keys) values_[k.name] = k.fallback;
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto text = trim(line);
            if (text.empty() || text[0] == '#') continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos) {
                throw Error(ErrorCode::InvalidArgument,
                            path + ":" + std::to_string(lineno) + ": expected key=value");
            }
            auto key = trim(std::string_view(text).substr(0, eq));
            std::replace(key.begin(), key.end(), '-', '_');
            const auto value = trim(std::string_view(text).substr(eq + 1));
            if (key == "command") {
                if (value != spec_.name) {
                    throw Error(ErrorCode::InvalidArgument,
                                path + ": written for command '" + value + "', not '" + spec_.name + "'");
                }
                continue;
            }
            set(key, value, path + ":" + std::to_string(lineno));
        }
    }

    void set(const std::string& key, const std::string& value, const std::string& where) {
        auto it = values_.find(key);
        if (it == values_.end()) {
            throw Error(ErrorCode::InvalidArgument, where + ": unknown setting '" + key + "' for " + spec_.name);
        }
        it->second = value;
    }

    void check_required() const {
        for (const auto& k : spec_.keys) {
            if (k.required && values_.at(k.name).empty()) {
                throw Error(ErrorCode::InvalidArgument, "missing required setting --" + dashed(k.name));
            }
        }
    }

    bool has(const std::string& key) const { return !values_.at(key).empty(); }
    const std::string& str(const std::string& key) const { return values_.at(key); }

    std::uint64_t u64(const std::string& key) const {
        const auto& v = str(key);
        std::uint64_t x = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (v.empty() || ec != std::errc{} || p != v.data() + v.size()) bad(key, "a non-negative integer");
        return x;
    }

    std::uint64_t positive(const std::string& key) const {
        const auto x = u64(key);
        if (x == 0) bad(key, "a positive integer");
        return x;
    }

    double real(const std::string& key) const {
        const auto& v = str(key);
        double x = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (v.empty() || ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(x)) bad(key, "a number");
        return x;
    }

    bool flag(const std::string& key) const {
        const auto& v = str(key);
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        bad(key, "true or false");
    }

    std::optional<std::uint64_t> opt_u64(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return u64(key);
    }

    std::optional<double> opt_real(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return real(key);
    }

    void write_snapshot(std::ostream& out) const {
        out << "# resolved configuration; rerun with: trollscope " << spec_.name << " --config <this file>\n";
        out << "command=" << spec_.name << '\n';
        for (const auto& k : spec_.keys) out << k.name << '=' << values_.at(k.name) << '\n';
    }

    [[noreturn]] void bad(const std::string& key, const std::string& expected) const {
        throw Error(ErrorCode::InvalidArgument,
                    "--" + dashed(key) + " must be " + expected + ", got '" + values_.at(key) + "'");
    }

private:
    const CommandSpec& spec_;
    std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------------------
// File helpers.

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    return in;
}

class OutDir {
public:
    explicit OutDir(const std::string& path) : dir_(path) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + path + ": " + ec.message());
    }

    template <typename F>
    void write(const std::string& name, F&& body) const {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
        body(out);
        out.flush();
        if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
    }

    fs::path path(const std::string& name) const { return dir_ / name; }

private:
    fs::path dir_;
};

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

void write_fields(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& fields) {
    out << "field,value\n";
    for (const auto& [k, v] : fields) out << k << ',' << v << '\n';
}

Corpus load_corpus(const std::string& path) {
    auto in = open_input(path);
    return read_corpus_csv(in);
}

Analyzer make_analyzer(const Settings& s) {
    const auto& which = s.str("stoplist");
    Stoplist stoplist;
    if (which == "default") {
        stoplist = default_stoplist();
    } else if (which != "none") {
        stoplist = load_stoplist(which);
    }
    return Analyzer(std::move(stoplist), s.flag("stemming"));
}

Grouping parse_grouping(const Settings& s) {
    const auto& g = s.str("grouping");
    if (g == "message") return Grouping::PerMessage;
    if (g == "account") return Grouping::PerAccount;
    s.bad("grouping", "message or account");
}

// ---------------------------------------------------------------------------
// Ingestion.

void ingest_tweets(const Settings& s, const OutDir& out, std::ostream& log) {
    TweetParseOptions options;
    options.strict = s.flag("strict");
    options.schema.handle = s.str("handle_column");
    options.schema.content = s.str("content_column");
    options.schema.publish = s.str("publish_column");
    options.schema.category = s.str("category_column");
    auto in = open_input(s.str("input"));
    const auto parsed = parse_tweet_csv(in, options);
    const auto corpus = to_corpus(parsed.records, parse_grouping(s));

    out.write("corpus.csv", [&](std::ostream& o) { write_corpus_csv(o, corpus); });
    out.write("weekly.csv", [&](std::ostream& o) { write_weekly_csv(o, weekly_counts(parsed.records)); });
    out.write("issues.csv", [&](std::ostream& o) {
        o << "line,message\n";
        for (const auto& issue : parsed.report.issues) o << issue.line << ',' << csv::escape(issue.message) << '\n';
    });

    std::vector<std::pair<std::string, std::string>> fields = {
        {"rows_read", std::to_string(parsed.report.rows_read)},
        {"records_kept", std::to_string(parsed.report.records)},
        {"rows_skipped", std::to_string(parsed.report.issues.size())},
        {"documents", std::to_string(corpus.size())},
    };
    std::vector<std::size_t> per_cat(kCategoryCount, 0);
    for (const auto& r : parsed.records) ++per_cat[static_cast<std::size_t>(r.category)];
    for (auto c : kAllCategories) {
        fields.emplace_back("records_" + std::string(to_string(c)), std::to_string(per_cat[static_cast<std::size_t>(c)]));
    }
    out.write("ingest_report.csv", [&](std::ostream& o) { write_fields(o, fields); });
    log << "ingested " << parsed.report.records << " tweets into " << corpus.size() << " documents ("
        << parsed.report.issues.size() << " rows skipped)\n";
}

std::vector<fs::path> ad_files(const std::string& input) {
    const fs::path p(input);
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) return {p};
    if (!fs::is_directory(p, ec)) throw Error(ErrorCode::Io, "no such file or directory: " + input);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().filename().string().front() != '.') files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

void ingest_ads(const Settings& s, const OutDir& out, std::ostream& log) {
    const bool strict = s.flag("strict");
    std::vector<AdRecord> records;
    std::size_t read = 0, dropped = 0, partial = 0, unknown = 0, event = 0;
    std::vector<std::pair<std::string, std::string>> issues;

    for (const auto& file : ad_files(s.str("input"))) {
        ++read;
        auto in = open_input(file.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        try {
            auto result = parse_ad_record(buf.str());
            if (std::holds_alternative<Dropped>(result)) {
                ++dropped;
                continue;
            }
            auto& ad = std::get<AdRecord>(result);
            if (ad.redaction == Redaction::Partial) ++partial;
            if (std::holds_alternative<AccountUnknown>(ad.account)) ++unknown;
            if (std::holds_alternative<AccountEvent>(ad.account)) ++event;
            records.push_back(std::move(ad));
        } catch (const Error& e) {
            if (strict) throw Error(e.code(), file.filename().string() + ": " + e.what());
            issues.emplace_back(file.filename().string(), e.what());
        }
    }
    const auto corpus = to_corpus(records, parse_grouping(s));

    out.write("corpus.csv", [&](std::ostream& o) { write_corpus_csv(o, corpus); });
    out.write("weekly.csv", [&](std::ostream& o) {
        const bool any_ts = std::any_of(records.begin(), records.end(), [](const AdRecord& r) {
            return r.creation_ts.has_value();
        });
        if (any_ts) {
            write_weekly_csv(o, weekly_counts(records));
        } else {
            write_weekly_csv(o, WeeklySeries{});
        }
    });
    out.write("issues.csv", [&](std::ostream& o) {
        o << "file,message\n";
        for (const auto& [f, m] : issues) o << csv::escape(f) << ',' << csv::escape(m) << '\n';
    });
    out.write("ingest_report.csv", [&](std::ostream& o) {
        write_fields(o, {{"files_read", std::to_string(read)},
                         {"records_kept", std::to_string(records.size())},
                         {"dropped_redacted", std::to_string(dropped)},
                         {"partially_redacted", std::to_string(partial)},
                         {"unknown_accounts", std::to_string(unknown)},
                         {"event_accounts", std::to_string(event)},
                         {"unparseable", std::to_string(issues.size())},
                         {"documents", std::to_string(corpus.size())}});
    });
    log << "ingested " << records.size() << " ads (" << dropped << " dropped as fully redacted, " << issues.size()
        << " unparseable)\n";
}

// ---------------------------------------------------------------------------
// Reports.

void report(const Settings& s, const OutDir& out, std::ostream& log) {
    const auto corpus = load_corpus(s.str("corpus"));
    std::optional<AccountCategory> filter;
    if (s.has("category")) {
        filter = parse_category(s.str("category"));
        if (!corpus.has_labels()) {
            throw Error(ErrorCode::InvalidArgument, "--category given but the corpus has no labels");
        }
    }
    const auto analyzer = make_analyzer(s);
    const auto terms = top_terms(corpus, analyzer, filter, s.positive("k"));
    out.write("top_terms.csv", [&](std::ostream& o) {
        o << "rank,term,count\n";
        for (std::size_t i = 0; i < terms.size(); ++i) o << i + 1 << ',' << terms[i].first << ',' << terms[i].second << '\n';
    });

    std::vector<std::size_t> per_cat(kCategoryCount, 0);
    std::size_t unlabeled = 0;
    std::optional<Timestamp> first, last;
    for (const auto& d : corpus.documents()) {
        if (d.label) {
            ++per_cat[static_cast<std::size_t>(*d.label)];
        } else {
            ++unlabeled;
        }
        if (d.timestamp) {
            if (!first || *d.timestamp < *first) first = d.timestamp;
            if (!last || *d.timestamp > *last) last = d.timestamp;
        }
    }
    out.write("summary.csv", [&](std::ostream& o) {
        std::vector<std::pair<std::string, std::string>> fields{{"documents", std::to_string(corpus.size())}};
        for (auto c : kAllCategories) {
            fields.emplace_back("documents_" + std::string(to_string(c)),
                                std::to_string(per_cat[static_cast<std::size_t>(c)]));
        }
        fields.emplace_back("documents_unlabeled", std::to_string(unlabeled));
        fields.emplace_back("first_timestamp", first ? format_timestamp(*first) : "");
        fields.emplace_back("last_timestamp", last ? format_timestamp(*last) : "");
        write_fields(o, fields);
    });
    log << "reported " << terms.size() << " terms over " << corpus.size() << " documents\n";
}

// ---------------------------------------------------------------------------
// Supervised training.

std::vector<AccountCategory> parse_class_list(const std::string& text) {
    std::vector<AccountCategory> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto name = trim(item);
        if (name.empty()) continue;
        const auto c = parse_category(name);
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct PreparedData {
    Vocabulary vocab;
    Analyzer analyzer;
    std::vector<AccountCategory> classes;
    DocTermMatrix train_x, test_x;
    std::vector<AccountCategory> train_y, test_y;
    std::vector<std::string> test_ids;
};

Weighting parse_weighting(const Settings& s) {
    const auto w = try_parse_weighting(s.str("weighting"));
    if (!w) s.bad("weighting", "tfidf or counts");
    return *w;
}

DocTermMatrix featurize(const Corpus& corpus, const Analyzer& analyzer, const Vocabulary& vocab, Weighting w) {
    auto counts = vectorize(corpus, analyzer, vocab);
    return w == Weighting::TfIdf ? tfidf(counts, vocab) : counts;
}

PreparedData prepare(const Settings& s) {
    const auto corpus = load_corpus(s.str("corpus"));
    if (corpus.empty()) throw Error(ErrorCode::EmptyInput, "corpus is empty");
    auto classes = s.has("classes") ? parse_class_list(s.str("classes")) : std::vector<AccountCategory>{};

    std::vector<std::size_t> keep;
    std::vector<AccountCategory> labels;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& d = corpus[i];
        if (!d.label) throw Error(ErrorCode::InvalidArgument, "document " + d.doc_id + " has no label");
        if (!classes.empty() && std::find(classes.begin(), classes.end(), *d.label) == classes.end()) continue;
        keep.push_back(i);
        labels.push_back(*d.label);
    }
    if (classes.empty()) {
        for (auto c : kAllCategories) {
            if (std::find(labels.begin(), labels.end(), c) != labels.end()) classes.push_back(c);
        }
    }
    if (labels.empty()) throw Error(ErrorCode::EmptyInput, "no documents in the selected classes");
    const auto docs = corpus.subset(keep);

    std::size_t train_size = 0;
    if (s.has("train_size")) {
        train_size = s.positive("train_size");
    } else {
        const double frac = s.real("train_frac");
        if (!(frac > 0.0 && frac <= 1.0)) s.bad("train_frac", "in (0, 1]");
        train_size = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(frac * labels.size())));
    }
    const auto split = eval::train_test_split(labels, train_size, s.opt_u64("test_size"), derive_seed(s.u64("seed"), "split"));

    PreparedData p{Vocabulary{}, make_analyzer(s), classes, {}, {}, {}, {}, {}};
    const auto train_docs = docs.subset(split.train);
    const auto test_docs = docs.subset(split.test);
    const double max_df = s.real("max_df_frac");
    p.vocab = build_vocabulary(train_docs, p.analyzer, s.positive("min_df"), max_df);
    const auto w = parse_weighting(s);
    p.train_x = featurize(train_docs, p.analyzer, p.vocab, w);
    p.test_x = featurize(test_docs, p.analyzer, p.vocab, w);
    for (auto i : split.train) p.train_y.push_back(labels[i]);
    for (auto i : split.test) {
        p.test_y.push_back(labels[i]);
        p.test_ids.push_back(docs[i].doc_id);
    }
    return p;
}

void write_evaluation(const OutDir& out, const PreparedData& p, const std::vector<AccountCategory>& predicted,
                      std::ostream& log) {
    std::vector<eval::Outcome> pairs;
    for (std::size_t i = 0; i < predicted.size(); ++i) pairs.push_back({predicted[i], p.test_y[i]});
    const auto matrix = eval::confusion_matrix(pairs, p.classes);
    out.write("vocabulary.tsv", [&](std::ostream& o) { write_vocabulary(o, p.vocab); });
    out.write("confusion_matrix.csv", [&](std::ostream& o) { eval::write_confusion_csv(o, matrix); });
    out.write("accuracy.csv", [&](std::ostream& o) { eval::write_accuracy_csv(o, matrix); });
    out.write("test_predictions.csv", [&](std::ostream& o) {
        o << "doc_id,truth,predicted\n";
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            o << csv::escape(p.test_ids[i]) << ',' << to_string(p.test_y[i]) << ',' << to_string(predicted[i]) << '\n';
        }
    });
    const auto overall = eval::overall_accuracy(matrix);
    log << "trained on " << p.train_y.size() << " documents, tested on " << p.test_y.size();
    if (overall) log << ", accuracy " << fixed(100.0 * *overall, 2) << "%";
    log << '\n';
}

svm::Kernel parse_kernel(const Settings& s, std::size_t n_terms) {
    const auto& name = s.str("kernel");
    const double gamma = s.has("gamma") ? s.real("gamma") : 1.0 / static_cast<double>(std::max<std::size_t>(1, n_terms));
    svm::Kernel k;
    if (name == "linear") {
        k = svm::Linear{};
    } else if (name == "radial") {
        k = svm::Radial{gamma};
    } else if (name == "polynomial") {
        k = svm::Polynomial{static_cast<std::uint32_t>(s.positive("degree")), gamma, s.real("coef0")};
    } else {
        s.bad("kernel", "linear, radial or polynomial");
    }
    svm::validate(k);
    return k;
}

void train_svm(const Settings& s, const OutDir& out, std::ostream& log) {
    const auto p = prepare(s);
    svm::TrainConfig config;
    config.c = s.real("c");
    config.epochs = static_cast<std::uint32_t>(s.positive("epochs"));
    config.tolerance = s.real("tolerance");
    config.seed = derive_seed(s.u64("seed"), "svm");
    const auto kernel = parse_kernel(s, p.vocab.size());
    auto model = svm::train_ovr(p.train_x, p.train_y, p.classes, kernel, config);
    model.feature_space.vocab_fingerprint = p.vocab.fingerprint();
    out.write("model.svm", [&](std::ostream& o) { svm::save(o, model); });

    std::vector<AccountCategory> predicted;
    for (const auto& row : p.test_x.rows) predicted.push_back(svm::predict(model, row).category);
    write_evaluation(out, p, predicted, log);
}

void train_forest(const Settings& s, const OutDir& out, std::ostream& log) {
    const auto p = prepare(s);
    forest::ForestConfig config;
    config.n_trees = static_cast<std::uint32_t>(s.positive("n_trees"));
    if (s.has("mtry")) config.mtry = static_cast<std::uint32_t>(s.positive("mtry"));
    if (s.has("max_depth")) config.max_depth = static_cast<std::uint32_t>(s.u64("max_depth"));
    config.min_leaf = static_cast<std::uint32_t>(s.positive("min_leaf"));
    const auto& imp = s.str("impurity");
    if (imp == "gini") {
        config.impurity = forest::Impurity::Gini;
    } else if (imp == "entropy") {
        config.impurity = forest::Impurity::Entropy;
    } else {
        s.bad("impurity", "gini or entropy");
    }
    config.bootstrap = s.flag("bootstrap");
    config.seed = derive_seed(s.u64("seed"), "forest");
    auto model = forest::train_forest(p.train_x, p.train_y, config);
    model.feature_space.vocab_fingerprint = p.vocab.fingerprint();
    out.write("model.forest", [&](std::ostream& o) { forest::save(o, model); });

    std::vector<AccountCategory> predicted;
    for (const auto& row : p.test_x.rows) predicted.push_back(forest::predict_forest(model, row).category);
    write_evaluation(out, p, predicted, log);
}

// ---------------------------------------------------------------------------
// Classification of unlabelled documents.

void classify(const Settings& s, const OutDir& out, std::ostream& log) {
    const auto model_path = s.str("model");
    std::string kind;
    {
        auto in = open_input(model_path);
        in >> kind;
    }
    std::optional<svm::SvmModel> svm_model;
    std::optional<forest::ForestModel> forest_model;
    FeatureSpace space;
    {
        auto in = open_input(model_path);
        if (kind == "trollscope-svm") {
            svm_model = svm::load(in);
            space = svm_model->feature_space;
        } else if (kind == "trollscope-forest") {
            forest_model = forest::load(in);
            space = forest_model->feature_space;
        } else {
            throw Error(ErrorCode::BadModelFile, model_path + " is not a trollscope model");
        }
    }

    const auto vocab_path = s.has("vocab") ? s.str("vocab") : (fs::path(model_path).parent_path() / "vocabulary.tsv").string();
    auto vin = open_input(vocab_path);
    const auto vocab = read_vocabulary(vin);
    if (vocab.fingerprint() != space.vocab_fingerprint || vocab.size() != space.n_terms) {
        throw Error(ErrorCode::VocabMismatch, vocab_path + " is not the vocabulary the model was trained with");
    }
    const auto analyzer = make_analyzer(s);
    if (analyzer.fingerprint() != vocab.analyzer_fingerprint()) {
        throw Error(ErrorCode::VocabMismatch,
                    "stoplist/stemming settings differ from those the vocabulary was built with");
    }

    const auto corpus = load_corpus(s.str("corpus"));
    if (corpus.empty()) throw Error(ErrorCode::EmptyInput, "corpus is empty");
    const auto x = featurize(corpus, analyzer, vocab, space.weighting);

    std::vector<eval::AccountPrediction> preds;
    out.write("predictions.csv", [&](std::ostream& o) {
        o << "doc_id,account,predicted\n";
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const auto& d = corpus[i];
            const auto c = svm_model ? svm::predict(*svm_model, x.rows[i]).category
                                     : forest::predict_forest(*forest_model, x.rows[i]).category;
            const auto account = d.account.empty() ? d.doc_id : d.account;
            preds.push_back({account, c});
            o << csv::escape(d.doc_id) << ',' << csv::escape(account) << ',' << to_string(c) << '\n';
        }
    });
    const auto verdicts = eval::classify_accounts(preds);
    out.write("verdicts.csv", [&](std::ostream& o) { eval::write_verdicts_csv(o, verdicts); });
    out.write("verdict_histogram.csv", [&](std::ostream& o) { eval::write_histogram_csv(o, verdicts); });
    log << "classified " << corpus.size() << " documents from " << verdicts.verdicts.size() << " accounts\n";
}

// ---------------------------------------------------------------------------
// Topic models.

struct TopicInput {
    Vocabulary vocab;
    DocTermMatrix counts;
    Corpus corpus;
};

TopicInput topic_input(const Settings& s) {
    TopicInput t;
    t.corpus = load_corpus(s.str("corpus"));
    if (t.corpus.empty()) throw Error(ErrorCode::EmptyInput, "corpus is empty");
    const auto analyzer = make_analyzer(s);
    t.vocab = build_vocabulary(t.corpus, analyzer, s.positive("min_df"), s.real("max_df_frac"));
    t.counts = vectorize(t.corpus, analyzer, t.vocab);
    return t;
}

lda::GibbsConfig gibbs_config(const Settings& s) {
    lda::GibbsConfig c;
    c.iterations = static_cast<std::uint32_t>(s.positive("iterations"));
    c.burn_in = static_cast<std::uint32_t>(s.u64("burn_in"));
    c.sample_lag = static_cast<std::uint32_t>(s.positive("sample_lag"));
    c.seed = derive_seed(s.u64("seed"), "lda");
    c.validate();
    return c;
}

void lda_fit(const Settings& s, const OutDir& out, std::ostream& log) {
    const auto k = s.positive("k");
    const auto config = gibbs_config(s);
    const auto t = topic_input(s);
    const double alpha = s.has("alpha") ? s.real("alpha") : lda::default_alpha(k);
    auto model = lda::fit_gibbs(t.counts, k, alpha, s.real("eta"), config);
    model.vocab_fingerprint = t.vocab.fingerprint();
    const auto topics = lda::topic_top_words(model, t.vocab, s.positive("top_n"));

    out.write("vocabulary.tsv", [&](std::ostream& o) { write_vocabulary(o, t.vocab); });
    out.write("topics.csv", [&](std::ostream& o) { lda::write_topic_report(o, topics); });
    out.write("topic_table.csv", [&](std::ostream& o) { lda::write_topic_table(o, topics); });
    out.write("doc_topics.csv", [&](std::ostream& o) {
        o << "doc_id";
        for (std::size_t j = 0; j < k; ++j) o << ",topic_" << j;
        o << '\n';
        const auto theta = model.theta_table();
        for (std::size_t d = 0; d < t.corpus.size(); ++d) {
            o << csv::escape(t.corpus[d].doc_id);
            for (std::size_t j = 0; j < k; ++j) o << ',' << fixed(theta(d, j), 9);
            o << '\n';
        }
    });
    log << "fitted " << k << " topics over " << t.counts.n_docs() << " documents and " << t.vocab.size() << " terms\n";
}

std::vector<std::size_t> parse_k_range(const Settings& s) {
    const auto& text = s.str("k_range");
    std::vector<std::size_t> ks;
    auto number = [&](std::string_view v) {
        std::size_t x = 0;
        const auto t = trim(v);
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
        if (t.empty() || ec != std::errc{} || p != t.data() + t.size() || x == 0) {
            s.bad("k_range", "'a..b' or a comma-separated list of positive integers");
        }
        return x;
    };
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const auto lo = number(std::string_view(text).substr(0, dots));
        const auto hi = number(std::string_view(text).substr(dots + 2));
        if (lo > hi) s.bad("k_range", "an increasing range");
        for (auto k = lo; k <= hi; ++k) ks.push_back(k);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) ks.push_back(number(item));
    }
    return ks;
}

void lda_select_k(const Settings& s, const OutDir& out, std::ostream& log) {
    const auto ks = parse_k_range(s);
    const auto config = gibbs_config(s);
    const auto t = topic_input(s);
    lda::SelectKOptions options;
    options.train_frac = s.real("train_frac");
    options.alpha = s.opt_real("alpha");
    options.eta = s.real("eta");
    const auto result = lda::select_k(t.counts, ks, options, config);

    out.write("select_k.csv", [&](std::ostream& o) {
        o << "k,perplexity,chosen\n";
        for (const auto& [k, perp] : result.perplexities) {
            o << k << ',' << fixed(perp, 6) << ',' << (k == result.best_k ? 1 : 0) << '\n';
        }
    });
    out.write("best_k.txt", [&](std::ostream& o) { o << result.best_k << '\n'; });
    log << "best k = " << result.best_k << " (" << result.train_docs.size() << " training, "
        << result.heldout_docs.size() << " held-out documents)\n";
}

void topics(const Settings& s, const OutDir& out, std::ostream& log) {
    if (s.has("k") == s.has("k_range")) {
        throw Error(ErrorCode::InvalidArgument, "topics needs exactly one of --k or --k-range");
    }
    if (s.has("k")) {
        lda_fit(s, out, log);
    } else {
        lda_select_k(s, out, log);
    }
}

using Handler = std::function<void(const Settings&, const OutDir&, std::ostream&)>;

Handler handler_for(const std::string& name) {
    static const std::map<std::string, Handler> table = {
        {"ingest-tweets", ingest_tweets}, {"ingest-ads", ingest_ads},     {"report", report},
        {"train-svm", train_svm},         {"train-forest", train_forest}, {"classify", classify},
        {"lda-fit", lda_fit},             {"lda-select-k", lda_select_k}, {"topics", topics},
    };
    return table.at(name);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Topic modelling and account classification for social-media text", "trollscope"};
    app.require_subcommand(1);

    struct Bound {
        const CommandSpec* spec;
        CLI::App* app;
        std::string config;
        std::map<std::string, std::string> flags;
        std::map<std::string, CLI::Option*> options;
    };
    std::vector<Bound> bound;
    bound.reserve(commands().size());
    for (const auto& spec : commands()) {
        auto& b = bound.emplace_back();
        b.spec = &spec;
        b.app = app.add_subcommand(spec.name, spec.description);
        b.app->add_option("--config", b.config, "key=value settings file (flags override it)");
        for (const auto& key : spec.keys) {
            std::string help = key.help;
            if (!key.fallback.empty()) help += " [" + key.fallback + "]";
            b.options[key.name] = b.app->add_option("--" + dashed(key.name), b.flags[key.name], help);
        }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        for (auto& b : bound) {
            if (!b.app->parsed()) continue;
            Settings settings(*b.spec);
            if (!b.config.empty()) settings.load_file(b.config);
            for (const auto& [name, opt] : b.options) {
                if (opt->count() > 0) settings.set(name, b.flags[name], "command line");
            }
            settings.check_required();
            const OutDir dir(settings.str("out"));
            dir.write("config.resolved", [&](std::ostream& o) { settings.write_snapshot(o); });
            handler_for(b.spec->name)(settings, dir, out);
            return kOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalFailure;
    }
    return kUsageError;
}

}  // namespace trollscope::cli
