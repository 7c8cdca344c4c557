// Acceptance suite: one PASS/FAIL line per criterion.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../support/synthetic.hpp"
#include "trollscope/cli.hpp"
#include "trollscope/corpus.hpp"
#include "trollscope/eval.hpp"
#include "trollscope/forest.hpp"
#include "trollscope/lda.hpp"
#include "trollscope/svm.hpp"
#include "trollscope/textprep.hpp"

namespace fs = std::filesystem;
using namespace trollscope;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

eval::ConfusionMatrix table1() {
    eval::ConfusionMatrix m;
    m.classes = fixtures::kFiveClasses;
    m.cells = {{72, 6, 7, 0, 17},
               {2, 742, 85, 39, 95},
               {36, 1250, 4562, 523, 1641},
               {12, 505, 1497, 13092, 2243},
               {79, 2681, 5609, 2881, 15532}};
    return m;
}

Verdict table1_accuracy() {
    const std::vector<double> published = {70.6, 77.1, 56.9, 75.5, 58.0};
    const auto acc = eval::per_class_accuracy(table1());
    Verdict v{true, "got"};
    for (std::size_t k = 0; k < published.size(); ++k) {
        const double rounded = std::round(*acc[k] * 10.0) / 10.0;
        v.detail += " " + fmt("%.1f", rounded);
        if (std::abs(rounded - published[k]) > 0.05) v.pass = false;
    }
    return v;
}

Verdict table1_total() {
    const auto total = table1().total();
    return {total == 53208, "grand total " + std::to_string(total)};
}

Verdict gibbs_vs_enumeration() {
    DocTermMatrix m;
    m.n_terms = 3;
    m.rows = {SparseVector{3, {{0, 2.0}, {1, 1.0}}}, SparseVector{3, {{1, 1.0}, {2, 2.0}}}};
    m.doc_lengths = {3, 3};
    const double alpha = 0.5, eta = 0.3;
    lda::GibbsConfig cfg;
    cfg.burn_in = 1000;
    cfg.iterations = cfg.burn_in + 50000;
    cfg.sample_lag = 1;
    cfg.seed = 2024;
    cfg.track_token_marginals = true;
    const auto fit = lda::fit_gibbs(m, 2, alpha, eta, cfg);
    const auto exact = lda::posterior_brute_force(m, 2, alpha, eta);
    double worst = 0.0;
    for (std::size_t d = 0; d < exact.size(); ++d) {
        for (std::size_t n = 0; n < exact[d].size(); ++n) {
            for (std::size_t k = 0; k < 2; ++k) {
                worst = std::max(worst, std::abs(fit.token_marginals[d][n][k] - exact[d][n][k]));
            }
        }
    }
    return {fit.n_samples == 50000 && worst < 0.02,
            std::to_string(fit.n_samples) + " samples, max |gibbs - exact| = " + fmt("%.4f", worst)};
}

Verdict planted_topics() {
    const auto truth = lda::block_topics(3, 10, 0.9);
    int hits = 0;
    double worst_tv = 0.0;
    std::string ks;
    for (std::uint64_t s = 0; s < 5; ++s) {
        lda::SyntheticSpec spec;
        spec.M = 200;
        spec.xi = 50.0;
        spec.K = 3;
        spec.V = 30;
        spec.alpha = 0.1;
        spec.topic_word = truth;
        spec.seed = 1000 + s;
        const auto syn = lda::generate_synthetic_corpus(spec);
        const auto counts = syn.matrix();

        lda::GibbsConfig cfg;
        cfg.seed = 77 + s;
        const double alpha = 0.5;
        const auto fit = lda::fit_gibbs(counts, 3, alpha, lda::kDefaultEta, cfg);
        worst_tv = std::max(worst_tv, lda::matched_topic_distance(fit.phi_mean, truth));

        lda::SelectKOptions options;
        options.alpha = alpha;
        const auto sel = lda::select_k(counts, {2, 3, 4, 6}, options, cfg);
        hits += sel.best_k == 3;
        ks += (ks.empty() ? "" : ",") + std::to_string(sel.best_k);
    }
    return {worst_tv < 0.15 && hits >= 4,
            "worst matched TV " + fmt("%.4f", worst_tv) + ", select_k picks {" + ks + "}, " + std::to_string(hits) + "/5 = 3"};
}

Verdict impurity_formulas() {
    using forest::NodeClassCounts;
    const double g55 = forest::gini(NodeClassCounts{{5, 5}});
    const double g_pure = forest::gini(NodeClassCounts{{10, 0}});
    const double h55 = forest::entropy(NodeClassCounts{{5, 5}});
    const double h_pure = forest::entropy(NodeClassCounts{{10, 0}});
    const bool ok = std::abs(g55 - 0.5) <= 1e-12 && std::abs(g_pure) <= 1e-12 && std::abs(h55 - 1.0) <= 1e-12 &&
                    std::abs(h_pure) <= 1e-12;
    return {ok, "gini(5,5)=" + fmt("%.12g", g55) + " gini(10,0)=" + fmt("%.12g", g_pure) + " H(5,5)=" +
                    fmt("%.12g", h55) + " H(10,0)=" + fmt("%.12g", h_pure)};
}

double svm_accuracy(const svm::SvmModel& model, const DocTermMatrix& x, const std::vector<AccountCategory>& y) {
    std::size_t right = 0;
    for (std::size_t i = 0; i < y.size(); ++i) right += svm::predict(model, x.rows[i]).category == y[i];
    return static_cast<double>(right) / static_cast<double>(y.size());
}

Verdict svm_sanity() {
    const auto corpus = fixtures::signature_corpus(500, 11);
    std::vector<AccountCategory> labels;
    for (const auto& d : corpus.documents()) labels.push_back(*d.label);
    const auto split = eval::train_test_split(labels, 2000, std::nullopt, 5);
    const auto analyzer = fixtures::plain_analyzer();
    const auto train = corpus.subset(split.train);
    const auto test = corpus.subset(split.test);
    const auto vocab = build_vocabulary(train, analyzer, 1, 1.0);
    const auto xtr = tfidf(vectorize(train, analyzer, vocab), vocab);
    const auto xte = tfidf(vectorize(test, analyzer, vocab), vocab);
    std::vector<AccountCategory> ytr, yte;
    for (auto i : split.train) ytr.push_back(labels[i]);
    for (auto i : split.test) yte.push_back(labels[i]);

    svm::TrainConfig cfg;
    cfg.seed = 3;
    const auto model = svm::train_ovr(xtr, ytr, svm::Linear{}, cfg);
    const double train_acc = svm_accuracy(model, xtr, ytr);
    const double test_acc = svm_accuracy(model, xte, yte);

    DocTermMatrix xor_x;
    xor_x.n_terms = 2;
    xor_x.rows = {from_dense({0, 0}), from_dense({1, 1}), from_dense({0, 1}), from_dense({1, 0})};
    xor_x.doc_lengths = {0, 2, 1, 1};
    const std::vector<AccountCategory> xor_y = {AccountCategory::LeftTroll, AccountCategory::LeftTroll,
                                                AccountCategory::RightTroll, AccountCategory::RightTroll};
    svm::TrainConfig kcfg;
    kcfg.epochs = 200;
    const double xor_linear = svm_accuracy(svm::train_ovr(xor_x, xor_y, svm::Linear{}, kcfg), xor_x, xor_y);
    const double xor_radial = svm_accuracy(svm::train_ovr(xor_x, xor_y, svm::Radial{1.0}, kcfg), xor_x, xor_y);

    const bool ok = train_acc >= 0.99 && test_acc >= 0.95 && xor_linear <= 0.75 && xor_radial == 1.0;
    return {ok, "signature train " + fmt("%.4f", train_acc) + " test " + fmt("%.4f", test_acc) + "; XOR linear " +
                    fmt("%.2f", xor_linear) + " radial " + fmt("%.2f", xor_radial)};
}

double forest_accuracy(const forest::ForestModel& model, const fixtures::LabeledSet& s) {
    std::size_t right = 0;
    for (std::size_t i = 0; i < s.y.size(); ++i) right += forest::predict_forest(model, s.x.rows[i]).category == s.y[i];
    return static_cast<double>(right) / static_cast<double>(s.y.size());
}

Verdict forest_beats_tree() {
    int wins = 0;
    std::string margins;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto train = fixtures::noisy_diagonal(300, 8, 0.2, 500 + s);
        const auto test = fixtures::noisy_diagonal(1000, 8, 0.2, 900 + s);
        forest::ForestConfig many;
        many.n_trees = 50;
        many.seed = s;
        forest::ForestConfig one;
        one.n_trees = 1;
        one.bootstrap = false;
        one.mtry = 8;
        one.seed = s;
        const double a_forest = forest_accuracy(forest::train_forest(train.x, train.y, many), test);
        const double a_tree = forest_accuracy(forest::train_forest(train.x, train.y, one), test);
        wins += a_forest >= a_tree;
        margins += " " + fmt("%+.3f", a_forest - a_tree);
    }
    return {wins >= 8, std::to_string(wins) + "/10 seeds; forest - tree:" + margins};
}

AdParseResult parse_fixture(const std::string& name) {
    std::ifstream in(std::string(TROLLSCOPE_FIXTURES) + "/ads/" + name, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_ad_record(buf.str());
}

Verdict ingestion_rules() {
    const auto redacted = parse_fixture("ad_0103.txt");
    const auto partial = parse_fixture("ad_0102.txt");
    const auto offsite = parse_fixture("ad_0104.txt");
    const auto page = parse_fixture("ad_0101.txt");

    const bool dropped = std::holds_alternative<Dropped>(redacted) && std::get<Dropped>(redacted).ad_id == "103";
    bool partial_ok = false;
    if (const auto* ad = std::get_if<AdRecord>(&partial)) {
        partial_ok = ad->redaction == Redaction::Partial && ad->text.find('?') == std::string::npos &&
                     ad->text == "Proud to be American and proud of our heroes. Support the troops every day.";
    }
    bool offsite_ok = false;
    if (const auto* ad = std::get_if<AdRecord>(&offsite)) offsite_ok = std::holds_alternative<AccountUnknown>(ad->account);
    bool page_ok = false;
    if (const auto* ad = std::get_if<AdRecord>(&page)) page_ok = account_display(ad->account) == "Blacktivist";

    return {dropped && partial_ok && offsite_ok && page_ok,
            std::string("fully redacted dropped=") + (dropped ? "yes" : "no") + ", partial cleaned=" +
                (partial_ok ? "yes" : "no") + ", off-platform unknown=" + (offsite_ok ? "yes" : "no") +
                ", page name extracted=" + (page_ok ? "yes" : "no")};
}

Verdict account_verdicts() {
    using C = AccountCategory;
    std::vector<eval::AccountPrediction> preds = {
        {"split", C::LeftTroll}, {"split", C::LeftTroll}, {"split", C::RightTroll}, {"split", C::RightTroll},
        {"major", C::LeftTroll}, {"major", C::LeftTroll}, {"major", C::RightTroll}, {"single", C::NewsFeed},
    };
    for (int a = 0; a < 92; ++a) preds.push_back({"fb" + std::to_string(a), fixtures::kFiveClasses[a % 5]});
    const auto report = eval::classify_accounts(preds);
    bool tie = false, major = false;
    for (const auto& v : report.verdicts) {
        if (v.account == "split") tie = v.tie();
        if (v.account == "major") major = v.verdict == C::LeftTroll;
    }
    std::uint64_t sum = 0, ties = 0;
    for (const auto& [name, n] : report.histogram) {
        sum += n;
        if (name == eval::kTie) ties = n;
    }
    const bool ok = tie && major && ties == 1 && sum == 95 && report.verdicts.size() == 95;
    return {ok, "2-2 split tie=" + std::string(tie ? "yes" : "no") + ", histogram sums to " + std::to_string(sum) +
                    " over " + std::to_string(report.verdicts.size()) + " accounts"};
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        files[e.path().filename().string()] = buf.str();
    }
    return files;
}

int cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != 0) std::fprintf(stderr, "  cli failed (%d): %s", code, err.str().c_str());
    return code;
}

Verdict determinism() {
    const fs::path root = fs::temp_directory_path() / ("trollscope-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);

    const auto labelled = root / "labelled.csv";
    {
        std::ofstream out(labelled, std::ios::binary);
        write_corpus_csv(out, fixtures::signature_corpus(40, 21));
    }
    const auto topical = root / "topical.csv";
    {
        lda::SyntheticSpec spec{60, 30.0, 3, 30, 0.1, lda::block_topics(3, 10, 0.9), 4};
        std::ofstream out(topical, std::ios::binary);
        write_corpus_csv(out, lda::generate_synthetic_corpus(spec).corpus);
    }
    const std::vector<std::string> plain = {"--stoplist", "none", "--stemming", "false"};
    auto with = [&](std::vector<std::string> args) {
        args.insert(args.end(), plain.begin(), plain.end());
        return args;
    };
    const std::string L = labelled.string(), T = topical.string(), R = root.string();
    const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
        {"svm", with({"train-svm", "--corpus", L, "--out", R + "/svm", "--seed", "7"})},
        {"svm-radial", with({"train-svm", "--corpus", L, "--out", R + "/svm-radial", "--kernel", "radial", "--seed", "7"})},
        {"forest", with({"train-forest", "--corpus", L, "--out", R + "/forest", "--n-trees", "25", "--seed", "7"})},
        {"classify", with({"classify", "--model", R + "/svm/model.svm", "--corpus", L, "--out", R + "/classify"})},
        {"lda", with({"lda-fit", "--corpus", T, "--out", R + "/lda", "--k", "3", "--iterations", "200", "--burn-in",
                      "100", "--seed", "9"})},
        {"select", with({"lda-select-k", "--corpus", T, "--out", R + "/select", "--k-range", "2..4", "--iterations",
                         "200", "--burn-in", "100", "--seed", "9"})},
    };

    std::vector<std::string> differing;
    std::size_t files_checked = 0;
    for (const auto& [name, args] : runs) {
        const fs::path dir = root / name;
        if (cli(args) != 0) return {false, name + ": first run failed"};
        const auto first = snapshot(dir);
        if (cli(args) != 0) return {false, name + ": second run failed"};
        const auto second = snapshot(dir);
        if (cli({args[0], "--config", (dir / "config.resolved").string()}) != 0) {
            return {false, name + ": replay from config.resolved failed"};
        }
        const auto replay = snapshot(dir);
        files_checked += first.size();
        if (first != second || first != replay) differing.push_back(name);
    }
    fs::remove_all(root);
    std::string detail = std::to_string(runs.size()) + " commands x 3 runs, " + std::to_string(files_checked) +
                         " output files compared";
    if (!differing.empty()) {
        detail += "; differing:";
        for (const auto& d : differing) detail += " " + d;
    }
    return {differing.empty(), detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"Table 1 -> Table 2 per-class accuracy", table1_accuracy},
        {"Table 1 grand total", table1_total},
        {"Gibbs marginals match enumeration", gibbs_vs_enumeration},
        {"Planted-topic recovery and select_k", planted_topics},
        {"Impurity formulas", impurity_formulas},
        {"SVM sanity (separable + XOR)", svm_sanity},
        {"Forest beats single tree", forest_beats_tree},
        {"Ingestion rules", ingestion_rules},
        {"Account verdicts with Tie", account_verdicts},
        {"Determinism of train/fit commands", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %2zu: %s -- %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), v.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !v.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
