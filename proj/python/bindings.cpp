#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trollscope/category.hpp"
#include "trollscope/cli.hpp"
#include "trollscope/corpus.hpp"
#include "trollscope/error.hpp"
#include "trollscope/eval.hpp"
#include "trollscope/forest.hpp"
#include "trollscope/lda.hpp"
#include "trollscope/textprep.hpp"

namespace py = pybind11;
using namespace trollscope;

namespace {

py::exception<Error>* error_type = nullptr;

Analyzer make_analyzer(bool stopwords, bool stemming) {
    return Analyzer(stopwords ? default_stoplist() : Stoplist{}, stemming);
}

std::vector<std::vector<double>> to_rows(const lda::Table& t) {
    std::vector<std::vector<double>> rows(t.rows, std::vector<double>(t.cols));
    for (std::size_t r = 0; r < t.rows; ++r) {
        for (std::size_t c = 0; c < t.cols; ++c) rows[r][c] = t(r, c);
    }
    return rows;
}

py::dict fit_lda(const std::vector<std::string>& texts, std::size_t k, std::optional<double> alpha, double eta,
                 std::uint32_t iterations, std::uint32_t burn_in, std::uint32_t sample_lag, std::uint64_t seed,
                 bool stopwords, bool stemming, std::size_t top_n) {
    Corpus corpus;
    for (std::size_t i = 0; i < texts.size(); ++i) corpus.add({"d" + std::to_string(i), {}, texts[i], {}, {}, {}});
    if (corpus.empty()) throw Error(ErrorCode::EmptyInput, "no documents");
    const auto analyzer = make_analyzer(stopwords, stemming);
    const auto vocab = build_vocabulary(corpus, analyzer, 1, 1.0);
    const auto counts = vectorize(corpus, analyzer, vocab);

    lda::GibbsConfig config;
    config.iterations = iterations;
    config.burn_in = burn_in;
    config.sample_lag = sample_lag;
    config.seed = seed;
    config.validate();
    const auto model = lda::fit_gibbs(counts, k, alpha.value_or(lda::default_alpha(k)), eta, config);

    py::list topics;
    for (const auto& words : lda::topic_top_words(model, vocab, top_n)) {
        py::list row;
        for (const auto& w : words) row.append(py::make_tuple(w.term, w.probability));
        topics.append(row);
    }
    py::dict out;
    out["terms"] = vocab.terms();
    out["phi"] = to_rows(model.phi_table());
    out["theta"] = to_rows(model.theta_table());
    out["top_words"] = topics;
    return out;
}

std::vector<std::optional<double>> per_class_accuracy(const std::vector<std::string>& classes,
                                                      const std::vector<std::vector<std::uint64_t>>& cells) {
    eval::ConfusionMatrix m;
    for (const auto& c : classes) m.classes.push_back(parse_category(c));
    m.cells = cells;
    if (cells.size() != classes.size()) throw Error(ErrorCode::InvalidArgument, "cells must be square in the classes");
    for (const auto& row : cells) {
        if (row.size() != classes.size()) throw Error(ErrorCode::InvalidArgument, "cells must be square in the classes");
    }
    return eval::per_class_accuracy(m);
}

py::dict classify_accounts(const std::vector<std::pair<std::string, std::string>>& predictions) {
    std::vector<eval::AccountPrediction> preds;
    for (const auto& [account, category] : predictions) preds.push_back({account, parse_category(category)});
    const auto report = eval::classify_accounts(preds);
    py::dict verdicts;
    for (const auto& v : report.verdicts) {
        verdicts[py::str(v.account)] = std::string(v.verdict ? to_string(*v.verdict) : eval::kTie);
    }
    py::dict histogram;
    for (const auto& [name, n] : report.histogram) histogram[py::str(name)] = n;
    py::dict out;
    out["verdicts"] = verdicts;
    out["histogram"] = histogram;
    return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_trollscope, m) {
    m.doc() = "Topic modelling and account classification for social-media text";

    error_type = new py::exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error_type->ptr())(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type->ptr(), exc.ptr());
        }
    });

    m.def("categories", [] {
        std::vector<std::string> out;
        for (auto c : kAllCategories) out.emplace_back(to_string(c));
        return out;
    }, "Account category names in declaration order.");
    m.def("tokenize", [](const std::string& text) { return tokenize(text); }, py::arg("text"));
    m.def("stem", [](const std::string& token) { return stem(token); }, py::arg("token"));
    m.def("analyze", [](const std::string& text, bool stopwords, bool stemming) {
        return make_analyzer(stopwords, stemming).analyze(text);
    }, py::arg("text"), py::arg("stopwords") = true, py::arg("stemming") = true);

    m.def("fit_lda", &fit_lda, py::arg("texts"), py::arg("k"), py::arg("alpha") = py::none(), py::arg("eta") = 0.01,
          py::arg("iterations") = 1000, py::arg("burn_in") = 500, py::arg("sample_lag") = 10, py::arg("seed") = 0,
          py::arg("stopwords") = true, py::arg("stemming") = true, py::arg("top_n") = 30,
          "Fits LDA by collapsed Gibbs sampling; returns terms, phi, theta and top words.");

    m.def("gini", [](const std::vector<std::uint64_t>& counts) { return forest::gini({counts}); }, py::arg("counts"));
    m.def("entropy", [](const std::vector<std::uint64_t>& counts) { return forest::entropy({counts}); },
          py::arg("counts"));

    m.def("largest_remainder_quotas", &eval::largest_remainder_quotas, py::arg("class_sizes"), py::arg("n"));
    m.def("per_class_accuracy", &per_class_accuracy, py::arg("classes"), py::arg("cells"),
          "Percent of each predicted class (matrix rows) that is correct.");
    m.def("classify_accounts", &classify_accounts, py::arg("predictions"),
          "Majority verdict per account from (account, category) pairs.");

    m.def("run_cli", &run_cli, py::arg("args"), "Runs one command line; returns (exit code, stdout, stderr).");
}
