#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "trollscope/corpus.hpp"
#include "trollscope/sparse.hpp"

namespace trollscope {

/// Lowercases, drops URLs and @-mentions, keeps hashtag text as one token,
/// strips punctuation (apostrophes join their neighbours), drops tokens
/// shorter than two characters. Output tokens match [a-z0-9]{2,}.
std::vector<std::string> tokenize(std::string_view text);

/// English Snowball (Porter2) stemmer.
std::string stem(std::string_view token);

using Stoplist = std::unordered_set<std::string>;

/// The bundled English stoplist.
const Stoplist& default_stoplist();

/// One lowercase term per line; blank lines and '#' comments ignored.
Stoplist read_stoplist(std::istream& in);
Stoplist load_stoplist(const std::string& path);

/// Order-independent fingerprint of a stoplist.
std::uint64_t stoplist_fingerprint(const Stoplist& stoplist);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const Stoplist& stoplist);

/// tokenize -> remove stopwords -> stem -> drop stems that are stopwords.
class Analyzer {
public:
    Analyzer() : Analyzer(default_stoplist()) {}
    explicit Analyzer(Stoplist stoplist, bool stemming = true)
        : stoplist_(std::move(stoplist)), stemming_(stemming) {}

    std::vector<std::string> analyze(std::string_view text) const;

    const Stoplist& stoplist() const noexcept { return stoplist_; }
    bool stemming() const noexcept { return stemming_; }
    std::uint64_t fingerprint() const;

private:
    Stoplist stoplist_;
    bool stemming_ = true;
};

using TokenizedDocs = std::vector<std::vector<std::string>>;

TokenizedDocs analyze_corpus(const Corpus& corpus, const Analyzer& analyzer);

class Vocabulary {
public:
    Vocabulary() = default;

    /// Terms must be unique; they are stored sorted. doc_freq is parallel to terms.
    Vocabulary(std::vector<std::string> terms, std::vector<std::uint64_t> doc_freq, std::uint64_t n_docs,
               std::uint64_t analyzer_fingerprint = 0);

    std::size_t size() const noexcept { return terms_.size(); }
    const std::vector<std::string>& terms() const noexcept { return terms_; }
    const std::vector<std::uint64_t>& doc_freq() const noexcept { return doc_freq_; }
    const std::string& term(std::size_t i) const { return terms_.at(i); }
    std::optional<std::uint32_t> index_of(std::string_view term) const;

    /// Number of documents the frequencies were counted over.
    std::uint64_t n_docs() const noexcept { return n_docs_; }
    std::uint64_t analyzer_fingerprint() const noexcept { return analyzer_fingerprint_; }

    /// Identity of the feature space: terms, frequencies and analyzer settings.
    std::uint64_t fingerprint() const;

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.terms_ == b.terms_ && a.doc_freq_ == b.doc_freq_ && a.n_docs_ == b.n_docs_ &&
               a.analyzer_fingerprint_ == b.analyzer_fingerprint_;
    }

private:
    std::vector<std::string> terms_;
    std::vector<std::uint64_t> doc_freq_;
    std::uint64_t n_docs_ = 0;
    std::uint64_t analyzer_fingerprint_ = 0;
    std::unordered_map<std::string, std::uint32_t> index_;
};

/// Keeps terms with doc_freq >= min_df and doc_freq / M <= max_df_frac.
/// Throws Error{EmptyInput} for an empty corpus, Error{EmptyVocabulary} when
/// every term is filtered, Error{InvalidArgument} for bad thresholds.
Vocabulary build_vocabulary(const TokenizedDocs& docs, std::uint64_t min_df, double max_df_frac,
                            std::uint64_t analyzer_fingerprint = 0);
Vocabulary build_vocabulary(const Corpus& corpus, const Analyzer& analyzer, std::uint64_t min_df,
                            double max_df_frac);

/// Vocabulary file: header line "trollscope-vocab 1 <n_docs> <analyzer fingerprint hex>"
/// followed by "term<TAB>doc_freq" lines.
void write_vocabulary(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocabulary(std::istream& in);

enum class Weighting { Counts, TfIdf };

std::string_view to_string(Weighting w) noexcept;
std::optional<Weighting> try_parse_weighting(std::string_view text) noexcept;

struct DocTermMatrix {
    std::size_t n_terms = 0;
    std::vector<SparseVector> rows;
    /// Token totals per document (in-vocabulary tokens only).
    std::vector<std::uint64_t> doc_lengths;
    Weighting weighting = Weighting::Counts;

    std::size_t n_docs() const noexcept { return rows.size(); }
    std::uint64_t total_tokens() const noexcept;

    /// Rows restricted to the given document positions.
    DocTermMatrix select(const std::vector<std::size_t>& positions) const;
};

/// Raw term frequencies; out-of-vocabulary tokens are dropped.
DocTermMatrix vectorize(const TokenizedDocs& docs, const Vocabulary& vocab);
DocTermMatrix vectorize(const Corpus& corpus, const Analyzer& analyzer, const Vocabulary& vocab);

/// tf * ln(n_docs / doc_freq) using the vocabulary's statistics, then each row
/// scaled to unit L2 norm. All-zero rows stay zero.
DocTermMatrix tfidf(const DocTermMatrix& counts, const Vocabulary& vocab);

/// Binds a model to the vocabulary and weighting its inputs were built with.
struct FeatureSpace {
    std::uint64_t vocab_fingerprint = 0;
    std::size_t n_terms = 0;
    Weighting weighting = Weighting::TfIdf;

    friend bool operator==(const FeatureSpace&, const FeatureSpace&) = default;
};

/// Sparse triplets "doc_id,term,count"; doc_ids are parallel to the matrix rows.
void write_triplets(std::ostream& out, const DocTermMatrix& matrix, const Vocabulary& vocab,
                    const std::vector<std::string>& doc_ids);

/// Most frequent analyzed terms over the corpus (optionally one category),
/// descending by count with lexicographic tie-break.
std::vector<std::pair<std::string, std::uint64_t>> top_terms(const Corpus& corpus, const Analyzer& analyzer,
                                                             std::optional<AccountCategory> filter,
                                                             std::size_t k);

}  // namespace trollscope
