#include "trollscope/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "trollscope/error.hpp"
#include "trollscope/random.hpp"
#include "stopwords_data.hpp"

namespace trollscope {

namespace {

bool starts_with_icase(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

bool is_url(std::string_view chunk) {
    return starts_with_icase(chunk, "http://") || starts_with_icase(chunk, "https://") ||
           starts_with_icase(chunk, "www.");
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2) tokens.push_back(current);
        current.clear();
    };

    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        const std::string_view chunk = text.substr(i, j - i);
        i = j;
        if (chunk.empty() || chunk.front() == '@' || is_url(chunk)) continue;

        for (std::size_t p = 0; p < chunk.size(); ++p) {
            const auto u = static_cast<unsigned char>(chunk[p]);
            if (u < 0x80 && std::isalnum(u)) {
                current.push_back(static_cast<char>(std::tolower(u)));
            } else if (u == '\'') {
                // joins "don't" -> "dont"
            } else if (u == 0xE2 && p + 2 < chunk.size() && static_cast<unsigned char>(chunk[p + 1]) == 0x80 &&
                       static_cast<unsigned char>(chunk[p + 2]) == 0x99) {
                p += 2;  // U+2019 right single quotation mark, same as '\''
            } else if (u == '@' && current.empty()) {
                // a mention glued to leading punctuation, e.g. "(@user)"
                while (p + 1 < chunk.size() &&
                       (std::isalnum(static_cast<unsigned char>(chunk[p + 1])) || chunk[p + 1] == '_')) {
                    ++p;
                }
            } else {
                flush();
            }
        }
        flush();
    }
    return tokens;
}

const Stoplist& default_stoplist() {
    static const Stoplist list = [] {
        std::istringstream in{std::string(detail::kDefaultStopwords)};
        return read_stoplist(in);
    }();
    return list;
}

Stoplist read_stoplist(std::istream& in) {
    Stoplist list;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        std::size_t start = 0;
        while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
        line.erase(0, start);
        if (line.empty() || line.front() == '#') continue;
        std::transform(line.begin(), line.end(), line.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        list.insert(line);
    }
    return list;
}

Stoplist load_stoplist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open stoplist '" + path + "'");
    return read_stoplist(in);
}

std::uint64_t stoplist_fingerprint(const Stoplist& stoplist) {
    std::vector<std::string> sorted(stoplist.begin(), stoplist.end());
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t h = fnv1a("stoplist");
    for (const auto& w : sorted) {
        h = fnv1a(w, h);
        h = fnv1a("\n", h);
    }
    return h;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const Stoplist& stoplist) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (!stoplist.contains(t)) out.push_back(t);
    }
    return out;
}

std::vector<std::string> Analyzer::analyze(std::string_view text) const {
    auto tokens = remove_stopwords(tokenize(text), stoplist_);
    if (!stemming_) return tokens;
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        auto s = stem(t);
        if (s.size() >= 2 && !stoplist_.contains(s)) out.push_back(std::move(s));
    }
    return out;
}

std::uint64_t Analyzer::fingerprint() const {
    return derive_seed(stoplist_fingerprint(stoplist_), stemming_ ? "snowball-english" : "identity");
}

TokenizedDocs analyze_corpus(const Corpus& corpus, const Analyzer& analyzer) {
    TokenizedDocs docs;
    docs.reserve(corpus.size());
    for (const auto& d : corpus.documents()) docs.push_back(analyzer.analyze(d.text));
    return docs;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint64_t> doc_freq,
                       std::uint64_t n_docs, std::uint64_t analyzer_fingerprint)
    : n_docs_(n_docs), analyzer_fingerprint_(analyzer_fingerprint) {
    if (terms.size() != doc_freq.size()) {
        throw Error(ErrorCode::InvalidArgument, "terms and doc_freq differ in length");
    }
    std::vector<std::size_t> order(terms.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return terms[a] < terms[b]; });
    terms_.reserve(terms.size());
    doc_freq_.reserve(terms.size());
    for (auto i : order) {
        if (!terms_.empty() && terms_.back() == terms[i]) {
            throw Error(ErrorCode::InvalidArgument, "duplicate vocabulary term '" + terms[i] + "'");
        }
        terms_.push_back(std::move(terms[i]));
        doc_freq_.push_back(doc_freq[i]);
    }
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
    auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t Vocabulary::fingerprint() const {
    std::uint64_t h = derive_seed(analyzer_fingerprint_, n_docs_);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        h = fnv1a(terms_[i], h);
        h = derive_seed(h, doc_freq_[i]);
    }
    return h;
}

Vocabulary build_vocabulary(const TokenizedDocs& docs, std::uint64_t min_df, double max_df_frac,
                            std::uint64_t analyzer_fingerprint) {
    if (docs.empty()) throw Error(ErrorCode::EmptyInput, "cannot build a vocabulary from an empty corpus");
    if (min_df < 1) throw Error(ErrorCode::InvalidArgument, "min_df must be at least 1");
    if (!(max_df_frac > 0.0 && max_df_frac <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "max_df_frac must lie in (0, 1]");
    }
    std::map<std::string, std::uint64_t> df;
    for (const auto& doc : docs) {
        std::vector<std::string_view> seen(doc.begin(), doc.end());
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (auto t : seen) ++df[std::string(t)];
    }
    const auto m = static_cast<double>(docs.size());
    std::vector<std::string> terms;
    std::vector<std::uint64_t> freq;
    for (auto& [term, count] : df) {
        if (count < min_df) continue;
        if (static_cast<double>(count) / m > max_df_frac) continue;
        terms.push_back(term);
        freq.push_back(count);
    }
    if (terms.empty()) throw Error(ErrorCode::EmptyVocabulary, "every term was filtered out");
    return Vocabulary(std::move(terms), std::move(freq), docs.size(), analyzer_fingerprint);
}

Vocabulary build_vocabulary(const Corpus& corpus, const Analyzer& analyzer, std::uint64_t min_df,
                            double max_df_frac) {
    return build_vocabulary(analyze_corpus(corpus, analyzer), min_df, max_df_frac, analyzer.fingerprint());
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
    char hex[17];
    auto [end, ec] = std::to_chars(hex, hex + 16, vocab.analyzer_fingerprint(), 16);
    out << "trollscope-vocab 1 " << vocab.n_docs() << ' ' << std::string_view(hex, end - hex) << '\n';
    for (std::size_t i = 0; i < vocab.size(); ++i) out << vocab.term(i) << '\t' << vocab.doc_freq()[i] << '\n';
}

Vocabulary read_vocabulary(std::istream& in) {
    std::string magic, line;
    int version = 0;
    std::uint64_t n_docs = 0;
    std::string fp_hex;
    if (!(in >> magic >> version >> n_docs >> fp_hex) || magic != "trollscope-vocab" || version != 1) {
        throw Error(ErrorCode::BadModelFile, "not a version-1 vocabulary file");
    }
    std::uint64_t fp = 0;
    auto [p, ec] = std::from_chars(fp_hex.data(), fp_hex.data() + fp_hex.size(), fp, 16);
    if (ec != std::errc{}) throw Error(ErrorCode::BadModelFile, "bad analyzer fingerprint");
    std::getline(in, line);
    std::vector<std::string> terms;
    std::vector<std::uint64_t> freq;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        std::uint64_t f = 0;
        if (tab == std::string::npos ||
            std::from_chars(line.data() + tab + 1, line.data() + line.size(), f).ec != std::errc{}) {
            throw Error(ErrorCode::BadModelFile, "bad vocabulary line '" + line + "'");
        }
        terms.push_back(line.substr(0, tab));
        freq.push_back(f);
    }
    return Vocabulary(std::move(terms), std::move(freq), n_docs, fp);
}

// ---------------------------------------------------------------------------
// Matrices

std::string_view to_string(Weighting w) noexcept {
    return w == Weighting::Counts ? "counts" : "tfidf";
}

std::optional<Weighting> try_parse_weighting(std::string_view text) noexcept {
    if (text == "counts") return Weighting::Counts;
    if (text == "tfidf") return Weighting::TfIdf;
    return std::nullopt;
}

std::uint64_t DocTermMatrix::total_tokens() const noexcept {
    std::uint64_t n = 0;
    for (auto l : doc_lengths) n += l;
    return n;
}

DocTermMatrix DocTermMatrix::select(const std::vector<std::size_t>& positions) const {
    DocTermMatrix out;
    out.n_terms = n_terms;
    out.weighting = weighting;
    out.rows.reserve(positions.size());
    out.doc_lengths.reserve(positions.size());
    for (auto p : positions) {
        out.rows.push_back(rows.at(p));
        out.doc_lengths.push_back(doc_lengths.at(p));
    }
    return out;
}

DocTermMatrix vectorize(const TokenizedDocs& docs, const Vocabulary& vocab) {
    DocTermMatrix m;
    m.n_terms = vocab.size();
    m.weighting = Weighting::Counts;
    m.rows.reserve(docs.size());
    m.doc_lengths.reserve(docs.size());
    std::vector<std::uint32_t> ids;
    for (const auto& doc : docs) {
        ids.clear();
        for (const auto& t : doc) {
            if (auto id = vocab.index_of(t)) ids.push_back(*id);
        }
        std::sort(ids.begin(), ids.end());
        SparseVector row;
        row.dim = vocab.size();
        for (std::size_t i = 0; i < ids.size();) {
            std::size_t j = i;
            while (j < ids.size() && ids[j] == ids[i]) ++j;
            row.entries.push_back({ids[i], static_cast<double>(j - i)});
            i = j;
        }
        m.rows.push_back(std::move(row));
        m.doc_lengths.push_back(ids.size());
    }
    return m;
}

DocTermMatrix vectorize(const Corpus& corpus, const Analyzer& analyzer, const Vocabulary& vocab) {
    return vectorize(analyze_corpus(corpus, analyzer), vocab);
}

DocTermMatrix tfidf(const DocTermMatrix& counts, const Vocabulary& vocab) {
    if (counts.weighting != Weighting::Counts) {
        throw Error(ErrorCode::InvalidArgument, "tfidf expects a count matrix");
    }
    if (counts.n_terms != vocab.size()) {
        throw Error(ErrorCode::VocabMismatch, "matrix has " + std::to_string(counts.n_terms) +
                                                  " terms, vocabulary has " + std::to_string(vocab.size()));
    }
    const auto m = static_cast<double>(vocab.n_docs());
    std::vector<double> idf(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        const auto df = vocab.doc_freq()[i];
        idf[i] = df == 0 ? 0.0 : std::log(m / static_cast<double>(df));
    }
    DocTermMatrix out;
    out.n_terms = counts.n_terms;
    out.weighting = Weighting::TfIdf;
    out.doc_lengths = counts.doc_lengths;
    out.rows.reserve(counts.rows.size());
    for (const auto& row : counts.rows) {
        SparseVector w;
        w.dim = row.dim;
        for (const auto& e : row.entries) {
            const double v = e.value * idf[e.index];
            if (v != 0.0) w.entries.push_back({e.index, v});
        }
        const double norm = std::sqrt(w.squared_norm());
        if (norm > 0.0) {
            for (auto& e : w.entries) e.value /= norm;
        }
        out.rows.push_back(std::move(w));
    }
    return out;
}

void write_triplets(std::ostream& out, const DocTermMatrix& matrix, const Vocabulary& vocab,
                    const std::vector<std::string>& doc_ids) {
    if (doc_ids.size() != matrix.n_docs()) {
        throw Error(ErrorCode::InvalidArgument, "doc_ids and matrix rows differ in length");
    }
    out << "doc_id,term,count\n";
    char buf[64];
    for (std::size_t d = 0; d < matrix.n_docs(); ++d) {
        for (const auto& e : matrix.rows[d].entries) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, e.value);
            out << doc_ids[d] << ',' << vocab.term(e.index) << ',' << std::string_view(buf, end - buf) << '\n';
        }
    }
}

std::vector<std::pair<std::string, std::uint64_t>> top_terms(const Corpus& corpus, const Analyzer& analyzer,
                                                             std::optional<AccountCategory> filter,
                                                             std::size_t k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& d : corpus.documents()) {
        if (filter && d.label != filter) continue;
        for (auto& t : analyzer.analyze(d.text)) ++counts[std::move(t)];
    }
    std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

}  // namespace trollscope
