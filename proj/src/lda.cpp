#include "trollscope/lda.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "trollscope/csv.hpp"
#include "trollscope/error.hpp"
#include "trollscope/random.hpp"

namespace trollscope::lda {

void GibbsConfig::validate() const {
    if (iterations == 0) throw Error(ErrorCode::InvalidArgument, "iterations must be positive");
    if (burn_in >= iterations) throw Error(ErrorCode::InvalidArgument, "burn_in must be below iterations");
    if (sample_lag == 0) throw Error(ErrorCode::InvalidArgument, "sample_lag must be positive");
}

double default_alpha(std::size_t k) {
    return 50.0 / static_cast<double>(k);
}

std::uint64_t LdaModel::total_tokens() const noexcept {
    return std::accumulate(n_k.begin(), n_k.end(), std::uint64_t{0});
}

double LdaModel::phi(std::size_t k, std::size_t v) const {
    return (topic_word(k, v) + eta) / (static_cast<double>(n_k[k]) + static_cast<double>(V) * eta);
}

double LdaModel::theta(std::size_t d, std::size_t k) const {
    return (doc_topic(d, k) + alpha) / (static_cast<double>(words[d].size()) + static_cast<double>(K) * alpha);
}

Table LdaModel::phi_table() const {
    Table t(K, V);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t v = 0; v < V; ++v) t(k, v) = phi(k, v);
    return t;
}

Table LdaModel::theta_table() const {
    Table t(n_docs(), K);
    for (std::size_t d = 0; d < n_docs(); ++d)
        for (std::size_t k = 0; k < K; ++k) t(d, k) = theta(d, k);
    return t;
}

void LdaModel::check_invariants() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidSpec, "LDA state: " + what); };
    if (n_kv.size() != K * V || n_k.size() != K || n_dk.size() != n_docs() * K || z.size() != words.size()) {
        fail("table shapes disagree");
    }
    std::vector<std::uint32_t> kv(K * V, 0), dk(n_docs() * K, 0);
    std::vector<std::uint64_t> k_tot(K, 0);
    for (std::size_t d = 0; d < n_docs(); ++d) {
        if (z[d].size() != words[d].size()) fail("assignment count differs from document length");
        for (std::size_t n = 0; n < words[d].size(); ++n) {
            const auto k = z[d][n];
            const auto w = words[d][n];
            if (k >= K) fail("assignment out of range");
            if (w >= V) fail("word id out of range");
            ++kv[k * V + w];
            ++dk[d * K + k];
            ++k_tot[k];
        }
    }
    if (kv != n_kv) fail("topic-word counts disagree with assignments");
    if (dk != n_dk) fail("document-topic counts disagree with assignments");
    if (k_tot != n_k) fail("topic totals disagree with assignments");
}

LdaModel untrained_model(std::size_t K, std::size_t V, double alpha, double eta) {
    if (K == 0 || V == 0) throw Error(ErrorCode::InvalidArgument, "K and V must be positive");
    if (!(alpha > 0.0) || !(eta > 0.0)) {
        throw Error(ErrorCode::InvalidHyperparameter, "alpha and eta must be positive");
    }
    LdaModel m;
    m.K = K;
    m.V = V;
    m.alpha = alpha;
    m.eta = eta;
    m.n_kv.assign(K * V, 0);
    m.n_k.assign(K, 0);
    return m;
}

LdaModel initialize(const DocTermMatrix& counts, std::size_t K, double alpha, double eta, std::uint64_t seed) {
    if (counts.n_docs() == 0 || counts.total_tokens() == 0) {
        throw Error(ErrorCode::EmptyMatrix, "LDA needs at least one token");
    }
    if (counts.weighting != Weighting::Counts) {
        throw Error(ErrorCode::InvalidArgument, "LDA needs a count matrix");
    }
    LdaModel m = untrained_model(K, counts.n_terms, alpha, eta);
    m.n_dk.assign(counts.n_docs() * K, 0);
    m.words.resize(counts.n_docs());
    m.z.resize(counts.n_docs());

    Rng rng(derive_seed(seed, "lda-init"));
    for (std::size_t d = 0; d < counts.n_docs(); ++d) {
        auto& words = m.words[d];
        for (const auto& e : counts.rows[d].entries) {
            const double c = e.value;
            if (c < 0.0 || c != std::floor(c)) {
                throw Error(ErrorCode::InvalidArgument, "LDA counts must be non-negative integers");
            }
            words.insert(words.end(), static_cast<std::size_t>(c), e.index);
        }
        m.z[d].resize(words.size());
        for (std::size_t n = 0; n < words.size(); ++n) {
            const auto k = static_cast<std::uint32_t>(uniform_index(rng, K));
            m.z[d][n] = k;
            ++m.n_kv[k * m.V + words[n]];
            ++m.n_dk[d * K + k];
            ++m.n_k[k];
        }
    }
    return m;
}

void assign_topics(LdaModel& m, const std::vector<std::vector<std::uint32_t>>& z) {
    if (z.size() != m.words.size()) throw Error(ErrorCode::InvalidArgument, "assignment has the wrong number of documents");
    for (std::size_t d = 0; d < z.size(); ++d) {
        if (z[d].size() != m.words[d].size()) {
            throw Error(ErrorCode::InvalidArgument, "assignment for document " + std::to_string(d) + " has the wrong length");
        }
        for (auto k : z[d]) {
            if (k >= m.K) throw Error(ErrorCode::InvalidArgument, "topic " + std::to_string(k) + " out of range");
        }
    }
    std::fill(m.n_kv.begin(), m.n_kv.end(), 0);
    std::fill(m.n_dk.begin(), m.n_dk.end(), 0);
    std::fill(m.n_k.begin(), m.n_k.end(), 0);
    m.z = z;
    for (std::size_t d = 0; d < z.size(); ++d) {
        for (std::size_t n = 0; n < z[d].size(); ++n) {
            ++m.n_kv[z[d][n] * m.V + m.words[d][n]];
            ++m.n_dk[d * m.K + z[d][n]];
            ++m.n_k[z[d][n]];
        }
    }
}

double log_joint(const LdaModel& m) {
    const double K = static_cast<double>(m.K);
    const double V = static_cast<double>(m.V);
    double lp = 0.0;
    for (std::size_t d = 0; d < m.n_docs(); ++d) {
        lp += std::lgamma(K * m.alpha) - std::lgamma(static_cast<double>(m.words[d].size()) + K * m.alpha);
        for (std::size_t k = 0; k < m.K; ++k) lp += std::lgamma(m.doc_topic(d, k) + m.alpha) - std::lgamma(m.alpha);
    }
    for (std::size_t k = 0; k < m.K; ++k) {
        lp += std::lgamma(V * m.eta) - std::lgamma(static_cast<double>(m.n_k[k]) + V * m.eta);
        for (std::size_t v = 0; v < m.V; ++v) lp += std::lgamma(m.topic_word(k, v) + m.eta) - std::lgamma(m.eta);
    }
    return lp;
}

void run_sweeps(LdaModel& m, std::uint32_t sweeps, Rng& rng) {
    const std::size_t K = m.K;
    const double v_eta = static_cast<double>(m.V) * m.eta;
    std::vector<double> cumulative(K);
    for (std::uint32_t s = 0; s < sweeps; ++s) {
        for (std::size_t d = 0; d < m.n_docs(); ++d) {
            auto* dk = &m.n_dk[d * K];
            for (std::size_t n = 0; n < m.words[d].size(); ++n) {
                const auto w = m.words[d][n];
                auto k_old = m.z[d][n];
                --m.n_kv[k_old * m.V + w];
                --dk[k_old];
                --m.n_k[k_old];

                double total = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    total += (dk[k] + m.alpha) * (m.n_kv[k * m.V + w] + m.eta) /
                             (static_cast<double>(m.n_k[k]) + v_eta);
                    cumulative[k] = total;
                }
                const double u = uniform01(rng) * total;
                std::size_t k_new = 0;
                while (k_new + 1 < K && cumulative[k_new] <= u) ++k_new;

                m.z[d][n] = static_cast<std::uint32_t>(k_new);
                ++m.n_kv[k_new * m.V + w];
                ++dk[k_new];
                ++m.n_k[k_new];
            }
        }
#ifndef NDEBUG
        m.check_invariants();
#endif
    }
}

LdaModel fit_gibbs(const DocTermMatrix& counts, std::size_t K, double alpha, double eta,
                   const GibbsConfig& config) {
    config.validate();
    if (K == 0) throw Error(ErrorCode::InvalidArgument, "K must be positive");
    if (!(alpha > 0.0) || !(eta > 0.0)) {
        throw Error(ErrorCode::InvalidHyperparameter, "alpha and eta must be positive");
    }
    LdaModel m = initialize(counts, K, alpha, eta, config.seed);
    Rng rng(derive_seed(config.seed, "lda-gibbs"));

    const std::size_t M = m.n_docs();
    m.theta_mean = Table(M, K);
    m.phi_mean = Table(K, m.V);
    if (config.track_token_marginals) {
        m.token_marginals.resize(M);
        for (std::size_t d = 0; d < M; ++d) {
            m.token_marginals[d].assign(m.words[d].size(), std::vector<double>(K, 0.0));
        }
    }

    for (std::uint32_t it = 0; it < config.iterations; ++it) {
        run_sweeps(m, 1, rng);
        if (it < config.burn_in || (it - config.burn_in) % config.sample_lag != 0) continue;
        ++m.n_samples;
        for (std::size_t d = 0; d < M; ++d)
            for (std::size_t k = 0; k < K; ++k) m.theta_mean(d, k) += m.theta(d, k);
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t v = 0; v < m.V; ++v) m.phi_mean(k, v) += m.phi(k, v);
        if (config.track_token_marginals) {
            for (std::size_t d = 0; d < M; ++d)
                for (std::size_t n = 0; n < m.z[d].size(); ++n) m.token_marginals[d][n][m.z[d][n]] += 1.0;
        }
    }
    if (m.n_samples > 0) {
        const double inv = 1.0 / m.n_samples;
        for (auto& x : m.theta_mean.data) x *= inv;
        for (auto& x : m.phi_mean.data) x *= inv;
        for (auto& doc : m.token_marginals)
            for (auto& tok : doc)
                for (auto& x : tok) x *= inv;
    }
    m.check_invariants();
    return m;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<std::vector<double>>> posterior_brute_force(const DocTermMatrix& counts, std::size_t K,
                                                                    double alpha, double eta) {
    if (K == 0) throw Error(ErrorCode::InvalidArgument, "K must be positive");
    if (!(alpha > 0.0) || !(eta > 0.0)) {
        throw Error(ErrorCode::InvalidHyperparameter, "alpha and eta must be positive");
    }
    // Reuse initialize() for the token layout; its assignments are overwritten.
    LdaModel layout = initialize(counts, K, alpha, eta, 0);
    const std::size_t V = layout.V;

    std::vector<std::pair<std::size_t, std::uint32_t>> tokens;  // (doc, word)
    for (std::size_t d = 0; d < layout.n_docs(); ++d)
        for (auto w : layout.words[d]) tokens.emplace_back(d, w);
    const std::size_t T = tokens.size();

    double states = 1.0;
    for (std::size_t i = 0; i < T; ++i) {
        states *= static_cast<double>(K);
        if (states > 1e7) throw Error(ErrorCode::TooLarge, "K^tokens exceeds 10^7 joint assignments");
    }
    const auto n_states = static_cast<std::uint64_t>(states);
    const std::size_t M = layout.n_docs();

    std::vector<std::uint32_t> assign(T, 0);
    std::vector<std::uint32_t> kv(K * V), dk(M * K), k_tot(K);
    auto log_joint = [&] {
        std::fill(kv.begin(), kv.end(), 0);
        std::fill(dk.begin(), dk.end(), 0);
        std::fill(k_tot.begin(), k_tot.end(), 0);
        for (std::size_t t = 0; t < T; ++t) {
            const auto k = assign[t];
            ++kv[k * V + tokens[t].second];
            ++dk[tokens[t].first * K + k];
            ++k_tot[k];
        }
        double lp = 0.0;
        for (std::size_t d = 0; d < M; ++d) {
            for (std::size_t k = 0; k < K; ++k) lp += std::lgamma(dk[d * K + k] + alpha);
        }
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t v = 0; v < V; ++v) lp += std::lgamma(kv[k * V + v] + eta);
            lp -= std::lgamma(k_tot[k] + static_cast<double>(V) * eta);
        }
        // Document-length normalizers are constant across assignments.
        return lp;
    };
    auto advance = [&] {
        for (std::size_t t = 0; t < T; ++t) {
            if (++assign[t] < K) return;
            assign[t] = 0;
        }
    };

    double max_lp = -std::numeric_limits<double>::infinity();
    std::fill(assign.begin(), assign.end(), 0);
    for (std::uint64_t s = 0; s < n_states; ++s, advance()) max_lp = std::max(max_lp, log_joint());

    std::vector<double> marg(T * K, 0.0);
    double total = 0.0;
    std::fill(assign.begin(), assign.end(), 0);
    for (std::uint64_t s = 0; s < n_states; ++s, advance()) {
        const double w = std::exp(log_joint() - max_lp);
        total += w;
        for (std::size_t t = 0; t < T; ++t) marg[t * K + assign[t]] += w;
    }

    std::vector<std::vector<std::vector<double>>> out(M);
    std::size_t t = 0;
    for (std::size_t d = 0; d < M; ++d) {
        out[d].resize(layout.words[d].size());
        for (auto& tok : out[d]) {
            tok.resize(K);
            for (std::size_t k = 0; k < K; ++k) tok[k] = marg[t * K + k] / total;
            ++t;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<RankedTerm>> topic_top_words(const LdaModel& model, const Vocabulary& vocab,
                                                     std::size_t n) {
    if (vocab.size() != model.V) {
        throw Error(ErrorCode::VocabMismatch, "vocabulary size differs from the model's V");
    }
    std::vector<std::vector<RankedTerm>> topics(model.K);
    std::vector<std::uint32_t> order(model.V);
    for (std::size_t k = 0; k < model.K; ++k) {
        std::iota(order.begin(), order.end(), 0u);
        const std::size_t take = std::min(n, model.V);
        // Same n_k denominator for the whole topic, so ranking by count is ranking by phi.
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                          [&](std::uint32_t a, std::uint32_t b) {
                              const auto ca = model.topic_word(k, a), cb = model.topic_word(k, b);
                              return ca != cb ? ca > cb : vocab.term(a) < vocab.term(b);
                          });
        topics[k].reserve(take);
        for (std::size_t r = 0; r < take; ++r) topics[k].push_back({vocab.term(order[r]), model.phi(k, order[r])});
    }
    return topics;
}

void write_topic_report(std::ostream& out, const std::vector<std::vector<RankedTerm>>& topics) {
    out << "topic,rank,term,probability\n";
    char buf[64];
    for (std::size_t k = 0; k < topics.size(); ++k) {
        for (std::size_t r = 0; r < topics[k].size(); ++r) {
            std::snprintf(buf, sizeof buf, "%.9f", topics[k][r].probability);
            out << k + 1 << ',' << r + 1 << ',' << csv::escape(topics[k][r].term) << ',' << buf << '\n';
        }
    }
}

void write_topic_table(std::ostream& out, const std::vector<std::vector<RankedTerm>>& topics) {
    std::size_t rows = 0;
    for (std::size_t k = 0; k < topics.size(); ++k) {
        out << (k ? "," : "") << "Topic " << k + 1;
        rows = std::max(rows, topics[k].size());
    }
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = 0; k < topics.size(); ++k) {
            if (k) out << ',';
            if (r < topics[k].size()) out << csv::escape(topics[k][r].term);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------

double perplexity(const LdaModel& model, const DocTermMatrix& heldout, std::uint64_t seed) {
    if (heldout.n_terms != model.V) {
        throw Error(ErrorCode::VocabMismatch, "held-out matrix has " + std::to_string(heldout.n_terms) +
                                                  " terms, model has " + std::to_string(model.V));
    }
    if (heldout.total_tokens() == 0) throw Error(ErrorCode::EmptyInput, "held-out set has no tokens");

    const std::size_t K = model.K;
    const Table phi = model.n_samples > 0 ? model.phi_mean : model.phi_table();
    Rng rng(derive_seed(seed, "lda-fold-in"));

    double log_lik = 0.0;
    std::uint64_t tokens = 0;
    std::vector<std::uint32_t> words, observed, z, dk(K);
    std::vector<double> cumulative(K);
    for (const auto& row : heldout.rows) {
        words.clear();
        for (const auto& e : row.entries) words.insert(words.end(), static_cast<std::size_t>(e.value), e.index);
        if (words.empty()) continue;
        // Each half of the document is scored under theta folded in on the other half.
        for (std::size_t half = 0; half < 2; ++half) {
            observed.clear();
            for (std::size_t n = 1 - half; n < words.size(); n += 2) observed.push_back(words[n]);
            std::fill(dk.begin(), dk.end(), 0);
            z.resize(observed.size());
            for (std::size_t n = 0; n < observed.size(); ++n) {
                z[n] = static_cast<std::uint32_t>(uniform_index(rng, K));
                ++dk[z[n]];
            }
            for (std::uint32_t s = 0; s < kFoldInSweeps && !observed.empty(); ++s) {
                for (std::size_t n = 0; n < observed.size(); ++n) {
                    --dk[z[n]];
                    double total = 0.0;
                    for (std::size_t k = 0; k < K; ++k) {
                        total += (dk[k] + model.alpha) * phi(k, observed[n]);
                        cumulative[k] = total;
                    }
                    const double u = uniform01(rng) * total;
                    std::size_t k_new = 0;
                    while (k_new + 1 < K && cumulative[k_new] <= u) ++k_new;
                    z[n] = static_cast<std::uint32_t>(k_new);
                    ++dk[k_new];
                }
            }
            const double denom = static_cast<double>(observed.size()) + static_cast<double>(K) * model.alpha;
            for (std::size_t n = half; n < words.size(); n += 2) {
                double p = 0.0;
                for (std::size_t k = 0; k < K; ++k) p += (dk[k] + model.alpha) / denom * phi(k, words[n]);
                log_lik += std::log(p);
                ++tokens;
            }
        }
    }
    return std::exp(-log_lik / static_cast<double>(tokens));
}

SelectKResult select_k(const DocTermMatrix& counts, const std::vector<std::size_t>& k_candidates,
                       const SelectKOptions& options, const GibbsConfig& config) {
    config.validate();
    if (k_candidates.empty()) throw Error(ErrorCode::InvalidArgument, "no candidate K values");
    if (!(options.train_frac > 0.0 && options.train_frac < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
    }
    const std::size_t M = counts.n_docs();
    const auto n_train = static_cast<std::size_t>(std::llround(options.train_frac * static_cast<double>(M)));
    if (n_train < 2 || M - n_train < 2) {
        throw Error(ErrorCode::InsufficientDocuments,
                    "need at least 2 documents in each split, have " + std::to_string(M));
    }

    SelectKResult result;
    std::vector<std::size_t> order(M);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(config.seed, "select-k-split"));
    shuffle(order.begin(), order.end(), rng);
    result.train_docs.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    result.heldout_docs.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(result.train_docs.begin(), result.train_docs.end());
    std::sort(result.heldout_docs.begin(), result.heldout_docs.end());
    const auto train = counts.select(result.train_docs);
    const auto heldout = counts.select(result.heldout_docs);

    std::vector<std::size_t> ks = k_candidates;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    double best = std::numeric_limits<double>::infinity();
    for (auto k : ks) {
        if (k == 0) throw Error(ErrorCode::InvalidArgument, "candidate K must be positive");
        const double alpha = options.alpha.value_or(default_alpha(k));
        const auto model = fit_gibbs(train, k, alpha, options.eta, config);
        const double p = perplexity(model, heldout, derive_seed(config.seed, "select-k-perplexity"));
        result.perplexities.emplace_back(k, p);
        if (p < best) {
            best = p;
            result.best_k = k;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------

void SyntheticSpec::validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); };
    if (!(xi > 0.0)) bad("xi must be positive");
    if (!(alpha > 0.0)) bad("alpha must be positive");
    if (K == 0 || V == 0) bad("K and V must be positive");
    if (topic_word.size() != K) bad("topic_word must have K rows");
    for (const auto& row : topic_word) {
        if (row.size() != V) bad("topic_word rows must have V entries");
        double s = 0.0;
        for (double p : row) {
            if (!(p >= 0.0)) bad("topic_word entries must be non-negative");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-9) bad("topic_word row does not sum to 1");
    }
}

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec) {
    spec.validate();
    SyntheticCorpus out;
    const int width = static_cast<int>(std::to_string(spec.V - 1).size());
    out.terms.reserve(spec.V);
    for (std::size_t v = 0; v < spec.V; ++v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "w%0*zu", width, v);
        out.terms.emplace_back(buf);
    }

    std::vector<std::discrete_distribution<std::uint32_t>> word_dists;
    for (const auto& row : spec.topic_word) word_dists.emplace_back(row.begin(), row.end());

    Rng rng(derive_seed(spec.seed, "synthetic-corpus"));
    std::poisson_distribution<std::uint64_t> length(spec.xi);
    std::gamma_distribution<double> gamma(spec.alpha, 1.0);
    for (std::size_t d = 0; d < spec.M; ++d) {
        std::uint64_t n = 0;
        while (n == 0) n = length(rng);

        std::vector<double> theta(spec.K);
        double s = 0.0;
        for (auto& t : theta) s += (t = gamma(rng));
        if (s > 0.0) {
            for (auto& t : theta) t /= s;
        } else {
            theta[uniform_index(rng, spec.K)] = 1.0;
        }
        std::discrete_distribution<std::uint32_t> topic(theta.begin(), theta.end());

        std::vector<std::uint32_t> z(n), w(n);
        std::string text;
        for (std::uint64_t i = 0; i < n; ++i) {
            z[i] = topic(rng);
            w[i] = word_dists[z[i]](rng);
            if (i) text.push_back(' ');
            text += out.terms[w[i]];
        }
        out.corpus.add({"s" + std::to_string(d), "s" + std::to_string(d), std::move(text), std::nullopt,
                        Source::Synthetic, std::nullopt});
        out.words.push_back(std::move(w));
        out.assignments.push_back(std::move(z));
        out.thetas.push_back(std::move(theta));
    }
    return out;
}

DocTermMatrix SyntheticCorpus::matrix() const {
    DocTermMatrix m;
    m.n_terms = terms.size();
    for (const auto& doc : words) {
        std::vector<std::uint32_t> sorted = doc;
        std::sort(sorted.begin(), sorted.end());
        SparseVector row;
        row.dim = terms.size();
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            row.entries.push_back({sorted[i], static_cast<double>(j - i)});
            i = j;
        }
        m.rows.push_back(std::move(row));
        m.doc_lengths.push_back(doc.size());
    }
    return m;
}

Vocabulary SyntheticCorpus::vocabulary() const {
    std::vector<std::uint64_t> df(terms.size(), 0);
    for (const auto& doc : words) {
        std::vector<std::uint32_t> u = doc;
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        for (auto w : u) ++df[w];
    }
    return Vocabulary(terms, std::move(df), words.size());
}

std::vector<std::vector<double>> block_topics(std::size_t K, std::size_t words_per_topic, double own_mass) {
    const std::size_t V = K * words_per_topic;
    std::vector<std::vector<double>> rows(K, std::vector<double>(V, 0.0));
    for (std::size_t k = 0; k < K; ++k) {
        const double own = K == 1 ? 1.0 : own_mass;
        for (std::size_t v = 0; v < V; ++v) {
            const bool mine = v / words_per_topic == k;
            rows[k][v] = mine ? own / static_cast<double>(words_per_topic)
                              : (1.0 - own) / static_cast<double>(V - words_per_topic);
        }
    }
    return rows;
}

double matched_topic_distance(const Table& estimated, const std::vector<std::vector<double>>& truth) {
    const std::size_t K = truth.size();
    if (estimated.rows != K || K == 0 || K > 8) {
        throw Error(ErrorCode::InvalidArgument, "topic matching needs equal K in [1, 8]");
    }
    std::vector<std::vector<double>> tv(K, std::vector<double>(K, 0.0));
    for (std::size_t a = 0; a < K; ++a) {
        for (std::size_t b = 0; b < K; ++b) {
            if (truth[b].size() != estimated.cols) throw Error(ErrorCode::DimensionMismatch, "topic width");
            double s = 0.0;
            for (std::size_t v = 0; v < estimated.cols; ++v) s += std::abs(estimated(a, v) - truth[b][v]);
            tv[a][b] = 0.5 * s;
        }
    }
    std::vector<std::size_t> perm(K);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (std::size_t a = 0; a < K; ++a) s += tv[a][perm[a]];
        best = std::min(best, s / static_cast<double>(K));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace trollscope::lda
