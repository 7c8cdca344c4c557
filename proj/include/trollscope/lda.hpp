#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "trollscope/corpus.hpp"
#include "trollscope/random.hpp"
#include "trollscope/textprep.hpp"

namespace trollscope::lda {

/// Dense row-major matrix of doubles.
struct Table {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Table() = default;
    Table(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct GibbsConfig {
    std::uint32_t iterations = 1000;
    std::uint32_t burn_in = 500;
    std::uint64_t seed = 0;
    std::uint32_t sample_lag = 10;
    /// Accumulate per-token topic frequencies over the kept samples.
    bool track_token_marginals = false;

    /// Throws Error{InvalidArgument} unless iterations > 0, burn_in < iterations, sample_lag > 0.
    void validate() const;
};

/// Conventional symmetric document-topic prior, 50 / K.
double default_alpha(std::size_t k);
inline constexpr double kDefaultEta = 0.01;

/// State of a collapsed Gibbs chain over a fixed count matrix.
///
/// Invariants: n_dk row d sums to the length of document d; n_kv row k sums to
/// n_k[k]; n_k sums to the total token count; every z is in [0, K).
struct LdaModel {
    std::size_t K = 0;
    std::size_t V = 0;
    double alpha = 0.0;
    double eta = 0.0;
    std::vector<std::uint32_t> n_kv;  // K x V
    std::vector<std::uint32_t> n_dk;  // M x K
    std::vector<std::uint64_t> n_k;   // K
    /// Word id of every token, document by document.
    std::vector<std::vector<std::uint32_t>> words;
    /// Topic of every token, parallel to `words`.
    std::vector<std::vector<std::uint32_t>> z;
    std::uint64_t vocab_fingerprint = 0;

    /// Estimates averaged over kept post-burn-in samples (empty if none were kept).
    Table theta_mean;  // M x K
    Table phi_mean;    // K x V
    std::uint32_t n_samples = 0;
    /// Per-token topic frequencies over kept samples (only when tracked).
    std::vector<std::vector<std::vector<double>>> token_marginals;

    std::size_t n_docs() const noexcept { return words.size(); }
    std::uint64_t total_tokens() const noexcept;

    std::uint32_t topic_word(std::size_t k, std::size_t v) const { return n_kv[k * V + v]; }
    std::uint32_t doc_topic(std::size_t d, std::size_t k) const { return n_dk[d * K + k]; }

    /// (n_kv + eta) / (n_k + V eta), from the current counts.
    double phi(std::size_t k, std::size_t v) const;
    /// (n_dk + alpha) / (N_d + K alpha), from the current counts.
    double theta(std::size_t d, std::size_t k) const;
    Table phi_table() const;
    Table theta_table() const;

    /// Recounts the tables from (words, z) and compares. Throws Error{InvalidSpec}
    /// describing the first violated invariant.
    void check_invariants() const;
};

/// A model with no data: every count is zero, so phi is uniform.
LdaModel untrained_model(std::size_t K, std::size_t V, double alpha, double eta);

/// Random initial assignment; no sweeps.
LdaModel initialize(const DocTermMatrix& counts, std::size_t K, double alpha, double eta, std::uint64_t seed);

/// Collapsed Gibbs sampling. Each sweep resamples every token from
/// p(z = k) proportional to (n_dk + alpha)(n_kv + eta)/(n_k + V eta) with the
/// token's own assignment removed. After burn-in, every sample_lag-th sweep
/// contributes to theta_mean / phi_mean.
LdaModel fit_gibbs(const DocTermMatrix& counts, std::size_t K, double alpha, double eta,
                   const GibbsConfig& config);

/// Replaces every token's topic with z[d][n] and rebuilds the count tables.
/// Throws Error{InvalidArgument} on a shape mismatch or a topic >= K.
void assign_topics(LdaModel& model, const std::vector<std::vector<std::uint32_t>>& z);

/// Collapsed log p(w, z | alpha, eta) of the model's current assignment.
double log_joint(const LdaModel& model);

/// Runs `sweeps` further sweeps on an existing chain.
void run_sweeps(LdaModel& model, std::uint32_t sweeps, Rng& rng);

/// Exact per-token topic marginals by enumerating every joint assignment,
/// weighting each by the collapsed joint probability. Result[d][n][k].
/// Throws Error{TooLarge} when K^tokens exceeds 10^7.
std::vector<std::vector<std::vector<double>>> posterior_brute_force(const DocTermMatrix& counts, std::size_t K,
                                                                    double alpha, double eta);

struct RankedTerm {
    std::string term;
    double probability = 0.0;
};

/// Per topic, the n most probable terms under phi, ties broken lexicographically.
std::vector<std::vector<RankedTerm>> topic_top_words(const LdaModel& model, const Vocabulary& vocab,
                                                     std::size_t n = 30);

/// CSV "topic,rank,term,probability" (1-based topic and rank).
void write_topic_report(std::ostream& out, const std::vector<std::vector<RankedTerm>>& topics);
/// Pivoted: one column per topic, one row per rank.
void write_topic_table(std::ostream& out, const std::vector<std::vector<RankedTerm>>& topics);

inline constexpr std::uint32_t kFoldInSweeps = 20;

/// Held-out perplexity exp(-sum log p(w) / tokens) over every held-out token,
/// with p(w | d) = sum_k theta_d[k] phi[k][w]. Each document's tokens are split
/// into alternating halves; theta_d for one half comes from a fold-in Gibbs
/// pass of kFoldInSweeps sweeps on the other half against the model's fixed
/// phi. The model is not modified. Throws Error{VocabMismatch} or Error{EmptyInput}.
double perplexity(const LdaModel& model, const DocTermMatrix& heldout, std::uint64_t seed = 0);

struct SelectKResult {
    std::size_t best_k = 0;
    std::vector<std::pair<std::size_t, double>> perplexities;
    std::vector<std::size_t> train_docs;
    std::vector<std::size_t> heldout_docs;
};

struct SelectKOptions {
    /// Fraction of documents used for training; the rest are held out.
    double train_frac = 0.8;
    /// Fixed alpha, or 50/K per candidate when absent.
    std::optional<double> alpha;
    double eta = kDefaultEta;
};

/// Fits one model per candidate on a seeded document split and returns the
/// candidate with the lowest held-out perplexity (ties to the smallest K).
SelectKResult select_k(const DocTermMatrix& counts, const std::vector<std::size_t>& k_candidates,
                       const SelectKOptions& options, const GibbsConfig& config);

// ---------------------------------------------------------------------------
// Forward simulation of the generative process.

struct SyntheticSpec {
    std::size_t M = 0;
    double xi = 0.0;  // Poisson mean document length
    std::size_t K = 0;
    std::size_t V = 0;
    double alpha = 0.1;
    std::vector<std::vector<double>> topic_word;  // K x V, rows sum to 1
    std::uint64_t seed = 0;

    /// Throws Error{InvalidSpec}.
    void validate() const;
};

struct SyntheticCorpus {
    Corpus corpus;
    /// Term string for every word id (lexicographically ordered, so word id == vocabulary index).
    std::vector<std::string> terms;
    std::vector<std::vector<std::uint32_t>> words;
    std::vector<std::vector<std::uint32_t>> assignments;
    std::vector<std::vector<double>> thetas;

    /// Count matrix over `terms`, identical to vectorizing the corpus with an identity analyzer.
    DocTermMatrix matrix() const;
    Vocabulary vocabulary() const;
};

/// For each document: N ~ Poisson(xi) (redrawn while 0), theta ~ Dir(alpha),
/// then per token z ~ Mult(theta) and w ~ Mult(topic_word[z]).
SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec);

/// K topics over V = K * words_per_topic terms; topic k puts `own_mass` on its
/// own block of words and spreads the rest uniformly.
std::vector<std::vector<double>> block_topics(std::size_t K, std::size_t words_per_topic, double own_mass);

/// Mean total-variation distance between estimated and true topic rows under
/// the best topic permutation (exhaustive over K! permutations, K <= 8).
double matched_topic_distance(const Table& estimated, const std::vector<std::vector<double>>& truth);

}  // namespace trollscope::lda
