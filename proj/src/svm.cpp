#include "trollscope/svm.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <optional>

#include "serial.hpp"
#include "trollscope/error.hpp"
#include "trollscope/random.hpp"

namespace trollscope::svm {

void validate(const Kernel& kernel) {
    if (const auto* r = std::get_if<Radial>(&kernel); r && !(r->gamma > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "radial gamma must be positive");
    }
    if (const auto* p = std::get_if<Polynomial>(&kernel)) {
        if (!(p->gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "polynomial gamma must be positive");
        if (p->degree < 1) throw Error(ErrorCode::InvalidArgument, "polynomial degree must be at least 1");
    }
}

double kernel_eval(const Kernel& kernel, const SparseVector& x, const SparseVector& y) {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Linear>) {
                return dot(x, y);
            } else if constexpr (std::is_same_v<K, Radial>) {
                return std::exp(-k.gamma * squared_distance(x, y));
            } else {
                return std::pow(k.gamma * dot(x, y) + k.coef0, static_cast<double>(k.degree));
            }
        },
        kernel);
}

void TrainConfig::validate() const {
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "c must be positive");
    if (epochs == 0) throw Error(ErrorCode::InvalidArgument, "epochs must be positive");
    if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
}

namespace {

double linear_value(const DecisionFunction& f, const SparseVector& x) {
    return dot(f.weights, x) + f.bias;
}

// Dense weight vector w = scale * v over V features plus a trailing bias slot.
struct ScaledWeights {
    std::vector<double> v;
    double scale = 1.0;
    double sq_norm = 0.0;  // |w|^2

    explicit ScaledWeights(std::size_t dim) : v(dim + 1, 0.0) {}

    double dot_aug(const SparseVector& x) const {
        double s = v.back();
        for (const auto& e : x.entries) s += v[e.index] * e.value;
        return scale * s;
    }

    void rescale(double factor) {
        if (factor == 0.0) {
            std::fill(v.begin(), v.end(), 0.0);
            scale = 1.0;
            sq_norm = 0.0;
            return;
        }
        scale *= factor;
        sq_norm *= factor * factor;
        if (std::abs(scale) < 1e-9) {
            for (auto& x : v) x *= scale;
            scale = 1.0;
        }
    }

    // w += a * [x, 1]
    void add(const SparseVector& x, double a) {
        const double w_dot = dot_aug(x);
        const double x_sq = x.squared_norm() + 1.0;
        sq_norm += 2.0 * a * w_dot + a * a * x_sq;
        const double step = a / scale;
        for (const auto& e : x.entries) v[e.index] += step * e.value;
        v.back() += step;
    }

    DecisionFunction to_function(std::size_t dim) const {
        DecisionFunction f;
        f.weights.dim = dim;
        for (std::size_t i = 0; i < dim; ++i) {
            const double w = scale * v[i];
            if (w != 0.0) f.weights.entries.push_back({static_cast<std::uint32_t>(i), w});
        }
        f.bias = scale * v.back();
        return f;
    }
};

DecisionFunction train_linear_binary(const DocTermMatrix& X, const std::vector<int>& y, const TrainConfig& config,
                                     std::uint64_t seed) {
    const std::size_t n = X.n_docs();
    const std::size_t dim = X.n_terms;
    const double lambda = 1.0 / (config.c * static_cast<double>(n));
    const double radius = 1.0 / std::sqrt(lambda);

    ScaledWeights w(dim);
    std::vector<double> avg(dim + 1, 0.0);
    std::uint32_t n_avg = 0;
    const std::uint32_t avg_from = config.epochs / 2;

    Rng rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::uint64_t t = 0;
    for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(order.begin(), order.end(), rng);
        for (auto i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double m = y[i] * w.dot_aug(X.rows[i]);
            w.rescale(1.0 - eta * lambda);
            if (m < 1.0) w.add(X.rows[i], eta * y[i]);
            if (w.sq_norm > radius * radius) w.rescale(radius / std::sqrt(w.sq_norm));
        }
        if (epoch >= avg_from) {
            for (std::size_t j = 0; j <= dim; ++j) avg[j] += w.scale * w.v[j];
            ++n_avg;
        }
    }

    DecisionFunction last = w.to_function(dim);
    DecisionFunction mean;
    mean.weights.dim = dim;
    for (std::size_t j = 0; j < dim; ++j) {
        const double a = avg[j] / n_avg;
        if (a != 0.0) mean.weights.entries.push_back({static_cast<std::uint32_t>(j), a});
    }
    mean.bias = avg[dim] / n_avg;

    DecisionFunction zero;
    zero.weights.dim = dim;
    const double obj_last = primal_objective(last, X, y, lambda);
    const double obj_mean = primal_objective(mean, X, y, lambda);
    const double obj_zero = primal_objective(zero, X, y, lambda);
    if (obj_zero <= std::min(obj_last, obj_mean)) return zero;
    return obj_mean <= obj_last ? mean : last;
}

// Gram matrix of the augmented kernel K(x_i, x_j) + 1, computed once and shared
// by every one-vs-rest problem when it fits in memory.
class GramCache {
public:
    static constexpr std::size_t kMaxCachedRows = 4000;

    GramCache(const DocTermMatrix& X, const Kernel& kernel) : X_(X), kernel_(kernel) {
        const std::size_t n = X.n_docs();
        diag_.resize(n);
        for (std::size_t i = 0; i < n; ++i) diag_[i] = kernel_eval(kernel, X.rows[i], X.rows[i]) + 1.0;
        if (n <= kMaxCachedRows) {
            full_.resize(n * n);
            for (std::size_t i = 0; i < n; ++i) {
                full_[i * n + i] = diag_[i];
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double k = kernel_eval(kernel, X.rows[i], X.rows[j]) + 1.0;
                    full_[i * n + j] = k;
                    full_[j * n + i] = k;
                }
            }
        }
    }

    double diag(std::size_t i) const { return diag_[i]; }

    // Row i into `out` (length n).
    void row(std::size_t i, std::vector<double>& out) const {
        const std::size_t n = X_.n_docs();
        out.resize(n);
        if (!full_.empty()) {
            std::copy_n(full_.begin() + static_cast<std::ptrdiff_t>(i * n), n, out.begin());
            return;
        }
        for (std::size_t j = 0; j < n; ++j) out[j] = kernel_eval(kernel_, X_.rows[i], X_.rows[j]) + 1.0;
    }

private:
    const DocTermMatrix& X_;
    Kernel kernel_;
    std::vector<double> diag_;
    std::vector<double> full_;
};

DecisionFunction train_kernel_binary(const DocTermMatrix& X, const std::vector<int>& y, const GramCache& gram,
                                     const TrainConfig& config, std::uint64_t seed) {
    const std::size_t n = X.n_docs();
    const double C = config.c;
    std::vector<double> alpha(n, 0.0), f(n, 0.0), row;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);

    auto projected_gradient = [&](std::size_t i) {
        const double g = y[i] * f[i] - 1.0;
        if (alpha[i] <= 0.0) return std::min(g, 0.0);
        if (alpha[i] >= C) return std::max(g, 0.0);
        return g;
    };

    for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(order.begin(), order.end(), rng);
        for (auto i : order) {
            const double g = y[i] * f[i] - 1.0;
            const double updated = std::clamp(alpha[i] - g / gram.diag(i), 0.0, C);
            const double delta = updated - alpha[i];
            if (delta == 0.0) continue;
            alpha[i] = updated;
            gram.row(i, row);
            const double step = delta * y[i];
            for (std::size_t j = 0; j < n; ++j) f[j] += step * row[j];
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(projected_gradient(i)));
        if (worst < config.tolerance) break;
    }

    DecisionFunction fn;
    fn.weights.dim = X.n_terms;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] <= 0.0) continue;
        fn.support_vectors.push_back(X.rows[i]);
        fn.dual_coeffs.push_back(alpha[i] * y[i]);
        fn.bias += alpha[i] * y[i];
    }
    return fn;
}

}  // namespace

double primal_objective(const DecisionFunction& f, const DocTermMatrix& features, const std::vector<int>& y,
                        double lambda) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < features.n_docs(); ++i) {
        hinge += std::max(0.0, 1.0 - y[i] * linear_value(f, features.rows[i]));
    }
    const double n = static_cast<double>(std::max<std::size_t>(features.n_docs(), 1));
    return 0.5 * lambda * (f.weights.squared_norm() + f.bias * f.bias) + hinge / n;
}

SvmModel train_ovr(const DocTermMatrix& features, const std::vector<AccountCategory>& labels,
                   const Kernel& kernel, const TrainConfig& config) {
    std::vector<AccountCategory> classes;
    for (auto c : kAllCategories) {
        if (std::find(labels.begin(), labels.end(), c) != labels.end()) classes.push_back(c);
    }
    return train_ovr(features, labels, classes, kernel, config);
}

SvmModel train_ovr(const DocTermMatrix& features, const std::vector<AccountCategory>& labels,
                   const std::vector<AccountCategory>& classes, const Kernel& kernel,
                   const TrainConfig& config) {
    config.validate();
    validate(kernel);
    if (features.n_docs() == 0) throw Error(ErrorCode::EmptyMatrix, "no training rows");
    if (labels.size() != features.n_docs()) {
        throw Error(ErrorCode::DimensionMismatch, "labels and rows differ in length");
    }
    if (classes.size() < 2) throw Error(ErrorCode::SingleClass, "one-vs-rest needs at least two classes");
    for (auto l : labels) {
        if (std::find(classes.begin(), classes.end(), l) == classes.end()) {
            throw Error(ErrorCode::UnknownClass, std::string(to_string(l)) + " is not a training class");
        }
    }
    for (auto c : classes) {
        if (std::find(labels.begin(), labels.end(), c) == labels.end()) {
            throw Error(ErrorCode::ClassWithNoExamples, std::string(to_string(c)) + " has no training rows");
        }
    }
    for (const auto& row : features.rows) {
        if (row.dim != features.n_terms) throw Error(ErrorCode::DimensionMismatch, "row dimension");
    }

    SvmModel model;
    model.classes = classes;
    model.kernel = kernel;
    model.feature_space.n_terms = features.n_terms;
    model.feature_space.weighting = features.weighting;
    model.functions.resize(classes.size());

    const bool linear = std::holds_alternative<Linear>(kernel);
    std::optional<GramCache> gram;
    if (!linear) gram.emplace(features, kernel);

    auto train_one = [&](std::size_t c) {
        std::vector<int> y(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == classes[c] ? 1 : -1;
        const auto seed = derive_seed(config.seed, static_cast<std::uint64_t>(classes[c]));
        return linear ? train_linear_binary(features, y, config, seed)
                      : train_kernel_binary(features, y, *gram, config, seed);
    };

    std::vector<std::future<DecisionFunction>> jobs;
    for (std::size_t c = 0; c < classes.size(); ++c) jobs.push_back(std::async(std::launch::async, train_one, c));
    for (std::size_t c = 0; c < classes.size(); ++c) model.functions[c] = jobs[c].get();
    return model;
}

double decision_value(const SvmModel& model, std::size_t class_index, const SparseVector& x) {
    if (x.dim != model.feature_space.n_terms) {
        throw Error(ErrorCode::DimensionMismatch, "input has dimension " + std::to_string(x.dim) +
                                                      ", model expects " +
                                                      std::to_string(model.feature_space.n_terms));
    }
    const auto& f = model.functions.at(class_index);
    if (std::holds_alternative<Linear>(model.kernel)) return linear_value(f, x);
    double s = f.bias;
    for (std::size_t i = 0; i < f.support_vectors.size(); ++i) {
        s += f.dual_coeffs[i] * kernel_eval(model.kernel, f.support_vectors[i], x);
    }
    return s;
}

Prediction predict(const SvmModel& model, const SparseVector& x) {
    Prediction p;
    p.scores.resize(model.classes.size());
    std::size_t best = 0;
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        p.scores[c] = decision_value(model, c, x);
        if (p.scores[c] > p.scores[best]) best = c;
    }
    p.category = model.classes.at(best);
    return p;
}

double margin(const SvmModel& model, AccountCategory cls, const SparseVector& x) {
    if (!std::holds_alternative<Linear>(model.kernel)) {
        throw Error(ErrorCode::UnsupportedKernel, "margin is defined for linear models only");
    }
    auto it = std::find(model.classes.begin(), model.classes.end(), cls);
    if (it == model.classes.end()) throw Error(ErrorCode::UnknownClass, std::string(to_string(cls)));
    const auto idx = static_cast<std::size_t>(it - model.classes.begin());
    const double norm = std::sqrt(model.functions[idx].weights.squared_norm());
    if (norm == 0.0) throw Error(ErrorCode::ZeroWeight, "decision function has zero weight vector");
    return decision_value(model, idx, x) / norm;
}

// ---------------------------------------------------------------------------

namespace {

void write_sparse(std::ostream& out, const SparseVector& v) {
    out << v.entries.size();
    for (const auto& e : v.entries) out << ' ' << e.index << ':' << serial::hex(e.value);
    out << '\n';
}

SparseVector read_sparse(serial::TokenReader& r, std::size_t dim) {
    SparseVector v;
    v.dim = dim;
    const auto nnz = r.uint();
    v.entries.reserve(nnz);
    for (std::uint64_t i = 0; i < nnz; ++i) {
        const auto tok = r.word();
        const auto colon = tok.find(':');
        if (colon == std::string::npos) serial::TokenReader::fail("bad sparse entry '" + tok + "'");
        std::uint32_t idx = 0;
        double val = 0.0;
        if (std::from_chars(tok.data(), tok.data() + colon, idx).ec != std::errc{} ||
            std::from_chars(tok.data() + colon + 1, tok.data() + tok.size(), val, std::chars_format::hex).ec !=
                std::errc{}) {
            serial::TokenReader::fail("bad sparse entry '" + tok + "'");
        }
        v.entries.push_back({idx, val});
    }
    if (!v.well_formed()) serial::TokenReader::fail("sparse entries out of order or range");
    return v;
}

}  // namespace

void save(std::ostream& out, const SvmModel& model) {
    out << "trollscope-svm 1\n";
    out << "classes " << model.classes.size();
    for (auto c : model.classes) out << ' ' << to_string(c);
    out << '\n';
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Linear>) {
                out << "kernel linear\n";
            } else if constexpr (std::is_same_v<K, Radial>) {
                out << "kernel radial " << serial::hex(k.gamma) << '\n';
            } else {
                out << "kernel polynomial " << k.degree << ' ' << serial::hex(k.gamma) << ' '
                    << serial::hex(k.coef0) << '\n';
            }
        },
        model.kernel);
    out << "feature_space " << serial::hex(model.feature_space.vocab_fingerprint) << ' '
        << model.feature_space.n_terms << ' ' << to_string(model.feature_space.weighting) << '\n';
    for (std::size_t c = 0; c < model.functions.size(); ++c) {
        const auto& f = model.functions[c];
        out << "function " << to_string(model.classes[c]) << '\n';
        out << "bias " << serial::hex(f.bias) << '\n';
        out << "weights ";
        write_sparse(out, f.weights);
        out << "support_vectors " << f.support_vectors.size() << '\n';
        for (std::size_t i = 0; i < f.support_vectors.size(); ++i) {
            out << serial::hex(f.dual_coeffs[i]) << ' ';
            write_sparse(out, f.support_vectors[i]);
        }
    }
    out << "end\n";
}

SvmModel load(std::istream& in) {
    serial::TokenReader r(in);
    r.expect("trollscope-svm");
    if (r.uint() != 1) serial::TokenReader::fail("unsupported svm model version");
    SvmModel m;
    r.expect("classes");
    const auto n_classes = r.uint();
    for (std::uint64_t i = 0; i < n_classes; ++i) {
        auto c = try_parse_category(r.word());
        if (!c) serial::TokenReader::fail("unknown class in model file");
        m.classes.push_back(*c);
    }
    r.expect("kernel");
    const auto kind = r.word();
    if (kind == "linear") {
        m.kernel = Linear{};
    } else if (kind == "radial") {
        m.kernel = Radial{r.real()};
    } else if (kind == "polynomial") {
        Polynomial p;
        p.degree = static_cast<std::uint32_t>(r.uint());
        p.gamma = r.real();
        p.coef0 = r.real();
        m.kernel = p;
    } else {
        serial::TokenReader::fail("unknown kernel '" + kind + "'");
    }
    r.expect("feature_space");
    m.feature_space.vocab_fingerprint = r.uint(16);
    m.feature_space.n_terms = r.uint();
    auto weighting = try_parse_weighting(r.word());
    if (!weighting) serial::TokenReader::fail("unknown weighting");
    m.feature_space.weighting = *weighting;
    const std::size_t dim = m.feature_space.n_terms;
    for (std::uint64_t c = 0; c < n_classes; ++c) {
        r.expect("function");
        if (r.word() != to_string(m.classes[c])) serial::TokenReader::fail("function order differs from classes");
        DecisionFunction f;
        r.expect("bias");
        f.bias = r.real();
        r.expect("weights");
        f.weights = read_sparse(r, dim);
        r.expect("support_vectors");
        const auto n_sv = r.uint();
        for (std::uint64_t i = 0; i < n_sv; ++i) {
            f.dual_coeffs.push_back(r.real());
            f.support_vectors.push_back(read_sparse(r, dim));
        }
        m.functions.push_back(std::move(f));
    }
    r.expect("end");
    return m;
}

}  // namespace trollscope::svm
