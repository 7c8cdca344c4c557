#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <variant>
#include <vector>

#include "trollscope/category.hpp"
#include "trollscope/sparse.hpp"
#include "trollscope/textprep.hpp"

namespace trollscope::svm {

struct Linear {
    friend bool operator==(const Linear&, const Linear&) = default;
};
struct Radial {
    double gamma = 1.0;
    friend bool operator==(const Radial&, const Radial&) = default;
};
struct Polynomial {
    std::uint32_t degree = 3;
    double gamma = 1.0;
    double coef0 = 0.0;
    friend bool operator==(const Polynomial&, const Polynomial&) = default;
};

using Kernel = std::variant<Linear, Radial, Polynomial>;

/// Throws Error{InvalidArgument} for gamma <= 0 or degree < 1.
void validate(const Kernel& kernel);

/// Linear <x,y>; Radial exp(-gamma |x-y|^2); Polynomial (gamma <x,y> + coef0)^degree.
/// Throws Error{DimensionMismatch}.
double kernel_eval(const Kernel& kernel, const SparseVector& x, const SparseVector& y);

/// One binary decision function f(x) = w.x + b (linear) or
/// f(x) = sum_i coef_i K(sv_i, x) + b (kernel). coef_i = alpha_i * y_i.
struct DecisionFunction {
    SparseVector weights;
    std::vector<SparseVector> support_vectors;
    std::vector<double> dual_coeffs;
    double bias = 0.0;

    friend bool operator==(const DecisionFunction&, const DecisionFunction&) = default;
};

struct SvmModel {
    std::vector<AccountCategory> classes;
    Kernel kernel = Linear{};
    std::vector<DecisionFunction> functions;  // parallel to classes
    FeatureSpace feature_space;

    friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

struct TrainConfig {
    double c = 1.0;
    std::uint32_t epochs = 20;
    std::uint64_t seed = 0;
    double tolerance = 1e-3;

    void validate() const;
};

/// One-vs-rest training: one soft-margin binary classifier per class.
///
/// Linear kernel: stochastic subgradient descent on
///   lambda/2 |w|^2 + mean hinge loss,  lambda = 1 / (c n),
/// with the bias carried as a constant feature. The returned weights are the
/// better (by that objective) of the last and the averaged iterate.
///
/// Other kernels: dual coordinate ascent with box [0, c] on the kernel
/// augmented by +1 (the bias), sweeping until the largest projected-gradient
/// KKT violation falls below the tolerance or the epoch limit is reached.
///
/// Classes are the distinct labels in declaration order. Throws
/// Error{EmptyMatrix}, Error{SingleClass}, Error{DimensionMismatch}.
SvmModel train_ovr(const DocTermMatrix& features, const std::vector<AccountCategory>& labels,
                   const Kernel& kernel, const TrainConfig& config);

/// As above with an explicit class list; throws Error{ClassWithNoExamples}
/// when a listed class has no rows and Error{UnknownClass} when a label is not listed.
SvmModel train_ovr(const DocTermMatrix& features, const std::vector<AccountCategory>& labels,
                   const std::vector<AccountCategory>& classes, const Kernel& kernel,
                   const TrainConfig& config);

double decision_value(const SvmModel& model, std::size_t class_index, const SparseVector& x);

struct Prediction {
    AccountCategory category;
    std::vector<double> scores;  // parallel to model.classes
};

/// argmax of the per-class decision values; exact ties go to the earlier class.
Prediction predict(const SvmModel& model, const SparseVector& x);

/// Signed distance (w.x + b) / |w| for a linear model.
/// Throws Error{UnsupportedKernel}, Error{ZeroWeight}, Error{UnknownClass}.
double margin(const SvmModel& model, AccountCategory cls, const SparseVector& x);

/// lambda/2 |w|^2 + mean hinge, for the binary problem cls-vs-rest, with the
/// bias treated as one more weight.
double primal_objective(const DecisionFunction& f, const DocTermMatrix& features, const std::vector<int>& y,
                        double lambda);

/// Versioned text format; floating-point values in hexadecimal so a
/// round trip is bit-exact.
void save(std::ostream& out, const SvmModel& model);
SvmModel load(std::istream& in);

}  // namespace trollscope::svm
