#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trollscope {

enum class ErrorCode {
    // corpus
    MissingColumn,
    MalformedRow,
    MissingSection,
    UnparseableMetric,
    EmptyInput,
    ConflictingLabels,
    DuplicateDocId,
    UnknownCategory,
    // textprep
    EmptyVocabulary,
    // lda
    InvalidSpec,
    EmptyMatrix,
    InvalidHyperparameter,
    TooLarge,
    VocabMismatch,
    InsufficientDocuments,
    // svm
    DimensionMismatch,
    SingleClass,
    ClassWithNoExamples,
    UnsupportedKernel,
    ZeroWeight,
    // forest
    EmptyNode,
    EmptyData,
    // eval
    SampleTooLarge,
    EmptyClass,
    UnknownClass,
    // shared
    InvalidArgument,
    Io,
    BadModelFile,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure the library reports is an Error carrying a stable code.
/// The CLI maps all of them to exit status 2 (input/usage error).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace trollscope
