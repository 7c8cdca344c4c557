#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace trollscope {

struct SparseEntry {
    std::uint32_t index = 0;
    double value = 0.0;

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// A vector of fixed dimension storing only its non-zero entries, sorted by
/// strictly increasing index.
struct SparseVector {
    std::size_t dim = 0;
    std::vector<SparseEntry> entries;

    /// Value at index i (0 when absent). O(log nnz).
    double at(std::uint32_t i) const noexcept;
    double squared_norm() const noexcept;
    bool well_formed() const noexcept;

    friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Throws Error{DimensionMismatch} when the dimensions differ.
double dot(const SparseVector& x, const SparseVector& y);
double squared_distance(const SparseVector& x, const SparseVector& y);

/// Builds a sparse vector from a dense one, dropping exact zeros.
SparseVector from_dense(const std::vector<double>& dense);

}  // namespace trollscope
