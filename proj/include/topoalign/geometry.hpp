#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace topoalign {

// Dense row-major matrix used for gradients and linear maps.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}

    double* row(std::size_t i) { return v.data() + i * cols; }
    const double* row(std::size_t i) const { return v.data() + i * cols; }
    double& at(std::size_t i, std::size_t j) { return v[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
};

// One modality's batch of N points in R^d, with stable integer ids.
struct PointCloud {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<double> xs;           // row-major n*dim
    std::vector<std::int64_t> ids;    // size n

    PointCloud() = default;
    PointCloud(std::size_t n_, std::size_t dim_);

    double* row(std::size_t i) { return xs.data() + i * dim; }
    const double* row(std::size_t i) const { return xs.data() + i * dim; }
    std::span<const double> point(std::size_t i) const { return {row(i), dim}; }

    // Throws on empty cloud, non-finite coordinates, or duplicate ids.
    void validate() const;
};

enum class MetricKind { Euclidean, CosineDistance };

// Symmetric N x N matrix of filtration-scale distances, zero diagonal.
struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> v; // row-major n*n

    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n_) : n(n_), v(n_ * n_, 0.0) {}

    double at(std::size_t i, std::size_t j) const { return v[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return v[i * n + j]; }

    // Throws InvalidMatrixError on asymmetry, negative or non-finite
    // entries, or a nonzero diagonal.
    void validate() const;

    // Largest entry (0 for n <= 1).
    double max_entry() const;
};

// Index correspondence between two modalities' clouds. Entries of -1 mark
// indices the pairing does not cover (used for partially labeled batches).
struct PairingMap {
    std::vector<int> forward;  // index in modality i -> index in modality j
    std::vector<int> backward; // inverse

    static PairingMap identity(std::size_t n);

    bool covers(std::size_t i) const {
        return i < forward.size() && forward[i] >= 0;
    }
    bool covers_backward(std::size_t j) const {
        return j < backward.size() && backward[j] >= 0;
    }
    // True when every index on both sides is covered.
    bool complete() const;
    std::size_t covered_count() const;
};

inline constexpr double kZeroVectorEps = 1e-12;

// Rescales every row to unit Euclidean norm. Throws ZeroVectorError if any
// row norm is <= kZeroVectorEps.
PointCloud normalize(const PointCloud& cloud);

// Pairwise distances under the chosen metric; computed on the upper
// triangle and mirrored so the result is exactly symmetric.
DistanceMatrix pairwise_distances(const PointCloud& cloud, MetricKind metric);

// u.v / (|u||v|); throws ZeroVectorError when either norm is <= eps.
double cosine_similarity(std::span<const double> u, std::span<const double> v,
                         double eps = kZeroVectorEps);

// Pairing by id equality: position a of ids_i maps to the position of the
// same id in ids_j. Ids present on only one side stay uncovered.
PairingMap build_pairing(const std::vector<std::int64_t>& ids_i,
                         const std::vector<std::int64_t>& ids_j);

} // namespace topoalign
