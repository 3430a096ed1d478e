#include "topoalign/geometry.hpp"

#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "topoalign/errors.hpp"
#include "topoalign/kernels.hpp"

namespace topoalign {

PointCloud::PointCloud(std::size_t n_, std::size_t dim_)
    : n(n_), dim(dim_), xs(n_ * dim_, 0.0), ids(n_) {
    for (std::size_t i = 0; i < n_; ++i) ids[i] = static_cast<std::int64_t>(i);
}

void PointCloud::validate() const {
    if (n == 0 || dim == 0) throw Error("point cloud must have N >= 1 and d >= 1");
    if (xs.size() != n * dim) throw Error("point cloud storage size mismatch");
    if (ids.size() != n) throw Error("point cloud id count mismatch");
    for (double x : xs)
        if (!std::isfinite(x)) throw Error("point cloud has non-finite coordinate");
    std::unordered_set<std::int64_t> seen;
    for (std::int64_t id : ids)
        if (!seen.insert(id).second)
            throw DuplicateIdError("duplicate point id " + std::to_string(id));
}

void DistanceMatrix::validate() const {
    if (v.size() != n * n) throw InvalidMatrixError("distance matrix storage size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (at(i, i) != 0.0)
            throw InvalidMatrixError("distance matrix has nonzero diagonal");
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = at(i, j);
            if (!std::isfinite(d) || d < 0.0)
                throw InvalidMatrixError("distance matrix has negative or non-finite entry");
            if (d != at(j, i))
                throw InvalidMatrixError("distance matrix is not symmetric");
        }
    }
}

double DistanceMatrix::max_entry() const {
    double m = 0.0;
    for (double d : v)
        if (d > m) m = d;
    return m;
}

PairingMap PairingMap::identity(std::size_t n) {
    PairingMap p;
    p.forward.resize(n);
    p.backward.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.forward[i] = static_cast<int>(i);
        p.backward[i] = static_cast<int>(i);
    }
    return p;
}

bool PairingMap::complete() const {
    for (int f : forward)
        if (f < 0) return false;
    for (int b : backward)
        if (b < 0) return false;
    return !forward.empty();
}

std::size_t PairingMap::covered_count() const {
    std::size_t k = 0;
    for (int f : forward)
        if (f >= 0) ++k;
    return k;
}

PointCloud normalize(const PointCloud& cloud) {
    cloud.validate();
    PointCloud out = cloud;
    for (std::size_t i = 0; i < cloud.n; ++i) {
        const double nrm = std::sqrt(kernels::sqnorm(cloud.row(i), cloud.dim));
        if (nrm <= kZeroVectorEps)
            throw ZeroVectorError("cannot normalize row " + std::to_string(i) +
                                  " with norm " + std::to_string(nrm));
        const double inv = 1.0 / nrm;
        double* r = out.row(i);
        for (std::size_t k = 0; k < cloud.dim; ++k) r[k] *= inv;
    }
    return out;
}

DistanceMatrix pairwise_distances(const PointCloud& cloud, MetricKind metric) {
    cloud.validate();
    const std::size_t n = cloud.n;
    DistanceMatrix out(n);

    std::vector<double> norms;
    if (metric == MetricKind::CosineDistance) {
        norms.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            norms[i] = std::sqrt(kernels::sqnorm(cloud.row(i), cloud.dim));
            if (norms[i] <= kZeroVectorEps)
                throw ZeroVectorError("cosine distance undefined for zero row " +
                                      std::to_string(i));
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d;
            if (metric == MetricKind::Euclidean) {
                d = std::sqrt(kernels::sqdist(cloud.row(i), cloud.row(j), cloud.dim));
            } else {
                const double c =
                    kernels::dot(cloud.row(i), cloud.row(j), cloud.dim) / (norms[i] * norms[j]);
                d = 1.0 - c;
                if (d < 0.0) d = 0.0; // rounding can push cos slightly past 1
            }
            out.at(i, j) = d;
            out.at(j, i) = d;
        }
    }
    return out;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v, double eps) {
    if (u.size() != v.size())
        throw LengthMismatchError("cosine similarity needs equal-length vectors");
    const double nu = std::sqrt(kernels::sqnorm(u.data(), u.size()));
    const double nv = std::sqrt(kernels::sqnorm(v.data(), v.size()));
    if (nu <= eps || nv <= eps)
        throw ZeroVectorError("cosine similarity undefined for near-zero vector");
    double c = kernels::dot(u.data(), v.data(), u.size()) / (nu * nv);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return c;
}

PairingMap build_pairing(const std::vector<std::int64_t>& ids_i,
                         const std::vector<std::int64_t>& ids_j) {
    if (ids_i.size() != ids_j.size())
        throw LengthMismatchError("pairing id lists differ in length");

    std::unordered_map<std::int64_t, int> pos_j;
    pos_j.reserve(ids_j.size());
    for (std::size_t k = 0; k < ids_j.size(); ++k) {
        if (!pos_j.emplace(ids_j[k], static_cast<int>(k)).second)
            throw DuplicateIdError("duplicate id " + std::to_string(ids_j[k]) +
                                   " on the target side");
    }
    std::unordered_set<std::int64_t> seen_i;
    PairingMap p;
    p.forward.assign(ids_i.size(), -1);
    p.backward.assign(ids_j.size(), -1);
    for (std::size_t k = 0; k < ids_i.size(); ++k) {
        if (!seen_i.insert(ids_i[k]).second)
            throw DuplicateIdError("duplicate id " + std::to_string(ids_i[k]) +
                                   " on the source side");
        auto it = pos_j.find(ids_i[k]);
        if (it != pos_j.end()) {
            p.forward[k] = it->second;
            p.backward[it->second] = static_cast<int>(k);
        }
    }
    return p;
}

} // namespace topoalign
