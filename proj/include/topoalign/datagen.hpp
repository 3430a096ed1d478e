#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topoalign/geometry.hpp"

// Synthetic paired point clouds with controllable cluster / cycle structure
// and a configurable modality gap, used by tests and the trainer benchmark.

namespace topoalign {

enum class StructureKind { Clusters, Circle, TwoClustersPlusCycle };

const char* structure_name(StructureKind s);
StructureKind parse_structure(const std::string& name);

// Transform applied to modality 1 to produce modality 2.
struct GapSpec {
    double rotation_angle = 0.0; // radians, in the (rot_axis_a, rot_axis_b) plane
    int rot_axis_a = 0;
    int rot_axis_b = 1;
    double noise_sigma = 0.0;            // per-coordinate Gaussian noise
    std::vector<double> translation{};   // empty = none; else size dim
    bool sign_flip = false;              // negate all coordinates
};

struct SynthSpec {
    std::size_t n_points = 32;
    std::size_t dim = 2;
    StructureKind structure = StructureKind::Clusters;
    int clusters_k = 2;
    double cluster_spread = 0.1;
    double circle_radius = 1.0;
    double circle_noise = 0.0;
    GapSpec gap{};
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthResult {
    PointCloud mi;
    PointCloud mj;
    PairingMap pairing; // identity
};

// Modality 1 sampled per the structure; modality 2 = gap transform of
// modality 1; identity pairing. Deterministic given the seed.
SynthResult generate(const SynthSpec& spec);

// Adds deterministic jitter bounded by 1e-9 x (smallest positive entry) so
// all off-diagonal entries become pairwise distinct; symmetry preserved.
DistanceMatrix perturb_distinct(const DistanceMatrix& dist, std::uint64_t seed);

// The fixed synthetic benchmark used by the trainer comparison: a
// two-clusters-plus-cycle cloud with a rotation + noise modality gap.
SynthSpec benchmark_spec(std::size_t n_points, std::size_t dim, std::uint64_t seed);

} // namespace topoalign
