#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace topoalign {

// Multiset of finite (birth, death) pairs for one homology dimension.
// Essential classes must be filtered or substituted before building one.
struct PersistenceDiagram {
    int dim = 0;
    std::vector<std::pair<double, double>> points;
};

// Birth/persistence bounds of a persistence image: {birth_min, birth_max,
// pers_min, pers_max}.
using PiBounds = std::array<double, 4>;

struct PersistenceImage {
    std::size_t resolution = 0;
    PiBounds bounds{};
    double sigma = 0.0;
    std::vector<double> grid; // row-major resolution x resolution,
                              // grid[ib*resolution + ip]: ib birth bin, ip persistence bin

    double at(std::size_t ib, std::size_t ip) const { return grid[ib * resolution + ip]; }
};

// One matched pair of the optimal transport plan. Index -1 stands for the
// diagonal on that side.
struct DiagramMatch {
    int from; // index into d1.points, or -1
    int to;   // index into d2.points, or -1
};

struct WassersteinResult {
    double value = 0.0;
    std::vector<DiagramMatch> matches;
};

// q-Wasserstein distance with L-infinity ground metric. Unmatched points
// transport to their diagonal projection at cost (death - birth) / 2;
// solved exactly by the Hungarian method on the diagonal-augmented square
// cost matrix (diagonal-to-diagonal cells cost 0).
double wasserstein(const PersistenceDiagram& d1, const PersistenceDiagram& d2, double q = 1.0);

// Same computation, also returning the optimal matching (used by the
// diagram-matching loss gradient).
WassersteinResult wasserstein_matching(const PersistenceDiagram& d1,
                                       const PersistenceDiagram& d2, double q = 1.0);

inline constexpr std::size_t kDefaultPiResolution = 20;

// Default bandwidth rule: 0.1 x max persistence, with the max floored at
// 1e-6 so empty or all-diagonal diagrams stay well-defined.
double default_pi_sigma(const PersistenceDiagram& d);

// Bounds in (birth, persistence) coordinates covering every diagram with a
// 10% margin per axis.
PiBounds auto_pi_bounds(const std::vector<const PersistenceDiagram*>& diagrams,
                        double margin = 0.1);

// Sum of per-point Gaussians of bandwidth sigma evaluated at grid-cell
// centers in (birth, persistence) coordinates, each point weighted by its
// persistence. Empty diagram gives an all-zero grid.
PersistenceImage persistence_image(const PersistenceDiagram& d, std::size_t resolution,
                                   double sigma, std::optional<PiBounds> bounds = std::nullopt);

// Euclidean norm of the entrywise difference. Throws BoundsMismatchError
// unless resolutions and bounds agree.
double image_l2(const PersistenceImage& p1, const PersistenceImage& p2);

} // namespace topoalign
