#pragma once

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "topoalign/geometry.hpp"

// Persistent homology of the Vietoris-Rips filtration truncated at the
// 1-skeleton: vertices enter at scale 0, an edge {a,b} enters at the
// pairwise distance, and no higher simplices exist. Under this truncation
// H0 classes die on minimum-spanning-tree edges and H1 classes are born on
// the remaining cycle-closing edges and never die.

namespace topoalign {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Edge {
    int a = 0; // canonical order a < b
    int b = 0;
    double weight = 0.0;

    friend bool operator==(const Edge& l, const Edge& r) {
        return l.a == r.a && l.b == r.b && l.weight == r.weight;
    }
};

// Total order on edges: (weight, a, b) lexicographic. All tie-breaking in
// this module goes through this comparison.
inline bool edge_less(const Edge& l, const Edge& r) {
    if (l.weight != r.weight) return l.weight < r.weight;
    if (l.a != r.a) return l.a < r.a;
    return l.b < r.b;
}

struct PhOptions {
    std::optional<double> max_scale;    // drop edges with weight > max_scale
    std::optional<std::size_t> h1_cap;  // keep at most this many H1 edges (ascending weight)
};

struct PersistencePair {
    int dim = 0;            // 0 or 1
    double birth = 0.0;
    double death = kInf;    // +inf for essential H0 classes and all H1 classes
    int birth_vertex = -1;  // dim 0: representative vertex of the class
    Edge birth_edge{};      // dim 1: the cycle-closing edge
    std::optional<Edge> death_edge; // dim 0 with finite death: the merging edge
};

struct EdgeDecomposition {
    std::vector<Edge> h0_death_edges; // the MST, ascending (weight, a, b)
    std::vector<Edge> h1_birth_edges; // cycle-closing non-MST edges, ascending, capped
    std::vector<int> essential_h0;    // representative vertex per surviving component
};

// Kruskal MST under the (weight, a, b) edge order; N-1 edges for a
// connected matrix (always connected: all pairwise distances are finite).
// N = 1 yields an empty list.
std::vector<Edge> compute_mst(const DistanceMatrix& dist);

// Full H0/H1 persistence of the truncated filtration. H0: one (0, w(e))
// pair per merge edge e plus one essential (0, inf) class per surviving
// component; H1: one (w(e), inf) pair per retained cycle-closing edge.
// When two components merge, the one whose representative (its minimum
// vertex index) is larger dies.
std::pair<std::vector<PersistencePair>, EdgeDecomposition>
compute_ph(const DistanceMatrix& dist, const PhOptions& opts = {});

// The edge decomposition alone, skipping persistence-pair construction
// (same sweep as compute_ph; used on hot paths).
EdgeDecomposition compute_edge_decomposition(const DistanceMatrix& dist,
                                             const PhOptions& opts = {});

// Verification oracle: replays the filtration event-by-event with explicit
// component sets instead of union-find. Throws TooLargeError for N > 12.
std::vector<PersistencePair> brute_force_ph(const DistanceMatrix& dist);

// Splits a pair list back into its H0/H1 edge sets, applying max_scale and
// h1_cap.
EdgeDecomposition decompose_edges(const std::vector<PersistencePair>& pairs,
                                  const PhOptions& opts = {});

} // namespace topoalign
