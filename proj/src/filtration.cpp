#include "topoalign/filtration.hpp"

#include <algorithm>
#include <numeric>

#include "topoalign/errors.hpp"

namespace topoalign {

namespace {

std::vector<Edge> all_edges_sorted(const DistanceMatrix& dist,
                                   std::optional<double> max_scale) {
    const int n = static_cast<int>(dist.n);
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double w = dist.at(i, j);
            if (max_scale && w > *max_scale) continue;
            edges.push_back({i, j, w});
        }
    std::sort(edges.begin(), edges.end(), edge_less);
    return edges;
}

// Union-find keeping, per root, the minimum vertex index of the component
// (the class representative used by the elder rule).
struct DisjointSet {
    std::vector<int> parent;
    std::vector<int> rep;

    explicit DisjointSet(int n) : parent(n), rep(n) {
        std::iota(parent.begin(), parent.end(), 0);
        std::iota(rep.begin(), rep.end(), 0);
    }

    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    // Merges the components of ra and rb (roots). Returns (survivor_rep,
    // dying_rep): the component with the larger representative dies.
    std::pair<int, int> merge(int ra, int rb) {
        const int keep = rep[ra] < rep[rb] ? ra : rb;
        const int die = keep == ra ? rb : ra;
        parent[die] = keep;
        return {rep[keep], rep[die]};
    }
};

} // namespace

std::vector<Edge> compute_mst(const DistanceMatrix& dist) {
    dist.validate();
    const int n = static_cast<int>(dist.n);
    std::vector<Edge> mst;
    if (n <= 1) return mst;

    auto edges = all_edges_sorted(dist, std::nullopt);
    DisjointSet ds(n);
    mst.reserve(n - 1);
    for (const Edge& e : edges) {
        const int ra = ds.find(e.a);
        const int rb = ds.find(e.b);
        if (ra == rb) continue;
        ds.merge(ra, rb);
        mst.push_back(e);
        if (static_cast<int>(mst.size()) == n - 1) break;
    }
    std::sort(mst.begin(), mst.end(), edge_less);
    return mst;
}

namespace {

std::pair<std::vector<PersistencePair>, EdgeDecomposition>
ph_sweep(const DistanceMatrix& dist, const PhOptions& opts, bool want_pairs) {
    dist.validate();
    const int n = static_cast<int>(dist.n);
    if (opts.max_scale && *opts.max_scale <= 0.0)
        throw Error("max_scale must be positive");

    std::vector<PersistencePair> pairs;
    EdgeDecomposition decomp;
    if (n == 0) return {pairs, decomp};

    auto edges = all_edges_sorted(dist, opts.max_scale);
    DisjointSet ds(n);
    std::vector<PersistencePair> h1;
    decomp.h0_death_edges.reserve(n - 1);
    const std::size_t h1_estimate =
        opts.h1_cap ? std::min<std::size_t>(*opts.h1_cap, edges.size()) : edges.size();
    decomp.h1_birth_edges.reserve(h1_estimate);
    if (want_pairs) pairs.reserve(n + 1);

    for (const Edge& e : edges) {
        const int ra = ds.find(e.a);
        const int rb = ds.find(e.b);
        if (ra != rb) {
            auto [survivor, dying] = ds.merge(ra, rb);
            (void)survivor;
            if (want_pairs) {
                PersistencePair p;
                p.dim = 0;
                p.birth = 0.0;
                p.death = e.weight;
                p.birth_vertex = dying;
                p.death_edge = e;
                pairs.push_back(p);
            }
            decomp.h0_death_edges.push_back(e);
        } else {
            if (opts.h1_cap && decomp.h1_birth_edges.size() >= *opts.h1_cap) continue;
            if (want_pairs) {
                PersistencePair p;
                p.dim = 1;
                p.birth = e.weight;
                p.death = kInf;
                p.birth_edge = e;
                h1.push_back(p);
            }
            decomp.h1_birth_edges.push_back(e);
        }
    }

    // Essential class per surviving component, in representative order.
    for (int v = 0; v < n; ++v) {
        const int r = ds.find(v);
        if (ds.rep[r] == v) {
            if (want_pairs) {
                PersistencePair p;
                p.dim = 0;
                p.birth = 0.0;
                p.death = kInf;
                p.birth_vertex = v;
                pairs.push_back(p);
            }
            decomp.essential_h0.push_back(v);
        }
    }

    if (want_pairs) pairs.insert(pairs.end(), h1.begin(), h1.end());
    return {pairs, decomp};
}

} // namespace

std::pair<std::vector<PersistencePair>, EdgeDecomposition>
compute_ph(const DistanceMatrix& dist, const PhOptions& opts) {
    return ph_sweep(dist, opts, true);
}

EdgeDecomposition compute_edge_decomposition(const DistanceMatrix& dist, const PhOptions& opts) {
    return ph_sweep(dist, opts, false).second;
}

std::vector<PersistencePair> brute_force_ph(const DistanceMatrix& dist) {
    dist.validate();
    const int n = static_cast<int>(dist.n);
    if (n > 12) throw TooLargeError("brute_force_ph is limited to N <= 12");

    std::vector<PersistencePair> pairs;
    if (n == 0) return pairs;

    auto edges = all_edges_sorted(dist, std::nullopt);

    // Components as explicit vertex sets; every vertex is born at scale 0.
    std::vector<std::vector<int>> comps(n);
    for (int v = 0; v < n; ++v) comps[v] = {v};

    std::vector<PersistencePair> h1;
    for (const Edge& e : edges) {
        int ca = -1, cb = -1;
        for (std::size_t c = 0; c < comps.size(); ++c)
            for (int v : comps[c]) {
                if (v == e.a) ca = static_cast<int>(c);
                if (v == e.b) cb = static_cast<int>(c);
            }
        if (ca != cb) {
            // Elder rule: the component whose minimum vertex is larger dies.
            const int rep_a = *std::min_element(comps[ca].begin(), comps[ca].end());
            const int rep_b = *std::min_element(comps[cb].begin(), comps[cb].end());
            const int keep = rep_a < rep_b ? ca : cb;
            const int die = keep == ca ? cb : ca;
            PersistencePair p;
            p.dim = 0;
            p.birth = 0.0;
            p.death = e.weight;
            p.birth_vertex = std::max(rep_a, rep_b);
            p.death_edge = e;
            pairs.push_back(p);
            comps[keep].insert(comps[keep].end(), comps[die].begin(), comps[die].end());
            comps.erase(comps.begin() + die);
        } else {
            PersistencePair p;
            p.dim = 1;
            p.birth = e.weight;
            p.death = kInf;
            p.birth_edge = e;
            h1.push_back(p);
        }
    }

    for (const auto& comp : comps) {
        PersistencePair p;
        p.dim = 0;
        p.birth = 0.0;
        p.death = kInf;
        p.birth_vertex = *std::min_element(comp.begin(), comp.end());
        pairs.push_back(p);
    }
    pairs.insert(pairs.end(), h1.begin(), h1.end());
    return pairs;
}

EdgeDecomposition decompose_edges(const std::vector<PersistencePair>& pairs,
                                  const PhOptions& opts) {
    EdgeDecomposition decomp;
    for (const auto& p : pairs) {
        if (p.dim == 0) {
            if (!p.death_edge) {
                decomp.essential_h0.push_back(p.birth_vertex);
                continue;
            }
            if (opts.max_scale && p.death_edge->weight > *opts.max_scale) continue;
            decomp.h0_death_edges.push_back(*p.death_edge);
        } else {
            if (opts.max_scale && p.birth_edge.weight > *opts.max_scale) continue;
            decomp.h1_birth_edges.push_back(p.birth_edge);
        }
    }
    std::sort(decomp.h0_death_edges.begin(), decomp.h0_death_edges.end(), edge_less);
    std::sort(decomp.h1_birth_edges.begin(), decomp.h1_birth_edges.end(), edge_less);
    std::sort(decomp.essential_h0.begin(), decomp.essential_h0.end());
    if (opts.h1_cap && decomp.h1_birth_edges.size() > *opts.h1_cap)
        decomp.h1_birth_edges.resize(*opts.h1_cap);
    return decomp;
}

} // namespace topoalign
