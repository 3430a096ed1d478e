#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "topoalign/datagen.hpp"
#include "topoalign/errors.hpp"
#include "topoalign/filtration.hpp"
#include "topoalign/rng.hpp"

using namespace topoalign;

namespace {

PointCloud cloud_1d(std::initializer_list<double> xs) {
    PointCloud c(xs.size(), 1);
    std::size_t i = 0;
    for (double x : xs) c.row(i++)[0] = x;
    return c;
}

PointCloud random_cloud(Rng& rng, std::size_t n, std::size_t d) {
    PointCloud c(n, d);
    for (double& x : c.xs) x = rng.normal();
    return c;
}

// Independent MST oracle: Prim's algorithm (different algorithm family from
// the library's Kruskal), tie-broken by (weight, a, b) on candidate edges.
double prim_total_weight(const DistanceMatrix& dist) {
    const std::size_t n = dist.n;
    if (n <= 1) return 0.0;
    std::vector<bool> in_tree(n, false);
    in_tree[0] = true;
    double total = 0.0;
    for (std::size_t added = 1; added < n; ++added) {
        double best = kInf;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_tree[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (in_tree[j]) continue;
                const double w = dist.at(i, j);
                if (w < best) {
                    best = w;
                    bi = i;
                    bj = j;
                }
            }
        }
        (void)bi;
        in_tree[bj] = true;
        total += best;
    }
    return total;
}

std::multiset<std::pair<double, double>> pair_values(const std::vector<PersistencePair>& ps) {
    std::multiset<std::pair<double, double>> out;
    for (const auto& p : ps) out.insert({p.birth, p.death});
    return out;
}

// Canonical form for exact multiset comparison including attributions.
struct CanonPair {
    int dim;
    double birth, death;
    int bv;
    int ea, eb;
    double ew;
    int da, db;
    double dw;
    auto operator<=>(const CanonPair&) const = default;
};

std::multiset<CanonPair> canon(const std::vector<PersistencePair>& ps) {
    std::multiset<CanonPair> out;
    for (const auto& p : ps) {
        CanonPair c{p.dim,
                    p.birth,
                    p.death,
                    p.dim == 0 ? p.birth_vertex : -1,
                    p.dim == 1 ? p.birth_edge.a : -1,
                    p.dim == 1 ? p.birth_edge.b : -1,
                    p.dim == 1 ? p.birth_edge.weight : 0.0,
                    p.death_edge ? p.death_edge->a : -1,
                    p.death_edge ? p.death_edge->b : -1,
                    p.death_edge ? p.death_edge->weight : 0.0};
        out.insert(c);
    }
    return out;
}

std::set<std::pair<int, int>> edge_set(const std::vector<Edge>& edges) {
    std::set<std::pair<int, int>> out;
    for (const Edge& e : edges) out.insert({e.a, e.b});
    return out;
}

} // namespace

TEST_CASE("MST of a 1-d line is forced by the ordering") {
    auto dist = pairwise_distances(cloud_1d({0.0, 1.0, 3.0}), MetricKind::Euclidean);
    auto mst = compute_mst(dist);
    REQUIRE(mst.size() == 2);
    CHECK(mst[0].a == 0);
    CHECK(mst[0].b == 1);
    CHECK(mst[0].weight == doctest::Approx(1.0));
    CHECK(mst[1].a == 1);
    CHECK(mst[1].b == 2);
    CHECK(mst[1].weight == doctest::Approx(2.0));
}

TEST_CASE("MST of a single point is empty") {
    auto dist = pairwise_distances(cloud_1d({5.0}), MetricKind::Euclidean);
    CHECK(compute_mst(dist).empty());
}

TEST_CASE("MST total weight equals the Prim oracle") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = random_cloud(rng, 10, 3);
        auto dist = pairwise_distances(c, MetricKind::Euclidean);
        auto mst = compute_mst(dist);
        double total = 0.0;
        for (const auto& e : mst) total += e.weight;
        CHECK(total == doctest::Approx(prim_total_weight(dist)).epsilon(1e-12));
    }
}

TEST_CASE("PH of the 3-point line") {
    auto dist = pairwise_distances(cloud_1d({0.0, 1.0, 3.0}), MetricKind::Euclidean);
    auto [pairs, decomp] = compute_ph(dist);

    auto values = pair_values(pairs);
    std::multiset<std::pair<double, double>> expect{
        {0.0, 1.0}, {0.0, 2.0}, {0.0, kInf}, {3.0, kInf}};
    CHECK(values == expect);

    REQUIRE(decomp.h1_birth_edges.size() == 1);
    CHECK(decomp.h1_birth_edges[0].a == 0);
    CHECK(decomp.h1_birth_edges[0].b == 2);
    CHECK(decomp.h1_birth_edges[0].weight == doctest::Approx(3.0));
    CHECK(decomp.essential_h0 == std::vector<int>{0});

    // H0 death edges equal the MST when no cap is set.
    CHECK(edge_set(decomp.h0_death_edges) == edge_set(compute_mst(dist)));
}

TEST_CASE("duplicate points produce a zero-persistence H0 death") {
    PointCloud c(3, 2);
    c.row(0)[0] = 0.0;
    c.row(1)[0] = 0.0;
    c.row(2)[0] = 5.0;
    auto dist = pairwise_distances(c, MetricKind::Euclidean);
    auto [pairs, decomp] = compute_ph(dist);
    int zero_deaths = 0;
    for (const auto& p : pairs)
        if (p.dim == 0 && p.death_edge && p.death == 0.0) ++zero_deaths;
    CHECK(zero_deaths == 1);
    CHECK(decomp.h0_death_edges.size() == 2);
}

TEST_CASE("brute-force PH on the unit square") {
    // Corners (0,0),(1,0),(0,1),(1,1): sorted edge order is
    // (0,1) 1, (0,2) 1, (1,3) 1, (2,3) 1, then the diagonals at sqrt(2).
    PointCloud c(4, 2);
    c.row(1)[0] = 1.0;
    c.row(2)[1] = 1.0;
    c.row(3)[0] = 1.0;
    c.row(3)[1] = 1.0;
    auto dist = pairwise_distances(c, MetricKind::Euclidean);
    auto pairs = brute_force_ph(dist);

    std::vector<double> h0_deaths, h1_births;
    for (const auto& p : pairs) {
        if (p.dim == 0 && p.death_edge) h0_deaths.push_back(p.death);
        if (p.dim == 1) h1_births.push_back(p.birth);
    }
    std::sort(h0_deaths.begin(), h0_deaths.end());
    std::sort(h1_births.begin(), h1_births.end());
    REQUIRE(h0_deaths.size() == 3);
    for (double d : h0_deaths) CHECK(d == doctest::Approx(1.0));
    REQUIRE(h1_births.size() == 3);
    CHECK(h1_births[0] == doctest::Approx(1.0));
    CHECK(h1_births[1] == doctest::Approx(std::sqrt(2.0)));
    CHECK(h1_births[2] == doctest::Approx(std::sqrt(2.0)));

    CHECK(canon(pairs) == canon(compute_ph(dist).first));
}

TEST_CASE("equilateral triangle ties resolved lexicographically") {
    PointCloud c(3, 2);
    c.row(1)[0] = 1.0;
    c.row(2)[0] = 0.5;
    c.row(2)[1] = std::sqrt(3.0) / 2.0;
    DistanceMatrix dist(3);
    // exact unit distances to make the tie precise
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) dist.at(i, j) = i == j ? 0.0 : 1.0;
    auto [pairs, decomp] = compute_ph(dist);
    CHECK(edge_set(decomp.h0_death_edges) ==
          std::set<std::pair<int, int>>{{0, 1}, {0, 2}});
    REQUIRE(decomp.h1_birth_edges.size() == 1);
    CHECK(decomp.h1_birth_edges[0].a == 1);
    CHECK(decomp.h1_birth_edges[0].b == 2);
    CHECK(canon(pairs) == canon(brute_force_ph(dist)));
}

TEST_CASE("compute_ph equals brute_force_ph on random clouds") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(7);
        auto c = random_cloud(rng, n, 3);
        auto dist = pairwise_distances(c, MetricKind::Euclidean);
        CHECK(canon(compute_ph(dist).first) == canon(brute_force_ph(dist)));
    }
}

TEST_CASE("brute_force_ph rejects large inputs") {
    Rng rng(1);
    auto c = random_cloud(rng, 13, 2);
    auto dist = pairwise_distances(c, MetricKind::Euclidean);
    CHECK_THROWS_AS(brute_force_ph(dist), TooLargeError);
}

TEST_CASE("counting law and MST identity") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + rng.below(30);
        auto c = random_cloud(rng, n, 4);
        auto dist = perturb_distinct(pairwise_distances(c, MetricKind::Euclidean),
                                     1000 + trial);
        auto [pairs, decomp] = compute_ph(dist);

        std::size_t h0_finite = 0, h1 = 0, essential = 0;
        for (const auto& p : pairs) {
            if (p.dim == 0 && p.death_edge) ++h0_finite;
            if (p.dim == 0 && !p.death_edge) ++essential;
            if (p.dim == 1) ++h1;
        }
        CHECK(h0_finite == n - 1);
        CHECK(h1 == n * (n - 1) / 2 - (n - 1));
        CHECK(essential == 1);
        CHECK(edge_set(decomp.h0_death_edges) == edge_set(compute_mst(dist)));
    }
}

TEST_CASE("relabeling permutes endpoints but preserves the diagram") {
    Rng rng(23);
    auto c = random_cloud(rng, 9, 3);
    auto dist = pairwise_distances(c, MetricKind::Euclidean);

    // permuted cloud
    std::vector<std::size_t> perm(c.n);
    for (std::size_t i = 0; i < c.n; ++i) perm[i] = i;
    for (std::size_t i = c.n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    PointCloud p(c.n, c.dim);
    for (std::size_t i = 0; i < c.n; ++i)
        std::copy_n(c.row(perm[i]), c.dim, p.row(i));
    auto dist_p = pairwise_distances(p, MetricKind::Euclidean);

    CHECK(pair_values(compute_ph(dist).first) == pair_values(compute_ph(dist_p).first));
}

TEST_CASE("cycle property of H1 edges") {
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 16;
        auto c = random_cloud(rng, n, 3);
        auto dist = pairwise_distances(c, MetricKind::Euclidean);
        auto [pairs, decomp] = compute_ph(dist);

        // adjacency over MST edges
        std::vector<std::vector<std::pair<int, double>>> adj(n);
        for (const Edge& e : decomp.h0_death_edges) {
            adj[e.a].push_back({e.b, e.weight});
            adj[e.b].push_back({e.a, e.weight});
        }
        // max edge weight on the unique tree path, by DFS
        auto path_max = [&](int from, int to) {
            std::vector<double> best(n, -1.0);
            std::vector<int> stack{from};
            best[from] = 0.0;
            while (!stack.empty()) {
                const int v = stack.back();
                stack.pop_back();
                for (auto [u, w] : adj[v])
                    if (best[u] < 0.0) {
                        best[u] = std::max(best[v], w);
                        stack.push_back(u);
                    }
            }
            return best[to];
        };
        for (const Edge& e : decomp.h1_birth_edges)
            CHECK(e.weight >= path_max(e.a, e.b));
    }
}

TEST_CASE("max_scale drops edges and splits components") {
    auto dist = pairwise_distances(cloud_1d({0.0, 1.0, 10.0}), MetricKind::Euclidean);
    PhOptions opts;
    opts.max_scale = 2.0;
    auto [pairs, decomp] = compute_ph(dist, opts);
    CHECK(decomp.h0_death_edges.size() == 1);
    CHECK(decomp.essential_h0.size() == 2);
    CHECK(decomp.h1_birth_edges.empty());
}

TEST_CASE("decompose_edges applies the caps") {
    auto dist = pairwise_distances(cloud_1d({0.0, 1.0, 3.0}), MetricKind::Euclidean);
    auto [pairs, decomp] = compute_ph(dist);
    PhOptions cap0;
    cap0.h1_cap = 0;
    auto d0 = decompose_edges(pairs, cap0);
    CHECK(d0.h1_birth_edges.empty());
    CHECK(d0.h0_death_edges.size() == 2);

    // N=16 cloud: a cap keeps exactly the smallest-weight non-MST edges.
    Rng rng(41);
    auto c = random_cloud(rng, 16, 2);
    auto dist16 = pairwise_distances(c, MetricKind::Euclidean);
    auto [pairs16, full16] = compute_ph(dist16);
    PhOptions cap8;
    cap8.h1_cap = 8;
    auto capped = decompose_edges(pairs16, cap8);
    REQUIRE(capped.h1_birth_edges.size() == 8);
    auto sorted_full = full16.h1_birth_edges;
    std::sort(sorted_full.begin(), sorted_full.end(), edge_less);
    for (std::size_t k = 0; k < 8; ++k) CHECK(capped.h1_birth_edges[k] == sorted_full[k]);

    // The capped sweep inside compute_ph agrees with post-hoc capping.
    auto direct = compute_ph(dist16, cap8).second;
    for (std::size_t k = 0; k < 8; ++k) CHECK(direct.h1_birth_edges[k] == sorted_full[k]);
}

TEST_CASE("compute_ph validates the matrix") {
    DistanceMatrix bad(2);
    bad.at(0, 1) = 1.0;
    bad.at(1, 0) = 2.0;
    CHECK_THROWS_AS(compute_ph(bad), InvalidMatrixError);
    DistanceMatrix neg(2);
    neg.at(0, 1) = -1.0;
    neg.at(1, 0) = -1.0;
    CHECK_THROWS_AS(compute_ph(neg), InvalidMatrixError);
}
