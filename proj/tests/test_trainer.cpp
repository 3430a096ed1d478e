#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "topoalign/datagen.hpp"
#include "topoalign/errors.hpp"
#include "topoalign/filtration.hpp"
#include "topoalign/rng.hpp"
#include "topoalign/trainer.hpp"

using namespace topoalign;

namespace {

PointCloud random_cloud(Rng& rng, std::size_t n, std::size_t d) {
    PointCloud c(n, d);
    for (double& x : c.xs) x = rng.normal();
    return c;
}

} // namespace

TEST_CASE("combined objective with c = 0 equals the contrastive loss exactly") {
    Rng rng(1);
    auto mi = normalize(random_cloud(rng, 8, 4));
    auto mj = normalize(random_cloud(rng, 8, 4));
    auto id = PairingMap::identity(8);

    TrainConfig cfg;
    cfg.align.c = 0.0;
    auto combined = combined_objective(mi, mj, id, cfg);
    auto contr = contrastive_loss(mi, mj, cfg.tau);
    CHECK(combined.loss_total == contr.loss_total);
    CHECK(combined.loss_0death == 0.0);
    for (std::size_t k = 0; k < combined.grad_i.v.size(); ++k) {
        CHECK(combined.grad_i.v[k] == contr.grad_i.v[k]);
        CHECK(combined.grad_j.v[k] == contr.grad_j.v[k]);
    }
}

TEST_CASE("identical clouds contribute no topology loss") {
    Rng rng(2);
    auto mi = normalize(random_cloud(rng, 10, 4));
    auto id = PairingMap::identity(10);
    TrainConfig cfg;
    auto rep = combined_objective(mi, mi, id, cfg);
    CHECK(rep.loss_0death == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rep.loss_1birth == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rep.loss_total == doctest::Approx(rep.loss_contrastive).epsilon(1e-12));
}

TEST_CASE("combined objective composes the component losses and gradients") {
    Rng rng(3);
    auto mi = normalize(random_cloud(rng, 9, 3));
    auto mj = normalize(random_cloud(rng, 9, 3));
    auto id = PairingMap::identity(9);

    TrainConfig cfg;
    cfg.align.c = 0.5;
    cfg.align.c2 = 2.0;
    auto rep = combined_objective(mi, mj, id, cfg);

    auto contr = contrastive_loss(mi, mj, cfg.tau);
    auto topo = topology_loss(mi, mj, id, cfg.align, true);
    CHECK(rep.loss_total ==
          doctest::Approx(contr.loss_total + topo.loss_total).epsilon(1e-12));
    for (std::size_t k = 0; k < rep.grad_i.v.size(); ++k) {
        CHECK(rep.grad_i.v[k] ==
              doctest::Approx(contr.grad_i.v[k] + topo.grad_i.v[k]).epsilon(1e-12));
        CHECK(rep.grad_j.v[k] ==
              doctest::Approx(contr.grad_j.v[k] + topo.grad_j.v[k]).epsilon(1e-12));
    }
}

TEST_CASE("labeled subset restricts both loss terms") {
    Rng rng(4);
    auto mi = normalize(random_cloud(rng, 12, 4));
    auto mj = normalize(random_cloud(rng, 12, 4));
    auto id = PairingMap::identity(12);

    TrainConfig cfg;
    cfg.labeled_fraction = 0.5;
    cfg.seed = 11;
    auto rep = combined_objective(mi, mj, id, cfg);
    CHECK(rep.skipped_edges > 0); // edges with unlabeled endpoints are excluded

    auto labeled = labeled_subset(12, 0.5, 11);
    CHECK(labeled.size() == 6);
    // contrastive part equals the loss over the labeled subclouds
    PointCloud sub_i(labeled.size(), 4), sub_j(labeled.size(), 4);
    for (std::size_t k = 0; k < labeled.size(); ++k) {
        std::copy_n(mi.row(labeled[k]), 4, sub_i.row(k));
        std::copy_n(mj.row(labeled[k]), 4, sub_j.row(k));
    }
    CHECK(rep.loss_contrastive ==
          doctest::Approx(contrastive_loss(sub_i, sub_j, cfg.tau).loss_contrastive)
              .epsilon(1e-12));
}

TEST_CASE("labeled_subset is deterministic and correctly sized") {
    auto a = labeled_subset(100, 0.1, 5);
    auto b = labeled_subset(100, 0.1, 5);
    CHECK(a == b);
    CHECK(a.size() == 10);
    CHECK(std::is_sorted(a.begin(), a.end()));
    auto c = labeled_subset(100, 0.1, 6);
    CHECK(a != c);
    CHECK(labeled_subset(5, 0.01, 0).size() == 1); // floor of one pair
    CHECK(labeled_subset(5, 1.0, 0) == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("zero-step training returns the initial state") {
    auto data = generate(benchmark_spec(16, 4, 3));
    TrainConfig cfg;
    cfg.steps = 0;
    auto res = train(data.mi, data.mj, data.pairing, cfg);
    REQUIRE(res.loss_history.size() == 1);
    CHECK(res.start.mst_overlap == res.end.mst_overlap);
    CHECK(res.start.retrieval_r1 == res.end.retrieval_r1);
    // final clouds equal the normalized inputs
    auto ni = normalize(data.mi);
    CHECK(res.final_mi.xs == ni.xs);
}

TEST_CASE("training is deterministic") {
    auto data = generate(benchmark_spec(16, 4, 5));
    TrainConfig cfg;
    cfg.steps = 12;
    cfg.learning_rate = 0.05;
    cfg.labeled_fraction = 0.5;
    cfg.seed = 5;
    auto a = train(data.mi, data.mj, data.pairing, cfg);
    auto b = train(data.mi, data.mj, data.pairing, cfg);
    REQUIRE(a.loss_history.size() == b.loss_history.size());
    for (std::size_t k = 0; k < a.loss_history.size(); ++k)
        CHECK(a.loss_history[k].loss_total == b.loss_history[k].loss_total);
    CHECK(a.final_mi.xs == b.final_mi.xs);
}

TEST_CASE("history length counts the initial state") {
    auto data = generate(benchmark_spec(12, 4, 7));
    TrainConfig cfg;
    cfg.steps = 7;
    auto res = train(data.mi, data.mj, data.pairing, cfg);
    CHECK(res.loss_history.size() == 8);
}

TEST_CASE("small-step descent over ten-step windows") {
    auto data = generate(benchmark_spec(16, 4, 2));
    TrainConfig cfg;
    cfg.steps = 40;
    cfg.learning_rate = 1e-3;
    cfg.seed = 2;
    auto res = train(data.mi, data.mj, data.pairing, cfg);
    for (std::size_t k = 0; k + 10 < res.loss_history.size(); ++k)
        CHECK(res.loss_history[k + 10].loss_total <=
              res.loss_history[k].loss_total + 1e-6);
}

TEST_CASE("linear-map training also descends") {
    auto data = generate(benchmark_spec(16, 4, 8));
    TrainConfig cfg;
    cfg.steps = 30;
    cfg.learning_rate = 1e-3;
    cfg.optimize = OptimizeMode::LinearMap;
    cfg.seed = 8;
    auto res = train(data.mi, data.mj, data.pairing, cfg);
    CHECK(res.loss_history.back().loss_total < res.loss_history.front().loss_total);
}

TEST_CASE("mst_overlap basics") {
    Rng rng(6);
    auto mi = random_cloud(rng, 10, 3);
    auto id = PairingMap::identity(10);
    CHECK(mst_overlap(mi, mi, id) == doctest::Approx(1.0));

    // clouds whose MSTs share no edge: a path versus a star
    PointCloud path(4, 2), star(4, 2);
    for (int i = 0; i < 4; ++i) path.row(i)[0] = double(i);
    // star center at point 3: make 3 close to everyone, others far apart
    star.row(0)[0] = -10.0;
    star.row(1)[1] = 10.0;
    star.row(2)[0] = 10.0;
    star.row(3)[0] = 0.0;
    auto id4 = PairingMap::identity(4);
    const auto set_path = [&](const PointCloud& c) {
        std::set<std::pair<int, int>> s;
        for (const Edge& e : compute_mst(pairwise_distances(c, MetricKind::Euclidean)))
            s.insert({e.a, e.b});
        return s;
    };
    const auto sp = set_path(path), ss = set_path(star);
    std::size_t inter = 0;
    for (const auto& e : sp) inter += ss.count(e);
    if (inter == 0) CHECK(mst_overlap(path, star, id4) == doctest::Approx(0.0));

    // seeded pair: overlap equals the set arithmetic on exported edge lists
    auto mj = random_cloud(rng, 10, 3);
    const auto si = set_path(mi), sj = set_path(mj);
    std::size_t both = 0;
    for (const auto& e : si) both += sj.count(e);
    const double expect = double(both) / double(si.size() + sj.size() - both);
    CHECK(mst_overlap(mi, mj, id) == doctest::Approx(expect));
}

TEST_CASE("mst_overlap is symmetric under swapping with the inverted pairing") {
    Rng rng(7);
    auto mi = random_cloud(rng, 12, 3);
    auto mj = random_cloud(rng, 12, 3);
    // a random bijection
    std::vector<std::int64_t> ids_i(12), ids_j(12);
    for (int k = 0; k < 12; ++k) ids_i[k] = ids_j[k] = k;
    for (std::size_t i = 11; i > 0; --i) std::swap(ids_j[i], ids_j[rng.below(i + 1)]);
    auto pairing = build_pairing(ids_i, ids_j);
    PairingMap inverted;
    inverted.forward = pairing.backward;
    inverted.backward = pairing.forward;
    CHECK(mst_overlap(mi, mj, pairing) == doctest::Approx(mst_overlap(mj, mi, inverted)));
}

TEST_CASE("retrieval recall basics and ranking oracle") {
    Rng rng(8);
    auto mi = normalize(random_cloud(rng, 10, 4));
    auto id = PairingMap::identity(10);
    CHECK(retrieval_recall(mi, mi, id, 1) == doctest::Approx(1.0));
    CHECK(retrieval_recall(mi, mi, id, 5) == doctest::Approx(1.0));

    // partner always the antipode: never in the top-1 among n > 2 points
    auto anti = mi;
    for (double& x : anti.xs) x = -x;
    CHECK(retrieval_recall(mi, anti, id, 1) == doctest::Approx(0.0));

    // brute-force ranking oracle at k = 5
    auto mj = normalize(random_cloud(rng, 10, 4));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < mi.n; ++i) {
        std::vector<std::pair<double, int>> sims;
        for (std::size_t j = 0; j < mj.n; ++j)
            sims.push_back({cosine_similarity(mi.point(i), mj.point(j)), int(j)});
        std::sort(sims.begin(), sims.end(), [](auto& a, auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t r = 0; r < 5; ++r)
            if (sims[r].second == int(i)) {
                ++hits;
                break;
            }
    }
    CHECK(retrieval_recall(mi, mj, id, 5) == doctest::Approx(double(hits) / 10.0));
}

TEST_CASE("training rejects invalid configs") {
    auto data = generate(benchmark_spec(8, 4, 0));
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(train(data.mi, data.mj, data.pairing, cfg), Error);
    cfg.learning_rate = 0.1;
    cfg.labeled_fraction = 0.0;
    CHECK_THROWS_AS(train(data.mi, data.mj, data.pairing, cfg), Error);
}
