#include "topoalign/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "topoalign/errors.hpp"
#include "topoalign/filtration.hpp"
#include "topoalign/kernels.hpp"
#include "topoalign/rng.hpp"

namespace topoalign {

const char* optimize_mode_name(OptimizeMode m) {
    return m == OptimizeMode::FreePoints ? "free-points" : "linear-map";
}

OptimizeMode parse_optimize_mode(const std::string& name) {
    if (name == "free-points") return OptimizeMode::FreePoints;
    if (name == "linear-map") return OptimizeMode::LinearMap;
    throw Error("unknown optimize mode '" + name + "'");
}

void TrainConfig::validate() const {
    if (steps < 0) throw Error("steps must be >= 0");
    if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
    if (!(labeled_fraction > 0.0 && labeled_fraction <= 1.0))
        throw Error("labeled_fraction must be in (0, 1]");
    if (momentum < 0.0 || momentum >= 1.0) throw Error("momentum must be in [0, 1)");
}

std::vector<int> labeled_subset(std::size_t n, double fraction, std::uint64_t seed) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const std::size_t k =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(fraction * double(n))));
    if (k >= n) return idx;
    // Fisher-Yates with the shared deterministic generator.
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = rng.below(i + 1);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace {

// Pairing restricted to the labeled source indices.
PairingMap restrict_pairing(const PairingMap& pairing, const std::vector<int>& labeled) {
    PairingMap out;
    out.forward.assign(pairing.forward.size(), -1);
    out.backward.assign(pairing.backward.size(), -1);
    for (int i : labeled) {
        const int j = pairing.forward[i];
        if (j >= 0) {
            out.forward[i] = j;
            out.backward[j] = i;
        }
    }
    return out;
}

} // namespace

LossReport combined_objective(const PointCloud& mi, const PointCloud& mj,
                              const PairingMap& pairing, const TrainConfig& cfg) {
    cfg.validate();
    mi.validate();
    mj.validate();
    if (pairing.forward.size() != mi.n || pairing.backward.size() != mj.n)
        throw PairingIncompleteError("pairing map size does not match the clouds");

    const auto labeled = labeled_subset(mi.n, cfg.labeled_fraction, cfg.seed);

    // Contrastive term over the labeled pairs only.
    PointCloud sub_i(labeled.size(), mi.dim);
    PointCloud sub_j(labeled.size(), mj.dim);
    for (std::size_t k = 0; k < labeled.size(); ++k) {
        const int i = labeled[k];
        const int j = pairing.forward[i];
        if (j < 0) throw PairingIncompleteError("labeled pair " + std::to_string(i) +
                                                " is not covered by the pairing");
        std::copy_n(mi.row(i), mi.dim, sub_i.row(k));
        std::copy_n(mj.row(j), mj.dim, sub_j.row(k));
        sub_i.ids[k] = mi.ids[i];
        sub_j.ids[k] = mi.ids[i];
    }
    LossReport contr = contrastive_loss(sub_i, sub_j, cfg.tau);

    LossReport rep;
    rep.config = cfg.align;
    rep.tau = cfg.tau;
    rep.loss_contrastive = contr.loss_contrastive;
    rep.has_grads = true;
    rep.grad_i = Matrix(mi.n, mi.dim);
    rep.grad_j = Matrix(mj.n, mj.dim);
    for (std::size_t k = 0; k < labeled.size(); ++k) {
        const int i = labeled[k];
        const int j = pairing.forward[i];
        kernels::axpy(1.0, contr.grad_i.row(k), rep.grad_i.row(i), mi.dim);
        kernels::axpy(1.0, contr.grad_j.row(k), rep.grad_j.row(j), mj.dim);
    }

    // Topology term over the full batch; pairing-dependent edges restricted
    // to labeled endpoints.
    if (cfg.align.c > 0.0 && cfg.align.variant != LossVariant::None) {
        const auto restricted = restrict_pairing(pairing, labeled);
        LossReport topo = topology_loss(mi, mj, restricted, cfg.align, true, true);
        rep.loss_0death = topo.loss_0death;
        rep.loss_1birth = topo.loss_1birth;
        rep.skipped_edges = topo.skipped_edges;
        rep.diagram_params = topo.diagram_params;
        rep.edge_terms = std::move(topo.edge_terms);
        for (std::size_t k = 0; k < rep.grad_i.v.size(); ++k)
            rep.grad_i.v[k] += topo.grad_i.v[k];
        for (std::size_t k = 0; k < rep.grad_j.v.size(); ++k)
            rep.grad_j.v[k] += topo.grad_j.v[k];
        rep.loss_total =
            rep.loss_contrastive + 0.5 * cfg.align.c * (rep.loss_0death +
                                                        cfg.align.c2 * rep.loss_1birth);
    } else {
        rep.loss_total = rep.loss_contrastive;
    }
    return rep;
}

namespace {

PointCloud renormalized(const PointCloud& cloud) { return normalize(cloud); }

// x = W b per row, re-normalized. Also returns the pre-normalization norms.
PointCloud apply_linear_map(const PointCloud& base, const Matrix& w,
                            std::vector<double>* pre_norms = nullptr) {
    const std::size_t n = base.n, d = base.dim;
    PointCloud out = base;
    if (pre_norms) pre_norms->assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* b = base.row(i);
        double* x = out.row(i);
        std::vector<double> u(d, 0.0);
        for (std::size_t r = 0; r < d; ++r) u[r] = kernels::dot(w.row(r), b, d);
        const double nu = std::sqrt(kernels::sqnorm(u.data(), d));
        if (nu <= kZeroVectorEps)
            throw ZeroVectorError("linear map collapsed a row to zero");
        if (pre_norms) (*pre_norms)[i] = nu;
        for (std::size_t r = 0; r < d; ++r) x[r] = u[r] / nu;
    }
    return out;
}

// Chain dL/dx (normalized rows) back to the map: dL/dW += J^T per row.
void linear_map_grad(const PointCloud& base, const PointCloud& current,
                     const std::vector<double>& pre_norms, const Matrix& grad_x, Matrix& grad_w) {
    const std::size_t n = base.n, d = base.dim;
    std::vector<double> gu(d);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = current.row(i);
        const double* gx = grad_x.row(i);
        const double xg = kernels::dot(x, gx, d);
        // dL/du = (gx - (x.gx) x) / |u|
        for (std::size_t r = 0; r < d; ++r) gu[r] = (gx[r] - xg * x[r]) / pre_norms[i];
        const double* b = base.row(i);
        for (std::size_t r = 0; r < d; ++r)
            if (gu[r] != 0.0) kernels::axpy(gu[r], b, grad_w.row(r), d);
    }
}

AgreementMetrics compute_metrics(const PointCloud& mi, const PointCloud& mj,
                                 const PairingMap& pairing, MetricKind metric) {
    AgreementMetrics m;
    m.mst_overlap = mst_overlap(mi, mj, pairing, metric);
    m.retrieval_r1 = retrieval_recall(mi, mj, pairing, 1);
    m.retrieval_r5 = retrieval_recall(mi, mj, pairing, 5);
    return m;
}

StepSummary summarize(const LossReport& rep) {
    return {rep.loss_total, rep.loss_contrastive, rep.loss_0death, rep.loss_1birth,
            rep.skipped_edges};
}

} // namespace

TrainResult train(const PointCloud& mi_in, const PointCloud& mj_in, const PairingMap& pairing,
                  const TrainConfig& cfg) {
    cfg.validate();

    TrainResult res;
    res.labeled = labeled_subset(mi_in.n, cfg.labeled_fraction, cfg.seed);

    const std::size_t d = mi_in.dim;
    PointCloud base_i = mi_in, base_j = mj_in;
    Matrix wi, wj;
    PointCloud cur_i, cur_j;
    std::vector<double> pre_i, pre_j;

    if (cfg.optimize == OptimizeMode::LinearMap) {
        wi = Matrix(d, d);
        wj = Matrix(d, d);
        for (std::size_t r = 0; r < d; ++r) {
            wi.at(r, r) = 1.0;
            wj.at(r, r) = 1.0;
        }
        cur_i = apply_linear_map(base_i, wi, &pre_i);
        cur_j = apply_linear_map(base_j, wj, &pre_j);
    } else {
        cur_i = renormalized(mi_in);
        cur_j = renormalized(mj_in);
    }

    res.start = compute_metrics(cur_i, cur_j, pairing, cfg.align.metric);

    Matrix vel_i(cfg.optimize == OptimizeMode::LinearMap ? d : cur_i.n, d);
    Matrix vel_j(cfg.optimize == OptimizeMode::LinearMap ? d : cur_j.n, d);

    for (int step = 0; step <= cfg.steps; ++step) {
        LossReport rep = combined_objective(cur_i, cur_j, pairing, cfg);
        if (!std::isfinite(rep.loss_total))
            throw NonFiniteLossError("loss diverged at step " + std::to_string(step), step);
        res.loss_history.push_back(summarize(rep));
        if (step == cfg.steps) break;

        if (cfg.optimize == OptimizeMode::FreePoints) {
            for (std::size_t k = 0; k < vel_i.v.size(); ++k)
                vel_i.v[k] = cfg.momentum * vel_i.v[k] - cfg.learning_rate * rep.grad_i.v[k];
            for (std::size_t k = 0; k < vel_j.v.size(); ++k)
                vel_j.v[k] = cfg.momentum * vel_j.v[k] - cfg.learning_rate * rep.grad_j.v[k];
            for (std::size_t k = 0; k < cur_i.xs.size(); ++k) cur_i.xs[k] += vel_i.v[k];
            for (std::size_t k = 0; k < cur_j.xs.size(); ++k) cur_j.xs[k] += vel_j.v[k];
            cur_i = renormalized(cur_i);
            cur_j = renormalized(cur_j);
        } else {
            Matrix gwi(d, d), gwj(d, d);
            linear_map_grad(base_i, cur_i, pre_i, rep.grad_i, gwi);
            linear_map_grad(base_j, cur_j, pre_j, rep.grad_j, gwj);
            for (std::size_t k = 0; k < wi.v.size(); ++k) {
                vel_i.v[k] = cfg.momentum * vel_i.v[k] - cfg.learning_rate * gwi.v[k];
                wi.v[k] += vel_i.v[k];
            }
            for (std::size_t k = 0; k < wj.v.size(); ++k) {
                vel_j.v[k] = cfg.momentum * vel_j.v[k] - cfg.learning_rate * gwj.v[k];
                wj.v[k] += vel_j.v[k];
            }
            cur_i = apply_linear_map(base_i, wi, &pre_i);
            cur_j = apply_linear_map(base_j, wj, &pre_j);
        }
    }

    res.end = compute_metrics(cur_i, cur_j, pairing, cfg.align.metric);
    res.final_mi = std::move(cur_i);
    res.final_mj = std::move(cur_j);
    return res;
}

double mst_overlap(const PointCloud& mi, const PointCloud& mj, const PairingMap& pairing,
                   MetricKind metric) {
    mi.validate();
    mj.validate();
    if (pairing.forward.size() != mi.n || pairing.backward.size() != mj.n ||
        !pairing.complete())
        throw PairingIncompleteError("mst_overlap needs a complete pairing");

    const auto mst_i = compute_mst(pairwise_distances(mi, metric));
    const auto mst_j = compute_mst(pairwise_distances(mj, metric));

    std::set<std::pair<int, int>> set_i, set_j;
    for (const Edge& e : mst_i) set_i.insert({std::min(e.a, e.b), std::max(e.a, e.b)});
    for (const Edge& e : mst_j) {
        const int a = pairing.backward[e.a];
        const int b = pairing.backward[e.b];
        set_j.insert({std::min(a, b), std::max(a, b)});
    }
    std::size_t inter = 0;
    for (const auto& e : set_i) inter += set_j.count(e);
    const std::size_t uni = set_i.size() + set_j.size() - inter;
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

double retrieval_recall(const PointCloud& mi, const PointCloud& mj, const PairingMap& pairing,
                        std::size_t k) {
    mi.validate();
    mj.validate();
    if (pairing.forward.size() != mi.n)
        throw PairingIncompleteError("pairing map size does not match the clouds");
    if (k == 0) return 0.0;

    std::size_t covered = 0, hits = 0;
    std::vector<std::pair<double, int>> sims(mj.n);
    for (std::size_t i = 0; i < mi.n; ++i) {
        const int partner = pairing.forward[i];
        if (partner < 0) continue;
        ++covered;
        for (std::size_t j = 0; j < mj.n; ++j)
            sims[j] = {cosine_similarity(mi.point(i), mj.point(j)), static_cast<int>(j)};
        // descending similarity, ties broken by ascending index
        std::sort(sims.begin(), sims.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        const std::size_t top = std::min(k, sims.size());
        for (std::size_t r = 0; r < top; ++r)
            if (sims[r].second == partner) {
                ++hits;
                break;
            }
    }
    return covered == 0 ? 0.0 : double(hits) / double(covered);
}

} // namespace topoalign
