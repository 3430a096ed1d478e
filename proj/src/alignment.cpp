#include "topoalign/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "topoalign/errors.hpp"
#include "topoalign/kernels.hpp"

namespace topoalign {

const char* variant_name(LossVariant v) {
    switch (v) {
    case LossVariant::Toma: return "toma";
    case LossVariant::Dist: return "dist";
    case LossVariant::Pd: return "pd";
    case LossVariant::Pi: return "pi";
    case LossVariant::None: return "none";
    }
    return "none";
}

LossVariant parse_variant(const std::string& name) {
    if (name == "toma") return LossVariant::Toma;
    if (name == "dist") return LossVariant::Dist;
    if (name == "pd") return LossVariant::Pd;
    if (name == "pi") return LossVariant::Pi;
    if (name == "none") return LossVariant::None;
    throw Error("unknown loss variant '" + name + "'");
}

namespace {

void check_pairing_shape(const PointCloud& mi, const PointCloud& mj, const PairingMap& pairing) {
    if (pairing.forward.size() != mi.n || pairing.backward.size() != mj.n)
        throw PairingIncompleteError("pairing map size does not match the clouds");
}

// Scalar data retained per evaluated edge so the gradient pass does not
// repeat the reductions.
struct EdgeEval {
    int a, b;   // indices in the source cloud
    int p, q;   // mapped indices in the target cloud
    int dim;
    double w;   // filtration weight of the source edge
    double t;   // cosine T (toma) or nu - nv (dist)
    double nu, nv;
};

struct DirectionEval {
    std::vector<EdgeEval> evals;
    std::size_t count0 = 0, count1 = 0; // evaluated edges per dim
    double sum0 = 0.0, sum1 = 0.0;      // per-edge loss sums per dim
    std::size_t skipped = 0;
};

// Evaluates one direction of the edge-alignment loss: edges selected on
// `source`, compared against their pairing image in `target`.
DirectionEval eval_direction(const EdgeDecomposition& decomp, const PointCloud& source,
                             const PointCloud& target, const std::vector<int>& fwd,
                             const AlignConfig& cfg, bool dist_variant, bool allow_partial) {
    DirectionEval out;
    const double eps2 = cfg.skip_eps * cfg.skip_eps;

    auto run = [&](const std::vector<Edge>& edges, int dim) {
        for (const Edge& e : edges) {
            const int p = fwd[e.a];
            const int q = fwd[e.b];
            if (p < 0 || q < 0) {
                if (!allow_partial)
                    throw PairingIncompleteError("pairing does not cover edge endpoints");
                ++out.skipped;
                continue;
            }
            double uv, uu, vv;
            kernels::edge_dots(source.row(e.a), source.row(e.b), target.row(p), target.row(q),
                               source.dim, uv, uu, vv);
            if (uu <= eps2 || vv <= eps2) {
                ++out.skipped;
                continue;
            }
            const double nu = std::sqrt(uu);
            const double nv = std::sqrt(vv);
            double t, term;
            if (dist_variant) {
                t = nu - nv;
                term = std::fabs(t);
            } else {
                t = uv / (nu * nv);
                if (t > 1.0) t = 1.0;
                if (t < -1.0) t = -1.0;
                term = cfg.use_abs ? 1.0 - std::fabs(t) : 1.0 - t;
            }
            if (dim == 0) {
                ++out.count0;
                out.sum0 += term;
            } else {
                ++out.count1;
                out.sum1 += term;
            }
            out.evals.push_back({e.a, e.b, p, q, dim, e.weight, t, nu, nv});
        }
    };
    run(decomp.h0_death_edges, 0);
    run(decomp.h1_birth_edges, 1);
    return out;
}

// Gradient of one direction, with the edge selection and per-dim counts
// frozen. weight0/weight1 already include the 1/K means and the (c/2),
// c2 prefactors.
void grad_direction(const DirectionEval& dir, const PointCloud& source, const PointCloud& target,
                    const AlignConfig& cfg, bool dist_variant, double weight0, double weight1,
                    Matrix& grad_source, Matrix& grad_target, std::vector<double>& tmp) {
    const std::size_t d = source.dim;
    tmp.resize(d);
    for (const EdgeEval& ev : dir.evals) {
        const double w = ev.dim == 0 ? weight0 : weight1;
        if (w == 0.0) continue;
        const double* xa = source.row(ev.a);
        const double* xb = source.row(ev.b);
        const double* yp = target.row(ev.p);
        const double* yq = target.row(ev.q);
        if (dist_variant) {
            // d|nu - nv|: s * u/nu on the source side, -s * v/nv on the target
            const double s = ev.t > 0.0 ? 1.0 : (ev.t < 0.0 ? -1.0 : 0.0);
            if (s == 0.0) continue;
            kernels::combine_diffs(w * s / ev.nu, xa, xb, 0.0, yp, yq, tmp.data(), d);
            kernels::axpy(1.0, tmp.data(), grad_source.row(ev.a), d);
            kernels::axpy(-1.0, tmp.data(), grad_source.row(ev.b), d);
            kernels::combine_diffs(0.0, xa, xb, -w * s / ev.nv, yp, yq, tmp.data(), d);
            kernels::axpy(1.0, tmp.data(), grad_target.row(ev.p), d);
            kernels::axpy(-1.0, tmp.data(), grad_target.row(ev.q), d);
        } else {
            // d(1 - |T|)/dT = -sign(T); d(1 - T)/dT = -1
            double dldt;
            if (cfg.use_abs) {
                if (ev.t == 0.0) continue; // subgradient 0 at the kink
                dldt = ev.t > 0.0 ? -1.0 : 1.0;
            } else {
                dldt = -1.0;
            }
            const double g = w * dldt;
            const double inv_nunv = 1.0 / (ev.nu * ev.nv);
            // dT/du = v/(nu nv) - T u/nu^2 ; dT/dv = u/(nu nv) - T v/nv^2
            kernels::combine_diffs(g * (-ev.t / (ev.nu * ev.nu)), xa, xb, g * inv_nunv, yp, yq,
                                   tmp.data(), d);
            kernels::axpy(1.0, tmp.data(), grad_source.row(ev.a), d);
            kernels::axpy(-1.0, tmp.data(), grad_source.row(ev.b), d);
            kernels::combine_diffs(g * inv_nunv, xa, xb, g * (-ev.t / (ev.nv * ev.nv)), yp, yq,
                                   tmp.data(), d);
            kernels::axpy(1.0, tmp.data(), grad_target.row(ev.p), d);
            kernels::axpy(-1.0, tmp.data(), grad_target.row(ev.q), d);
        }
    }
}

LossReport edge_alignment_loss(const PointCloud& mi, const PointCloud& mj,
                               const PairingMap& pairing, const AlignConfig& cfg,
                               bool dist_variant, bool want_grads, bool allow_partial) {
    mi.validate();
    mj.validate();
    if (mi.dim != mj.dim) throw DimMismatchError("clouds must share the embedding dimension");
    check_pairing_shape(mi, mj, pairing);
    if (!allow_partial && !pairing.complete())
        throw PairingIncompleteError("pairing must cover both clouds");

    LossReport rep;
    rep.config = cfg;

    const auto dist_i = pairwise_distances(mi, cfg.metric);
    const auto dist_j = pairwise_distances(mj, cfg.metric);
    const auto decomp_i = compute_ph(dist_i, cfg.ph_opts).second;
    const auto decomp_j = compute_ph(dist_j, cfg.ph_opts).second;

    auto dir_ij =
        eval_direction(decomp_i, mi, mj, pairing.forward, cfg, dist_variant, allow_partial);
    auto dir_ji =
        eval_direction(decomp_j, mj, mi, pairing.backward, cfg, dist_variant, allow_partial);

    auto mean = [](double sum, std::size_t k) { return k == 0 ? 0.0 : sum / double(k); };
    rep.loss_0death = mean(dir_ij.sum0, dir_ij.count0) + mean(dir_ji.sum0, dir_ji.count0);
    rep.loss_1birth = mean(dir_ij.sum1, dir_ij.count1) + mean(dir_ji.sum1, dir_ji.count1);
    rep.skipped_edges = dir_ij.skipped + dir_ji.skipped;
    rep.loss_total = 0.5 * cfg.c * (rep.loss_0death + cfg.c2 * rep.loss_1birth);

    auto record_terms = [&](const DirectionEval& dir, bool source_is_i) {
        for (const EdgeEval& ev : dir.evals)
            rep.edge_terms.push_back({Edge{ev.a, ev.b, ev.w}, ev.dim, source_is_i, ev.t});
    };
    record_terms(dir_ij, true);
    record_terms(dir_ji, false);

    if (want_grads) {
        rep.has_grads = true;
        rep.grad_i = Matrix(mi.n, mi.dim);
        rep.grad_j = Matrix(mj.n, mj.dim);
        std::vector<double> tmp;
        const double pre0 = 0.5 * cfg.c;
        const double pre1 = 0.5 * cfg.c * cfg.c2;
        grad_direction(dir_ij, mi, mj, cfg, dist_variant,
                       dir_ij.count0 ? pre0 / double(dir_ij.count0) : 0.0,
                       dir_ij.count1 ? pre1 / double(dir_ij.count1) : 0.0, rep.grad_i, rep.grad_j,
                       tmp);
        grad_direction(dir_ji, mj, mi, cfg, dist_variant,
                       dir_ji.count0 ? pre0 / double(dir_ji.count0) : 0.0,
                       dir_ji.count1 ? pre1 / double(dir_ji.count1) : 0.0, rep.grad_j, rep.grad_i,
                       tmp);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Diagram-space variants (pd / pi)

struct CloudTopology {
    DistanceMatrix dist;
    EdgeDecomposition decomp;
    PersistenceDiagram pd0;  // (0, w) per H0-death edge
    PersistenceDiagram pd1;  // (w, diameter) per H1-birth edge
    double diameter = 0.0;
    Edge diameter_edge{};
};

CloudTopology cloud_topology(const PointCloud& cloud, const AlignConfig& cfg) {
    CloudTopology t;
    t.dist = pairwise_distances(cloud, cfg.metric);
    t.decomp = compute_ph(t.dist, cfg.ph_opts).second;

    const int n = static_cast<int>(t.dist.n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (t.dist.at(i, j) > t.diameter) {
                t.diameter = t.dist.at(i, j);
                t.diameter_edge = {i, j, t.diameter};
            }

    t.pd0.dim = 0;
    for (const Edge& e : t.decomp.h0_death_edges) t.pd0.points.push_back({0.0, e.weight});
    t.pd1.dim = 1;
    for (const Edge& e : t.decomp.h1_birth_edges) t.pd1.points.push_back({e.weight, t.diameter});
    return t;
}

// coeff * d(edge weight)/d(points) accumulated into grad.
void edge_weight_grad(const PointCloud& cloud, MetricKind metric, const Edge& e, double coeff,
                      Matrix& grad) {
    const std::size_t d = cloud.dim;
    const double* xa = cloud.row(e.a);
    const double* xb = cloud.row(e.b);
    if (metric == MetricKind::Euclidean) {
        const double w = std::sqrt(kernels::sqdist(xa, xb, d));
        if (w <= 1e-300) return;
        const double s = coeff / w;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = xa[k] - xb[k];
            grad.at(e.a, k) += s * diff;
            grad.at(e.b, k) -= s * diff;
        }
    } else {
        const double na2 = kernels::sqnorm(xa, d);
        const double nb2 = kernels::sqnorm(xb, d);
        const double na = std::sqrt(na2), nb = std::sqrt(nb2);
        if (na <= kZeroVectorEps || nb <= kZeroVectorEps) return;
        const double cos = kernels::dot(xa, xb, d) / (na * nb);
        // w = 1 - cos: dw/dxa = cos/na^2 * xa - xb/(na nb)
        for (std::size_t k = 0; k < d; ++k) {
            grad.at(e.a, k) += coeff * (cos / na2 * xa[k] - xb[k] / (na * nb));
            grad.at(e.b, k) += coeff * (cos / nb2 * xb[k] - xa[k] / (na * nb));
        }
    }
}

// Distributes d(loss)/d(birth_k), d(loss)/d(death_k) of one diagram onto
// the points, under the frozen edge attribution.
void diagram_value_grads(const PointCloud& cloud, const AlignConfig& cfg, const CloudTopology& t,
                         int dim, const std::vector<double>& dbirth,
                         const std::vector<double>& ddeath, Matrix& grad) {
    if (dim == 0) {
        // births constant 0; deaths are the MST edge weights
        for (std::size_t k = 0; k < t.decomp.h0_death_edges.size(); ++k)
            if (ddeath[k] != 0.0)
                edge_weight_grad(cloud, cfg.metric, t.decomp.h0_death_edges[k], ddeath[k], grad);
    } else {
        // births are the H1 edge weights; all deaths share the diameter edge
        double diam_coeff = 0.0;
        for (std::size_t k = 0; k < t.decomp.h1_birth_edges.size(); ++k) {
            if (dbirth[k] != 0.0)
                edge_weight_grad(cloud, cfg.metric, t.decomp.h1_birth_edges[k], dbirth[k], grad);
            diam_coeff += ddeath[k];
        }
        if (diam_coeff != 0.0)
            edge_weight_grad(cloud, cfg.metric, t.diameter_edge, diam_coeff, grad);
    }
}

// d(W_q)/d(birth/death values) of both diagrams under the frozen optimal
// matching. Outputs are accumulated with the given prefactor.
void wasserstein_value_grads(const PersistenceDiagram& d1, const PersistenceDiagram& d2, double q,
                             double prefactor, std::vector<double>& db1, std::vector<double>& dd1,
                             std::vector<double>& db2, std::vector<double>& dd2) {
    const auto res = wasserstein_matching(d1, d2, q);
    if (res.value <= 0.0) return;
    db1.assign(d1.points.size(), 0.0);
    dd1.assign(d1.points.size(), 0.0);
    db2.assign(d2.points.size(), 0.0);
    dd2.assign(d2.points.size(), 0.0);

    for (const auto& m : res.matches) {
        double cost, dmul;
        if (m.from >= 0 && m.to >= 0) {
            const auto& p1 = d1.points[m.from];
            const auto& p2 = d2.points[m.to];
            const double bdiff = p1.first - p2.first;
            const double ddiff = p1.second - p2.second;
            cost = std::max(std::fabs(bdiff), std::fabs(ddiff));
            if (cost == 0.0) continue;
            dmul = prefactor * (q == 1.0 ? 1.0 : std::pow(cost / res.value, q - 1.0));
            if (std::fabs(bdiff) >= std::fabs(ddiff)) {
                const double s = bdiff > 0.0 ? 1.0 : -1.0;
                db1[m.from] += dmul * s;
                db2[m.to] -= dmul * s;
            } else {
                const double s = ddiff > 0.0 ? 1.0 : -1.0;
                dd1[m.from] += dmul * s;
                dd2[m.to] -= dmul * s;
            }
        } else if (m.from >= 0) {
            const auto& p1 = d1.points[m.from];
            cost = (p1.second - p1.first) / 2.0;
            if (cost <= 0.0) continue;
            dmul = prefactor * (q == 1.0 ? 1.0 : std::pow(cost / res.value, q - 1.0));
            dd1[m.from] += dmul * 0.5;
            db1[m.from] -= dmul * 0.5;
        } else if (m.to >= 0) {
            const auto& p2 = d2.points[m.to];
            cost = (p2.second - p2.first) / 2.0;
            if (cost <= 0.0) continue;
            dmul = prefactor * (q == 1.0 ? 1.0 : std::pow(cost / res.value, q - 1.0));
            dd2[m.to] += dmul * 0.5;
            db2[m.to] -= dmul * 0.5;
        }
    }
}

LossReport diagram_loss(const PointCloud& mi, const PointCloud& mj, const AlignConfig& cfg,
                        bool image_variant, bool want_grads) {
    mi.validate();
    mj.validate();

    LossReport rep;
    rep.config = cfg;

    const auto ti = cloud_topology(mi, cfg);
    const auto tj = cloud_topology(mj, cfg);

    DiagramLossParams params;
    params.h1_death_substitute_i = ti.diameter;
    params.h1_death_substitute_j = tj.diameter;

    if (want_grads) {
        rep.has_grads = true;
        rep.grad_i = Matrix(mi.n, mi.dim);
        rep.grad_j = Matrix(mj.n, mj.dim);
    }
    const double pre0 = 0.5 * cfg.c;
    const double pre1 = 0.5 * cfg.c * cfg.c2;

    if (!image_variant) {
        rep.loss_0death = wasserstein(ti.pd0, tj.pd0, cfg.wasserstein_q);
        rep.loss_1birth = wasserstein(ti.pd1, tj.pd1, cfg.wasserstein_q);
        if (want_grads) {
            std::vector<double> db1, dd1, db2, dd2;
            wasserstein_value_grads(ti.pd0, tj.pd0, cfg.wasserstein_q, pre0, db1, dd1, db2, dd2);
            diagram_value_grads(mi, cfg, ti, 0, db1, dd1, rep.grad_i);
            diagram_value_grads(mj, cfg, tj, 0, db2, dd2, rep.grad_j);
            wasserstein_value_grads(ti.pd1, tj.pd1, cfg.wasserstein_q, pre1, db1, dd1, db2, dd2);
            diagram_value_grads(mi, cfg, ti, 1, db1, dd1, rep.grad_i);
            diagram_value_grads(mj, cfg, tj, 1, db2, dd2, rep.grad_j);
        }
    } else {
        const auto bounds0 = auto_pi_bounds({&ti.pd0, &tj.pd0});
        const auto bounds1 = auto_pi_bounds({&ti.pd1, &tj.pd1});
        auto union_sigma = [&](const PersistenceDiagram& a, const PersistenceDiagram& b) {
            if (cfg.pi_sigma) return *cfg.pi_sigma;
            return std::max(default_pi_sigma(a), default_pi_sigma(b));
        };
        const double sigma0 = union_sigma(ti.pd0, tj.pd0);
        const double sigma1 = union_sigma(ti.pd1, tj.pd1);
        params.sigma_dim0 = sigma0;
        params.sigma_dim1 = sigma1;
        params.bounds_dim0 = bounds0;
        params.bounds_dim1 = bounds1;

        const auto img_i0 = persistence_image(ti.pd0, cfg.pi_resolution, sigma0, bounds0);
        const auto img_j0 = persistence_image(tj.pd0, cfg.pi_resolution, sigma0, bounds0);
        const auto img_i1 = persistence_image(ti.pd1, cfg.pi_resolution, sigma1, bounds1);
        const auto img_j1 = persistence_image(tj.pd1, cfg.pi_resolution, sigma1, bounds1);
        rep.loss_0death = image_l2(img_i0, img_j0);
        rep.loss_1birth = image_l2(img_i1, img_j1);

        if (want_grads) {
            // d||A - B|| / d(values of each diagram), with bounds and sigma
            // frozen at their current values.
            auto accumulate = [&](const PersistenceDiagram& diag, const PersistenceImage& own,
                                  const PersistenceImage& other, double l2, double prefactor,
                                  std::vector<double>& dbirth, std::vector<double>& ddeath) {
                dbirth.assign(diag.points.size(), 0.0);
                ddeath.assign(diag.points.size(), 0.0);
                if (l2 <= 0.0) return;
                const std::size_t res = own.resolution;
                const auto [b0, b1, p0, p1] = own.bounds;
                const double bstep = (b1 - b0) / double(res);
                const double pstep = (p1 - p0) / double(res);
                const double sig = own.sigma;
                const double inv2s2 = 1.0 / (2.0 * sig * sig);
                const double invs2 = 1.0 / (sig * sig);
                const double norm = 1.0 / (2.0 * std::numbers::pi * sig * sig);
                for (std::size_t k = 0; k < diag.points.size(); ++k) {
                    const double birth = diag.points[k].first;
                    const double pers = diag.points[k].second - birth;
                    double db = 0.0, dp = 0.0;
                    for (std::size_t ib = 0; ib < res; ++ib) {
                        const double cb = b0 + (double(ib) + 0.5) * bstep;
                        const double ddb = cb - birth;
                        for (std::size_t ip = 0; ip < res; ++ip) {
                            const double cp = p0 + (double(ip) + 0.5) * pstep;
                            const double ddp = cp - pers;
                            const double g =
                                norm * std::exp(-(ddb * ddb + ddp * ddp) * inv2s2);
                            const double dcell =
                                (own.grid[ib * res + ip] - other.grid[ib * res + ip]) / l2;
                            db += dcell * pers * g * ddb * invs2;
                            dp += dcell * (g + pers * g * ddp * invs2);
                        }
                    }
                    // (b, p) = (birth, death - birth)
                    dbirth[k] += prefactor * (db - dp);
                    ddeath[k] += prefactor * dp;
                }
            };
            std::vector<double> db, dd;
            accumulate(ti.pd0, img_i0, img_j0, rep.loss_0death, pre0, db, dd);
            diagram_value_grads(mi, cfg, ti, 0, db, dd, rep.grad_i);
            accumulate(tj.pd0, img_j0, img_i0, rep.loss_0death, pre0, db, dd);
            diagram_value_grads(mj, cfg, tj, 0, db, dd, rep.grad_j);
            accumulate(ti.pd1, img_i1, img_j1, rep.loss_1birth, pre1, db, dd);
            diagram_value_grads(mi, cfg, ti, 1, db, dd, rep.grad_i);
            accumulate(tj.pd1, img_j1, img_i1, rep.loss_1birth, pre1, db, dd);
            diagram_value_grads(mj, cfg, tj, 1, db, dd, rep.grad_j);
        }
    }

    rep.diagram_params = params;
    rep.loss_total = pre0 * rep.loss_0death + pre1 * rep.loss_1birth;
    return rep;
}

} // namespace

double directional_consistency(const Edge& edge, const PointCloud& source,
                               const PointCloud& target, const PairingMap& pairing,
                               double skip_eps) {
    if (!pairing.covers(edge.a) || !pairing.covers(edge.b))
        throw PairingIncompleteError("pairing does not cover edge endpoints");
    const int p = pairing.forward[edge.a];
    const int q = pairing.forward[edge.b];
    double uv, uu, vv;
    kernels::edge_dots(source.row(edge.a), source.row(edge.b), target.row(p), target.row(q),
                       source.dim, uv, uu, vv);
    if (uu <= skip_eps * skip_eps || vv <= skip_eps * skip_eps)
        throw DegenerateEdgeError("edge difference vector is numerically zero");
    double t = uv / std::sqrt(uu * vv);
    if (t > 1.0) t = 1.0;
    if (t < -1.0) t = -1.0;
    return t;
}

LossReport toma_loss(const PointCloud& mi, const PointCloud& mj, const PairingMap& pairing,
                     const AlignConfig& cfg) {
    AlignConfig c = cfg;
    c.variant = LossVariant::Toma;
    return edge_alignment_loss(mi, mj, pairing, c, false, false, false);
}

std::pair<Matrix, Matrix> toma_grad(const PointCloud& mi, const PointCloud& mj,
                                    const PairingMap& pairing, const AlignConfig& cfg) {
    AlignConfig c = cfg;
    c.variant = LossVariant::Toma;
    auto rep = edge_alignment_loss(mi, mj, pairing, c, false, true, false);
    return {std::move(rep.grad_i), std::move(rep.grad_j)};
}

LossReport dist_loss(const PointCloud& mi, const PointCloud& mj, const PairingMap& pairing,
                     const AlignConfig& cfg) {
    AlignConfig c = cfg;
    c.variant = LossVariant::Dist;
    return edge_alignment_loss(mi, mj, pairing, c, true, false, false);
}

LossReport pd_loss(const PointCloud& mi, const PointCloud& mj, const AlignConfig& cfg) {
    AlignConfig c = cfg;
    c.variant = LossVariant::Pd;
    return diagram_loss(mi, mj, c, false, false);
}

LossReport pi_loss(const PointCloud& mi, const PointCloud& mj, const AlignConfig& cfg) {
    AlignConfig c = cfg;
    c.variant = LossVariant::Pi;
    return diagram_loss(mi, mj, c, true, false);
}

LossReport contrastive_loss(const PointCloud& mi, const PointCloud& mj, double tau) {
    mi.validate();
    mj.validate();
    if (mi.n != mj.n) throw LengthMismatchError("contrastive loss needs equal batch sizes");
    if (mi.dim != mj.dim) throw DimMismatchError("clouds must share the embedding dimension");
    if (!(tau > 0.0)) throw Error("temperature must be positive");

    const std::size_t n = mi.n;
    const std::size_t d = mi.dim;

    std::vector<double> ni(n), nj(n);
    for (std::size_t i = 0; i < n; ++i) {
        ni[i] = std::sqrt(kernels::sqnorm(mi.row(i), d));
        nj[i] = std::sqrt(kernels::sqnorm(mj.row(i), d));
        if (ni[i] <= kZeroVectorEps || nj[i] <= kZeroVectorEps)
            throw ZeroVectorError("contrastive loss undefined for zero row");
    }

    // logits[i][j] = cos(mi_i, mj_j) / tau
    Matrix S(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            S.at(i, j) = kernels::dot(mi.row(i), mj.row(j), d) / (ni[i] * nj[j]);

    Matrix prow(n, n), pcol(n, n);
    double loss = 0.0;
    const double inv_tau = 1.0 / tau;
    for (std::size_t i = 0; i < n; ++i) {
        double m = -kInf;
        for (std::size_t j = 0; j < n; ++j) m = std::max(m, S.at(i, j) * inv_tau);
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j) z += std::exp(S.at(i, j) * inv_tau - m);
        const double lse = m + std::log(z);
        loss -= S.at(i, i) * inv_tau - lse;
        for (std::size_t j = 0; j < n; ++j)
            prow.at(i, j) = std::exp(S.at(i, j) * inv_tau - lse);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double m = -kInf;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, S.at(i, j) * inv_tau);
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) z += std::exp(S.at(i, j) * inv_tau - m);
        const double lse = m + std::log(z);
        loss -= S.at(j, j) * inv_tau - lse;
        for (std::size_t i = 0; i < n; ++i)
            pcol.at(i, j) = std::exp(S.at(i, j) * inv_tau - lse);
    }
    loss /= 2.0 * double(n);

    LossReport rep;
    rep.tau = tau;
    rep.loss_contrastive = loss;
    rep.loss_total = loss;
    rep.has_grads = true;
    rep.grad_i = Matrix(n, d);
    rep.grad_j = Matrix(n, d);

    // dL/dS[i][j], then through the cosine into the rows.
    const double scale = -1.0 / (2.0 * double(n) * tau);
    for (std::size_t i = 0; i < n; ++i) {
        double diag_coeff = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double g =
                scale * ((i == j ? 2.0 : 0.0) - prow.at(i, j) - pcol.at(i, j));
            if (g == 0.0) continue;
            kernels::axpy(g / (ni[i] * nj[j]), mj.row(j), rep.grad_i.row(i), d);
            diag_coeff += g * S.at(i, j);
        }
        kernels::axpy(-diag_coeff / (ni[i] * ni[i]), mi.row(i), rep.grad_i.row(i), d);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double diag_coeff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double g =
                scale * ((i == j ? 2.0 : 0.0) - prow.at(i, j) - pcol.at(i, j));
            if (g == 0.0) continue;
            kernels::axpy(g / (ni[i] * nj[j]), mi.row(i), rep.grad_j.row(j), d);
            diag_coeff += g * S.at(i, j);
        }
        kernels::axpy(-diag_coeff / (nj[j] * nj[j]), mj.row(j), rep.grad_j.row(j), d);
    }
    return rep;
}

LossReport topology_loss(const PointCloud& mi, const PointCloud& mj, const PairingMap& pairing,
                         const AlignConfig& cfg, bool want_grads, bool allow_partial) {
    switch (cfg.variant) {
    case LossVariant::Toma:
        return edge_alignment_loss(mi, mj, pairing, cfg, false, want_grads, allow_partial);
    case LossVariant::Dist:
        return edge_alignment_loss(mi, mj, pairing, cfg, true, want_grads, allow_partial);
    case LossVariant::Pd:
        return diagram_loss(mi, mj, cfg, false, want_grads);
    case LossVariant::Pi:
        return diagram_loss(mi, mj, cfg, true, want_grads);
    case LossVariant::None: {
        LossReport rep;
        rep.config = cfg;
        if (want_grads) {
            rep.has_grads = true;
            rep.grad_i = Matrix(mi.n, mi.dim);
            rep.grad_j = Matrix(mj.n, mj.dim);
        }
        return rep;
    }
    }
    throw Error("unreachable loss variant");
}

} // namespace topoalign
