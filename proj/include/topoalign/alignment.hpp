#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "topoalign/diagrams.hpp"
#include "topoalign/filtration.hpp"
#include "topoalign/geometry.hpp"

// The directional topology-alignment objective and its alternatives. Each
// loss selects topologically salient edges per cloud (H0-death = MST,
// H1-birth = cycle-closing) and penalizes cross-modal disagreement of the
// selected structure, averaged over both alignment directions.

namespace topoalign {

enum class LossVariant { Toma, Dist, Pd, Pi, None };

const char* variant_name(LossVariant v);
LossVariant parse_variant(const std::string& name);

struct AlignConfig {
    double c = 0.5;   // overall topology coefficient
    double c2 = 1.0;  // relative H1-birth weight
    bool use_abs = true;
    LossVariant variant = LossVariant::Toma;
    double skip_eps = 1e-12;
    PhOptions ph_opts{};
    MetricKind metric = MetricKind::Euclidean;
    // Diagram-space variants (pd / pi):
    double wasserstein_q = 1.0;
    std::size_t pi_resolution = kDefaultPiResolution;
    std::optional<double> pi_sigma; // default: 0.1 x max persistence over the union
};

// Per-edge directional-consistency record kept for analysis/export.
struct EdgeTerm {
    Edge edge;
    int dim = 0;             // 0 = H0-death, 1 = H1-birth
    bool source_is_i = true; // direction i->j vs j->i
    double value = 0.0;      // T for toma, |len difference| for dist
};

// Effective parameters of a pd/pi evaluation, recorded for reproducibility.
struct DiagramLossParams {
    double h1_death_substitute_i = 0.0; // cloud diameter used as H1 death
    double h1_death_substitute_j = 0.0;
    double sigma_dim0 = 0.0; // pi only
    double sigma_dim1 = 0.0;
    PiBounds bounds_dim0{};
    PiBounds bounds_dim1{};
};

struct LossReport {
    double loss_0death = 0.0;
    double loss_1birth = 0.0;
    double loss_contrastive = 0.0;
    double loss_total = 0.0;
    std::size_t skipped_edges = 0;
    AlignConfig config{};
    double tau = 1.0;
    std::optional<DiagramLossParams> diagram_params;
    std::vector<EdgeTerm> edge_terms;
    bool has_grads = false;
    Matrix grad_i; // dL/dMi, n_i x d
    Matrix grad_j; // dL/dMj, n_j x d
};

// Cosine similarity between the source edge direction and the
// pairing-mapped edge direction in the target cloud. Throws
// PairingIncompleteError if an endpoint is uncovered, DegenerateEdgeError
// if either difference vector has norm <= skip_eps.
double directional_consistency(const Edge& edge, const PointCloud& source,
                               const PointCloud& target, const PairingMap& pairing,
                               double skip_eps = 1e-12);

// Bidirectional directional-alignment loss over H0-death and H1-birth
// edges: for each direction, mean over selected edges of 1 - |T| (1 - T
// when use_abs is off). loss_total = (c/2) (L0 + c2 L1). Requires a
// complete pairing.
LossReport toma_loss(const PointCloud& mi, const PointCloud& mj, const PairingMap& pairing,
                     const AlignConfig& cfg);

// Analytic gradient of toma_loss's loss_total with respect to both clouds,
// with the PH edge selection held fixed (valid away from weight ties).
std::pair<Matrix, Matrix> toma_grad(const PointCloud& mi, const PointCloud& mj,
                                    const PairingMap& pairing, const AlignConfig& cfg);

// Same edge selection and averaging with the length-difference integrand
// | |u| - |v| | instead of 1 - |T|.
LossReport dist_loss(const PointCloud& mi, const PointCloud& mj, const PairingMap& pairing,
                     const AlignConfig& cfg);

// Wasserstein matching of the two clouds' persistence diagrams per
// dimension (H1 deaths substituted by the cloud diameter). Ignores the
// pairing by construction.
LossReport pd_loss(const PointCloud& mi, const PointCloud& mj, const AlignConfig& cfg);

// L2 matching of persistence images over shared bounds, per dimension.
// Ignores the pairing by construction.
LossReport pi_loss(const PointCloud& mi, const PointCloud& mj, const AlignConfig& cfg);

// Symmetric InfoNCE over cosine similarities at temperature tau, averaged
// over both softmax directions; analytic gradients included.
LossReport contrastive_loss(const PointCloud& mi, const PointCloud& mj, double tau = 1.0);

// Router over cfg.variant used by the trainer and CLI. want_grads requests
// analytic gradients; allow_partial permits pairings that cover only a
// subset of indices (uncovered edges are skipped and counted).
LossReport topology_loss(const PointCloud& mi, const PointCloud& mj, const PairingMap& pairing,
                         const AlignConfig& cfg, bool want_grads = false,
                         bool allow_partial = false);

} // namespace topoalign
