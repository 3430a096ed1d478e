#pragma once

#include <cstdint>
#include <vector>

#include "topoalign/alignment.hpp"
#include "topoalign/geometry.hpp"

// Desk-scale gradient-descent loop for the combined contrastive + topology
// objective on paired synthetic clouds, plus the cross-modal agreement
// metrics used to evaluate it.

namespace topoalign {

enum class OptimizeMode { FreePoints, LinearMap };

const char* optimize_mode_name(OptimizeMode m);
OptimizeMode parse_optimize_mode(const std::string& name);

struct TrainConfig {
    int steps = 0;
    double learning_rate = 0.02;
    AlignConfig align{};
    double tau = 1.0;
    double labeled_fraction = 1.0; // fraction of pairs whose pairing is used
    std::uint64_t seed = 0;
    OptimizeMode optimize = OptimizeMode::FreePoints;
    double momentum = 0.0; // fixed-moment momentum; 0 = plain gradient descent

    void validate() const;
};

struct StepSummary {
    double loss_total = 0.0;
    double loss_contrastive = 0.0;
    double loss_0death = 0.0;
    double loss_1birth = 0.0;
    std::size_t skipped_edges = 0;
};

struct AgreementMetrics {
    double mst_overlap = 0.0;
    double retrieval_r1 = 0.0;
    double retrieval_r5 = 0.0;
};

struct TrainResult {
    std::vector<StepSummary> loss_history; // length steps + 1 (includes initial state)
    PointCloud final_mi;
    PointCloud final_mj;
    AgreementMetrics start;
    AgreementMetrics end;
    std::vector<int> labeled; // indices whose pairing was used
};

// Deterministic subset of size max(1, round(fraction * n)), drawn by a
// seeded shuffle and returned sorted.
std::vector<int> labeled_subset(std::size_t n, double fraction, std::uint64_t seed);

// Contrastive loss over the labeled pairs plus (c/2)(L0 + c2 L1) topology
// over the full batch, with the pairing restricted to labeled points for
// the pairing-dependent terms; gradients summed. With c = 0 (or variant
// none) this equals the contrastive loss exactly.
LossReport combined_objective(const PointCloud& mi, const PointCloud& mj,
                              const PairingMap& pairing, const TrainConfig& cfg);

// Plain gradient descent on the combined objective. free-points mode takes
// the (re-normalized) points as parameters; linear-map mode learns one d x d
// matrix per modality applied to the fixed inputs, rows re-normalized.
// Deterministic given the config. Throws NonFiniteLossError (with the step
// index) if the loss stops being finite.
TrainResult train(const PointCloud& mi, const PointCloud& mj, const PairingMap& pairing,
                  const TrainConfig& cfg);

// Jaccard index between the MST edge set of mi and the pairing-transported
// MST edge set of mj. Requires a complete pairing.
double mst_overlap(const PointCloud& mi, const PointCloud& mj, const PairingMap& pairing,
                   MetricKind metric = MetricKind::Euclidean);

// Fraction of covered points in mi whose partner is among the k most
// cosine-similar points of mj; ties broken by index.
double retrieval_recall(const PointCloud& mi, const PointCloud& mj, const PairingMap& pairing,
                        std::size_t k);

} // namespace topoalign
