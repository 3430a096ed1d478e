#include "topoalign/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "topoalign/errors.hpp"
#include "topoalign/rng.hpp"

namespace topoalign {

const char* structure_name(StructureKind s) {
    switch (s) {
    case StructureKind::Clusters: return "clusters";
    case StructureKind::Circle: return "circle";
    case StructureKind::TwoClustersPlusCycle: return "two-clusters-plus-cycle";
    }
    return "clusters";
}

StructureKind parse_structure(const std::string& name) {
    if (name == "clusters") return StructureKind::Clusters;
    if (name == "circle") return StructureKind::Circle;
    if (name == "two-clusters-plus-cycle") return StructureKind::TwoClustersPlusCycle;
    throw InvalidSpecError("unknown structure '" + name + "'");
}

void SynthSpec::validate() const {
    if (n_points < 2) throw InvalidSpecError("n_points must be >= 2");
    if (dim < 2) throw InvalidSpecError("dim must be >= 2");
    if (clusters_k < 1) throw InvalidSpecError("clusters_k must be >= 1");
    if (cluster_spread < 0 || circle_noise < 0 || gap.noise_sigma < 0)
        throw InvalidSpecError("spread/noise parameters must be >= 0");
    if (circle_radius <= 0) throw InvalidSpecError("circle_radius must be > 0");
    if (!gap.translation.empty() && gap.translation.size() != dim)
        throw InvalidSpecError("gap translation must have length dim");
    if (gap.rot_axis_a < 0 || gap.rot_axis_b < 0 ||
        static_cast<std::size_t>(gap.rot_axis_a) >= dim ||
        static_cast<std::size_t>(gap.rot_axis_b) >= dim ||
        gap.rot_axis_a == gap.rot_axis_b)
        throw InvalidSpecError("gap rotation axes out of range");
}

namespace {

// Points on a circle of the given radius in the (0,1) coordinate plane,
// evenly spaced angles plus radial noise; higher coordinates get noise only.
void fill_circle(PointCloud& cloud, std::size_t first, std::size_t count, double radius,
                 double noise, double center0, Rng& rng) {
    for (std::size_t k = 0; k < count; ++k) {
        const double ang = 2.0 * std::numbers::pi * double(k) / double(count);
        double* r = cloud.row(first + k);
        r[0] = center0 + radius * std::cos(ang) + noise * rng.normal();
        r[1] = radius * std::sin(ang) + noise * rng.normal();
        for (std::size_t c = 2; c < cloud.dim; ++c) r[c] = noise * rng.normal();
    }
}

void fill_clusters(PointCloud& cloud, std::size_t first, std::size_t count, int k, double spread,
                   Rng& rng) {
    const std::size_t d = cloud.dim;
    std::vector<double> centers(static_cast<std::size_t>(k) * d);
    for (double& c : centers) c = rng.normal();
    for (std::size_t p = 0; p < count; ++p) {
        const std::size_t cl = p % static_cast<std::size_t>(k);
        double* r = cloud.row(first + p);
        for (std::size_t c = 0; c < d; ++c)
            r[c] = centers[cl * d + c] + spread * rng.normal();
    }
}

} // namespace

SynthResult generate(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    SynthResult out;
    out.mi = PointCloud(spec.n_points, spec.dim);

    switch (spec.structure) {
    case StructureKind::Clusters:
        fill_clusters(out.mi, 0, spec.n_points, spec.clusters_k, spec.cluster_spread, rng);
        break;
    case StructureKind::Circle:
        fill_circle(out.mi, 0, spec.n_points, spec.circle_radius, spec.circle_noise, 0.0, rng);
        break;
    case StructureKind::TwoClustersPlusCycle: {
        // Two tight clusters flanking a cycle: quarter of the points per
        // cluster, the remaining half on the circle.
        const std::size_t nc = spec.n_points / 4;
        const std::size_t ncycle = spec.n_points - 2 * nc;
        const double off = 2.5 * spec.circle_radius;
        std::vector<double> center_a(spec.dim, 0.0), center_b(spec.dim, 0.0);
        center_a[0] = -off;
        center_b[0] = off;
        for (std::size_t p = 0; p < nc; ++p) {
            double* r = out.mi.row(p);
            for (std::size_t c = 0; c < spec.dim; ++c)
                r[c] = center_a[c] + spec.cluster_spread * rng.normal();
        }
        for (std::size_t p = 0; p < nc; ++p) {
            double* r = out.mi.row(nc + p);
            for (std::size_t c = 0; c < spec.dim; ++c)
                r[c] = center_b[c] + spec.cluster_spread * rng.normal();
        }
        fill_circle(out.mi, 2 * nc, ncycle, spec.circle_radius, spec.circle_noise, 0.0, rng);
        break;
    }
    }

    // Modality 2 = gap transform of modality 1.
    out.mj = out.mi;
    const auto& gap = spec.gap;
    if (gap.rotation_angle != 0.0) {
        const double cs = std::cos(gap.rotation_angle);
        const double sn = std::sin(gap.rotation_angle);
        for (std::size_t p = 0; p < spec.n_points; ++p) {
            double* r = out.mj.row(p);
            const double xa = r[gap.rot_axis_a];
            const double xb = r[gap.rot_axis_b];
            r[gap.rot_axis_a] = cs * xa - sn * xb;
            r[gap.rot_axis_b] = sn * xa + cs * xb;
        }
    }
    if (gap.noise_sigma > 0.0)
        for (double& x : out.mj.xs) x += gap.noise_sigma * rng.normal();
    if (!gap.translation.empty())
        for (std::size_t p = 0; p < spec.n_points; ++p) {
            double* r = out.mj.row(p);
            for (std::size_t c = 0; c < spec.dim; ++c) r[c] += gap.translation[c];
        }
    if (gap.sign_flip)
        for (double& x : out.mj.xs) x = -x;

    out.pairing = PairingMap::identity(spec.n_points);
    return out;
}

DistanceMatrix perturb_distinct(const DistanceMatrix& dist, std::uint64_t seed) {
    dist.validate();
    const std::size_t n = dist.n;
    DistanceMatrix out = dist;
    if (n < 2) return out;

    double min_pos = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = dist.at(i, j);
            if (d > 0.0 && d < min_pos) min_pos = d;
        }
    if (!std::isfinite(min_pos)) min_pos = 1.0; // all-zero matrix

    const double budget = 1e-9 * min_pos;
    const std::size_t npairs = n * (n - 1) / 2;
    const double delta = budget / (2.0 * double(npairs + 1));

    // Seeded jitter within half the budget, then a strictly-increasing
    // sweep over the sorted values to guarantee pairwise distinctness.
    Rng rng(seed);
    struct Entry {
        double value;
        std::size_t i, j;
    };
    std::vector<Entry> entries;
    entries.reserve(npairs);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            entries.push_back({dist.at(i, j) + 0.5 * budget * rng.uniform01(), i, j});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    for (std::size_t k = 1; k < entries.size(); ++k)
        if (entries[k].value <= entries[k - 1].value)
            entries[k].value = entries[k - 1].value + delta;
    for (const auto& e : entries) {
        out.at(e.i, e.j) = e.value;
        out.at(e.j, e.i) = e.value;
    }
    return out;
}

SynthSpec benchmark_spec(std::size_t n_points, std::size_t dim, std::uint64_t seed) {
    SynthSpec spec;
    spec.n_points = n_points;
    spec.dim = dim;
    spec.structure = StructureKind::TwoClustersPlusCycle;
    spec.cluster_spread = 0.25;
    spec.circle_radius = 1.0;
    spec.circle_noise = 0.05;
    spec.gap.rotation_angle = 0.5;
    spec.gap.rot_axis_a = 0;
    spec.gap.rot_axis_b = 1;
    spec.gap.noise_sigma = 0.12;
    spec.seed = seed;
    return spec;
}

} // namespace topoalign
