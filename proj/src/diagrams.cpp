#include "topoalign/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "topoalign/errors.hpp"

namespace topoalign {

namespace {

constexpr double kBig = std::numeric_limits<double>::max() / 4;

// Exact minimum-cost assignment on a square matrix (Hungarian method with
// potentials, O(n^3)). Returns match_of_row[i] = assigned column.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kBig);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = kBig;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> match(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) match[p[j] - 1] = j - 1;
    return match;
}

double linf(const std::pair<double, double>& a, const std::pair<double, double>& b) {
    return std::max(std::fabs(a.first - b.first), std::fabs(a.second - b.second));
}

double diag_cost(const std::pair<double, double>& a) { return (a.second - a.first) / 2.0; }

} // namespace

WassersteinResult wasserstein_matching(const PersistenceDiagram& d1,
                                       const PersistenceDiagram& d2, double q) {
    if (d1.dim != d2.dim)
        throw DimMismatchError("wasserstein distance needs diagrams of the same dimension");
    if (q < 1.0) throw Error("wasserstein exponent must satisfy q >= 1");

    const int m = static_cast<int>(d1.points.size());
    const int n = static_cast<int>(d2.points.size());
    WassersteinResult res;
    if (m + n == 0) return res;

    // Rows: m real points of d1 then n diagonal slots; columns: n real
    // points of d2 then m diagonal slots.
    const int sz = m + n;
    std::vector<std::vector<double>> cost(sz, std::vector<double>(sz, 0.0));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) cost[i][j] = std::pow(linf(d1.points[i], d2.points[j]), q);
        for (int j = n; j < sz; ++j) cost[i][j] = std::pow(diag_cost(d1.points[i]), q);
    }
    for (int i = m; i < sz; ++i)
        for (int j = 0; j < n; ++j) cost[i][j] = std::pow(diag_cost(d2.points[j]), q);

    const auto match = hungarian(cost);
    double total = 0.0;
    for (int i = 0; i < sz; ++i) {
        const int j = match[i];
        total += cost[i][j];
        const int from = i < m ? i : -1;
        const int to = j < n ? j : -1;
        if (from >= 0 || to >= 0) res.matches.push_back({from, to});
    }
    res.value = q == 1.0 ? total : std::pow(total, 1.0 / q);
    return res;
}

double wasserstein(const PersistenceDiagram& d1, const PersistenceDiagram& d2, double q) {
    return wasserstein_matching(d1, d2, q).value;
}

double default_pi_sigma(const PersistenceDiagram& d) {
    double max_pers = 0.0;
    for (const auto& [b, dth] : d.points) max_pers = std::max(max_pers, dth - b);
    return 0.1 * std::max(max_pers, 1e-6);
}

PiBounds auto_pi_bounds(const std::vector<const PersistenceDiagram*>& diagrams, double margin) {
    double bmin = kBig, bmax = -kBig, pmin = kBig, pmax = -kBig;
    bool any = false;
    for (const auto* d : diagrams) {
        for (const auto& [b, dth] : d->points) {
            any = true;
            const double p = dth - b;
            bmin = std::min(bmin, b);
            bmax = std::max(bmax, b);
            pmin = std::min(pmin, p);
            pmax = std::max(pmax, p);
        }
    }
    if (!any) return {0.0, 1.0, 0.0, 1.0};
    const double bm = margin * (bmax - bmin);
    const double pm = margin * (pmax - pmin);
    return {bmin - bm, bmax + bm, pmin - pm, pmax + pm};
}

PersistenceImage persistence_image(const PersistenceDiagram& d, std::size_t resolution,
                                   double sigma, std::optional<PiBounds> bounds) {
    if (resolution < 1) throw Error("persistence image resolution must be >= 1");
    if (!(sigma > 0.0)) throw Error("persistence image sigma must be positive");

    PersistenceImage img;
    img.resolution = resolution;
    img.sigma = sigma;
    img.bounds = bounds ? *bounds : auto_pi_bounds({&d});
    img.grid.assign(resolution * resolution, 0.0);

    const auto [b0, b1, p0, p1] = img.bounds;
    const double bstep = (b1 - b0) / static_cast<double>(resolution);
    const double pstep = (p1 - p0) / static_cast<double>(resolution);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const double norm = 1.0 / (2.0 * std::numbers::pi * sigma * sigma);

    for (const auto& [birth, death] : d.points) {
        const double pers = death - birth;
        const double w = pers; // linear persistence weighting
        for (std::size_t ib = 0; ib < resolution; ++ib) {
            const double cb = b0 + (static_cast<double>(ib) + 0.5) * bstep;
            const double db = cb - birth;
            for (std::size_t ip = 0; ip < resolution; ++ip) {
                const double cp = p0 + (static_cast<double>(ip) + 0.5) * pstep;
                const double dp = cp - pers;
                img.grid[ib * resolution + ip] +=
                    w * norm * std::exp(-(db * db + dp * dp) * inv2s2);
            }
        }
    }
    return img;
}

double image_l2(const PersistenceImage& p1, const PersistenceImage& p2) {
    if (p1.resolution != p2.resolution)
        throw BoundsMismatchError("persistence images differ in resolution");
    if (p1.bounds != p2.bounds)
        throw BoundsMismatchError("persistence images differ in bounds");
    double acc = 0.0;
    for (std::size_t k = 0; k < p1.grid.size(); ++k) {
        const double d = p1.grid[k] - p2.grid[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace topoalign
