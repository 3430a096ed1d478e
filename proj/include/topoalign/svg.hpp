#pragma once

#include <optional>
#include <string>
#include <vector>

#include "topoalign/filtration.hpp"
#include "topoalign/geometry.hpp"

// Static SVG rendering of a cloud's topological skeleton: points with id
// labels, MST edges in one stroke class and H1-birth edges in another.
// Output bytes are deterministic for fixed inputs.

namespace topoalign {

struct SvgOptions {
    int width = 640;
    int height = 640;
    double margin = 40.0;
    std::optional<std::size_t> h1_cap; // cap drawn H1 edges (ascending weight)
};

// 2D layout of the cloud: the first two coordinates when d = 2, otherwise
// the projection onto the top-2 principal directions computed by
// deterministic power iteration with fixed initialization.
struct Projection {
    std::vector<double> xy; // n*2
    bool used_pca = false;
    std::vector<double> axis0, axis1; // principal directions when used_pca
};

Projection project_2d(const PointCloud& cloud);

std::string render_cloud_svg(const PointCloud& cloud, const EdgeDecomposition& decomp,
                             const SvgOptions& opts = {});

} // namespace topoalign
