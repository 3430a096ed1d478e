#include "topoalign/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "topoalign/errors.hpp"
#include "topoalign/kernels.hpp"

namespace topoalign {

namespace {

// Power iteration on the centered covariance with a fixed all-ones start;
// second direction deflated against the first. Deterministic.
std::vector<double> principal_direction(const PointCloud& cloud,
                                        const std::vector<double>& mean,
                                        const std::vector<double>* deflate) {
    const std::size_t n = cloud.n, d = cloud.dim;
    std::vector<double> v(d, 1.0 / std::sqrt(double(d)));
    if (deflate) {
        // start orthogonal to the first direction
        const double proj = kernels::dot(v.data(), deflate->data(), d);
        for (std::size_t k = 0; k < d; ++k) v[k] -= proj * (*deflate)[k];
        double nv = std::sqrt(kernels::sqnorm(v.data(), d));
        if (nv < 1e-12) {
            std::fill(v.begin(), v.end(), 0.0);
            v[1 % d] = 1.0;
            const double p2 = kernels::dot(v.data(), deflate->data(), d);
            for (std::size_t k = 0; k < d; ++k) v[k] -= p2 * (*deflate)[k];
            nv = std::sqrt(kernels::sqnorm(v.data(), d));
            if (nv < 1e-12) return v;
        }
        for (double& x : v) x /= nv;
    }

    std::vector<double> w(d), centered(d);
    for (int it = 0; it < 200; ++it) {
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* r = cloud.row(i);
            for (std::size_t k = 0; k < d; ++k) centered[k] = r[k] - mean[k];
            const double s = kernels::dot(centered.data(), v.data(), d);
            kernels::axpy(s, centered.data(), w.data(), d);
        }
        if (deflate) {
            const double proj = kernels::dot(w.data(), deflate->data(), d);
            for (std::size_t k = 0; k < d; ++k) w[k] -= proj * (*deflate)[k];
        }
        const double nw = std::sqrt(kernels::sqnorm(w.data(), d));
        if (nw < 1e-30) break;
        for (std::size_t k = 0; k < d; ++k) w[k] /= nw;
        double diff = 0.0;
        for (std::size_t k = 0; k < d; ++k) diff += (w[k] - v[k]) * (w[k] - v[k]);
        v = w;
        if (diff < 1e-24) break;
    }
    // Fix the sign so the layout does not flip between runs: make the
    // largest-magnitude component positive.
    std::size_t arg = 0;
    for (std::size_t k = 1; k < d; ++k)
        if (std::fabs(v[k]) > std::fabs(v[arg])) arg = k;
    if (v[arg] < 0.0)
        for (double& x : v) x = -x;
    return v;
}

std::string fmt2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

Projection project_2d(const PointCloud& cloud) {
    cloud.validate();
    Projection proj;
    proj.xy.resize(cloud.n * 2);
    if (cloud.dim == 2) {
        for (std::size_t i = 0; i < cloud.n; ++i) {
            proj.xy[2 * i] = cloud.row(i)[0];
            proj.xy[2 * i + 1] = cloud.row(i)[1];
        }
        return proj;
    }
    if (cloud.dim == 1) {
        for (std::size_t i = 0; i < cloud.n; ++i) {
            proj.xy[2 * i] = cloud.row(i)[0];
            proj.xy[2 * i + 1] = 0.0;
        }
        return proj;
    }

    std::vector<double> mean(cloud.dim, 0.0);
    for (std::size_t i = 0; i < cloud.n; ++i)
        kernels::axpy(1.0 / double(cloud.n), cloud.row(i), mean.data(), cloud.dim);

    proj.used_pca = true;
    proj.axis0 = principal_direction(cloud, mean, nullptr);
    proj.axis1 = principal_direction(cloud, mean, &proj.axis0);
    for (std::size_t i = 0; i < cloud.n; ++i) {
        std::vector<double> centered(cloud.dim);
        const double* r = cloud.row(i);
        for (std::size_t k = 0; k < cloud.dim; ++k) centered[k] = r[k] - mean[k];
        proj.xy[2 * i] = kernels::dot(centered.data(), proj.axis0.data(), cloud.dim);
        proj.xy[2 * i + 1] = kernels::dot(centered.data(), proj.axis1.data(), cloud.dim);
    }
    return proj;
}

std::string render_cloud_svg(const PointCloud& cloud, const EdgeDecomposition& decomp,
                             const SvgOptions& opts) {
    const auto proj = project_2d(cloud);

    double xmin = proj.xy[0], xmax = proj.xy[0];
    double ymin = proj.xy[1], ymax = proj.xy[1];
    for (std::size_t i = 0; i < cloud.n; ++i) {
        xmin = std::min(xmin, proj.xy[2 * i]);
        xmax = std::max(xmax, proj.xy[2 * i]);
        ymin = std::min(ymin, proj.xy[2 * i + 1]);
        ymax = std::max(ymax, proj.xy[2 * i + 1]);
    }
    const double xr = std::max(xmax - xmin, 1e-12);
    const double yr = std::max(ymax - ymin, 1e-12);
    const double sx = (opts.width - 2.0 * opts.margin) / xr;
    const double sy = (opts.height - 2.0 * opts.margin) / yr;
    const double s = std::min(sx, sy);

    auto px = [&](std::size_t i) { return opts.margin + (proj.xy[2 * i] - xmin) * s; };
    auto py = [&](std::size_t i) {
        // SVG y grows downward
        return opts.height - opts.margin - (proj.xy[2 * i + 1] - ymin) * s;
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opts.width
        << "\" height=\"" << opts.height << "\" viewBox=\"0 0 " << opts.width << ' '
        << opts.height << "\">\n";

    svg << "<metadata>projection=" << (proj.used_pca ? "pca-top2" : "first-two");
    if (proj.used_pca) {
        svg << " axis0=[";
        for (std::size_t k = 0; k < proj.axis0.size(); ++k)
            svg << (k ? "," : "") << fmt6(proj.axis0[k]);
        svg << "] axis1=[";
        for (std::size_t k = 0; k < proj.axis1.size(); ++k)
            svg << (k ? "," : "") << fmt6(proj.axis1[k]);
        svg << "]";
    }
    svg << "</metadata>\n";

    svg << "<g class=\"h0\" stroke=\"#d62728\" stroke-width=\"1.5\">\n";
    for (const Edge& e : decomp.h0_death_edges)
        svg << "<line x1=\"" << fmt2(px(e.a)) << "\" y1=\"" << fmt2(py(e.a)) << "\" x2=\""
            << fmt2(px(e.b)) << "\" y2=\"" << fmt2(py(e.b)) << "\"/>\n";
    svg << "</g>\n";

    svg << "<g class=\"h1\" stroke=\"#1f77b4\" stroke-width=\"1\" stroke-dasharray=\"4 2\">\n";
    std::size_t drawn = 0;
    for (const Edge& e : decomp.h1_birth_edges) {
        if (opts.h1_cap && drawn >= *opts.h1_cap) break;
        svg << "<line x1=\"" << fmt2(px(e.a)) << "\" y1=\"" << fmt2(py(e.a)) << "\" x2=\""
            << fmt2(px(e.b)) << "\" y2=\"" << fmt2(py(e.b)) << "\"/>\n";
        ++drawn;
    }
    svg << "</g>\n";

    svg << "<g class=\"points\" fill=\"#333333\">\n";
    for (std::size_t i = 0; i < cloud.n; ++i)
        svg << "<circle cx=\"" << fmt2(px(i)) << "\" cy=\"" << fmt2(py(i)) << "\" r=\"3\"/>\n";
    svg << "</g>\n";

    svg << "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555555\">\n";
    for (std::size_t i = 0; i < cloud.n; ++i)
        svg << "<text x=\"" << fmt2(px(i) + 4.0) << "\" y=\"" << fmt2(py(i) - 4.0) << "\">"
            << cloud.ids[i] << "</text>\n";
    svg << "</g>\n";

    svg << "</svg>\n";
    return svg.str();
}

} // namespace topoalign
