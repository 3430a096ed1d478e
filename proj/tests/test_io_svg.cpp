#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "topoalign/datagen.hpp"
#include "topoalign/errors.hpp"
#include "topoalign/io.hpp"
#include "topoalign/rng.hpp"
#include "topoalign/svg.hpp"

using namespace topoalign;

namespace {

PointCloud random_cloud(Rng& rng, std::size_t n, std::size_t d) {
    PointCloud c(n, d);
    for (double& x : c.xs) x = rng.normal();
    return c;
}

// Minimal XML well-formedness scan: matched tags, quoted attributes, a
// single root element. Enough to catch malformed emission.
bool xml_well_formed(const std::string& text) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    bool seen_root = false;
    while (i < text.size()) {
        if (text[i] != '<') {
            if (text[i] == '>') return false;
            ++i;
            continue;
        }
        std::size_t close = text.find('>', i);
        if (close == std::string::npos) return false;
        std::string tag = text.substr(i + 1, close - i - 1);
        i = close + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?') continue; // declaration
        // attribute quotes must be balanced
        if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
        if (tag[0] == '/') {
            const std::string name = tag.substr(1);
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
            if (stack.empty() && seen_root && text.find('<', i) != std::string::npos) {
                // trailing whitespace only after the root closes
                for (std::size_t k = i; k < text.size(); ++k)
                    if (!std::isspace(static_cast<unsigned char>(text[k]))) return false;
            }
        } else if (tag.back() == '/') {
            if (stack.empty()) return false; // self-closing before root opens
        } else {
            const std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
            stack.push_back(name);
            seen_root = true;
        }
    }
    return stack.empty() && seen_root;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

} // namespace

TEST_CASE("point-cloud CSV round trip is exact") {
    Rng rng(1);
    auto c = random_cloud(rng, 12, 5);
    c.xs[3] = 1.0 / 3.0;
    c.xs[7] = 1e-17;
    c.xs[9] = -12345.678901234567;

    std::ostringstream out;
    write_point_cloud_csv(c, out);
    std::istringstream in(out.str());
    auto back = read_point_cloud_csv(in);
    REQUIRE(back.n == c.n);
    REQUIRE(back.dim == c.dim);
    CHECK(back.ids == c.ids);
    for (std::size_t k = 0; k < c.xs.size(); ++k) CHECK(back.xs[k] == c.xs[k]);
}

TEST_CASE("CSV parser rejects malformed input") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_point_cloud_csv(empty), ParseError);
    std::istringstream headeronly("id,x0\n");
    CHECK_THROWS_AS(read_point_cloud_csv(headeronly), ParseError);
    std::istringstream badnum("id,x0\n0,abc\n");
    CHECK_THROWS_AS(read_point_cloud_csv(badnum), ParseError);
    std::istringstream shortrow("id,x0,x1\n0,1.0\n");
    CHECK_THROWS_AS(read_point_cloud_csv(shortrow), ParseError);
}

TEST_CASE("pairing CSV round trip") {
    Rng rng(2);
    auto mi = random_cloud(rng, 6, 2);
    auto mj = random_cloud(rng, 6, 2);
    for (std::size_t k = 0; k < 6; ++k) mj.ids[k] = 5 - std::int64_t(k);

    auto pairing = build_pairing(mi.ids, mj.ids);
    std::ostringstream out;
    write_pairing_csv(pairing, mi, mj, out);
    std::istringstream in(out.str());
    auto back = read_pairing_csv(in, mi, mj);
    CHECK(back.forward == pairing.forward);
    CHECK(back.backward == pairing.backward);
}

TEST_CASE("diagram JSON schema for the 3-point line") {
    PointCloud c(3, 1);
    c.row(1)[0] = 1.0;
    c.row(2)[0] = 3.0;
    auto [pairs, decomp] = compute_ph(pairwise_distances(c, MetricKind::Euclidean));
    auto j = diagram_to_json(pairs, decomp);

    CHECK(j["dim0"].size() == 2);
    CHECK(j["dim0_essential"].size() == 1);
    CHECK(j["dim0_essential"][0][1].is_null());
    CHECK(j["dim1"].size() == 1);
    CHECK(j["dim1"][0][0] == 3.0);
    CHECK(j["dim1"][0][1].is_null());
    CHECK(j["h0_edges"].size() == 2);
    CHECK(j["h1_edges"].size() == 1);
}

TEST_CASE("persistence image JSON round trip") {
    PersistenceDiagram d;
    d.dim = 0;
    d.points = {{0.0, 1.0}, {0.2, 0.9}};
    auto img = persistence_image(d, 6, 0.2);
    auto j = persistence_image_to_json(img);
    auto back = persistence_image_from_json(j);
    CHECK(back.resolution == img.resolution);
    CHECK(back.bounds == img.bounds);
    CHECK(back.sigma == img.sigma);
    CHECK(back.grid == img.grid);
}

TEST_CASE("loss report JSON carries the configuration") {
    Rng rng(3);
    auto mi = random_cloud(rng, 6, 3);
    auto mj = random_cloud(rng, 6, 3);
    AlignConfig cfg;
    cfg.c = 0.7;
    cfg.ph_opts.h1_cap = 4;
    auto rep = toma_loss(mi, mj, PairingMap::identity(6), cfg);
    auto j = loss_report_to_json(rep);
    CHECK(j["loss_total"].get<double>() == rep.loss_total);
    CHECK(j["config"]["c"].get<double>() == 0.7);
    CHECK(j["config"]["h1_cap"].get<std::size_t>() == 4);
    CHECK(j["config"]["max_scale"].is_null());
    CHECK(j["config"]["variant"] == "toma");
    CHECK(j["skipped_edges"].get<std::size_t>() == rep.skipped_edges);
}

TEST_CASE("SVG output for the 3-point line") {
    PointCloud c(3, 2);
    c.row(1)[0] = 1.0;
    c.row(2)[0] = 3.0;
    auto decomp = compute_ph(pairwise_distances(c, MetricKind::Euclidean)).second;
    auto svg = render_cloud_svg(c, decomp);

    CHECK(xml_well_formed(svg));
    CHECK(count_occurrences(svg, "<circle") == 3);
    CHECK(count_occurrences(svg, "<line") == 3); // 2 MST + 1 cycle edge
    CHECK(count_occurrences(svg, "<text") == 3);
    CHECK(svg.find("class=\"h0\"") != std::string::npos);
    CHECK(svg.find("class=\"h1\"") != std::string::npos);

    // identical input renders byte-identical output
    CHECK(render_cloud_svg(c, decomp) == svg);
}

TEST_CASE("SVG projection for d > 2 is deterministic and recorded") {
    Rng rng(4);
    auto c = random_cloud(rng, 10, 6);
    auto decomp = compute_ph(pairwise_distances(c, MetricKind::Euclidean)).second;
    auto svg1 = render_cloud_svg(c, decomp);
    auto svg2 = render_cloud_svg(c, decomp);
    CHECK(svg1 == svg2);
    CHECK(svg1.find("projection=pca-top2") != std::string::npos);
    CHECK(xml_well_formed(svg1));

    auto proj = project_2d(c);
    CHECK(proj.used_pca);
    // principal directions are unit-norm and orthogonal
    double n0 = 0, n1 = 0, dot = 0;
    for (std::size_t k = 0; k < 6; ++k) {
        n0 += proj.axis0[k] * proj.axis0[k];
        n1 += proj.axis1[k] * proj.axis1[k];
        dot += proj.axis0[k] * proj.axis1[k];
    }
    CHECK(n0 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(n1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dot == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("h1 cap limits drawn cycle edges") {
    Rng rng(5);
    auto c = random_cloud(rng, 8, 2);
    auto decomp = compute_ph(pairwise_distances(c, MetricKind::Euclidean)).second;
    SvgOptions opts;
    opts.h1_cap = 2;
    auto svg = render_cloud_svg(c, decomp, opts);
    CHECK(count_occurrences(svg, "<line") == decomp.h0_death_edges.size() + 2);
}
