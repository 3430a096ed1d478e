// Command-line front end: persistence, MST export, alignment losses, the
// synthetic benchmark comparison, training, SVG rendering, and data
// generation. All randomness enters through explicit --seed flags.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topoalign/alignment.hpp"
#include "topoalign/datagen.hpp"
#include "topoalign/errors.hpp"
#include "topoalign/filtration.hpp"
#include "topoalign/io.hpp"
#include "topoalign/svg.hpp"
#include "topoalign/trainer.hpp"

using namespace topoalign;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::string metric = "euclidean";
    std::int64_t h1_cap = -1;
    double max_scale = -1.0;
    std::string output;
    std::string format = "json";
};

MetricKind parse_metric(const std::string& m) {
    if (m == "euclidean") return MetricKind::Euclidean;
    if (m == "cosine") return MetricKind::CosineDistance;
    throw Error("unknown metric '" + m + "'");
}

PhOptions make_ph_opts(const GlobalOpts& g) {
    PhOptions opts;
    if (g.h1_cap >= 0) opts.h1_cap = static_cast<std::size_t>(g.h1_cap);
    if (g.max_scale
 > 0.0) opts.max_scale = g.max_scale;
    return opts;
}

void emit(const GlobalOpts& g, const std::string& text) {
    if (g.output.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
    } else {
        write_text_file(g.output, text);
    }
}

std::string mst_tsv(const std::vector<Edge>& edges) {
    std::ostringstream out;
    out << "a\tb\tweight\n";
    for (const Edge& e : edges)
        out << e.a << '\t' << e.b << '\t' << format_double(e.weight) << '\n';
    return out.str();
}

int cmd_ph(const GlobalOpts& g, const std::string& input) {
    const auto cloud = read_point_cloud_csv_file(input);
    const auto dist = pairwise_distances(cloud, parse_metric(g.metric));
    const auto [pairs, decomp] = compute_ph(dist, make_ph_opts(g));
    emit(g, diagram_to_json(pairs, decomp).dump(2) + "\n");
    return 0;
}

int cmd_mst(const GlobalOpts& g, const std::string& input) {
    const auto cloud = read_point_cloud_csv_file(input);
    const auto mst = compute_mst(pairwise_distances(cloud, parse_metric(g.metric)));
    if (g.format == "tsv") {
        emit(g, mst_tsv(mst));
    } else {
        nlohmann::json j;
        j["edges"] = nlohmann::json::array();
        double total = 0.0;
        for (const Edge& e : mst) {
            j["edges"].push_back({e.a, e.b, e.weight});
            total += e.weight;
        }
        j["total_weight"] = total;
        emit(g, j.dump(2) + "\n");
    }
    return 0;
}

struct LossFlags {
    std::string variant = "toma";
    double c = 0.5;
    double c2 = 1.0;
    bool no_abs = false;
    double tau = 1.0;
    std::string pairing_path;
};

AlignConfig make_align(const GlobalOpts& g, const LossFlags& f) {
    AlignConfig cfg;
    cfg.c = f.c;
    cfg.c2 = f.c2;
    cfg.use_abs = !f.no_abs;
    cfg.variant = parse_variant(f.variant);
    cfg.metric = parse_metric(g.metric);
    cfg.ph_opts = make_ph_opts(g);
    return cfg;
}

PairingMap load_pairing(const LossFlags& f, const PointCloud& mi, const PointCloud& mj) {
    if (!f.pairing_path.empty()) return read_pairing_csv_file(f.pairing_path, mi, mj);
    return build_pairing(mi.ids, mj.ids);
}

int cmd_loss(const GlobalOpts& g, const LossFlags& f, const std::string& input_i,
             const std::string& input_j) {
    const auto mi = read_point_cloud_csv_file(input_i);
    const auto mj = read_point_cloud_csv_file(input_j);
    const auto pairing = load_pairing(f, mi, mj);

    TrainConfig tc;
    tc.align = make_align(g, f);
    tc.tau = f.tau;
    tc.seed = g.seed;
    const auto rep = combined_objective(mi, mj, pairing, tc);
    emit(g, loss_report_to_json(rep).dump(2) + "\n");
    return 0;
}

struct CompareFlags {
    std::size_t n = 32;
    std::size_t dim = 8;
    int seeds = 3;
    int steps = 50;
    double lr = 0.02;
    double c = 0.5;
    double c2 = 1.0;
    double labeled_fraction = 0.5;
    double tau = 1.0;
    std::string optimize = "linear-map";
};

std::string run_compare(const GlobalOpts& g, const CompareFlags& f) {
    const std::vector<std::string> variants{"none", "toma", "dist", "pd", "pi"};
    std::ostringstream out;
    out << "variant\tmst_overlap_mean\tmst_overlap_std\tretrieval_r1_mean\tretrieval_r1_std\n";
    for (const auto& vname : variants) {
        std::vector<double> overlaps, recalls;
        for (int s = 0; s < f.seeds; ++s) {
            const auto data = generate(benchmark_spec(f.n, f.dim, g.seed + std::uint64_t(s)));
            TrainConfig tc;
            tc.steps = f.steps;
            tc.learning_rate = f.lr;
            tc.align.variant = parse_variant(vname);
            tc.align.c = vname == "none" ? 0.0 : f.c;
            tc.align.c2 = f.c2;
            tc.align.metric = parse_metric(g.metric);
            tc.align.ph_opts = make_ph_opts(g);
            tc.tau = f.tau;
            tc.labeled_fraction = f.labeled_fraction;
            tc.seed = g.seed + std::uint64_t(s);
            tc.optimize = parse_optimize_mode(f.optimize);
            const auto res = train(data.mi, data.mj, data.pairing, tc);
            overlaps.push_back(res.end.mst_overlap);
            recalls.push_back(res.end.retrieval_r1);
        }
        auto mean_std = [](const std::vector<double>& xs) {
            double m = 0.0;
            for (double x : xs) m += x;
            m /= double(xs.size());
            double var = 0.0;
            for (double x : xs) var += (x - m) * (x - m);
            var /= double(xs.size()); // population variance
            return std::pair<double, double>{m, std::sqrt(var)};
        };
        const auto [om, os] = mean_std(overlaps);
        const auto [rm, rs] = mean_std(recalls);
        out << vname << '\t' << format_double(om) << '\t' << format_double(os) << '\t'
            << format_double(rm) << '\t' << format_double(rs) << '\n';
    }
    return out.str();
}

struct TrainFlags {
    int steps = 100;
    double lr = 0.02;
    double labeled_fraction = 1.0;
    double tau = 1.0;
    std::string optimize = "free-points";
    std::string export_clouds;
    LossFlags loss;
};

int cmd_train(const GlobalOpts& g, const TrainFlags& f, const std::string& input_i,
              const std::string& input_j) {
    const auto mi = read_point_cloud_csv_file(input_i);
    const auto mj = read_point_cloud_csv_file(input_j);
    const auto pairing = load_pairing(f.loss, mi, mj);

    TrainConfig tc;
    tc.steps = f.steps;
    tc.learning_rate = f.lr;
    tc.align = make_align(g, f.loss);
    tc.tau = f.loss.tau;
    tc.labeled_fraction = f.labeled_fraction;
    tc.seed = g.seed;
    tc.optimize = parse_optimize_mode(f.optimize);

    const auto res = train(mi, mj, pairing, tc);
    emit(g, train_result_to_json(res, tc).dump(2) + "\n");
    if (!f.export_clouds.empty()) {
        write_point_cloud_csv_file(res.final_mi, f.export_clouds + ".mi.csv");
        write_point_cloud_csv_file(res.final_mj, f.export_clouds + ".mj.csv");
    }
    return 0;
}

int cmd_viz(const GlobalOpts& g, const std::string& input_i, const std::string& input_j,
            const std::string& out_base) {
    SvgOptions opts;
    if (g.h1_cap >= 0) opts.h1_cap = static_cast<std::size_t>(g.h1_cap);
    const auto metric = parse_metric(g.metric);
    for (const auto& [path, tag] :
         {std::pair{input_i, std::string("mi")}, std::pair{input_j, std::string("mj")}}) {
        const auto cloud = read_point_cloud_csv_file(path);
        const auto decomp = compute_ph(pairwise_distances(cloud, metric), make_ph_opts(g)).second;
        write_text_file(out_base + "." + tag + ".svg", render_cloud_svg(cloud, decomp, opts));
    }
    return 0;
}

struct DatagenFlags {
    std::string structure = "clusters";
    std::size_t n = 32;
    std::size_t dim = 2;
    int k = 2;
    double spread = 0.1;
    double radius = 1.0;
    double noise = 0.0;
    double gap_rotation = 0.0;
    double gap_noise = 0.0;
    std::vector<double> gap_translation;
    bool gap_sign_flip = false;
};

int cmd_datagen(const GlobalOpts& g, const DatagenFlags& f, const std::string& out_base) {
    SynthSpec spec;
    spec.structure = parse_structure(f.structure);
    spec.n_points = f.n;
    spec.dim = f.dim;
    spec.clusters_k = f.k;
    spec.cluster_spread = f.spread;
    spec.circle_radius = f.radius;
    spec.circle_noise = f.noise;
    spec.gap.rotation_angle = f.gap_rotation;
    spec.gap.noise_sigma = f.gap_noise;
    spec.gap.translation = f.gap_translation;
    spec.gap.sign_flip = f.gap_sign_flip;
    spec.seed = g.seed;

    const auto data = generate(spec);
    write_point_cloud_csv_file(data.mi, out_base + ".mi.csv");
    write_point_cloud_csv_file(data.mj, out_base + ".mj.csv");
    std::ofstream pout(out_base + ".pairing.csv");
    if (!pout) throw Error("cannot write pairing file");
    write_pairing_csv(data.pairing, data.mi, data.mj, pout);
    write_text_file(out_base + ".spec.json", synth_spec_to_json(spec).dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"topology-aware multimodal alignment toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "deterministic seed")->capture_default_str();
    app.add_option("--metric", g.metric, "euclidean|cosine")->capture_default_str();
    app.add_option("--h1-cap", g.h1_cap, "max H1-birth edges kept (-1 = all)")
        ->capture_default_str();
    app.add_option("--max-scale", g.max_scale, "filtration cap (<=0 = none)")
        ->capture_default_str();
    app.add_option("--output", g.output, "output path (default stdout)");
    app.add_option("--format", g.format, "json|tsv")->capture_default_str();
    app.fallthrough();

    std::string input_i, input_j, out_base;

    auto* ph = app.add_subcommand("ph", "persistence of a point-cloud CSV");
    ph->add_option("input", input_i, "point-cloud CSV")->required();

    auto* mst = app.add_subcommand("mst", "minimum spanning tree of a point-cloud CSV");
    mst->add_option("input", input_i, "point-cloud CSV")->required();

    LossFlags lf;
    auto* loss = app.add_subcommand("loss", "alignment loss between two clouds");
    loss->add_option("input_i", input_i, "modality-i CSV")->required();
    loss->add_option("input_j", input_j, "modality-j CSV")->required();
    loss->add_option("--pairing", lf.pairing_path, "pairing CSV (default: match ids)");
    loss->add_option("--variant", lf.variant, "toma|dist|pd|pi|none")->capture_default_str();
    loss->add_option("--c", lf.c, "topology coefficient")->capture_default_str();
    loss->add_option("--c2", lf.c2, "H1-birth weight")->capture_default_str();
    loss->add_flag("--no-abs", lf.no_abs, "drop the absolute value (raw cosine)");
    loss->add_option("--tau", lf.tau, "contrastive temperature")->capture_default_str();

    CompareFlags cf;
    auto* compare = app.add_subcommand("compare", "variant sweep on the synthetic benchmark");
    compare->add_option("--n", cf.n, "points per modality")->capture_default_str();
    compare->add_option("--dim", cf.dim, "embedding dimension")->capture_default_str();
    compare->add_option("--seeds", cf.seeds, "number of seeds (0..K-1)")->capture_default_str();
    compare->add_option("--steps", cf.steps, "training steps")->capture_default_str();
    compare->add_option("--lr", cf.lr, "learning rate")->capture_default_str();
    compare->add_option("--c", cf.c, "topology coefficient")->capture_default_str();
    compare->add_option("--c2", cf.c2, "H1-birth weight")->capture_default_str();
    compare->add_option("--labeled-fraction", cf.labeled_fraction, "labeled pair fraction")
        ->capture_default_str();
    compare->add_option("--tau", cf.tau, "contrastive temperature")->capture_default_str();
    compare->add_option("--optimize", cf.optimize, "free-points|linear-map")
        ->capture_default_str();

    TrainFlags tf;
    auto* tr = app.add_subcommand("train", "gradient descent on the combined objective");
    tr->add_option("input_i", input_i, "modality-i CSV")->required();
    tr->add_option("input_j", input_j, "modality-j CSV")->required();
    tr->add_option("--pairing", tf.loss.pairing_path, "pairing CSV (default: match ids)");
    tr->add_option("--variant", tf.loss.variant, "toma|dist|pd|pi|none")->capture_default_str();
    tr->add_option("--c", tf.loss.c, "topology coefficient")->capture_default_str();
    tr->add_option("--c2", tf.loss.c2, "H1-birth weight")->capture_default_str();
    tr->add_flag("--no-abs", tf.loss.no_abs, "drop the absolute value");
    tr->add_option("--tau", tf.loss.tau, "contrastive temperature")->capture_default_str();
    tr->add_option("--steps", tf.steps, "training steps")->capture_default_str();
    tr->add_option("--lr", tf.lr, "learning rate")->capture_default_str();
    tr->add_option("--labeled-fraction", tf.labeled_fraction, "labeled pair fraction")
        ->capture_default_str();
    tr->add_option("--optimize", tf.optimize, "free-points|linear-map")->capture_default_str();
    tr->add_option("--export-clouds", tf.export_clouds, "write final clouds to BASE.{mi,mj}.csv");

    auto* viz = app.add_subcommand("viz", "render MST/H1 skeletons of both clouds as SVG");
    viz->add_option("input_i", input_i, "modality-i CSV")->required();
    viz->add_option("input_j", input_j, "modality-j CSV")->required();
    viz->add_option("--out-base", out_base, "output base path (BASE.mi.svg, BASE.mj.svg)")
        ->required();

    DatagenFlags df;
    auto* dg = app.add_subcommand("datagen", "generate paired synthetic clouds");
    dg->add_option("--structure", df.structure, "clusters|circle|two-clusters-plus-cycle")
        ->capture_default_str();
    dg->add_option("--n", df.n, "points")->capture_default_str();
    dg->add_option("--dim", df.dim, "dimension")->capture_default_str();
    dg->add_option("--k", df.k, "cluster count")->capture_default_str();
    dg->add_option("--spread", df.spread, "cluster spread")->capture_default_str();
    dg->add_option("--radius", df.radius, "circle radius")->capture_default_str();
    dg->add_option("--noise", df.noise, "structure noise")->capture_default_str();
    dg->add_option("--gap-rotation", df.gap_rotation, "gap rotation angle (radians)")
        ->capture_default_str();
    dg->add_option("--gap-noise", df.gap_noise, "gap noise sigma")->capture_default_str();
    dg->add_option("--gap-translate", df.gap_translation, "gap translation vector");
    dg->add_flag("--gap-sign-flip", df.gap_sign_flip, "negate modality 2");
    dg->add_option("--out-base", out_base, "output base path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (ph->parsed()) return cmd_ph(g, input_i);
        if (mst->parsed()) return cmd_mst(g, input_i);
        if (loss->parsed()) return cmd_loss(g, lf, input_i, input_j);
        if (compare->parsed()) {
            emit(g, run_compare(g, cf));
            return 0;
        }
        if (tr->parsed()) return cmd_train(g, tf, input_i, input_j);
        if (viz->parsed()) return cmd_viz(g, input_i, input_j, out_base);
        if (dg->parsed()) return cmd_datagen(g, df, out_base);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
