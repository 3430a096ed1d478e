#include "topoalign/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "topoalign/errors.hpp"

namespace topoalign {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

std::int64_t parse_id(const std::string& s, std::size_t line_no) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad id '" + s + "'");
    return v;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

PointCloud read_point_cloud_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty point-cloud file");
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "id")
        throw ParseError("point-cloud header must be id,x0,...,x{d-1}");
    const std::size_t dim = header.size() - 1;

    std::vector<std::int64_t> ids;
    std::vector<double> xs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != dim + 1)
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(dim + 1) + " cells");
        ids.push_back(parse_id(cells[0], line_no));
        for (std::size_t c = 1; c < cells.size(); ++c)
            xs.push_back(parse_double(cells[c], line_no));
    }
    if (ids.empty()) throw ParseError("point-cloud file has no data rows");

    PointCloud cloud;
    cloud.n = ids.size();
    cloud.dim = dim;
    cloud.ids = std::move(ids);
    cloud.xs = std::move(xs);
    cloud.validate();
    return cloud;
}

PointCloud read_point_cloud_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_point_cloud_csv(in);
}

void write_point_cloud_csv(const PointCloud& cloud, std::ostream& out) {
    out << "id";
    for (std::size_t c = 0; c < cloud.dim; ++c) out << ",x" << c;
    out << "\n";
    for (std::size_t i = 0; i < cloud.n; ++i) {
        out << cloud.ids[i];
        const double* r = cloud.row(i);
        for (std::size_t c = 0; c < cloud.dim; ++c) out << ',' << format_double(r[c]);
        out << "\n";
    }
}

void write_point_cloud_csv_file(const PointCloud& cloud, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    write_point_cloud_csv(cloud, out);
}

PairingMap read_pairing_csv(std::istream& in, const PointCloud& mi, const PointCloud& mj) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty pairing file");
    std::vector<std::int64_t> ids_i, ids_j;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 2)
            throw ParseError("line " + std::to_string(line_no) + ": expected two cells");
        ids_i.push_back(parse_id(cells[0], line_no));
        ids_j.push_back(parse_id(cells[1], line_no));
    }

    // Resolve the id pairs against the clouds' id columns.
    auto index_of = [&](const PointCloud& cloud, std::int64_t id) {
        for (std::size_t k = 0; k < cloud.n; ++k)
            if (cloud.ids[k] == id) return static_cast<int>(k);
        throw ParseError("pairing id " + std::to_string(id) + " not present in cloud");
    };
    PairingMap p;
    p.forward.assign(mi.n, -1);
    p.backward.assign(mj.n, -1);
    for (std::size_t k = 0; k < ids_i.size(); ++k) {
        const int a = index_of(mi, ids_i[k]);
        const int b = index_of(mj, ids_j[k]);
        if (p.forward[a] >= 0 || p.backward[b] >= 0)
            throw DuplicateIdError("pairing lists index " + std::to_string(a) + " twice");
        p.forward[a] = b;
        p.backward[b] = a;
    }
    return p;
}

PairingMap read_pairing_csv_file(const std::string& path, const PointCloud& mi,
                                 const PointCloud& mj) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_pairing_csv(in, mi, mj);
}

void write_pairing_csv(const PairingMap& pairing, const PointCloud& mi, const PointCloud& mj,
                       std::ostream& out) {
    out << "i,j\n";
    for (std::size_t a = 0; a < pairing.forward.size(); ++a)
        if (pairing.forward[a] >= 0)
            out << mi.ids[a] << ',' << mj.ids[pairing.forward[a]] << "\n";
}

nlohmann::json diagram_to_json(const std::vector<PersistencePair>& pairs,
                               const EdgeDecomposition& decomp) {
    nlohmann::json j;
    j["dim0"] = nlohmann::json::array();
    j["dim0_essential"] = nlohmann::json::array();
    j["dim1"] = nlohmann::json::array();
    for (const auto& p : pairs) {
        if (p.dim == 0) {
            if (p.death_edge)
                j["dim0"].push_back({p.birth, p.death});
            else
                j["dim0_essential"].push_back({p.birth, nullptr});
        } else {
            j["dim1"].push_back({p.birth, nullptr});
        }
    }
    j["h0_edges"] = nlohmann::json::array();
    for (const Edge& e : decomp.h0_death_edges) j["h0_edges"].push_back({e.a, e.b, e.weight});
    j["h1_edges"] = nlohmann::json::array();
    for (const Edge& e : decomp.h1_birth_edges) j["h1_edges"].push_back({e.a, e.b, e.weight});
    return j;
}

namespace {

nlohmann::json align_config_to_json(const AlignConfig& cfg) {
    nlohmann::json j;
    j["c"] = cfg.c;
    j["c2"] = cfg.c2;
    j["use_abs"] = cfg.use_abs;
    j["variant"] = variant_name(cfg.variant);
    j["skip_eps"] = cfg.skip_eps;
    j["metric"] = cfg.metric == MetricKind::Euclidean ? "euclidean" : "cosine";
    j["h1_cap"] = cfg.ph_opts.h1_cap ? nlohmann::json(*cfg.ph_opts.h1_cap) : nlohmann::json();
    j["max_scale"] =
        cfg.ph_opts.max_scale ? nlohmann::json(*cfg.ph_opts.max_scale) : nlohmann::json();
    j["wasserstein_q"] = cfg.wasserstein_q;
    j["pi_resolution"] = cfg.pi_resolution;
    j["pi_sigma"] = cfg.pi_sigma ? nlohmann::json(*cfg.pi_sigma) : nlohmann::json();
    return j;
}

} // namespace

nlohmann::json loss_report_to_json(const LossReport& rep) {
    nlohmann::json j;
    j["loss_0death"] = rep.loss_0death;
    j["loss_1birth"] = rep.loss_1birth;
    j["loss_contrastive"] = rep.loss_contrastive;
    j["loss_total"] = rep.loss_total;
    j["skipped_edges"] = rep.skipped_edges;
    j["config"] = align_config_to_json(rep.config);
    j["config"]["tau"] = rep.tau;
    if (rep.diagram_params) {
        const auto& p = *rep.diagram_params;
        nlohmann::json d;
        d["h1_death_substitute_i"] = p.h1_death_substitute_i;
        d["h1_death_substitute_j"] = p.h1_death_substitute_j;
        if (rep.config.variant == LossVariant::Pi) {
            d["sigma_dim0"] = p.sigma_dim0;
            d["sigma_dim1"] = p.sigma_dim1;
            d["bounds_dim0"] = p.bounds_dim0;
            d["bounds_dim1"] = p.bounds_dim1;
        }
        j["config"]["diagram_params"] = d;
    }
    return j;
}

nlohmann::json persistence_image_to_json(const PersistenceImage& img) {
    nlohmann::json j;
    j["resolution"] = img.resolution;
    j["bounds"] = img.bounds;
    j["sigma"] = img.sigma;
    auto grid = nlohmann::json::array();
    for (std::size_t ib = 0; ib < img.resolution; ++ib) {
        auto row = nlohmann::json::array();
        for (std::size_t ip = 0; ip < img.resolution; ++ip) row.push_back(img.at(ib, ip));
        grid.push_back(row);
    }
    j["grid"] = grid;
    return j;
}

PersistenceImage persistence_image_from_json(const nlohmann::json& j) {
    PersistenceImage img;
    img.resolution = j.at("resolution").get<std::size_t>();
    img.sigma = j.at("sigma").get<double>();
    const auto b = j.at("bounds");
    for (std::size_t k = 0; k < 4; ++k) img.bounds[k] = b.at(k).get<double>();
    img.grid.reserve(img.resolution * img.resolution);
    for (const auto& row : j.at("grid"))
        for (const auto& cell : row) img.grid.push_back(cell.get<double>());
    if (img.grid.size() != img.resolution * img.resolution)
        throw ParseError("persistence image grid does not match the resolution");
    return img;
}

nlohmann::json train_result_to_json(const TrainResult& res, const TrainConfig& cfg) {
    nlohmann::json j;
    j["config"] = align_config_to_json(cfg.align);
    j["config"]["steps"] = cfg.steps;
    j["config"]["learning_rate"] = cfg.learning_rate;
    j["config"]["tau"] = cfg.tau;
    j["config"]["labeled_fraction"] = cfg.labeled_fraction;
    j["config"]["seed"] = cfg.seed;
    j["config"]["optimize"] = optimize_mode_name(cfg.optimize);
    j["config"]["momentum"] = cfg.momentum;
    j["labeled"] = res.labeled;

    auto history = nlohmann::json::array();
    for (const auto& s : res.loss_history) {
        history.push_back({{"loss_total", s.loss_total},
                           {"loss_contrastive", s.loss_contrastive},
                           {"loss_0death", s.loss_0death},
                           {"loss_1birth", s.loss_1birth},
                           {"skipped_edges", s.skipped_edges}});
    }
    j["loss_history"] = history;

    auto metrics = [](const AgreementMetrics& m) {
        return nlohmann::json{{"mst_overlap", m.mst_overlap},
                              {"retrieval_r1", m.retrieval_r1},
                              {"retrieval_r5", m.retrieval_r5}};
    };
    j["metrics"] = {{"start", metrics(res.start)}, {"end", metrics(res.end)}};
    return j;
}

nlohmann::json synth_spec_to_json(const SynthSpec& spec) {
    nlohmann::json j;
    j["n_points"] = spec.n_points;
    j["dim"] = spec.dim;
    j["structure"] = structure_name(spec.structure);
    j["clusters_k"] = spec.clusters_k;
    j["cluster_spread"] = spec.cluster_spread;
    j["circle_radius"] = spec.circle_radius;
    j["circle_noise"] = spec.circle_noise;
    j["seed"] = spec.seed;
    j["gap"] = {{"rotation_angle", spec.gap.rotation_angle},
                {"rot_axis_a", spec.gap.rot_axis_a},
                {"rot_axis_b", spec.gap.rot_axis_b},
                {"noise_sigma", spec.gap.noise_sigma},
                {"translation", spec.gap.translation},
                {"sign_flip", spec.gap.sign_flip}};
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace topoalign
