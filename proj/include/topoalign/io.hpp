#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "topoalign/alignment.hpp"
#include "topoalign/datagen.hpp"
#include "topoalign/diagrams.hpp"
#include "topoalign/filtration.hpp"
#include "topoalign/geometry.hpp"
#include "topoalign/trainer.hpp"

// File formats: point-cloud CSV (header "id,x0,...,x{d-1}"), pairing CSV
// (header "i,j" of id pairs), and the JSON schemas for diagrams, loss
// reports, persistence images, and training results. CSV floats are
// written with 17 significant digits so values round-trip exactly.

namespace topoalign {

std::string format_double(double v); // %.17g, shortest exact round trip

PointCloud read_point_cloud_csv(std::istream& in);
PointCloud read_point_cloud_csv_file(const std::string& path);
void write_point_cloud_csv(const PointCloud& cloud, std::ostream& out);
void write_point_cloud_csv_file(const PointCloud& cloud, const std::string& path);

// Pairing file: one "id_i,id_j" row per pair; resolved against the two
// clouds' id columns.
PairingMap read_pairing_csv(std::istream& in, const PointCloud& mi, const PointCloud& mj);
PairingMap read_pairing_csv_file(const std::string& path, const PointCloud& mi,
                                 const PointCloud& mj);
void write_pairing_csv(const PairingMap& pairing, const PointCloud& mi, const PointCloud& mj,
                       std::ostream& out);

// {"dim0": [[b,d],...], "dim0_essential": [[0,null],...],
//  "dim1": [[b,null],...], "h0_edges": [[a,b,w],...], "h1_edges": [[a,b,w],...]}
nlohmann::json diagram_to_json(const std::vector<PersistencePair>& pairs,
                               const EdgeDecomposition& decomp);

nlohmann::json loss_report_to_json(const LossReport& rep);

nlohmann::json persistence_image_to_json(const PersistenceImage& img);
PersistenceImage persistence_image_from_json(const nlohmann::json& j);

nlohmann::json train_result_to_json(const TrainResult& res, const TrainConfig& cfg);

nlohmann::json synth_spec_to_json(const SynthSpec& spec);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace topoalign
