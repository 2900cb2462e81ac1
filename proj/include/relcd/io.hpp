#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "relcd/datagen.hpp"
#include "relcd/citest.hpp"
#include "relcd/ground_graph.hpp"
#include "relcd/rcm.hpp"
#include "relcd/rpcd.hpp"
#include "relcd/schema.hpp"
#include "relcd/skeleton.hpp"

namespace relcd::io {

using json = nlohmann::ordered_json;

/// Malformed or inconsistent input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// schema.json: {entities: [..], relationships: [{id, participants: [{entity,
// cardinality}]}], attributes: [{id, owner}]}
json to_json(const Schema& s);
Schema schema_from_json(const json& j);

// skeleton.json: {items: [{id, class}], relationships: [{id, class,
// participants: [item-id]}]}. Entity items go in `items`; relationship items
// are listed in both.
json to_json(const Skeleton& sk);
Skeleton skeleton_from_json(const Schema& s, const json& j);

// model.json: {hop_threshold, deps: [{cause_path, cause_attr, effect_attr,
// directed}], h_edges: [{from, to, directed}], non_colliders: [[X, Y, Z]]}
json to_json(const Model& m);
Model model_from_json(const Schema& s, const json& j);

// params.json: {noise_sd, coeff_sd, beta: [{cause_path, cause_attr,
// effect_attr, value}]}
json to_json(const LinearGaussianParams& p);
LinearGaussianParams params_from_json(const json& j);

// data.csv: item_id,attribute,value with values at full precision.
void write_data_csv(std::ostream& os, const Skeleton& sk, const AttrData& data);
AttrData read_data_csv(std::istream& is, const Skeleton& sk);

// gg.csv: src,dst as item.attribute labels.
void write_ground_graph_csv(std::ostream& os, const Skeleton& sk, const GroundGraph& gg);

// flat.csv: item_id then one column per table column; multiset cells are
// '|'-joined values.
void write_flat_csv(std::ostream& os, const Skeleton& sk, const FlatTable& t);

// report.json: {queries: [{U, V, W, p_value, decision, aggregated, phase,
// provenance, error, note}], sepsets, verdicts, log, timings}
json to_json(const RunReport& r);
RunReport report_from_json(const json& j);

/// Formats a double so that reading it back yields the same value.
std::string format_double(double v);

json read_json_file(const std::filesystem::path& p);
/// Writes through a temporary file and renames it into place.
void write_text_file(const std::filesystem::path& p, const std::string& content);
std::string read_text_file(const std::filesystem::path& p);

}  // namespace relcd::io
