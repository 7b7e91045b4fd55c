#pragma once

#include <string>

#include <json.hpp>

#include "regsets/ambient.hpp"
#include "regsets/covering.hpp"
#include "regsets/hierarchy.hpp"
#include "regsets/intervals.hpp"
#include "regsets/net.hpp"
#include "regsets/supersets.hpp"

namespace regsets {

using Json = nlohmann::ordered_json;

// Net descriptor: {schema, dim, points, weights, resolution, metric}.
Json net_to_json(const WeightedNet& net);
WeightedNet net_from_json(const Json& j);
std::string net_to_csv(const WeightedNet& net);

// Hierarchy as the nested {word, center, rho, children} tree.
Json hierarchy_to_json(const BallHierarchy& h, const WeightedNet& net);

// Map graph on the deepest level: evaluable correspondence artifact.
Json correspondence_to_json(const Correspondence& corr);

Json packing_to_json(const WeightedNet& net, const Packing& packing, bool verified);
Json gap_cover_to_json(const WeightedNet& net, const GapCover& cover, bool verified);

Json task_to_json(const BallTranslationTask& task);
BallTranslationTask task_from_json(const Json& j);

Json family_to_json(const IntervalFamily& family);
Json witness_to_json(const WitnessReport& report);

// Minimal deterministic SVG renderings for dim <= 2.
std::string net_to_svg(const WeightedNet& net);
std::string family_to_svg(const IntervalFamily& family);
std::string probes_to_svg(const std::vector<Point>& before, const std::vector<Point>& after);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
Json read_json_file(const std::string& path);

}  // namespace regsets
