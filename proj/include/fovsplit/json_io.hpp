#pragma once

#include <string>

#include "fovsplit/bernoulli.hpp"
#include "fovsplit/cardinality.hpp"
#include "fovsplit/gaussmix.hpp"
#include "fovsplit/regions.hpp"
#include "fovsplit/scenarios.hpp"
#include "fovsplit/splitlib.hpp"
#include "fovsplit/splitter.hpp"

#include "json.hpp"

namespace fovsplit::io {

using nlohmann::json;

// Malformed documents raise std::invalid_argument with a field path.

json to_json(const GaussianMixture& gm);
GaussianMixture gm_from_json(const json& j);

json to_json(const Region& r);
Region region_from_json(const json& j);

json to_json(const SplitParams& p);
SplitParams split_params_from_json(const json& j);

// Library document: {"entries": {"R:lambda": {weights, means, sigma, cost}}}.
json library_to_json(const SplitLibrary& lib);
void library_merge_from_json(SplitLibrary& lib, const json& j);

json to_json(const SplitConfig& cfg);
SplitConfig split_config_from_json(const json& j, SplitConfig base = {});

json to_json(const PoissonIntensity& d);
PoissonIntensity poisson_from_json(const json& j);

json to_json(const MbComponents& mb);
MbComponents mb_from_json(const json& j);

json to_json(const GlmbParams& glmb);
GlmbParams glmb_from_json(const json& j);

json to_json(const AnchorMap& a);
AnchorMap anchor_map_from_json(const json& j);

// Config documents override the built-in defaults field by field.
AirportConfig airport_config_from_json(const json& j);
PlacementConfig placement_config_from_json(const json& j);

json step_to_json(const TrackStep& s);
TrackStep step_from_json(const json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace fovsplit::io
