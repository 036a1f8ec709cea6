#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "navth/metrics.hpp"
#include "navth/scene.hpp"
#include "navth/task.hpp"
#include "navth/world.hpp"

namespace navth {

using json = nlohmann::json;

inline constexpr const char* kSceneSchema = "navth-scene/1";
inline constexpr const char* kCatalogSchema = "navth-catalog/1";
inline constexpr const char* kObservationSchema = "navth-obs/1";
inline constexpr const char* kTrajectorySchema = "navth-traj/1";
inline constexpr const char* kResultsSchema = "navth-results/1";
inline constexpr const char* kCorpusSchema = "navth-corpus/1";

json scene_to_json(const Scene& scene);
/// Parses and validates against the catalog; throws SchemaError (with the
/// field path) or InvariantError.
Scene scene_from_json(const json& doc, const AssetCatalog& catalog = default_catalog());
std::string save_scene(const Scene& scene);
Scene load_scene(const std::string& text, const AssetCatalog& catalog = default_catalog());

/// Corpus directory: corpus.json (splits and scene ids) plus one
/// scenes/<id>.json per scene.
void save_corpus(const Corpus& corpus, const std::string& dir);
/// Loads, validates every scene and checks split hygiene.
Corpus load_corpus(const std::string& dir, const AssetCatalog& catalog = default_catalog());

json catalog_to_json(const AssetCatalog& catalog);
AssetCatalog catalog_from_json(const json& doc);

json pose_to_json(const AgentState& s);
AgentState pose_from_json(const json& j, const std::string& path = "pose");

json observation_to_json(const Observation& obs);
Observation observation_from_json(const json& doc);

json result_to_json(const EpisodeResult& r);
EpisodeResult result_from_json(const json& j);
/// Line-delimited results file: a schema header line, then one record per line.
void write_results(std::ostream& os, const std::vector<EpisodeResult>& results);
std::vector<EpisodeResult> read_results(std::istream& is);

struct TrajectoryFile {
  std::string scene_id;
  std::string target;
  AgentState start;
  std::vector<TrajectoryEntry> steps;
  Outcome outcome = Outcome::running;
};

TrajectoryFile trajectory_of(const EpisodeState& ep);
void write_trajectory(std::ostream& os, const TrajectoryFile& traj);
TrajectoryFile read_trajectory(std::istream& is);

/// Field access helpers that raise SchemaError with the field path.
const json& require(const json& j, const std::string& key, const std::string& path);
double require_number(const json& j, const std::string& key, const std::string& path);
std::string require_string(const json& j, const std::string& key, const std::string& path);

}  // namespace navth
