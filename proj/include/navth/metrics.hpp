#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "navth/task.hpp"

namespace navth {

struct EpisodeResult {
  int success = 0;                // S
  double shortest_path_m = 0.0;   // l
  double path_m = 0.0;            // p, realised displacement
  int actions = 0;
  int collisions = 0;
  std::optional<DifficultyBucket> bucket;
  std::string target_category;
  std::string scene_id;

  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

/// Per-episode term S * l / max(p, l), equal to S when l = 0.
double spl_term(const EpisodeResult& r);

/// Mean SPL over a non-empty result list.
double spl(const std::vector<EpisodeResult>& results);
double success_rate(const std::vector<EpisodeResult>& results);

struct BucketRow {
  DifficultyBucket bucket = DifficultyBucket::easy;
  std::size_t episodes = 0;
  double success_pct = 0.0;
  double spl = 0.0;  // fraction in [0, 1]
  double mean_episode_length = 0.0;
  double mean_path_length = 0.0;
};

struct BenchmarkReport {
  std::array<BucketRow, 3> rows;  // easy, medium, hard
  const BucketRow& row(DifficultyBucket b) const { return rows[static_cast<std::size_t>(b)]; }

  /// Aligned-column text.
  std::string to_text() const;
  /// Tab-separated values with a header line.
  std::string to_tsv() const;
};

/// Streaming aggregation; results without a bucket are ignored.
BenchmarkReport benchmark_report(const std::vector<EpisodeResult>& results);

double collision_free_fraction(const std::vector<EpisodeResult>& results);

/// Result record of a finished episode.
EpisodeResult summarize_episode(const EpisodeState& ep, double shortest_path_m,
                                std::optional<DifficultyBucket> bucket);

}  // namespace navth
