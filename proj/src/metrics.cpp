#include "navth/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "navth/error.hpp"

namespace navth {

double spl_term(const EpisodeResult& r) {
  if (!r.success) return 0.0;
  if (r.shortest_path_m <= 0.0) return 1.0;
  return r.shortest_path_m / std::max(r.path_m, r.shortest_path_m);
}

double spl(const std::vector<EpisodeResult>& results) {
  if (results.empty()) throw PreconditionError("empty_results", "SPL needs at least one episode");
  double sum = 0.0;
  for (const auto& r : results) sum += spl_term(r);
  return sum / static_cast<double>(results.size());
}

double success_rate(const std::vector<EpisodeResult>& results) {
  if (results.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : results) s += r.success;
  return s / static_cast<double>(results.size());
}

BenchmarkReport benchmark_report(const std::vector<EpisodeResult>& results) {
  struct Acc {
    std::size_t n = 0;
    double success = 0, spl = 0, length = 0, path = 0;
  };
  std::array<Acc, 3> acc{};
  for (const auto& r : results) {
    if (!r.bucket) continue;
    Acc& a = acc[static_cast<std::size_t>(*r.bucket)];
    ++a.n;
    a.success += r.success;
    a.spl += spl_term(r);
    a.length += r.actions;
    a.path += r.path_m;
  }
  BenchmarkReport report;
  for (std::size_t b = 0; b < 3; ++b) {
    BucketRow& row = report.rows[b];
    row.bucket = static_cast<DifficultyBucket>(b);
    row.episodes = acc[b].n;
    if (acc[b].n == 0) continue;
    const double n = static_cast<double>(acc[b].n);
    row.success_pct = 100.0 * acc[b].success / n;
    row.spl = acc[b].spl / n;
    row.mean_episode_length = acc[b].length / n;
    row.mean_path_length = acc[b].path / n;
  }
  return report;
}

std::string BenchmarkReport::to_text() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %9s %8s %8s %9s %9s\n", "bucket", "episodes", "success",
                "SPL", "episode", "path");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-8s %9zu %8.2f %8.2f %9.2f %9.2f\n", to_string(r.bucket),
                  r.episodes, r.success_pct, 100.0 * r.spl, r.mean_episode_length, r.mean_path_length);
    os << line;
  }
  return os.str();
}

std::string BenchmarkReport::to_tsv() const {
  std::ostringstream os;
  os << "bucket\tepisodes\tsuccess_pct\tspl\tmean_episode_length\tmean_path_length_m\n";
  os.precision(17);
  for (const auto& r : rows)
    os << to_string(r.bucket) << '\t' << r.episodes << '\t' << r.success_pct << '\t' << r.spl << '\t'
       << r.mean_episode_length << '\t' << r.mean_path_length << '\n';
  return os.str();
}

double collision_free_fraction(const std::vector<EpisodeResult>& results) {
  if (results.empty()) return 1.0;
  const auto clean = std::count_if(results.begin(), results.end(),
                                   [](const EpisodeResult& r) { return r.collisions == 0; });
  return static_cast<double>(clean) / static_cast<double>(results.size());
}

EpisodeResult summarize_episode(const EpisodeState& ep, double shortest_path_m,
                                std::optional<DifficultyBucket> bucket) {
  EpisodeResult r;
  r.success = ep.outcome == Outcome::success ? 1 : 0;
  r.shortest_path_m = shortest_path_m;
  r.path_m = ep.path_length();
  r.actions = ep.t;
  r.collisions = ep.collisions();
  r.bucket = bucket;
  r.target_category = ep.spec.target_category;
  r.scene_id = ep.scene ? ep.scene->id : std::string{};
  return r;
}

}  // namespace navth
