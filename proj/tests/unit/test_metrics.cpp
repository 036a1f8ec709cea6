#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "navth/error.hpp"
#include "navth/io.hpp"
#include "navth/metrics.hpp"

using namespace navth;

namespace {

EpisodeResult ep(int s, double l, double p, int collisions = 0,
                 std::optional<DifficultyBucket> b = DifficultyBucket::easy) {
  EpisodeResult r;
  r.success = s;
  r.shortest_path_m = l;
  r.path_m = p;
  r.collisions = collisions;
  r.bucket = b;
  r.actions = static_cast<int>(p / 0.25) + 1;
  return r;
}

}  // namespace

TEST_CASE("SPL hand-computed values") {
  CHECK(spl({ep(1, 4, 5)}) == doctest::Approx(0.8));
  CHECK(spl({ep(0, 4, 5)}) == 0.0);
  CHECK(spl({ep(1, 4, 4)}) == 1.0);
  CHECK(spl({ep(1, 4, 2)}) == 1.0);
  CHECK(spl({ep(1, 0, 0)}) == 1.0);
  CHECK(spl({ep(1, 0, 3)}) == 1.0);
  CHECK(spl({ep(1, 4, 5), ep(0, 2, 2), ep(1, 3, 6)}) == doctest::Approx((0.8 + 0.0 + 0.5) / 3));
  CHECK_THROWS_AS(spl({}), PreconditionError);
}

TEST_CASE("SPL properties on random result sets") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<EpisodeResult> rs;
    const int n = 1 + static_cast<int>(rng.below(40));
    for (int i = 0; i < n; ++i) {
      const double l = rng.uniform(0, 10);
      rs.push_back(ep(rng.bernoulli(0.6), l, l + rng.uniform(0, 10)));
    }
    const double v = spl(rs);
    CHECK(v >= 0.0);
    CHECK(v <= success_rate(rs) + 1e-12);

    auto shuffled = rs;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(spl(shuffled) == doctest::Approx(v));

    auto scaled = rs;
    for (auto& r : scaled) {
      r.shortest_path_m *= 3.7;
      r.path_m *= 3.7;
    }
    CHECK(spl(scaled) == doctest::Approx(v));
  }
}

TEST_CASE("benchmark report groups by bucket") {
  const std::vector<EpisodeResult> rs{ep(1, 4, 5, 0, DifficultyBucket::easy),
                                      ep(0, 4, 5, 1, DifficultyBucket::easy),
                                      ep(1, 2, 2, 0, DifficultyBucket::hard),
                                      ep(1, 2, 2, 0, std::nullopt)};
  const auto rep = benchmark_report(rs);
  CHECK(rep.row(DifficultyBucket::easy).episodes == 2);
  CHECK(rep.row(DifficultyBucket::easy).success_pct == doctest::Approx(50.0));
  CHECK(rep.row(DifficultyBucket::easy).spl == doctest::Approx(0.4));
  CHECK(rep.row(DifficultyBucket::medium).episodes == 0);
  CHECK(rep.row(DifficultyBucket::hard).spl == doctest::Approx(1.0));
  CHECK(rep.to_text().find("easy") != std::string::npos);
  CHECK(rep.to_tsv().rfind("bucket\t", 0) == 0);

  CHECK(collision_free_fraction(rs) == doctest::Approx(0.75));
}

TEST_CASE("results file round-trips") {
  std::vector<EpisodeResult> rs{ep(1, 4, 5, 2), ep(0, 1.25, 3, 0, std::nullopt)};
  rs[0].scene_id = "test-dev_D01_0";
  rs[0].target_category = "Mug";
  std::stringstream ss;
  write_results(ss, rs);
  CHECK(read_results(ss) == rs);

  std::stringstream bad("{\"schema\":\"navth-results/9\"}\n");
  CHECK_THROWS_AS(read_results(bad), SchemaError);
}
