#include <doctest.h>

#include <algorithm>

#include "evoter/errors.hpp"
#include "evoter/pareto.hpp"
#include "evoter/rng.hpp"

using namespace evoter;

namespace {

Candidate point(std::vector<double> objectives, std::uint64_t id) {
  Candidate c;
  c.objectives = std::move(objectives);
  c.id = id;
  // distinct throwaway genome so exact-duplicate suppression never triggers
  c.genome.default_action = {"A", 1.0};
  c.genome.default_action.name += std::to_string(id);
  return c;
}

/// O(n^2) oracle: keep exactly the points no other point dominates.
std::vector<std::vector<double>> brute_force_front(
    const std::vector<std::vector<double>>& points) {
  std::vector<std::vector<double>> front;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j)
      if (j != i) dominated = dominates(points[j], points[i]);
    if (!dominated) front.push_back(points[i]);
  }
  std::sort(front.begin(), front.end());
  return front;
}

std::vector<std::vector<double>> archive_points(const ParetoArchive& archive) {
  std::vector<std::vector<double>> pts;
  for (const auto& m : archive.members()) pts.push_back(m.objectives);
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace

TEST_SUITE("pareto") {

TEST_CASE("incomparable points are both retained; a dominator evicts") {
  ParetoArchive archive;
  CHECK(archive.offer(point({1, 0}, 1)));
  CHECK(archive.offer(point({0, 1}, 2)));
  CHECK(archive.size() == 2);
  CHECK(archive.offer(point({1, 1}, 3)));
  REQUIRE(archive.size() == 1);
  CHECK(archive.members()[0].objectives == std::vector<double>{1, 1});
  // dominated newcomer is refused
  CHECK_FALSE(archive.offer(point({0.5, 0.5}, 4)));
  CHECK(archive.size() == 1);
}

TEST_CASE("dimension mismatch is rejected") {
  ParetoArchive archive;
  archive.offer(point({1, 0}, 1));
  CHECK_THROWS_AS(archive.offer(point({1, 0, 0}, 2)), DimensionMismatch);
  CHECK_THROWS_AS(dominates({1.0}, {1.0, 2.0}), DimensionMismatch);
}

TEST_CASE("equal objective vectors from distinct genomes coexist") {
  ParetoArchive archive;
  CHECK(archive.offer(point({1, 1}, 1)));
  CHECK(archive.offer(point({1, 1}, 2)));
  CHECK(archive.size() == 2);
  // exact duplicate (same genome too) is dropped
  Candidate dup = point({1, 1}, 3);
  dup.genome.default_action.name = "A1";
  CHECK_FALSE(archive.offer(dup));
}

TEST_CASE("random 2-objective stream matches brute force at every prefix") {
  RandomSource rng(606);
  ParetoArchive archive;
  std::vector<std::vector<double>> seen;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> obj{rng.uniform(), rng.uniform()};
    seen.push_back(obj);
    archive.offer(point(obj, static_cast<std::uint64_t>(i + 1)));
    if (i % 37 == 0 || i == 999) {  // spot-check prefixes, full check at the end
      CHECK(archive_points(archive) == brute_force_front(seen));
    }
  }
}

TEST_CASE("tie-heavy integer grid stream matches brute force") {
  RandomSource rng(707);
  ParetoArchive archive;
  std::vector<std::vector<double>> seen;
  for (int i = 0; i < 400; ++i) {
    std::vector<double> obj{static_cast<double>(rng.below(5)),
                            static_cast<double>(rng.below(5))};
    seen.push_back(obj);
    archive.offer(point(obj, static_cast<std::uint64_t>(i + 1)));
  }
  CHECK(archive_points(archive) == brute_force_front(seen));
}

}  // TEST_SUITE
