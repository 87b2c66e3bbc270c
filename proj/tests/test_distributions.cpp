#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "otrepair/distributions.hpp"
#include "otrepair/error.hpp"
#include "testutil.hpp"

using namespace otrepair;
using testutil::grid_support;

namespace {

bool throws_code(const std::function<void()>& fn, const std::string& code) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("support canonicalizes and indexes points") {
  auto sup = std::make_shared<Support>(
      std::vector<Support::Point>{{3.0}, {1.0}, {2.0}});
  CHECK(sup->size() == 3);
  CHECK(sup->point(0) == Support::Point{1.0});
  CHECK(sup->point(2) == Support::Point{3.0});
  for (std::size_t i = 0; i < sup->size(); ++i)
    CHECK(*sup->index(sup->point(i)) == i);
  CHECK(!sup->index({7.0}).has_value());

  CHECK(throws_code([] { Support(std::vector<Support::Point>{}); }, "EmptySupport"));
  CHECK(throws_code([] { Support({{1.0}, {1.0}}); }, "DuplicatePoint"));
  CHECK(throws_code([] { Support({{1.0}, {1.0, 2.0}}); }, "DimensionMismatch"));
}

TEST_CASE("support spacing checks") {
  CHECK(grid_support(5, -2.0, 1.0)->evenly_spaced());
  auto uneven = std::make_shared<Support>(std::vector<Support::Point>{{0.0}, {1.0}, {3.0}});
  CHECK(!uneven->evenly_spaced());
  auto tuple2d = std::make_shared<Support>(std::vector<Support::Point>{{0.0, 1.0}, {1.0, 0.0}});
  CHECK(!tuple2d->evenly_spaced());
}

TEST_CASE("make_simplex validates and renormalizes") {
  auto sup = grid_support(2);
  auto s = make_simplex({0.5, 0.5}, sup);
  CHECK(s[0] == 0.5);
  auto vertex = make_simplex({1.0, 0.0}, sup);
  CHECK(vertex[0] == 1.0);
  CHECK(vertex[1] == 0.0);
  CHECK(throws_code([&] { make_simplex({0.3, 0.3}, sup); }, "NotAProbabilityVector"));
  CHECK(throws_code([&] { make_simplex({0.5}, sup); }, "LengthMismatch"));

  // Dust below -1e-12 is rejected; above it, clamped.
  CHECK(throws_code([&] { make_simplex({1.0, -1e-11}, sup); }, "NotAProbabilityVector"));
  auto clamped = make_simplex({1.0, -1e-13}, sup);
  CHECK(clamped[1] == 0.0);

  // Small drift renormalizes, large drift errors out.
  auto drift = make_simplex({0.5, 0.5 + 5e-7}, sup);
  CHECK(drift[0] + drift[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(throws_code([&] { make_simplex({0.5, 0.5 + 2e-6}, sup); }, "NotAProbabilityVector"));
}

TEST_CASE("empirical distribution from weighted samples") {
  auto sup = grid_support(2);
  auto p = empirical_distribution({{{0.0}, 1.0}, {{0.0}, 1.0}, {{1.0}, 2.0}}, sup);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));

  auto atom = empirical_distribution({{{0.0}, 5.0}}, sup);
  CHECK(atom[0] == 1.0);
  CHECK(atom[1] == 0.0);

  CHECK(throws_code([&] { empirical_distribution({{{9.0}, 1.0}}, sup); }, "PointOffSupport"));
  CHECK(throws_code([&] { empirical_distribution({{{0.0}, 0.0}}, sup); }, "ZeroTotalWeight"));
}

TEST_CASE("observation toy data reproduces the group empiricals") {
  // Six unit-weight samples: one (i, s0), two (i, s1), two (i', s0), one (i', s1).
  auto sup = grid_support(2);
  std::vector<GroupedPoint> samples = {
      {{0.0}, 1.0, 0}, {{0.0}, 1.0, 1}, {{0.0}, 1.0, 1},
      {{1.0}, 1.0, 0}, {{1.0}, 1.0, 0}, {{1.0}, 1.0, 1},
  };
  std::vector<WeightedPoint> blind;
  for (const auto& s : samples) blind.push_back({s.point, s.weight});

  auto p = empirical_distribution(blind, sup);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));

  auto grouped = groupwise_empirical(samples, sup);
  CHECK(grouped.at(0)[0] == doctest::Approx(1.0 / 3.0));
  CHECK(grouped.at(0)[1] == doctest::Approx(2.0 / 3.0));
  CHECK(grouped.at(1)[0] == doctest::Approx(2.0 / 3.0));
  CHECK(grouped.at(1)[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("groupwise edge cases") {
  auto sup = grid_support(2);
  auto single = groupwise_empirical({{{0.0}, 1.0, 7}, {{1.0}, 3.0, 7}}, sup);
  CHECK(single.size() == 1);
  CHECK(single.at(7)[1] == doctest::Approx(0.75));
  CHECK(throws_code([&] { groupwise_empirical({{{0.0}, 0.0, 0}, {{1.0}, 1.0, 1}}, sup); },
                    "EmptyGroup"));
}

TEST_CASE("tv distance basics") {
  auto sup = grid_support(2);
  auto p = make_simplex({1.0 / 3.0, 2.0 / 3.0}, sup);
  auto q = make_simplex({2.0 / 3.0, 1.0 / 3.0}, sup);
  CHECK(tv_distance(p, p) == 0.0);
  CHECK(tv_distance(make_simplex({1.0, 0.0}, sup), make_simplex({0.0, 1.0}, sup)) == 1.0);
  CHECK(tv_distance(p, q) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  auto other = grid_support(3);
  CHECK(throws_code([&] { tv_distance(p, make_simplex({0.5, 0.25, 0.25}, other)); },
                    "SupportMismatch"));
}

TEST_CASE("tv distance is a metric on random triples") {
  std::mt19937_64 rng(42);
  auto sup = grid_support(6);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = make_simplex(testutil::random_simplex(rng, 6), sup);
    auto q = make_simplex(testutil::random_simplex(rng, 6), sup);
    auto r = make_simplex(testutil::random_simplex(rng, 6), sup);
    const double pq = tv_distance(p, q);
    CHECK(pq == tv_distance(q, p));
    CHECK(pq >= 0.0);
    CHECK(pq <= 1.0);
    CHECK(tv_distance(p, p) == 0.0);
    CHECK(pq <= tv_distance(p, r) + tv_distance(r, q) + 1e-12);
  }
}

TEST_CASE("repair vector from the observation data") {
  auto sup = grid_support(2);
  auto p = make_simplex({0.5, 0.5}, sup);
  auto p0 = make_simplex({1.0 / 3.0, 2.0 / 3.0}, sup);
  auto p1 = make_simplex({2.0 / 3.0, 1.0 / 3.0}, sup);
  auto v = repair_vector(p, p0, p1);
  CHECK(v[0] == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(v.active() == std::vector<std::size_t>{0, 1});

  auto zero = repair_vector(p, p0, p0);
  CHECK(zero.active().empty());
  CHECK(zero[0] == 0.0);

  CHECK(throws_code(
      [&] {
        repair_vector(make_simplex({1.0, 0.0}, sup), make_simplex({0.0, 1.0}, sup), p1);
      },
      "DivisionBySupportHole"));
}

TEST_CASE("repair vector invariants on random group pairs") {
  std::mt19937_64 rng(7);
  const std::size_t n = 8;
  auto sup = grid_support(n);
  for (int trial = 0; trial < 100; ++trial) {
    auto px = testutil::random_simplex(rng, n);
    auto p0 = testutil::random_simplex(rng, n);
    auto p1 = testutil::random_simplex(rng, n);
    auto v = repair_vector(make_simplex(px, sup), make_simplex(p0, sup), make_simplex(p1, sup));

    double inner = 0.0, l1 = 0.0, inv = 0.0;
    double vmin = 0.0, vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      inner += px[i] * v[i];
      l1 += std::abs(v[i]);
      inv += 1.0 / px[i];
      vmin = std::min(vmin, v[i]);
      vmax = std::max(vmax, v[i]);
    }
    CHECK(std::abs(inner) <= 1e-9);
    const bool zero = v.active().empty();
    CHECK((zero || (vmin < 0.0 && vmax > 0.0)));
    CHECK(l1 <= 2.0 * inv + 1e-9);
  }
}
