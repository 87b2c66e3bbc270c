#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "otrepair/error.hpp"
#include "otrepair/solvers.hpp"
#include "otrepair/transport.hpp"
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

// Scalar oracle for the symmetric 2x2 entropic problem with uniform
// marginals and zero-diagonal unit cost: the coupling is [[a, 1/2-a],
// [1/2-a, a]] and the objective is minimized over a alone.
double golden_section_2x2(double epsilon) {
  auto objective = [&](double a) {
    const double b = 0.5 - a;
    auto xlogx = [](double x) { return x > 0.0 ? x * (std::log(x) - 1.0) : 0.0; };
    return 2.0 * b + epsilon * 2.0 * (xlogx(a) + xlogx(b));
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 1e-12, hi = 0.5 - 1e-12;
  double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
  for (int it = 0; it < 200; ++it) {
    if (objective(c) < objective(d)) {
      hi = d;
    } else {
      lo = c;
    }
    c = hi - phi * (hi - lo);
    d = lo + phi * (hi - lo);
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("baseline: point masses force the only feasible coupling") {
  auto sup = grid_support(2);
  auto delta = make_simplex({1.0, 0.0}, sup);
  auto cost = cost_matrix(*sup, *sup, {1.0});
  auto res = bregman_baseline(delta, delta, cost, 0.3, 10);
  CHECK(res.coupling.gamma(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.coupling.gamma(0, 1) == 0.0);
  CHECK(res.coupling.gamma(1, 0) == 0.0);
  CHECK(res.coupling.gamma(1, 1) == 0.0);
}

TEST_CASE("baseline: first projection is onto the column marginal") {
  auto sup = grid_support(3);
  std::mt19937_64 rng(5);
  auto p = make_simplex(testutil::random_simplex(rng, 3), sup);
  auto q = make_simplex(testutil::random_simplex(rng, 3), sup);
  auto cost = cost_matrix(*sup, *sup, {1.0});
  auto res = bregman_baseline(p, q, cost, 0.5, 1);
  auto expect = prox_cols(gibbs_kernel(cost, 0.5), q);
  CHECK(res.coupling.gamma == expect);
}

TEST_CASE("baseline matches the 2x2 scalar oracle") {
  auto sup = grid_support(2);
  auto uniform = make_simplex({0.5, 0.5}, sup);
  auto cost = cost_matrix(*sup, *sup, {1.0});

  for (double epsilon : {0.5, 0.2}) {
    auto res = bregman_baseline(uniform, uniform, cost, epsilon, 400);
    const double analytic = 0.5 * std::exp(1.0 / epsilon) / (1.0 + std::exp(1.0 / epsilon));
    const double oracle = golden_section_2x2(epsilon);
    CHECK(oracle == doctest::Approx(analytic).epsilon(1e-9));
    CHECK(res.coupling.gamma(0, 0) == doctest::Approx(analytic).epsilon(1e-12));
    CHECK(res.coupling.gamma(1, 1) == doctest::Approx(analytic).epsilon(1e-12));
  }

  // Small epsilon: mass stays on the cheap diagonal.
  auto sharp = bregman_baseline(uniform, uniform, cost, 0.01, 400);
  CHECK(std::abs(sharp.coupling.gamma(0, 0) - 0.5) <= 1e-6);
  CHECK(std::abs(sharp.coupling.gamma(0, 1)) <= 1e-6);
}

TEST_CASE("baseline trace and convergence plateau") {
  auto sup = grid_support(4);
  auto p = make_simplex({0.4, 0.3, 0.2, 0.1}, sup);
  auto q = make_simplex({0.1, 0.2, 0.3, 0.4}, sup);
  auto cost = cost_matrix(*sup, *sup, {1.0});

  auto res = bregman_baseline(p, q, cost, 0.5, 60);
  CHECK(res.trace.iterations == 60);
  CHECK(res.trace.row_residuals.size() == 60);
  CHECK(res.trace.col_residuals.size() == 60);
  CHECK(res.trace.band_residuals.empty());
  CHECK(res.trace.stop_reason == StopReason::MaxIterations);
  CHECK(res.trace.row_residuals.back() <= 1e-6);
  CHECK(res.trace.col_residuals.back() <= 1e-6);

  auto more = bregman_baseline(p, q, cost, 0.5, 62);
  CHECK(testutil::l1(res.coupling.gamma, more.coupling.gamma) <= 1e-8);

  CHECK(throws_code([&] { bregman_baseline(p, q, cost, 0.5, 0); }, "TooFewIterations"));
}

TEST_CASE("dykstra with a zero repair vector reduces to schedule-restricted projections") {
  auto sup = grid_support(4);
  auto p = make_simplex({0.4, 0.3, 0.2, 0.1}, sup);
  auto q = make_simplex({0.1, 0.2, 0.3, 0.4}, sup);
  auto cost = cost_matrix(*sup, *sup, {1.0});
  RepairVector zero(std::vector<double>(4, 0.0), sup);
  BandConstraint bc(zero, std::vector<double>(4, 0.0));

  auto res = dykstra_repair(p, q, bc, cost, 0.5, 150, 1e-8);
  // The band residual is identically zero, so the early exit fires at the
  // first checked iteration.
  CHECK(res.trace.stop_reason == StopReason::BandResidualBelowVarepsilon);
  CHECK(res.trace.iterations == 4);

  Matrix ref = gibbs_kernel(cost, 0.5);
  for (std::size_t k = 1; k <= res.trace.iterations; ++k) {
    const int set = static_cast<int>(1 + (k - 1) % 3);
    if (set == 1) ref = prox_rows(ref, p);
    if (set == 2) ref = prox_cols(ref, q);
  }
  CHECK(res.coupling.gamma == ref);
}

TEST_CASE("dykstra with a huge band matches the unconstrained baseline") {
  auto sup = grid_support(4);
  auto p = make_simplex({0.4, 0.3, 0.2, 0.1}, sup);
  auto q = make_simplex({0.1, 0.2, 0.3, 0.4}, sup);
  auto cost = cost_matrix(*sup, *sup, {1.0});
  RepairVector v({0.5 / 0.4, -0.25 / 0.3, -0.25 / 0.2, 0.0}, sup);
  BandConstraint loose(v, std::vector<double>(4, 1e9));

  auto dyk = dykstra_repair(p, q, loose, cost, 0.5, 149, 1e-300);
  auto base = bregman_baseline(p, q, cost, 0.5, 100);
  CHECK(testutil::l1(dyk.coupling.gamma, base.coupling.gamma) <= 1e-8);
}

TEST_CASE("dykstra drives the band residual down and keeps marginals") {
  std::mt19937_64 rng(23);
  const std::size_t n = 6;
  auto sup = grid_support(n);
  auto pv = testutil::random_simplex(rng, n);
  auto p = make_simplex(pv, sup);
  auto q = make_simplex(testutil::random_simplex(rng, n), sup);
  auto cost = cost_matrix(*sup, *sup, {0.2});
  RepairVector v(testutil::random_repair_values(rng, pv), sup);
  BandConstraint bc(v, std::vector<double>(n, 0.0));

  auto res = dykstra_repair(p, q, bc, cost, 0.5, 300, 1e-8);
  CHECK(res.trace.stop_reason == StopReason::BandResidualBelowVarepsilon);
  CHECK(res.trace.band_residuals.back() < 1e-8);
  CHECK(res.trace.band_residuals.size() == res.trace.iterations);
  CHECK(res.trace.row_residuals.back() <= 1e-8);
  CHECK(res.trace.col_residuals.back() <= 1e-7);
  for (double g : res.coupling.gamma.data()) CHECK(g >= 0.0);
  CHECK(res.coupling.gamma.total() == doctest::Approx(1.0).epsilon(1e-9));

  // Determinism: bitwise identical rerun.
  auto again = dykstra_repair(p, q, bc, cost, 0.5, 300, 1e-8);
  CHECK(res.coupling.gamma == again.coupling.gamma);

  CHECK(throws_code([&] { dykstra_repair(p, q, bc, cost, 0.5, 3, 1e-8); }, "TooFewIterations"));
  CHECK(throws_code([&] { dykstra_repair(p, q, bc, cost, 0.5, 10, 0.0); },
                    "NonPositiveVarepsilon"));
}

TEST_CASE("outer product is feasible for any band level") {
  std::mt19937_64 rng(31);
  for (std::size_t n : {3u, 5u, 8u}) {
    auto sup = grid_support(n);
    for (int trial = 0; trial < 10; ++trial) {
      auto pv = testutil::random_simplex(rng, n);
      auto qv = testutil::random_simplex(rng, n);
      auto vv = testutil::random_repair_values(rng, pv);
      Matrix outer(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) outer(i, j) = pv[i] * qv[j];
      auto rs = outer.row_sums();
      auto cs = outer.col_sums();
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(rs[i] - pv[i]) <= 1e-12);
      for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(cs[j] - qv[j]) <= 1e-12);
      CHECK(band_residual(outer, RepairVector(vv, sup)) <= 1e-12);
    }
  }
}

TEST_CASE("band feasibility is monotone in the band level") {
  std::mt19937_64 rng(37);
  const std::size_t n = 5;
  auto sup = grid_support(n);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    auto pv = testutil::random_simplex(rng, n);
    RepairVector v(testutil::random_repair_values(rng, pv), sup);
    auto gamma = testutil::random_positive_matrix(rng, n, n);

    auto in_band = [&](const std::vector<double>& lambda) {
      for (std::size_t j = 0; j < n; ++j) {
        double cur = 0.0;
        for (std::size_t i : v.active()) cur += gamma(i, j) * v[i];
        if (cur < -lambda[j] || cur > lambda[j]) return false;
      }
      return true;
    };

    // Tight bound: per-column absolute value. Any wider bound must contain it.
    std::vector<double> tight(n), wider(n);
    for (std::size_t j = 0; j < n; ++j) {
      double cur = 0.0;
      for (std::size_t i : v.active()) cur += gamma(i, j) * v[i];
      tight[j] = std::abs(cur);
      wider[j] = tight[j] + u(rng);
    }
    CHECK(in_band(tight));
    CHECK(in_band(wider));
  }
}

TEST_CASE("barycentre coupling between the group conditionals") {
  auto sup = grid_support(2);
  auto delta = make_simplex({1.0, 0.0}, sup);
  auto cost = cost_matrix(*sup, *sup, {1.0});
  auto res = barycentre_coupling(delta, delta, cost, 0.3, 10);
  CHECK(res.coupling.gamma(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  // Identical groups with small epsilon: mass stays near the diagonal.
  auto uniform = make_simplex({0.5, 0.5}, sup);
  auto same = barycentre_coupling(uniform, uniform, cost, 0.01, 400);
  CHECK(same.coupling.gamma(0, 1) <= 1e-6);
  CHECK(same.coupling.gamma(1, 0) <= 1e-6);
  CHECK(same.trace.row_residuals.back() <= 1e-6);
  CHECK(same.trace.col_residuals.back() <= 1e-6);
}

TEST_CASE("barycentre maps scatter mass at the barycentric index") {
  auto sup = grid_support(3);

  Matrix gb(3, 3, 0.0);
  gb(0, 2) = 1.0;
  auto [g0, g1] = barycentre_maps(gb, 0.5, 0.5, *sup);
  CHECK(g0(0, 1) == 1.0);
  CHECK(g0.total() == 1.0);
  CHECK(g1(2, 1) == 1.0);
  CHECK(g1.total() == 1.0);

  // pi0 = 1: group 0 keeps its positions, group 1 transports onto them.
  std::mt19937_64 rng(41);
  auto m = testutil::random_positive_matrix(rng, 3, 3);
  auto [h0, h1] = barycentre_maps(m, 1.0, 0.0, *sup);
  auto rs = m.row_sums();
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(h0(i, i) == doctest::Approx(rs[i]).epsilon(1e-15));
    for (std::size_t k = 0; k < 3; ++k)
      if (k != i) CHECK(h0(i, k) == 0.0);
  }
  CHECK(testutil::l1(h1, m.transpose()) <= 1e-15);

  // Row marginals of the split maps preserve each group's distribution.
  auto [m0, m1] = barycentre_maps(m, 0.3, 0.7, *sup);
  auto m0rs = m0.row_sums();
  auto m1rs = m1.row_sums();
  auto mcs = m.col_sums();
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(m0rs[i] == doctest::Approx(rs[i]).epsilon(1e-12));
    CHECK(m1rs[i] == doctest::Approx(mcs[i]).epsilon(1e-12));
  }

  auto uneven = std::make_shared<Support>(std::vector<Support::Point>{{0.0}, {1.0}, {5.0}});
  CHECK(throws_code([&] { barycentre_maps(gb, 0.5, 0.5, *uneven); }, "UnevenSupport"));
  CHECK(throws_code([&] { barycentre_maps(gb, 0.5, 0.4, *sup); }, "InvalidBarycentricWeights"));
}

TEST_CASE("dykstra stays within the S-wise TV bound at the coupling level") {
  std::mt19937_64 rng(47);
  const std::size_t n = 6;
  auto sup = grid_support(n);
  auto pv = testutil::random_simplex(rng, n);
  auto p = make_simplex(pv, sup);
  auto q = make_simplex(testutil::random_simplex(rng, n), sup);
  auto cost = cost_matrix(*sup, *sup, {0.2});
  RepairVector v(testutil::random_repair_values(rng, pv), sup);

  for (double lam : {0.05, 0.01}) {
    BandConstraint bc(v, std::vector<double>(n, lam));
    auto res = dykstra_repair(p, q, bc, cost, 0.5, 300, 1e-10);
    // K = 300 ends on a band projection, so every column is inside the band.
    CHECK(band_residual(res.coupling.gamma, v) <=
          lam * static_cast<double>(n) + 1e-9);
  }
}
