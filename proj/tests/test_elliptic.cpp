#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "supneu/elliptic.hpp"
#include "oracles/dense_solve.hpp"

using namespace supneu;

namespace {

GridFunction gaussian(GridPtr grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  GridFunction g{grid, std::vector<double>(grid->total())};
  for (auto& v : g.values) v = dist(rng);
  return g;
}

}  // namespace

TEST_CASE("operator: identity on constants (zero-flux boundaries)") {
  for (auto cells : std::vector<std::vector<int>>{{32}, {8, 8}, {4, 4, 4}}) {
    std::vector<int> n(cells.size(), 2);
    auto grid = make_grid(make_spec(n), cells);
    auto op = make_operator(grid, 0.0);
    auto one = make_constant(grid, 1.0);
    auto Au = apply_A(op, one);
    for (std::int64_t i = 0; i < Au.size(); ++i)
      CHECK(Au[i] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("operator: 1D stencil entries and the dense matrix") {
  // n=(1), 4 cells, h = 1/4: interior row has -1/h^2 neighbours and
  // 1 + 2/h^2 diagonal; boundary rows drop the missing flux.
  auto grid = make_grid(make_spec({1}), {4});
  auto op = make_operator(grid, 0.0);
  auto M = oracle::dense_matrix(op);
  const double inv_h2 = 16.0;
  CHECK(M[0 * 4 + 0] == doctest::Approx(1.0 + inv_h2).epsilon(1e-13));
  CHECK(M[0 * 4 + 1] == doctest::Approx(-inv_h2).epsilon(1e-13));
  CHECK(M[1 * 4 + 1] == doctest::Approx(1.0 + 2.0 * inv_h2).epsilon(1e-13));
  CHECK(M[1 * 4 + 0] == doctest::Approx(-inv_h2).epsilon(1e-13));
  CHECK(M[1 * 4 + 2] == doctest::Approx(-inv_h2).epsilon(1e-13));
  CHECK(M[0 * 4 + 2] == 0.0);
  CHECK(M[3 * 4 + 3] == doctest::Approx(1.0 + inv_h2).epsilon(1e-13));
}

TEST_CASE("operator: symmetric in the weighted pairing") {
  struct Case {
    std::vector<int> n, cells;
    double eps;
  };
  for (const Case& c : {Case{{3}, {32}, 0.0}, Case{{2, 2}, {12, 10}, 0.0},
                        Case{{2, 3}, {8, 8}, 0.25}, Case{{1, 1, 2}, {5, 4, 6}, 0.0}}) {
    auto grid = make_grid(make_spec(c.n), c.cells);
    auto op = make_operator(grid, c.eps);
    std::uint64_t seed = 55;
    for (int trial = 0; trial < 5; ++trial) {
      auto u = gaussian(grid, seed++);
      auto v = gaussian(grid, seed++);
      const double uv = inner_weighted(apply_A(op, u), v, c.eps);
      const double vu = inner_weighted(u, apply_A(op, v), c.eps);
      const double scale = std::max({1.0, std::fabs(uv), std::fabs(vu)});
      CHECK(std::fabs(uv - vu) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("operator: quadratic form equals the energy norm squared") {
  auto grid = make_grid(make_spec({2, 3}), {16, 16});
  auto op = make_operator(grid, 0.0);
  std::uint64_t seed = 77;
  for (int trial = 0; trial < 5; ++trial) {
    auto u = gaussian(grid, seed++);
    const double quad = inner_weighted(apply_A(op, u), u, 0.0);
    const double nrm = norm_Ym(u, 0.0);
    CHECK(std::fabs(quad - nrm * nrm) <= 1e-12 * std::max(1.0, quad));
  }
}

TEST_CASE("solve: constant right-hand side has the constant solution") {
  auto grid = make_grid(make_spec({3}), {128});
  auto op = make_operator(grid, 0.0);
  auto h = make_constant(grid, 1.0);
  CGStats stats;
  auto v = solve_A(op, h, 1e-12, 0, &stats);
  for (std::int64_t i = 0; i < v.size(); ++i)
    CHECK(std::fabs(v[i] - 1.0) <= 1e-10);
  CHECK(stats.relative_residual <= 1e-12);
}

TEST_CASE("solve: agrees with dense Gaussian elimination") {
  struct Case {
    std::vector<int> n, cells;
    double eps;
  };
  for (const Case& c : {Case{{3}, {24}, 0.0}, Case{{2, 2}, {6, 5}, 0.0},
                        Case{{1, 2}, {4, 7}, 0.5}}) {
    auto grid = make_grid(make_spec(c.n), c.cells);
    auto op = make_operator(grid, c.eps);
    std::uint64_t seed = 31;
    for (int trial = 0; trial < 3; ++trial) {
      auto h = gaussian(grid, seed++);
      auto mine = solve_A(op, h, 1e-12);
      auto exact = oracle::solve_A_dense(op, h);
      double scale = 1.0;
      for (std::int64_t i = 0; i < exact.size(); ++i)
        scale = std::max(scale, std::fabs(exact[i]));
      for (std::int64_t i = 0; i < mine.size(); ++i)
        CHECK(std::fabs(mine[i] - exact[i]) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("solve: residual report matches the requested tolerance") {
  auto grid = make_grid(make_spec({2, 2}), {24, 24});
  auto op = make_operator(grid, 0.0);
  auto h = sample(grid, [](std::span<const double> t) {
    return 1.0 + t[0] * t[0] + std::sin(3.0 * t[1]);
  });
  auto v = solve_A(op, h, 1e-10);
  auto res = residual_linear(op, v, h);
  CHECK(res.relative <= 1e-10);
  CHECK(res.absolute <= 1e-10 * (1.0 + norm_L2w(h, 0.0)));

  // Residual of the zero guess against h = 1 is exactly ||1||.
  auto zero = make_constant(grid, 0.0);
  auto one = make_constant(grid, 1.0);
  auto r0 = residual_linear(op, zero, one);
  CHECK(r0.absolute == doctest::Approx(norm_L2w(one, 0.0)).epsilon(1e-14));
  // And the constant solution reproduces h = 1 exactly.
  auto r1 = residual_linear(op, one, one);
  CHECK(r1.absolute <= 1e-13);
}

TEST_CASE("solve: warm start accepts immediately at the solution") {
  auto grid = make_grid(make_spec({3}), {64});
  auto op = make_operator(grid, 0.0);
  auto h = sample(grid, [](std::span<const double> t) { return 1.0 + t[0]; });
  auto v = solve_A(op, h, 1e-11);
  CGStats stats;
  auto v2 = solve_A(op, h, 1e-9, 0, &stats, &v);
  CHECK(stats.iterations <= 1);
  for (std::int64_t i = 0; i < v.size(); ++i)
    CHECK(std::fabs(v2[i] - v[i]) <= 1e-9);
}

TEST_CASE("solve: errors") {
  auto grid = make_grid(make_spec({3}), {64});
  auto op = make_operator(grid, 0.0);
  auto h = sample(grid, [](std::span<const double> t) { return t[0]; });
  CHECK_THROWS_AS((void)solve_A(op, h, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)solve_A(op, h, -1.0), std::invalid_argument);
  bool threw = false;
  try {
    (void)solve_A(op, h, 1e-12, 2);
  } catch (const SolveError& e) {
    threw = true;
    CHECK(e.relative_residual > 0.0);
  }
  CHECK(threw);
  CHECK_THROWS_AS((void)make_operator(grid, -0.1), std::invalid_argument);
}

TEST_CASE("solve: manufactured cubic profile converges at second order") {
  // n=(3): v(t) = 3t^2 - 2t^3 + 18 has zero flux at both ends and
  // A v = 24 t + 3 t^2 - 2 t^3.
  std::vector<double> errs;
  for (int s : {32, 64, 128}) {
    auto grid = make_grid(make_spec({3}), {s});
    auto op = make_operator(grid, 0.0);
    auto h = sample(grid, [](std::span<const double> t) {
      return 24.0 * t[0] + 3.0 * t[0] * t[0] - 2.0 * t[0] * t[0] * t[0];
    });
    auto v = solve_A(op, h, 1e-11);
    auto exact = sample(grid, [](std::span<const double> t) {
      return 3.0 * t[0] * t[0] - 2.0 * t[0] * t[0] * t[0] + 18.0;
    });
    double err = 0;
    for (std::int64_t i = 0; i < v.size(); ++i)
      err = std::max(err, std::fabs(v[i] - exact[i]));
    errs.push_back(err);
  }
  for (size_t i = 1; i < errs.size(); ++i) {
    const double order = std::log2(errs[i - 1] / errs[i]);
    CHECK(order > 1.7);
    CHECK(order < 2.3);
  }
}
