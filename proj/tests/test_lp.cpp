#include "doctest.h"

#include <cmath>
#include <random>

#include "cpd/lp.hpp"

using namespace cpd::lp;

namespace {

Problem random_problem(std::mt19937_64& rng) {
  Problem p;
  const int n = 3 + static_cast<int>(rng() % 10);
  const int m = 2 + static_cast<int>(rng() % 7);
  for (int j = 0; j < n; ++j) p.add_variable(0.0, 1.0 + static_cast<double>(rng() % 3), static_cast<double>(rng() % 11) - 3.0);
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < n; ++j) {
      if (rng() % 2) terms.push_back({j, static_cast<double>(rng() % 7) - 2.0});
    }
    const int s = static_cast<int>(rng() % 3);
    const Sense sense = s == 0 ? Sense::Le : (s == 1 ? Sense::Ge : Sense::Eq);
    p.add_row(std::move(terms), sense, static_cast<double>(rng() % 9) - (s == 1 ? 4.0 : 0.0));
  }
  return p;
}

}  // namespace

TEST_CASE("small hand problems") {
  Problem p;
  const int x = p.add_variable(0.0, kInf, 3.0);
  const int y = p.add_variable(0.0, kInf, 2.0);
  p.add_row({{x, 1.0}, {y, 1.0}}, Sense::Le, 4.0);
  p.add_row({{x, 1.0}, {y, 3.0}}, Sense::Le, 6.0);
  p.add_row({{x, 1.0}}, Sense::Le, 3.0);
  auto s = solve(p);
  CHECK(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(11.0));

  Problem inf;
  const int z = inf.add_variable(0.0, 1.0, 1.0);
  inf.add_row({{z, 1.0}}, Sense::Ge, 2.0);
  CHECK(solve(inf).status == Status::Infeasible);

  Problem unb;
  const int u = unb.add_variable(0.0, kInf, 1.0);
  unb.add_row({{u, -1.0}}, Sense::Le, 1.0);
  CHECK(solve(unb).status == Status::Unbounded);
}

TEST_CASE("warm re-solves agree with fresh solves") {
  std::mt19937_64 rng(1);
  int compared = 0;
  for (int round = 0; round < 200; ++round) {
    Problem p = random_problem(rng);
    Workspace ws(p);
    if (ws.solve().status != Status::Optimal) continue;
    for (int step = 0; step < 6; ++step) {
      const int j = static_cast<int>(rng() % p.variable_count());
      const double v = std::floor(p.upper[j] * static_cast<double>(rng() % 100) / 100.0);
      switch (rng() % 3) {
        case 0: p.upper[j] = v; break;
        case 1: p.lower[j] = std::min(v, p.upper[j]); break;
        default:
          p.lower[j] = 0.0;
          p.upper[j] = 1.0 + static_cast<double>(rng() % 3);
      }
      ws.set_bounds(j, p.lower[j], p.upper[j]);
      const auto warm = ws.resolve();
      const auto cold = solve(p);
      ++compared;
      REQUIRE(warm.status == cold.status);
      if (cold.status == Status::Optimal) CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-9));
    }
  }
  CHECK(compared > 300);
}

TEST_CASE("work limit stops a solve") {
  Problem p;
  std::vector<std::pair<int, double>> all;
  for (int j = 0; j < 40; ++j) all.push_back({p.add_variable(0.0, 1.0, 1.0 + j % 5), 1.0});
  for (int i = 0; i < 30; ++i) {
    std::vector<std::pair<int, double>> terms;
    for (int j = i; j < 40; j += 3) terms.push_back({j, 1.0 + (i + j) % 4});
    p.add_row(std::move(terms), Sense::Le, 3.0);
  }
  Options tight;
  tight.work_limit = 1.0;
  Workspace limited(p, tight);
  CHECK(limited.solve().status == Status::IterationLimit);
  Workspace free(p);
  const auto full = free.solve();
  CHECK(full.status == Status::Optimal);
  CHECK(full.objective == doctest::Approx(solve(p).objective));
}
