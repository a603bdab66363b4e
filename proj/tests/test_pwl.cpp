#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "prefel/pwl.hpp"

using namespace prefel;

namespace {

BreakpointGrid random_grid(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> pts{-0.5};
  for (int i = 1; i < n; ++i) pts.push_back(pts.back() + u(rng));
  return BreakpointGrid(pts);
}

Vec random_lifted(std::mt19937& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = e(rng);
  return v / v.sum();
}

}  // namespace

TEST_CASE("grid: construction rules") {
  CHECK_THROWS_AS(BreakpointGrid({0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(BreakpointGrid({0.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(BreakpointGrid({0.0, 2.0, 1.0}), std::invalid_argument);
  const BreakpointGrid g({-0.5, 0.0, 0.25, 0.5});
  CHECK(g.size() == 4);
  CHECK(g.intervals() == 3);
  CHECK(g.lo() == -0.5);
  CHECK(g.hi() == 0.5);
}

TEST_CASE("grid: half-open interval convention") {
  const BreakpointGrid g({0.0, 1.0, 2.0, 3.0});
  CHECK(g.interval_of(0.0) == 0);
  CHECK(g.interval_of(1.0) == 0);
  CHECK(g.interval_of(1.0001) == 1);
  CHECK(g.interval_of(3.0) == 2);
  CHECK_THROWS_AS(g.interval_of(3.5), std::out_of_range);
}

TEST_CASE("grid: insertion rounds, snaps and deduplicates") {
  const BreakpointGrid g({-0.5, 0.0, 0.25, 0.5});
  const double xs[] = {-0.0512, 0.2549, 0.3417, 0.3449};
  const BreakpointGrid h = g.with_inserted(xs);
  CHECK(h.points() == std::vector<double>{-0.5, -0.05, 0.0, 0.25, 0.34, 0.5});
  CHECK(g.dedup_tolerance() == doctest::Approx(0.005));
  CHECK(g.snap(0.2549) == 0.25);
  CHECK(g.with_inserted(std::vector<double>{0.0, 0.25}) == g);
}

TEST_CASE("g: figure example and endpoints") {
  const BreakpointGrid g({-0.5, -0.2, 0.0, 0.3, 0.5});
  const double x0 = 0.8 * 0.3 + 0.2 * 0.5;
  const Vec gx = g_of_x(g, x0);
  CHECK(gx[0] == 1.0);
  CHECK(gx[1] == 1.0);
  CHECK(gx[2] == 1.0);
  CHECK(gx[3] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(g_of_x(g, -0.5).isZero());
  CHECK(g_of_x(g, 0.5).isOnes());
  CHECK_THROWS_AS(g_of_x(g, 0.6), std::out_of_range);

  // u(x0) = v1 + v2 + v3 + 0.2 v4
  Vec v(4);
  v << 0.1, 0.2, 0.3, 0.4;
  CHECK(eval_utility(g, v, x0) == doctest::Approx(0.1 + 0.2 + 0.3 + 0.2 * 0.4));
  CHECK(eval_utility(g, v, -0.5) == 0.0);
  CHECK(eval_utility(g, v, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("g: matches the definition, monotone, values in [0,1]") {
  std::mt19937 rng(2);
  for (int t = 0; t < 20; ++t) {
    const BreakpointGrid g = random_grid(rng, 3 + t % 6);
    std::uniform_real_distribution<double> ux(g.lo(), g.hi());
    double prev_x = g.lo();
    Vec prev = g_of_x(g, prev_x);
    std::vector<double> xs;
    for (int i = 0; i < 50; ++i) xs.push_back(ux(rng));
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
      const Vec gx = g_of_x(g, x);
      CHECK((gx - oracle::g_of_x(g.points(), x)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((gx.array() >= prev.array() - 1e-15).all());
      CHECK((gx.array() >= 0.0).all());
      CHECK((gx.array() <= 1.0).all());
      for (Eigen::Index i = 1; i < gx.size(); ++i) CHECK(gx[i] <= gx[i - 1]);
      prev = gx;
    }
  }
}

TEST_CASE("pq: encoding structure") {
  const BreakpointGrid g({0.0, 1.0, 2.0, 4.0});
  const PqEncoding pq = pq_matrices(g);
  CHECK(pq.p_diag[2] == doctest::Approx(0.5));
  CHECK(pq.q(1, 1) == doctest::Approx(-1.0));
  CHECK(pq.q(2, 2) == doctest::Approx(-1.0));
  CHECK(pq.q(0, 2) == 1.0);
  CHECK(pq.q(2, 0) == 0.0);
  const PqPoint p = pq_encode(g, 1.5);
  CHECK(p.z == Vec::Unit(3, 1));
  CHECK(p.y == 1.5 * Vec::Unit(3, 1));
}

TEST_CASE("pq: reconstruction equals g on 1000 random samples") {
  std::mt19937 rng(4);
  int n = 0;
  for (int t = 0; t < 20; ++t) {
    const BreakpointGrid g = random_grid(rng, 3 + t % 7);
    const PqEncoding pq = pq_matrices(g);
    std::uniform_real_distribution<double> ux(g.lo(), g.hi());
    for (int i = 0; i < 50; ++i, ++n) {
      const double x = i == 0 ? g.lo() : i == 1 ? g.hi() : i == 2 ? g[1] : ux(rng);
      const PqPoint p = pq_encode(g, x);
      CHECK(p.z.sum() == 1.0);
      CHECK(p.y.sum() == doctest::Approx(x).epsilon(1e-14));
      for (int k = 0; k < g.intervals(); ++k) {
        CHECK(p.y[k] >= g[k] * p.z[k] - 1e-12);
        CHECK(p.y[k] <= g[k + 1] * p.z[k] + 1e-12);
      }
      const Vec rec = pq.p_diag.asDiagonal() * p.y + pq.q * p.z;
      CHECK((rec - g_of_x(g, x)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  CHECK(n == 1000);
}

TEST_CASE("true increments: reference utilities") {
  const BreakpointGrid g({-0.5, -0.48, 0.0, 0.5});
  const Vec v = true_increments([](double x) { return 1.0 - std::exp(-10.0 * x); }, g);
  CHECK(v[0] == doctest::Approx(0.18).epsilon(0.005 / 0.18));
  CHECK(v[1] == doctest::Approx(0.81).epsilon(0.005 / 0.81));
  CHECK(v[2] == doctest::Approx(0.01).epsilon(0.5));
  CHECK(std::round(100 * v[2]) == 1.0);
  CHECK(v.sum() == doctest::Approx(1.0));

  const BreakpointGrid unit({0.0, 0.25, 0.5, 0.75, 1.0});
  const Vec lin = true_increments([](double x) { return x; }, unit);
  CHECK((lin.array() - 0.25).abs().maxCoeff() < 1e-15);

  const BreakpointGrid half({0.0, 0.5, 1.0});
  const Vec sq = true_increments([](double x) { return x * x; }, half);
  CHECK(sq[0] == doctest::Approx(0.25));
  CHECK(sq[1] == doctest::Approx(0.75));

  CHECK_THROWS_AS(true_increments([](double) { return 3.0; }, half), std::invalid_argument);
}

TEST_CASE("eval utility: interpolates the true utility at breakpoints and is monotone") {
  std::mt19937 rng(8);
  auto u = [](double x) { return 1.0 - std::exp(-10.0 * x); };
  for (int t = 0; t < 10; ++t) {
    const BreakpointGrid g = random_grid(rng, 4 + t);
    const Vec v = true_increments(u, g);
    for (int i = 0; i < g.size(); ++i) {
      const double want = (u(g[i]) - u(g.lo())) / (u(g.hi()) - u(g.lo()));
      CHECK(eval_utility(g, v, g[i]) == doctest::Approx(want).epsilon(1e-12));
    }
    const Vec w = random_lifted(rng, g.intervals());
    double prev = -1.0;
    for (int k = 0; k <= 200; ++k) {
      const double x = std::min(g.hi(), g.lo() + (g.hi() - g.lo()) * k / 200.0);
      const double val = eval_utility(g, w, x);
      CHECK(val >= prev - 1e-15);
      prev = val;
    }
  }
}

TEST_CASE("refine increments: the represented function is unchanged") {
  std::mt19937 rng(12);
  for (int t = 0; t < 20; ++t) {
    const BreakpointGrid from = random_grid(rng, 4 + t % 4);
    std::uniform_real_distribution<double> ux(from.lo(), from.hi());
    std::vector<double> extra{ux(rng), ux(rng), ux(rng)};
    const BreakpointGrid to = from.with_inserted(extra);
    const Vec v = random_lifted(rng, from.intervals());
    const Vec w = refine_increments(from, v, to);
    CHECK(w.size() == to.intervals());
    CHECK(w.sum() == doctest::Approx(1.0));
    for (int k = 0; k < 100; ++k) {
      const double x = ux(rng);
      CHECK(eval_utility(to, w, x) == doctest::Approx(eval_utility(from, v, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("lift and drop") {
  Vec v(2);
  v << 0.2, 0.3;
  const Vec l = lift(v);
  CHECK(l.size() == 3);
  CHECK(l[2] == doctest::Approx(0.5));
  CHECK(drop_last(l) == v);
}
