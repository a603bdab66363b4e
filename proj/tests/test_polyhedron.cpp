#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "prefel/polyhedron.hpp"

using namespace prefel;

namespace {

// Simplex of dimension `dim` with `cuts` random homogeneous cuts that all
// keep a random interior point strictly feasible.
Polyhedron random_polyhedron(std::mt19937& rng, int dim, int cuts) {
  std::exponential_distribution<double> e(1.0);
  std::normal_distribution<double> nd;
  Vec anchor(dim + 1);
  for (int i = 0; i <= dim; ++i) anchor[i] = e(rng) + 0.2;
  anchor /= anchor.sum();
  Polyhedron p = Polyhedron::simplex(dim);
  for (int k = 0; k < cuts; ++k) {
    Vec w(dim + 1);
    for (int i = 0; i <= dim; ++i) w[i] = nd(rng);
    const double side = w.dot(anchor);
    if (std::abs(side) < 0.05) continue;
    p = p.add_cut(w, side < 0 ? 1 : -1);
  }
  return p;
}

Vec barrier_gradient(const Polyhedron& p, const Vec& x) {
  const Mat a = p.a();
  const Vec s = p.b() - a * x;
  return a.transpose() * s.cwiseInverse();
}

}  // namespace

TEST_CASE("center: simplex is symmetric") {
  for (int dim = 1; dim <= 6; ++dim) {
    const AnalyticCenter ac = analytic_center(Polyhedron::simplex(dim));
    CHECK((ac.c.array() - 1.0 / (dim + 1)).abs().maxCoeff() < 1e-9);
    CHECK(ac.lifted.sum() == doctest::Approx(1.0));
    CHECK(ac.grad_norm <= 1e-10);
  }
}

TEST_CASE("center: two-dimensional example before and after a cut") {
  const Polyhedron p0 = Polyhedron::simplex(2);
  const AnalyticCenter c0 = analytic_center(p0);
  CHECK(c0.c[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(c0.c[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  Vec w(3);
  w << -0.39, 0.39, 0.0;
  const Polyhedron p1 = p0.add_cut(w, 1);
  const ReducedRow row = reduce_cut(p1.cuts()[0]);
  CHECK(row.a[0] == doctest::Approx(-0.39));
  CHECK(row.a[1] == doctest::Approx(0.39));
  CHECK(row.b == 0.0);
  const AnalyticCenter c1 = analytic_center(p1);
  CHECK(std::abs(c1.c[0] - 0.59) <= 0.01);
  CHECK(std::abs(c1.c[1] - 0.16) <= 0.01);
  // Closed form: the center of {v2 <= v1, v >= 0, v1 + v2 <= 1}.
  CHECK(c1.c[0] == doctest::Approx((3.0 + std::sqrt(3.0)) / 8.0).epsilon(1e-9));
  CHECK(c1.c[1] == doctest::Approx((3.0 - std::sqrt(3.0)) / 8.0).epsilon(1e-9));
}

TEST_CASE("center: stationary and strictly interior on random polyhedra") {
  std::mt19937 rng(1);
  for (int t = 0; t < 40; ++t) {
    const Polyhedron p = random_polyhedron(rng, 1 + t % 5, 1 + t % 6);
    const AnalyticCenter ac = analytic_center(p);
    CHECK((ac.slacks.array() > 0.0).all());
    CHECK((ac.c.array() > 0.0).all());
    CHECK(ac.c.sum() < 1.0);
    CHECK(barrier_gradient(p, ac.c).norm() <= 1e-9);
    const AnalyticCenter again = analytic_center(p);
    CHECK(again.c == ac.c);
  }
}

TEST_CASE("center: empty interior is reported") {
  Vec w(3);
  w << 1.0, 0.0, 0.0;  // v1 <= 0 together with v1 >= 0
  const Polyhedron p = Polyhedron::simplex(2).add_cut(w, 1);
  CHECK_THROWS_AS(analytic_center(p), EmptyInterior);
}

TEST_CASE("cuts: degenerate and duplicate handling") {
  const Polyhedron p = Polyhedron::simplex(2);
  CHECK_THROWS_AS(p.add_cut(Vec::Zero(3), 1), DegenerateCut);
  CHECK_THROWS_AS(p.add_cut(Vec::Ones(3), 1), DegenerateCut);  // constant on the lifted simplex
  Vec w(3);
  w << 0.14, -0.2, -0.2;
  const Polyhedron q = p.add_cut(w, -1);
  const ReducedRow r = reduce_cut(q.cuts()[0]);
  // -(0.14 v1 - 0.2 v2 - 0.2 (1 - v1 - v2)) <= 0
  CHECK(r.a[0] == doctest::Approx(-0.34));
  CHECK(r.a[1] == doctest::Approx(0.0));
  CHECK(r.b == doctest::Approx(-0.2));
  CHECK(q.add_cut(2.0 * w, -1).cuts().size() == 1);
  CHECK(q.add_cut(w, 1).cuts().size() == 2);
}

TEST_CASE("axis: simplex endpoints") {
  const Polyhedron p = Polyhedron::simplex(2);
  const SonnevendAxis ax = longest_axis_endpoints(p, analytic_center(p));
  // The two endpoints are (2/3, 0) and (0, 2/3) in some order.
  const double hi = std::max(ax.v1[0], ax.v2[0]);
  const double lo = std::min(ax.v1[0], ax.v2[0]);
  CHECK(hi == doctest::Approx(2.0 / 3.0));
  CHECK(lo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ax.v1.sum() == doctest::Approx(2.0 / 3.0));
  CHECK(ax.v2.sum() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("axis: box-like polyhedron is stretched along the long side") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  Vec b(2);
  b << 0.2, 0.1;
  const Polyhedron p = Polyhedron::simplex(2).with_rows(a, b);
  const AnalyticCenter ac = analytic_center(p);
  const SonnevendAxis ax = longest_axis_endpoints(p, ac);
  CHECK(std::abs(ax.direction[0]) > 0.99);
  const double hi = std::max(ax.v1[0], ax.v2[0]);
  const double lo = std::min(ax.v1[0], ax.v2[0]);
  CHECK(hi == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(lo == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("axis: direction is the smallest Hessian eigenvector, endpoints hit the boundary") {
  std::mt19937 rng(6);
  for (int t = 0; t < 30; ++t) {
    const Polyhedron p = random_polyhedron(rng, 2 + t % 3, 2 + t % 4);
    const AnalyticCenter ac = analytic_center(p);
    const SonnevendAxis ax = longest_axis_endpoints(p, ac);
    const Mat a = p.a();
    const Vec b = p.b();
    const Vec s = b - a * ac.c;
    Mat h = Mat::Zero(p.dim(), p.dim());
    for (Eigen::Index i = 0; i < a.rows(); ++i) h += a.row(i).transpose() * a.row(i) / (s[i] * s[i]);
    const oracle::Eig ref = oracle::jacobi(h);
    if (ref.values.size() > 1 && ref.values[1] - ref.values[0] < 1e-6) continue;
    CHECK(std::abs(std::abs(ref.vectors.col(0).dot(ax.direction)) - 1.0) < 1e-7);
    for (const Vec* v : {&ax.v1, &ax.v2}) {
      const Vec slack = b - a * *v;
      CHECK(slack.minCoeff() >= -1e-9);
      CHECK(slack.minCoeff() <= 1e-9);
    }
    CHECK((ax.v1 - ac.c).dot(ax.v2 - ac.c) < 0.0);
  }
}

TEST_CASE("ellipsoid: random points of the inner ellipsoid lie in the polyhedron") {
  std::mt19937 rng(14);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const int dim = 1 + t % 4;
    const Polyhedron p = random_polyhedron(rng, dim, 1 + t % 5);
    const AnalyticCenter ac = analytic_center(p);
    const Mat h = barrier_hessian(p, ac.c);
    const Eigen::LLT<Mat> llt(h);
    for (int k = 0; k < 100; ++k) {
      Vec d(dim);
      for (int i = 0; i < dim; ++i) d[i] = nd(rng);
      d *= std::pow(u(rng), 1.0 / dim) / d.norm();
      // x = c + L^-T d has (x-c)' H (x-c) = |d|^2 <= 1.
      const Vec x = ac.c + llt.matrixU().solve(d);
      CHECK(p.contains(x, 1e-12));
    }
  }
}

TEST_CASE("band: simplex and one cut versus vertex enumeration") {
  const BreakpointGrid g({-0.5, 0.0, 0.25, 0.5});
  const Polyhedron p0 = Polyhedron::simplex(2);
  const auto band0 = utility_band(p0, g);
  REQUIRE(band0.size() == 4);
  CHECK(band0[0].lo == 0.0);
  CHECK(band0[0].hi == 0.0);
  CHECK(band0[3].lo == 1.0);
  CHECK(band0[3].hi == 1.0);
  for (int i = 1; i < 3; ++i) {
    CHECK(band0[i].lo == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(band0[i].hi == doctest::Approx(1.0));
  }

  Vec w(3);
  w << -1.0, 1.0, 0.0;  // v1 >= v2
  const Polyhedron p1 = p0.add_cut(w, 1);
  const auto band1 = utility_band(p1, g);
  const auto verts = oracle::vertices(p1.a(), p1.b());
  for (int i = 1; i < 3; ++i) {
    double lo = INFINITY, hi = -INFINITY;
    for (const Vec& v : verts) {
      const double val = oracle::lift(v).dot(oracle::g_of_x(g.points(), g[i]));
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
    CHECK(band1[i].lo == doctest::Approx(lo).epsilon(1e-10));
    CHECK(band1[i].hi == doctest::Approx(hi).epsilon(1e-10));
  }
  CHECK(band1[1].lo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(band1[1].hi == doctest::Approx(1.0));
  // u(x2) >= u(x3) / 2 holds at every vertex.
  for (const Vec& v : verts) CHECK(v[0] >= 0.5 * (v[0] + v[1]) - 1e-12);
}

TEST_CASE("band: random polyhedra versus vertex enumeration") {
  std::mt19937 rng(17);
  for (int t = 0; t < 15; ++t) {
    const int dim = 2 + t % 3;
    std::vector<double> pts{0.0};
    for (int i = 0; i <= dim; ++i) pts.push_back(pts.back() + 0.1 + 0.1 * (i % 3));
    const BreakpointGrid g(pts);
    const Polyhedron p = random_polyhedron(rng, dim, 3);
    const auto band = utility_band(p, g);
    const auto verts = oracle::vertices(p.a(), p.b());
    for (int i = 0; i < g.size(); ++i) {
      double lo = INFINITY, hi = -INFINITY;
      for (const Vec& v : verts) {
        const double val = oracle::lift(v).dot(oracle::g_of_x(pts, pts[i]));
        lo = std::min(lo, val);
        hi = std::max(hi, val);
      }
      CHECK(band[i].lo == doctest::Approx(lo).epsilon(1e-9));
      CHECK(band[i].hi == doctest::Approx(hi).epsilon(1e-9));
    }
  }
}

TEST_CASE("metrics: initial simplex against the exact true increments") {
  const BreakpointGrid g({-0.5, -0.48, 0.0, 0.5});
  const Vec v_star = true_increments([](double x) { return 1.0 - std::exp(-10.0 * x); }, g);
  const RadiusMetrics m = radius_metrics(Polyhedron::simplex(2), g, v_star);
  REQUIRE(m.d_ac.has_value());
  const double want =
      std::max(std::abs(1.0 / 3.0 - v_star[0]), std::abs(2.0 / 3.0 - v_star[0] - v_star[1]));
  CHECK(*m.d_ac == doctest::Approx(want).epsilon(1e-12));
  CHECK(*m.d_ac == doctest::Approx(0.3267).epsilon(1e-4 / 0.3267));
  CHECK(m.d_r1 == doctest::Approx(2.0 / 3.0));
  CHECK(m.d_r2 == doctest::Approx(1.0));
  CHECK_FALSE(radius_metrics(Polyhedron::simplex(2), g, std::nullopt).d_ac.has_value());
}

TEST_CASE("metrics: cumulative gap") {
  Vec a(3), b(3);
  a << 0.5, 0.2, 0.3;
  b << 0.2, 0.2, 0.6;
  CHECK(cumulative_gap(a, b) == doctest::Approx(0.3));
  CHECK(cumulative_gap(a, a) == 0.0);
}

TEST_CASE("splits: a cut through the center splits, an implied one does not") {
  const Polyhedron p = Polyhedron::simplex(2);
  Vec through(3);
  through << -1.0, 1.0, 0.0;
  CHECK(splits(p, through));
  const Polyhedron q = p.add_cut(through, 1);  // v2 <= v1
  Vec implied(3);
  implied << -2.0, 1.0, 0.0;  // v2 <= 2 v1 already follows
  CHECK_FALSE(splits(q, implied));
  Vec positive(3);
  positive << 1.0, 1.0, 1.0;
  CHECK_FALSE(splits(p, positive));
}
