#include <doctest.h>

#include <cmath>

#include "prefel/elicit.hpp"

using namespace prefel;

TEST_CASE("start: default grids and validation") {
  CHECK(default_initial_grid(-0.5, 0.5) == std::vector<double>{-0.5, 0.0, 0.25, 0.5});
  CHECK(default_initial_grid(0.0, 1.0) == std::vector<double>{0.0, 0.5, 0.75, 1.0});

  const Session s = Session::start("a", -0.5, 0.5, {}, "exp10", {});
  CHECK(s.grid().points() == std::vector<double>{-0.5, 0.0, 0.25, 0.5});
  CHECK(s.polyhedron().dim() == 2);
  CHECK(s.answered().empty());
  CHECK_FALSE(s.pending());

  const Session five = Session::start("b", -0.5, 0.5, {-0.5, -0.2, 0.0, 0.25, 0.5}, "exp10", {});
  CHECK(five.polyhedron().dim() == 3);

  CHECK_THROWS_AS(Session::start("c", 0.5, -0.5, {}, "exp10", {}), std::invalid_argument);
  CHECK_THROWS_AS(Session::start("c", -0.5, 0.5, {-0.4, 0.0, 0.5}, "exp10", {}), std::invalid_argument);
  CHECK_THROWS_AS(Session::start("c", -0.5, 0.5, {}, "nope", {}), std::invalid_argument);
  SessionConfig bad;
  bad.reference_points = 2;
  CHECK_THROWS_AS(Session::start("c", -0.5, 0.5, {}, "exp10", bad), std::invalid_argument);
}

TEST_CASE("simulated answer: expected-utility comparison, ties prefer B") {
  const UtilityFn lin = utility_by_name("linear");
  CHECK(simulated_answer(lin, {0.0, 0.5, 1.0, 0.5, 0.5}) == 1);
  CHECK(simulated_answer(lin, {0.0, 0.4, 1.0, 0.5, 0.5}) == -1);
  CHECK(simulated_answer(lin, {0.0, 0.6, 1.0, 0.5, 0.5}) == 1);
  // A risk-averse decision maker takes the sure amount at the mean.
  const UtilityFn ex = utility_by_name("exp10");
  CHECK(simulated_answer(ex, {-0.5, 0.0, 0.5, 0.5, 0.5}) == 1);
  for (const std::string& n : utility_names()) CHECK_NOTHROW(utility_by_name(n));
}

TEST_CASE("pending state: conflicts and answer validation") {
  Session s = Session::start("a", -0.5, 0.5, {}, "exp10", {});
  CHECK_THROWS_AS(s.submit_answer(1), SessionConflict);
  CHECK_THROWS_AS(s.simulated_answer(), SessionConflict);
  s.next_query("t0");
  CHECK(s.pending());
  CHECK(s.pending()->issued_at == "t0");
  CHECK_THROWS_AS(s.next_query(), SessionConflict);
  CHECK_THROWS_AS(s.submit_answer(0), std::invalid_argument);
  s.submit_answer(-1, "t1");
  CHECK_FALSE(s.pending());
  REQUIRE(s.answered().size() == 1);
  CHECK(*s.answered()[0].answer == -1);
  CHECK(s.history().size() == 1);

  Session interactive = Session::start("i", 0.0, 1.0, {}, "", {});
  CHECK_THROWS_AS(interactive.run(1), SessionConflict);
  CHECK_THROWS_AS(s.run(-1), std::invalid_argument);
}

TEST_CASE("run: zero queries leave the session unchanged") {
  Session s = Session::start("a", -0.5, 0.5, {}, "exp10", {});
  const Vec c0 = s.center().c;
  CHECK(s.run(0) == 0);
  CHECK(s.answered().empty());
  CHECK(s.grid().points() == std::vector<double>{-0.5, 0.0, 0.25, 0.5});
  CHECK(s.center().c == c0);
}

TEST_CASE("flexible grid: containment, growth bound and split queries") {
  Session s = Session::start("a", -0.5, 0.5, {}, "exp10", {});
  for (int m = 0; m < 30; ++m) {
    const QueryRecord& q = s.next_query();
    CHECK(q.q.r1 <= q.q.r2);
    CHECK(q.q.r2 <= q.q.r3);
    CHECK(q.q.p >= 0.05);
    CHECK(q.q.p <= 0.95);
    s.submit_answer(s.simulated_answer());
    CHECK(s.grid().size() <= 4 + 3 * (m + 1));
    const Vec v = drop_last(*s.true_lifted());
    CHECK(s.polyhedron().contains(v, 1e-9));
  }
  CHECK(s.answered().size() == 30);
  for (size_t i = 0; i < s.history().size(); ++i) CHECK(s.history()[i].m == static_cast<int>(i) + 1);
}

TEST_CASE("fixed grid: cuts pass through the center and the band never widens") {
  SessionConfig cfg;
  cfg.flexible_grid = false;
  Session s = Session::start("a", -0.5, 0.5, {-0.5, -0.25, 0.0, 0.25, 0.5}, "exp10", cfg);
  double prev_ref = INFINITY, prev_r2 = INFINITY;
  for (int m = 0; m < 15; ++m) {
    const AnalyticCenter ac = s.center();
    const QueryRecord& q = s.next_query();
    CHECK(std::abs(ac.lifted.dot(cut_vector(s.grid(), q.q))) <= 1e-8);
    s.submit_answer(s.simulated_answer());
    CHECK(s.grid().size() == 5);
    const MetricsSnapshot mt = s.metrics();
    CHECK(mt.d_r2_ref <= prev_ref + 1e-9);
    CHECK(mt.d_r2 <= prev_r2 + 1e-9);
    prev_ref = mt.d_r2_ref;
    prev_r2 = mt.d_r2;
  }
}

TEST_CASE("restore: derived state is a function of the answered records") {
  Session s = Session::start("a", -0.5, 0.5, {}, "exp10", {});
  s.run(12);
  const Session r = Session::restore("a", -0.5, 0.5, {}, "exp10", {}, s.answered(), s.pending(), s.history());
  CHECK(r.grid() == s.grid());
  CHECK((r.center().c - s.center().c).cwiseAbs().maxCoeff() <= 1e-12);
  const Session bare = Session::restore("a", -0.5, 0.5, {}, "exp10", {}, s.answered(), std::nullopt, {});
  REQUIRE(bare.history().size() == s.history().size());
  for (size_t i = 0; i < s.history().size(); ++i) {
    CHECK(bare.history()[i].n == s.history()[i].n);
    CHECK(bare.history()[i].d_r1 == doctest::Approx(s.history()[i].d_r1).epsilon(1e-9));
  }

  Session t = Session::start("a", -0.5, 0.5, {}, "exp10", {});
  t.run(12);
  REQUIRE(t.answered().size() == s.answered().size());
  for (size_t i = 0; i < s.answered().size(); ++i) {
    CHECK(t.answered()[i].q.r2 == s.answered()[i].q.r2);
    CHECK(t.answered()[i].s == s.answered()[i].s);
  }

  QueryRecord bad;
  CHECK_THROWS_AS(Session::restore("a", -0.5, 0.5, {}, "exp10", {}, {bad}, std::nullopt, {}), std::invalid_argument);
}

TEST_CASE("restore: replaying an external first query inserts its outcomes") {
  QueryRecord r;
  r.q = {-0.5, -0.05, 0.5, 0.3, 0.1};
  r.answer = 1;
  const Session s = Session::restore("x", -0.5, 0.5, {}, "exp10", {}, {r}, std::nullopt, {});
  CHECK(s.grid().points() == std::vector<double>{-0.5, -0.05, 0.0, 0.25, 0.5});
  CHECK(s.polyhedron().cuts().size() == 1);
  CHECK(s.polyhedron().contains(drop_last(*s.true_lifted()), 1e-9));
}

TEST_CASE("metrics: shrink with more queries") {
  Session s = Session::start("a", -0.5, 0.5, {}, "exp10", {});
  s.run(10);
  const MetricsSnapshot early = s.metrics();
  s.run(90);
  const MetricsSnapshot late = s.metrics();
  REQUIRE(early.d_ac);
  REQUIRE(late.d_ac);
  CHECK(*late.d_ac < *early.d_ac);
  CHECK(late.d_r1 < early.d_r1);
  CHECK(late.d_r2_ref < early.d_r2_ref);
  CHECK(late.d_r2 <= early.d_r2);
}

TEST_CASE("utility range at arbitrary points brackets the true utility") {
  Session s = Session::start("a", -0.5, 0.5, {}, "exp10", {});
  s.run(10);
  const UtilityFn u = utility_by_name("exp10");
  std::vector<double> xs;
  for (int i = 0; i <= 20; ++i) xs.push_back(std::min(0.5, -0.5 + i * 0.05));
  const std::vector<Interval> band = utility_range_at(s.polyhedron(), s.grid(), xs);
  const Vec v = *s.true_lifted();
  for (size_t i = 0; i < xs.size(); ++i) {
    const double val = eval_utility(s.grid(), v, xs[i]);
    CHECK(band[i].lo <= val + 1e-9);
    CHECK(val <= band[i].hi + 1e-9);
  }
  CHECK(band.front().lo == doctest::Approx(0.0));
  CHECK(band.back().hi == doctest::Approx(1.0));
}
