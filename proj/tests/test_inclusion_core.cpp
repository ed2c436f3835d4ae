#include <doctest.h>

#include "dimorse/integrator.hpp"
#include "dimorse/lipschitz.hpp"
#include "dimorse/selection.hpp"

#include <cmath>

using namespace dimorse;

namespace {

SetValuedMapSpec chua() { return SetValuedMapSpec::chua(-1, 288, -36, 1); }

Vec v3(double a, double b, double c) {
  Vec x(3);
  x << a, b, c;
  return x;
}

Vec v1(double a) { return Vec::Constant(1, a); }

// Sgn(x) in one dimension, optionally plus a linear part.
SetValuedMapSpec sign_map(double a = 0.0) {
  Mat A(1, 1);
  A << a;
  return SetValuedMapSpec(A, Vec::Zero(1), {SwitchingTerm{0, v1(1.0)}});
}

Vec random_point(CounterRng& rng, int m, double r) {
  Vec x(m);
  for (int i = 0; i < m; ++i) x[i] = rng.uniform(-r, r);
  return x;
}

}  // namespace

TEST_CASE("Chua right-hand side vanishes at the outer equilibria") {
  const Polytope p = evaluate(chua(), v3(1, 0, -1));
  CHECK(p.size() == 1);
  CHECK(p.vertex(0).norm() < 1e-12);
  const Polytope q = evaluate(chua(), v3(-1, 0, 1));
  CHECK(q.vertex(0).norm() < 1e-12);
}

TEST_CASE("Chua value at the origin is the diode segment") {
  const Polytope p = evaluate(chua(), Vec::Zero(3));
  REQUIRE(p.size() == 2);
  const double lo = std::min(p.vertex(0)[0], p.vertex(1)[0]);
  const double hi = std::max(p.vertex(0)[0], p.vertex(1)[0]);
  CHECK(lo == doctest::Approx(-35.0));
  CHECK(hi == doctest::Approx(35.0));
  CHECK(p.vertex(0).tail(2).norm() < 1e-12);
  CHECK(p.contains(Vec::Zero(3)));
}

TEST_CASE("evaluate rejects points of the wrong dimension") {
  try {
    evaluate(chua(), Vec::Zero(2));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension_mismatch);
  }
}

TEST_CASE("zero inflation reproduces the map") {
  CounterRng rng(1, 2);
  for (int i = 0; i < 50; ++i) {
    Vec x = random_point(rng, 3, 4.0);
    if (i % 5 == 0) x[0] = 0.0;
    const Polytope a = evaluate(chua(), x);
    const Polytope b = inflate(chua(), {0.0}, x);
    CHECK(a.contains(b, 1e-9));
    CHECK(b.contains(a, 1e-9));
  }
}

TEST_CASE("inflation of the 1-D contraction contains the sampled relaxation") {
  Mat A(1, 1);
  A << -1.0;
  const SetValuedMapSpec spec(A, Vec::Zero(1));
  const double delta = 0.1;
  const Polytope p = inflate(spec, {delta, 0.05}, v1(0.0));
  // Dense sample of -(x + u) + w with |u|, |w| <= delta.
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const double u = -delta + 2 * delta * i / 40.0, w = -delta + 2 * delta * j / 40.0;
      CHECK(p.contains(v1(-u + w), 1e-9));
    }
  // Outer bound: the relaxation at radius delta·(1 + slack).
  CHECK(p.support(v1(1.0)) <= 2 * delta * 1.05 + 1e-12);
  CHECK(p.support(v1(-1.0)) <= 2 * delta * 1.05 + 1e-12);
}

TEST_CASE("inflation near the Chua switching plane contains both one-sided values") {
  const SetValuedMapSpec spec = chua();
  const double delta = 0.01;
  const Vec x = v3(0.005, 0, 0);
  const Polytope p = inflate(spec, {delta, 0.05}, x);
  CounterRng rng(3, 4);
  for (int i = 0; i < 400; ++i) {
    Vec u = random_point(rng, 3, 1.0);
    if (u.norm() > 1.0) continue;
    Vec y = x + delta * u;
    const Polytope fy = evaluate(spec, y);
    Vec w = random_point(rng, 3, 1.0);
    if (w.norm() > 1.0) w /= w.norm();
    for (int k = 0; k < fy.size(); ++k) CHECK(p.contains(fy.vertex(k) + delta * w, 1e-9));
  }
  CHECK(p.contains(spec.A() * x + Vec(v3(35, 0, 0)), 1e-9));
  const Vec left = x - Vec(v3(0.006, 0, 0));
  CHECK(p.contains(spec.A() * left - Vec(v3(35, 0, 0)), 1e-9));
}

TEST_CASE("inflation is monotone in delta") {
  CounterRng rng(5, 6);
  const double deltas[] = {0.0, 0.01, 0.05, 0.2};
  for (int i = 0; i < 30; ++i) {
    Vec x = random_point(rng, 3, 3.0);
    if (i % 3 == 0) x[0] = rng.uniform(-0.1, 0.1);
    for (int a = 0; a + 1 < 4; ++a) {
      const Polytope small = inflate(chua(), {deltas[a]}, x);
      const Polytope big = inflate(chua(), {deltas[a + 1]}, x);
      CHECK(big.contains(small, 1e-9));
    }
  }
}

TEST_CASE("negative inflation radius is rejected") {
  CHECK_THROWS_AS(inflate(chua(), {-0.1}, Vec::Zero(3)), Error);
}

TEST_CASE("every selection strategy stays inside the value") {
  const auto rhs = std::make_shared<SpecRhs>(chua());
  std::vector<Selection> sels(5);
  sels[0].strategy = Strategy::vertex_index;
  sels[1].strategy = Strategy::vertex_index;
  sels[1].vertex = 1;
  sels[2].strategy = Strategy::centroid;
  sels[3].strategy = Strategy::random_convex;
  sels[3].seed = 99;
  sels[4].strategy = Strategy::closest_to_target;
  sels[4].target = v3(10, -3, 2);
  CounterRng rng(7, 8);
  for (int i = 0; i < 200; ++i) {
    Vec x = random_point(rng, 3, 4.0);
    if (i % 4 == 0) x[0] = 0.0;
    const Polytope p = evaluate(chua(), x);
    for (const auto& s : sels) CHECK(p.contains(SelectionField(rhs, s)(x), 1e-9));
  }
}

TEST_CASE("singleton values are returned by every strategy") {
  const auto rhs = std::make_shared<SpecRhs>(chua());
  const Vec x = v3(0.7, 0.2, -0.4);
  const Vec v = evaluate(chua(), x).vertex(0);
  for (auto st : {Strategy::vertex_index, Strategy::centroid, Strategy::random_convex, Strategy::closest_to_target}) {
    Selection s;
    s.strategy = st;
    s.seed = 5;
    CHECK((SelectionField(rhs, s)(x) - v).norm() < 1e-12);
  }
}

TEST_CASE("closest-to-target projects onto the diode segment") {
  Selection s;
  s.strategy = Strategy::closest_to_target;
  const Vec g = make_selection(chua(), s)(Vec::Zero(3));
  CHECK(g.norm() < 1e-12);
  s.target = v3(50, 1, 0);
  const Vec h = make_selection(chua(), s)(Vec::Zero(3));
  CHECK(h[0] == doctest::Approx(35.0));
  CHECK(std::abs(h[1]) < 1e-12);
}

TEST_CASE("random-convex choice on [-1, 1] is reproducible") {
  Selection s;
  s.strategy = Strategy::random_convex;
  s.seed = 1234;
  const auto g = make_selection(sign_map(), s);
  const double a = g(v1(0.0))[0];
  CHECK(a >= -1.0);
  CHECK(a <= 1.0);
  CHECK(make_selection(sign_map(), s)(v1(0.0))[0] == a);
  s.seed = 1235;
  CHECK(make_selection(sign_map(), s)(v1(0.0))[0] != a);
}

TEST_CASE("strategy names round-trip") {
  for (auto st : {Strategy::vertex_index, Strategy::centroid, Strategy::random_convex, Strategy::closest_to_target})
    CHECK(parse_strategy(strategy_name(st)) == st);
  CHECK(parse_strategy("closest-to-zero") == Strategy::closest_to_target);
  CHECK_THROWS_AS(parse_strategy("nearest"), Error);
}

TEST_CASE("linear decay matches the closed form") {
  Mat A(1, 1);
  A << -1.0;
  const auto g = make_selection(SetValuedMapSpec(A, Vec::Zero(1)), Selection{});
  const Trajectory tr = integrate(g, v1(1.0), 1.0, 1e-3);
  CHECK(tr.states.size() == 1001);
  CHECK(tr.times.back() == doctest::Approx(1.0));
  CHECK(std::abs(tr.states.back()[0] - std::exp(-1.0)) < 5e-3);
}

TEST_CASE("trajectory length is ceil(T/h) + 1") {
  Mat A(1, 1);
  A << -1.0;
  const auto g = make_selection(SetValuedMapSpec(A, Vec::Zero(1)), Selection{});
  CHECK(integrate(g, v1(1.0), 1.0, 0.3).states.size() == 5);
  CHECK(integrate(g, v1(1.0), 0.25, 0.25).states.size() == 2);
}

TEST_CASE("an equilibrium gives a constant trajectory") {
  Selection s;
  s.strategy = Strategy::closest_to_target;
  const Trajectory tr = integrate(make_selection(chua(), s), v3(1, 0, -1), 2.0, 0.01);
  for (const auto& x : tr.states) CHECK((x - v3(1, 0, -1)).norm() < 1e-12);
  const Trajectory z = integrate(make_selection(chua(), s), Vec::Zero(3), 2.0, 0.01);
  for (const auto& x : z.states) CHECK(x.norm() < 1e-12);
}

TEST_CASE("Chua trajectory near E2 converges to it") {
  Selection s;
  s.strategy = Strategy::closest_to_target;
  const Trajectory tr = integrate(make_selection(chua(), s), v3(1.1, 0, -1.1), 20.0, 1e-3);
  CHECK((tr.states.back() - v3(1, 0, -1)).norm() < 0.05);
}

TEST_CASE("integration is deterministic") {
  Selection s;
  s.strategy = Strategy::random_convex;
  s.seed = 77;
  const auto g = make_selection(chua(), s);
  const Trajectory a = integrate(g, v3(0.01, 0.2, -0.3), 3.0, 0.01);
  const Trajectory b = integrate(g, v3(0.01, 0.2, -0.3), 3.0, 0.01);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) CHECK(a.states[i] == b.states[i]);
}

TEST_CASE("blow-up raises divergence") {
  Mat A(1, 1);
  A << 5.0;
  IntegratorOptions opt;
  opt.blowup_bound = 1e3;
  try {
    integrate(make_selection(SetValuedMapSpec(A, Vec::Zero(1)), Selection{}), v1(1.0), 10.0, 0.01, opt);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::divergence);
  }
}

TEST_CASE("integrate rejects bad step parameters") {
  const auto g = make_selection(chua(), Selection{});
  CHECK_THROWS_AS(integrate(g, Vec::Zero(3), 1.0, 0.0), Error);
  CHECK_THROWS_AS(integrate(g, Vec::Zero(3), 1.0, 2.0), Error);
  CHECK_THROWS_AS(integrate(g, Vec::Zero(3), -1.0, 0.1), Error);
}

TEST_CASE("Lipschitz approximation of a constant map is that map") {
  PiecewiseRegion all{Mat::Zero(1, 2), v1(1.0), {{Mat::Zero(2, 2), Vec::Zero(2)}, {Mat::Zero(2, 2), Vec::Ones(2)}}};
  const SetValuedMapSpec spec(Mat::Zero(2, 2), Vec::Zero(2), {}, {all});
  const auto approx = lipschitz_approximation(spec, 0.3, 2.0);
  CounterRng rng(9, 10);
  for (int i = 0; i < 30; ++i) {
    const Vec x = random_point(rng, 2, 1.4);
    const Polytope K = evaluate(spec, x);
    const Polytope L = approx->value(x);
    CHECK(L.contains(K, 1e-9));
    CHECK(K.contains(L, 1e-9));
  }
}

TEST_CASE("Lipschitz approximation of Sgn at 1") {
  const auto approx = lipschitz_approximation(sign_map(), 0.2, 2.0);
  const Polytope L = approx->value(v1(1.0));
  CHECK(L.contains(v1(1.0), 1e-9));
  CHECK(L.support(v1(1.0)) <= 1.0 + 0.2 * 1.05 + 1e-9);
  CHECK(-L.support(v1(-1.0)) >= 1.0 - 0.2 * 1.05 - 1e-9);
  CHECK(check_sandwich(*approx, v1(1.0)).ok());
  CHECK(check_sandwich(*approx, v1(0.0)).ok());
  CHECK(check_sandwich(*approx, v1(0.03)).ok());
}

TEST_CASE("Lipschitz sandwich holds on sampled Chua points") {
  const auto approx = lipschitz_approximation(chua(), 0.05, 4.0);
  CounterRng rng(11, 12);
  int tested = 0;
  while (tested < 60) {
    Vec x = random_point(rng, 3, 4.0);
    if (x.norm() > 4.0) continue;
    if (tested % 4 == 0) x[0] = rng.uniform(-0.02, 0.02);
    const SandwichResult r = check_sandwich(*approx, x);
    CHECK(r.lower);
    CHECK(r.upper);
    ++tested;
  }
}

TEST_CASE("Lipschitz approximation rejects queries outside the ball") {
  const auto approx = lipschitz_approximation(sign_map(), 0.2, 1.0);
  CHECK_THROWS_AS(approx->value(v1(1.5)), Error);
  CHECK_THROWS_AS(lipschitz_approximation(sign_map(), 0.0, 1.0), Error);
  CHECK_THROWS_AS(lipschitz_approximation(sign_map(), 0.1, -1.0), Error);
}
