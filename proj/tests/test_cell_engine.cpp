#include <doctest.h>

#include "dimorse/graph_algorithms.hpp"

#include <cmath>
#include <filesystem>

using namespace dimorse;

namespace {

SetValuedMapSpec linear(const Mat& A) { return SetValuedMapSpec(A, Vec::Zero(A.rows())); }

Mat rotation_decay() {
  Mat A(2, 2);
  A << -1, 2, -2, -1;
  return A;
}

CubicalGrid square(int depth, double r = 2.0) { return CubicalGrid(Vec::Constant(2, -r), Vec::Constant(2, r), depth); }

double sup_distance_to_cell(const CubicalGrid& grid, std::int64_t global, const Vec& x) {
  const Vec lo = grid.cell_lo(global), hi = grid.cell_hi(global);
  double d = 0;
  for (int i = 0; i < x.size(); ++i) d = std::max(d, std::max({lo[i] - x[i], x[i] - hi[i], 0.0}));
  return d;
}

}  // namespace

TEST_CASE("grid indexing round-trips and locates points") {
  const CubicalGrid g(Vec::Constant(3, -1.0), Vec::Constant(3, 1.0), 2);
  CHECK(g.total_cells() == 64);
  for (std::int64_t c = 0; c < g.total_cells(); ++c) {
    CHECK(g.index(g.coords(c)) == c);
    CHECK(g.locate(g.center(c)) == c);
  }
  CHECK(g.locate(Vec::Constant(3, 1.0)) == 63);
  CHECK(g.locate(Vec::Constant(3, 1.5)) == -1);
}

TEST_CASE("zero vector field maps each cell to itself and its neighbors") {
  const CubicalGrid grid = square(3);
  GraphParams p;
  p.tau = 1.0;
  const TransitionGraph g = build_graph(linear(Mat::Zero(2, 2)), grid, p);
  for (std::int32_t c = 0; c < g.size(); ++c) {
    CHECK(g.has_edge(c, c));
    const Coord a = grid.coords(c);
    const bool boundary = a[0] == 0 || a[1] == 0 || a[0] == grid.per_axis() - 1 || a[1] == grid.per_axis() - 1;
    // The one-cell bloat of a boundary cell reaches past the box.
    CHECK(g.exits(c) == boundary);
    for (auto s : g.successors(c)) {
      const Coord a = grid.coords(c), b = grid.coords(s);
      CHECK(std::abs(a[0] - b[0]) <= 1);
      CHECK(std::abs(a[1] - b[1]) <= 1);
    }
  }
}

TEST_CASE("contraction images move toward the origin") {
  const CubicalGrid grid = square(4);
  GraphParams p;
  p.tau = 1.0;
  const TransitionGraph g = build_graph(linear(-Mat::Identity(2, 2)), grid, p);
  const double w = grid.max_width();
  const double q = std::exp(-1.0);
  for (std::int32_t c = 0; c < g.size(); ++c) {
    CHECK_FALSE(g.exits(c));
    const double r = grid.center(c).lpNorm<Eigen::Infinity>();
    for (auto s : g.successors(c))
      CHECK(grid.center(s).lpNorm<Eigen::Infinity>() <= q * (r + w / 2) + 1.5 * w + 1e-12);
  }
}

TEST_CASE("an expanding field exits the box") {
  GraphParams p;
  p.tau = 1.0;
  const TransitionGraph g = build_graph(linear(Mat::Identity(2, 2)), square(3), p);
  CHECK(g.exits(0));
  CHECK(g.exits(g.size() - 1));
}

TEST_CASE("graph construction is deterministic across thread counts") {
  const SetValuedMapSpec chua = SetValuedMapSpec::chua(-1, 288, -36, 1);
  const CubicalGrid grid(Vec::Constant(3, -4.0), Vec::Constant(3, 4.0), 3);
  GraphParams p;
  p.tau = 1.0;
  p.h = 0.01;
  p.sampling.seed = 3;
  p.sampling.points_per_cell = 12;
  const int before = thread_count();
  set_thread_count(1);
  const TransitionGraph a = build_graph(chua, grid, p);
  set_thread_count(4);
  const TransitionGraph b = build_graph(chua, grid, p);
  set_thread_count(before);
  CHECK(a.offsets() == b.offsets());
  CHECK(a.targets() == b.targets());
  CHECK(a.exit_flags() == b.exit_flags());
}

TEST_CASE("adjacency lists are sorted without duplicates") {
  GraphParams p;
  p.tau = 0.5;
  const TransitionGraph g = build_graph(linear(rotation_decay()), square(4), p);
  for (std::int32_t c = 0; c < g.size(); ++c) {
    const auto s = g.successors(c);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i - 1] < s[i]);
  }
}

TEST_CASE("sampled trajectories land inside the image of their start cell") {
  const SetValuedMapSpec spec = linear(rotation_decay());
  const CubicalGrid grid = square(4);
  GraphParams p;
  p.tau = 0.5;
  p.h = 0.005;
  const TransitionGraph g = build_graph(spec, grid, p);
  const SelectionField f = make_selection(spec, Selection{});
  CounterRng rng(31, 1);
  for (int i = 0; i < 100; ++i) {
    Vec x(2);
    x << rng.uniform(-2, 2), rng.uniform(-2, 2);
    const std::int64_t c = grid.locate(x);
    const Trajectory t = integrate(f, x, p.tau, p.h);
    const Vec y = t.states.back();
    const std::int64_t d = grid.locate(y);
    REQUIRE(d >= 0);
    CHECK(g.has_edge(static_cast<std::int32_t>(c), static_cast<std::int32_t>(d)));
  }
}

TEST_CASE("each sampled image is covered by a ρ-neighborhood of successor cells") {
  const SetValuedMapSpec chua = SetValuedMapSpec::chua(-1, 288, -36, 1);
  const CubicalGrid grid(Vec::Constant(3, -4.0), Vec::Constant(3, 4.0), 3);
  GraphParams p;
  p.tau = 0.3;
  p.h = 0.01;
  const TransitionGraph g = build_graph(chua, grid, p);
  Selection s;
  s.strategy = Strategy::closest_to_target;
  const SelectionField f = make_selection(chua, s);
  for (std::int32_t c = 0; c < g.size(); ++c) {
    const Vec y = integrate(f, grid.center(c), p.tau, g.meta().h).states.back();
    if (!grid.inside(y)) {
      CHECK(g.exits(c));
      continue;
    }
    const std::int64_t d = grid.locate(y);
    CHECK(g.has_edge(c, static_cast<std::int32_t>(d)));
    // Every cell meeting the bloat box around y is a successor.
    for (auto succ : g.successors(c)) CHECK(sup_distance_to_cell(grid, succ, y) <= g.meta().rho + 1e-12 + 2 * grid.max_width());
  }
}

TEST_CASE("subdivision refines the listed cells only") {
  GraphParams p;
  p.tau = 1.0;
  const TransitionGraph g = build_graph(linear(-Mat::Identity(2, 2)), square(2), p);
  const CubicalGrid fine = subdivide(g, {0, 5});
  CHECK(fine.depth() == 3);
  CHECK(fine.size() == 8);
  for (auto gl : fine.active_cells()) {
    const Vec ctr = fine.center(gl);
    const std::int64_t parent = g.grid().locate(ctr);
    CHECK((parent == 0 || parent == 5));
  }
  try {
    subdivide(g, {});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
  }
  const TransitionGraph h = build_graph(linear(-Mat::Identity(2, 2)), fine, p);
  CHECK(h.size() == 8);
}

TEST_CASE("graph files round-trip") {
  GraphParams p;
  p.tau = 0.5;
  p.sampling.seed = 9;
  const TransitionGraph g = build_graph(linear(rotation_decay()), square(3), p);
  const auto path = std::filesystem::temp_directory_path() / "dimorse_graph_roundtrip.bin";
  write_graph(g, path.string());
  const TransitionGraph r = read_graph(path.string());
  std::filesystem::remove(path);
  CHECK(r.offsets() == g.offsets());
  CHECK(r.targets() == g.targets());
  CHECK(r.exit_flags() == g.exit_flags());
  CHECK(r.meta().tau == g.meta().tau);
  CHECK(r.meta().seed == 9);
  CHECK(r.grid().depth() == 3);
  CHECK(r.grid().lo() == g.grid().lo());
}

TEST_CASE("reading a missing or corrupt graph raises io") {
  try {
    read_graph("/nonexistent/graph.bin");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
}

TEST_CASE("build_graph validates its parameters") {
  GraphParams p;
  p.tau = 0.0;
  CHECK_THROWS_AS(build_graph(linear(-Mat::Identity(2, 2)), square(2), p), Error);
  p.tau = 1.0;
  CHECK_THROWS_AS(build_graph(linear(-Mat::Identity(3, 3)), square(2), p), Error);
}
