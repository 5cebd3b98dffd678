#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

#include "pixelnav/topograph.hpp"

using namespace pixelnav;

namespace {

using EdgeSet = std::set<std::pair<int, int>>;

EdgeSet edge_set(const TopoGraph& g) {
  EdgeSet out;
  for (const TopoEdge& e : g.edges) out.insert({e.from, e.to});
  return out;
}

// Brute-force evaluation of the build criteria over all ordered pairs.
EdgeSet brute_force_edges(const std::vector<Vec2>& pts, double rho, double phi_max) {
  const int n = static_cast<int>(pts.size());
  double mu_sum = 0.0;
  int mu_count = 0;
  for (int i = 0; i + 1 < n; ++i) {
    const double d = (pts[i + 1] - pts[i]).norm();
    if (d > 0.0) {
      mu_sum += d;
      ++mu_count;
    }
  }
  const double mu = mu_sum / mu_count;
  const std::vector<double> phi = compute_relative_directions(pts);
  EdgeSet out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dist = (pts[i] - pts[j]).norm();
      const double dphi = std::abs(wrap_angle(phi[i] - phi[j]));
      if ((dist < rho * mu && dphi < phi_max) || j == i + 1) out.insert({i, j});
    }
  }
  return out;
}

// Exhaustive minimum-cost path by DFS over simple paths.
double brute_force_path_cost(const TopoGraph& g, int from, int to) {
  std::vector<std::vector<std::pair<int, double>>> adj(g.nodes.size());
  for (const TopoEdge& e : g.edges) adj[e.from].emplace_back(e.to, e.weight);
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> visited(g.nodes.size(), false);
  std::function<void(int, double)> dfs = [&](int u, double cost) {
    if (u == to) {
      best = std::min(best, cost);
      return;
    }
    visited[u] = true;
    for (const auto& [v, w] : adj[u]) {
      if (!visited[v]) dfs(v, cost + w);
    }
    visited[u] = false;
  };
  dfs(from, 0.0);
  return best;
}

}  // namespace

TEST_CASE("relative directions: diagonal, collinear, duplicate poses") {
  const auto diag = compute_relative_directions({{0, 0}, {1, 1}});
  REQUIRE(diag.size() == 2);
  CHECK(diag[0] == doctest::Approx(kPi / 4.0));
  CHECK(diag[1] == doctest::Approx(kPi / 4.0));

  const auto line = compute_relative_directions({{0, 0}, {1, 0}, {2, 0}});
  CHECK(line == std::vector<double>{0.0, 0.0, 0.0});

  // Leading duplicate inherits its successor's direction.
  const auto dup = compute_relative_directions({{0, 0}, {0, 0}, {1, 0}});
  CHECK(dup == std::vector<double>{0.0, 0.0, 0.0});

  CHECK_THROWS_AS(compute_relative_directions({{0, 0}}), TooFewPoses);
}

TEST_CASE("build_graph matches the hand-computed 4-pose example") {
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {2, 0}, {10, 0}};
  GraphBuildParams params;
  params.rho = 1.0;
  params.phi_max = 0.5;
  const TopoGraph g = build_graph(pts, params);
  // mu = 10/3; criteria admit 0->1, 0->2, 1->2; 2->3 rides the consecutive
  // guarantee.
  CHECK(edge_set(g) == EdgeSet{{0, 1}, {0, 2}, {1, 2}, {2, 3}});
  for (const TopoEdge& e : g.edges) {
    CHECK(e.weight ==
          doctest::Approx((g.nodes[e.from].pose.z - g.nodes[e.to].pose.z).norm()));
    CHECK(e.from < e.to);
  }
}

TEST_CASE("build_graph is invariant under uniform scaling") {
  const std::vector<Vec2> base{{0, 0}, {1, 0}, {2, 0}, {10, 0}};
  GraphBuildParams params;
  params.rho = 1.0;
  params.phi_max = 0.5;
  const EdgeSet reference = edge_set(build_graph(base, params));
  for (const double s : {0.1, 5.0, 17.0}) {
    std::vector<Vec2> scaled;
    for (const Vec2& p : base) scaled.push_back(p * s);
    CHECK(edge_set(build_graph(scaled, params)) == reference);
  }
}

TEST_CASE("build_graph: two poses produce the single consecutive edge") {
  const TopoGraph g = build_graph({{0, 0}, {3, 4}}, {});
  CHECK(edge_set(g) == EdgeSet{{0, 1}});
  CHECK(g.edges[0].weight == doctest::Approx(5.0));
}

TEST_CASE("build_graph error cases") {
  CHECK_THROWS_AS(build_graph({{0, 0}}, {}), TooFewPoses);
  CHECK_THROWS_AS(build_graph({{1, 1}, {1, 1}, {1, 1}}, {}), DegenerateTrajectory);
  GraphBuildParams bad;
  bad.rho = -1.0;
  CHECK_THROWS_AS(build_graph({{0, 0}, {1, 0}}, bad), std::invalid_argument);
}

TEST_CASE("build_graph agrees with brute force on random pose sequences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int iter = 0; iter < 100; ++iter) {
    const int n = 2 + static_cast<int>(rng() % 11);
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
    GraphBuildParams params;
    params.rho = 0.5 + (rng() % 40) / 10.0;
    params.phi_max = 0.1 + (rng() % 30) / 10.0;
    if (params.phi_max > kPi) params.phi_max = kPi;
    CHECK(edge_set(build_graph(pts, params)) ==
          brute_force_edges(pts, params.rho, params.phi_max));
  }
}

TEST_CASE("downsampling keeps the recording's endpoints") {
  std::vector<Vec2> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({static_cast<double>(i), 0.0});
  GraphBuildParams params;
  params.downsample_stride = 4;
  const TopoGraph g = build_graph(pts, params);
  // Kept indices 0, 4, 8 plus the forced final pose.
  REQUIRE(g.size() == 4);
  CHECK(g.nodes.back().pose.z.x == doctest::Approx(9.0));
}

TEST_CASE("localize_nearest picks the closest node, ties to the smaller id") {
  TopoGraph g = build_graph({{0, 0}, {1, 0}, {2, 0}}, {});
  CHECK(localize_nearest(g, {1.1, 0.0}) == 1);
  CHECK(localize_nearest(g, {0.0, 0.0}) == 0);

  // Equidistant between nodes 0 and 2.
  CHECK(localize_nearest(g, {1.0, 5.0}) == 1);
  const TopoGraph line = build_graph({{0, 0}, {2, 0}}, {});
  CHECK(localize_nearest(line, {1.0, 0.0}) == 0);
}

TEST_CASE("localize_nearest matches a linear scan on random configurations") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int iter = 0; iter < 1000; ++iter) {
    const int n = 2 + static_cast<int>(rng() % 12);
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
    TopoGraph g;
    try {
      g = build_graph(pts, {});
    } catch (const DegenerateTrajectory&) {
      continue;
    }
    const Vec2 q{u(rng), u(rng)};
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double d = (pts[i] - q).norm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    CHECK(localize_nearest(g, q) == best);
  }
}

TEST_CASE("localize_descriptor: self-similarity is maximal") {
  TopoGraph g = build_graph({{0, 0}, {1, 0}, {2, 0}, {3, 0}}, {});
  g.nodes[0].descriptor = {1.0, 0.0, 0.0};
  g.nodes[1].descriptor = {0.0, 1.0, 0.0};
  g.nodes[2].descriptor = {0.0, 0.0, 1.0};
  g.nodes[3].descriptor = {0.5, 0.5, 0.0};
  CHECK(localize_descriptor(g, {0.0, 0.0, 2.0}) == 2);
  CHECK(localize_descriptor(g, g.nodes[3].descriptor) == 3);

  TopoGraph bare = build_graph({{0, 0}, {1, 0}}, {});
  CHECK_THROWS_AS(localize_descriptor(bare, {1.0}), MissingDescriptors);
  g.nodes[1].descriptor = {1.0};  // dimension mismatch
  CHECK_THROWS_AS(localize_descriptor(g, {1.0, 0.0, 0.0}), MissingDescriptors);
}

TEST_CASE("shortest_path on a chain, self-path, and tie-break shortcut") {
  TopoGraph chain;
  chain.nodes = {{0, {{0, 0}, 0}, {}}, {1, {{1, 0}, 0}, {}}, {2, {{2, 0}, 0}, {}},
                 {3, {{3, 0}, 0}, {}}};
  chain.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}};
  CHECK(shortest_path(chain, 0, 3) == PathSequence{0, 1, 2, 3});
  CHECK(shortest_path(chain, 2, 2) == PathSequence{2});

  // Shortcut 0->2 at the same total cost: fewer hops wins via the
  // lexicographically-smaller-sequence tie-break.
  TopoGraph shortcut = chain;
  shortcut.edges.push_back({0, 2, 2.0});
  CHECK(shortest_path(shortcut, 0, 3) == PathSequence{0, 2, 3});

  CHECK_THROWS_AS(shortest_path(chain, 3, 0), NoPath);
  CHECK_THROWS_AS(shortest_path(chain, 0, 9), std::out_of_range);
}

TEST_CASE("shortest_path cost equals exhaustive enumeration on small graphs") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int iter = 0; iter < 100; ++iter) {
    const int n = 2 + static_cast<int>(rng() % 7);
    TopoGraph g;
    for (int i = 0; i < n; ++i) {
      g.nodes.push_back({i, {{u(rng), u(rng)}, 0.0}, {}});
    }
    // Random forward edges with Euclidean weights; density varies.
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng() % 100 < 55) {
          g.edges.push_back({i, j, (g.nodes[i].pose.z - g.nodes[j].pose.z).norm()});
        }
      }
    }
    const int from = static_cast<int>(rng() % n);
    const int to = static_cast<int>(rng() % n);
    const double expected = brute_force_path_cost(g, from, to);
    if (std::isinf(expected)) {
      CHECK_THROWS_AS(shortest_path(g, from, to), NoPath);
    } else {
      const PathSequence path = shortest_path(g, from, to);
      CHECK(path.front() == from);
      CHECK(path.back() == to);
      CHECK(path_cost(g, path) == expected);
    }
  }
}

TEST_CASE("the goal stays reachable from every node (consecutive guarantee)") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<Vec2> pts;
  for (int i = 0; i < 12; ++i) pts.push_back({u(rng), u(rng)});
  const TopoGraph g = build_graph(pts, {});
  for (int i = 0; i < g.size(); ++i) {
    CHECK_NOTHROW(shortest_path(g, i, g.size() - 1));
  }
}

TEST_CASE("select_subgoal_node applies the offset with clamping") {
  CHECK(select_subgoal_node({4, 5, 6, 7, 8}, 2) == 6);
  CHECK(select_subgoal_node({4}, 3) == 4);
  CHECK(select_subgoal_node({4, 5}, 10) == 5);
  CHECK_THROWS_AS(select_subgoal_node({}, 1), std::invalid_argument);
  CHECK_THROWS_AS(select_subgoal_node({1, 2}, 0), std::invalid_argument);
}

TEST_CASE("graph JSON round trip is exact for the numeric fields") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec2> pts;
  for (int i = 0; i < 9; ++i) pts.push_back({u(rng) * 7.3, u(rng) * 7.3});
  TopoGraph g = build_graph(pts, {});
  g.nodes[2].descriptor = {u(rng), u(rng), u(rng)};

  const TopoGraph back = graph_from_json(graph_to_json(g));
  REQUIRE(back.size() == g.size());
  for (int i = 0; i < g.size(); ++i) {
    CHECK(back.nodes[i].pose.z.x == g.nodes[i].pose.z.x);
    CHECK(back.nodes[i].pose.z.y == g.nodes[i].pose.z.y);
    CHECK(back.nodes[i].pose.phi == g.nodes[i].pose.phi);
    CHECK(back.nodes[i].descriptor == g.nodes[i].descriptor);
  }
  REQUIRE(back.edges.size() == g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    CHECK(back.edges[i].from == g.edges[i].from);
    CHECK(back.edges[i].to == g.edges[i].to);
    CHECK(back.edges[i].weight == g.edges[i].weight);
  }
  CHECK(back.build_params.rho == g.build_params.rho);
  CHECK(back.build_params.phi_max == g.build_params.phi_max);

  const std::string path = "test_graph_roundtrip.json";
  save_graph(g, path);
  const TopoGraph loaded = load_graph(path);
  CHECK(loaded.nodes.back().pose.z.x == g.nodes.back().pose.z.x);
  std::remove(path.c_str());
}
