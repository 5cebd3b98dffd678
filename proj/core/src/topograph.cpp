#include "pixelnav/topograph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace pixelnav {

void GraphBuildParams::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("graph.rho must be > 0");
  if (!(phi_max > 0.0 && phi_max <= kPi)) {
    throw std::invalid_argument("graph.phi_max must lie in (0, pi]");
  }
  if (downsample_stride < 1) throw std::invalid_argument("graph.downsample_stride must be >= 1");
}

std::vector<double> compute_relative_directions(const std::vector<Vec2>& positions) {
  const std::size_t n = positions.size();
  if (n < 2) throw TooFewPoses("need at least 2 positions, got " + std::to_string(n));

  constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> phi(n, kUndefined);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 d = positions[i + 1] - positions[i];
    if (d.x != 0.0 || d.y != 0.0) phi[i] = std::atan2(d.y, d.x);
  }
  // Last entry copies its predecessor; zero-length steps inherit the previous
  // direction, and leading undefined entries take the next defined one.
  for (std::size_t i = 1; i < n; ++i) {
    if (std::isnan(phi[i])) phi[i] = phi[i - 1];
  }
  for (std::size_t i = n; i-- > 0;) {
    if (std::isnan(phi[i])) phi[i] = (i + 1 < n) ? phi[i + 1] : kUndefined;
  }
  if (std::isnan(phi[0])) std::fill(phi.begin(), phi.end(), 0.0);  // all steps degenerate
  return phi;
}

TopoGraph build_graph(const std::vector<Vec2>& positions, const GraphBuildParams& params) {
  params.validate();

  std::vector<Vec2> kept;
  for (std::size_t i = 0; i < positions.size(); i += params.downsample_stride) {
    kept.push_back(positions[i]);
  }
  // The recording's end is the goal; never drop it.
  if (!positions.empty() && (positions.size() - 1) % params.downsample_stride != 0) {
    kept.push_back(positions.back());
  }
  const int n = static_cast<int>(kept.size());
  if (n < 2) throw TooFewPoses("need at least 2 positions after downsampling");

  double mu_sum = 0.0;
  int mu_count = 0;
  for (int i = 0; i + 1 < n; ++i) {
    const double d = (kept[i + 1] - kept[i]).norm();
    if (d > 0.0) {
      mu_sum += d;
      ++mu_count;
    }
  }
  if (mu_count == 0) throw DegenerateTrajectory("all consecutive poses coincide; mu undefined");
  const double mu = mu_sum / mu_count;

  const std::vector<double> phi = compute_relative_directions(kept);

  TopoGraph g;
  g.build_params = params;
  g.nodes.reserve(n);
  for (int i = 0; i < n; ++i) {
    g.nodes.push_back({i, {kept[i], phi[i]}, {}});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dist = (kept[i] - kept[j]).norm();
      const double dphi = std::abs(wrap_angle(phi[i] - phi[j]));
      const bool criteria = dist < params.rho * mu && dphi < params.phi_max;
      if (criteria || j == i + 1) {
        g.edges.push_back({i, j, dist});
      }
    }
  }
  return g;
}

int localize_nearest(const TopoGraph& graph, const Vec2& position) {
  if (graph.empty()) throw std::invalid_argument("localize: empty graph");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (const TopoNode& node : graph.nodes) {
    const double d = (node.pose.z - position).norm();
    if (d < best_d) {
      best_d = d;
      best = node.id;
    }
  }
  return best;
}

int localize_descriptor(const TopoGraph& graph, const std::vector<double>& query) {
  if (graph.empty()) throw std::invalid_argument("localize: empty graph");
  const double qn = std::sqrt(
      std::inner_product(query.begin(), query.end(), query.begin(), 0.0));
  int best = -1;
  double best_sim = -std::numeric_limits<double>::infinity();
  for (const TopoNode& node : graph.nodes) {
    if (node.descriptor.empty()) {
      throw MissingDescriptors("node " + std::to_string(node.id) + " carries no descriptor");
    }
    if (node.descriptor.size() != query.size()) {
      throw MissingDescriptors("descriptor dimension mismatch at node " + std::to_string(node.id));
    }
    double dot = 0.0, nn = 0.0;
    for (std::size_t k = 0; k < query.size(); ++k) {
      dot += node.descriptor[k] * query[k];
      nn += node.descriptor[k] * node.descriptor[k];
    }
    const double denom = qn * std::sqrt(nn);
    const double sim = denom > 0.0 ? dot / denom : -std::numeric_limits<double>::infinity();
    if (sim > best_sim) {
      best_sim = sim;
      best = node.id;
    }
  }
  return best;
}

namespace {

// Dijkstra from `source` over the graph with edges optionally reversed.
std::vector<double> dijkstra_distances(const TopoGraph& graph, int source, bool reversed) {
  std::vector<std::vector<std::pair<int, double>>> adj(graph.nodes.size());
  for (const TopoEdge& e : graph.edges) {
    if (reversed) {
      adj[e.to].emplace_back(e.from, e.weight);
    } else {
      adj[e.from].emplace_back(e.to, e.weight);
    }
  }
  std::vector<double> dist(graph.nodes.size(), std::numeric_limits<double>::infinity());
  dist[source] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        pq.emplace(dist[v], v);
      }
    }
  }
  return dist;
}

}  // namespace

PathSequence shortest_path(const TopoGraph& graph, int from, int to) {
  if (from < 0 || from >= graph.size() || to < 0 || to >= graph.size()) {
    throw std::out_of_range("shortest_path: node id out of range");
  }
  // Cost-to-target from a reverse sweep; the forward reconstruction then
  // greedily picks the smallest-id successor that preserves optimality,
  // which yields the lexicographically smallest minimal-cost sequence. The
  // equality below is exact: h[u] was computed as min over w(u,v) + h[v].
  const std::vector<double> h = dijkstra_distances(graph, to, /*reversed=*/true);
  if (!std::isfinite(h[from])) {
    throw NoPath("no path from " + std::to_string(from) + " to " + std::to_string(to));
  }

  std::vector<std::vector<std::pair<int, double>>> adj(graph.nodes.size());
  for (const TopoEdge& e : graph.edges) adj[e.from].emplace_back(e.to, e.weight);
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());

  PathSequence path{from};
  int u = from;
  while (u != to) {
    int next = -1;
    for (const auto& [v, w] : adj[u]) {
      if (w + h[v] == h[u]) {
        next = v;
        break;
      }
    }
    if (next < 0) throw NoPath("path reconstruction failed");  // unreachable by construction
    path.push_back(next);
    u = next;
  }
  return path;
}

double path_cost(const TopoGraph& graph, const PathSequence& path) {
  std::vector<std::vector<std::pair<int, double>>> weight(graph.nodes.size());
  for (const TopoEdge& e : graph.edges) weight[e.from].emplace_back(e.to, e.weight);
  double cost = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [v, w] : weight[path[i]]) {
      if (v == path[i + 1]) best = std::min(best, w);
    }
    cost += best;
  }
  return cost;
}

int select_subgoal_node(const PathSequence& path, int l_sg) {
  if (path.empty()) throw std::invalid_argument("select_subgoal_node: empty path");
  if (l_sg < 1) throw std::invalid_argument("select_subgoal_node: l_sg must be >= 1");
  const std::size_t idx = std::min<std::size_t>(l_sg, path.size() - 1);
  return path[idx];
}

// --- JSON ----------------------------------------------------------------

std::string graph_to_json(const TopoGraph& graph) {
  nlohmann::json j;
  j["build_params"] = {{"rho", graph.build_params.rho},
                       {"phi_max", graph.build_params.phi_max},
                       {"downsample_stride", graph.build_params.downsample_stride}};
  j["nodes"] = nlohmann::json::array();
  for (const TopoNode& n : graph.nodes) {
    nlohmann::json jn = {{"id", n.id}, {"pose", {n.pose.z.x, n.pose.z.y}}, {"phi", n.pose.phi}};
    if (!n.descriptor.empty()) jn["descriptor"] = n.descriptor;
    j["nodes"].push_back(std::move(jn));
  }
  j["edges"] = nlohmann::json::array();
  for (const TopoEdge& e : graph.edges) {
    j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
  }
  return j.dump(2);
}

TopoGraph graph_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  TopoGraph g;
  const auto& bp = j.at("build_params");
  g.build_params.rho = bp.at("rho").get<double>();
  g.build_params.phi_max = bp.at("phi_max").get<double>();
  g.build_params.downsample_stride = bp.at("downsample_stride").get<int>();
  for (const auto& jn : j.at("nodes")) {
    TopoNode n;
    n.id = jn.at("id").get<int>();
    n.pose.z = {jn.at("pose").at(0).get<double>(), jn.at("pose").at(1).get<double>()};
    n.pose.phi = jn.at("phi").get<double>();
    if (jn.contains("descriptor")) n.descriptor = jn.at("descriptor").get<std::vector<double>>();
    g.nodes.push_back(std::move(n));
  }
  for (const auto& je : j.at("edges")) {
    g.edges.push_back(
        {je.at("from").get<int>(), je.at("to").get<int>(), je.at("weight").get<double>()});
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].id != static_cast<int>(i)) {
      throw std::runtime_error("graph nodes must be contiguous and ordered");
    }
  }
  return g;
}

void save_graph(const TopoGraph& graph, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << graph_to_json(graph) << "\n";
}

TopoGraph load_graph(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return graph_from_json(ss.str());
}

}  // namespace pixelnav
