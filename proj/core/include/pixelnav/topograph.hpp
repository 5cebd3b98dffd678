// topograph.hpp - topological graph over a recorded pose sequence: build
// criteria (normalized Euclidean distance + heading agreement), nearest/
// descriptor localization, shortest paths, and subgoal node selection.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pixelnav/geometry.hpp"

namespace pixelnav {

struct TooFewPoses : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegenerateTrajectory : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct MissingDescriptors : std::logic_error {
  using std::logic_error::logic_error;
};
struct NoPath : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Recorded sample in the (possibly scale-free) recording frame.
struct PoseSample {
  Vec2 z;            // 2D position, unitless scale
  double phi = 0.0;  // relative direction along the recording, (-pi, pi]
};

struct TopoNode {
  int id = 0;
  PoseSample pose;
  std::vector<double> descriptor;  // empty unless a descriptor localizer is used
};

/// Directed edge, forward along the recording (from < to).
struct TopoEdge {
  int from = 0;
  int to = 0;
  double weight = 0.0;  // Euclidean distance between node poses
};

struct GraphBuildParams {
  double rho = 2.0;            // Euclidean criterion coefficient
  double phi_max = kPi / 4.0;  // angular threshold (radians)
  int downsample_stride = 1;   // keep every k-th pose

  void validate() const;
};

struct TopoGraph {
  std::vector<TopoNode> nodes;
  std::vector<TopoEdge> edges;
  GraphBuildParams build_params;

  bool empty() const { return nodes.empty(); }
  int size() const { return static_cast<int>(nodes.size()); }
};

using PathSequence = std::vector<int>;

/// Relative direction of motion at each pose: phi[i] = atan2 of the step to
/// the next pose. The final entry copies its predecessor; zero-length steps
/// inherit the previous direction (or the next defined one when leading).
/// Throws TooFewPoses for fewer than two positions.
std::vector<double> compute_relative_directions(const std::vector<Vec2>& positions);

/// Builds the graph: nodes are the (downsampled) poses in recording order;
/// an edge i -> i' (i < i') is added when the pair passes both the Euclidean
/// criterion ||z_i - z_i'|| < rho * mu (mu = mean non-zero consecutive step)
/// and the wrapped angular criterion |phi_i - phi_i'| < phi_max. Consecutive
/// edges are always present regardless of the criteria.
/// Throws TooFewPoses / DegenerateTrajectory (all steps zero-length).
TopoGraph build_graph(const std::vector<Vec2>& positions, const GraphBuildParams& params);

/// Nearest node to a query position (ties -> smallest id).
int localize_nearest(const TopoGraph& graph, const Vec2& position);

/// Node with maximal cosine similarity to the query descriptor (ties ->
/// smallest id). Throws MissingDescriptors when nodes carry no descriptors
/// or the dimensions mismatch.
int localize_descriptor(const TopoGraph& graph, const std::vector<double>& query);

/// Minimal-total-weight directed path, ties broken toward the
/// lexicographically smallest node sequence. Throws NoPath when `to` is
/// unreachable and std::out_of_range for invalid ids.
PathSequence shortest_path(const TopoGraph& graph, int from, int to);

/// Path cost as the forward sum of edge weights (0 for a single node).
double path_cost(const TopoGraph& graph, const PathSequence& path);

/// The node at offset l_sg along the path, clamped to the final node.
int select_subgoal_node(const PathSequence& path, int l_sg);

// --- graph file format (JSON) -------------------------------------------

std::string graph_to_json(const TopoGraph& graph);
TopoGraph graph_from_json(const std::string& text);
void save_graph(const TopoGraph& graph, const std::string& path);
TopoGraph load_graph(const std::string& path);

}  // namespace pixelnav
