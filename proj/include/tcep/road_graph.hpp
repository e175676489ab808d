/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#ifndef TCEP_ROAD_GRAPH_HPP_
#define TCEP_ROAD_GRAPH_HPP_

#include <tcep/geo.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tcep {

using NodeId = std::int64_t;
/// Index into RoadGraph::edges().
using EdgeId = std::size_t;

struct RoadNode {
    NodeId id = 0;
    GeoPoint point;
};

struct RoadEdge {
    NodeId from = 0;
    NodeId to = 0;
    double length_m = 0.0;
    double max_speed_kmh = 0.0;
};

/// A point on a directed edge, offset_m meters from the edge's tail.
struct PathPosition {
    EdgeId edge = 0;
    double offset_m = 0.0;

    bool operator==(const PathPosition&) const = default;
};

/**
 * @brief Immutable directed road network. Bidirectional roads are two edges.
 *
 * Construction validates every invariant: unique node ids, valid coordinates, no dangling
 * edges, positive lengths and speeds, and edge lengths within 0.5x-2.0x of the haversine
 * distance between their endpoints.
 */
class RoadGraph {
  public:
    RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges, double default_max_speed_kmh);

    [[nodiscard]] const std::vector<RoadNode>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<RoadEdge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const RoadEdge& edge(EdgeId id) const;
    [[nodiscard]] const RoadNode& node(NodeId id) const;
    [[nodiscard]] bool contains(NodeId id) const noexcept { return index_.contains(id); }
    [[nodiscard]] std::size_t index_of(NodeId id) const;
    [[nodiscard]] std::span<const EdgeId> out_edges(NodeId id) const;
    [[nodiscard]] std::span<const EdgeId> in_edges(NodeId id) const;
    [[nodiscard]] double default_max_speed_kmh() const noexcept { return default_max_speed_kmh_; }

    /// Single-source Dijkstra; result is indexed by node index, +inf when unreachable.
    [[nodiscard]] std::vector<double> distances_from(NodeId source) const;
    /// Same, over reversed edges: distance from every node to `target`.
    [[nodiscard]] std::vector<double> distances_to(NodeId target) const;

    [[nodiscard]] GeoPoint point_at(const PathPosition& pos) const;
    void check_position(const PathPosition& pos) const;

  private:
    std::vector<RoadNode> nodes_;
    std::vector<RoadEdge> edges_;
    double default_max_speed_kmh_;
    std::unordered_map<NodeId, std::size_t> index_;
    std::vector<std::vector<EdgeId>> out_;
    std::vector<std::vector<EdgeId>> in_;
};

/// Ordered list of consecutive edges. An empty route still knows its single node.
class Route {
  public:
    Route() = default;
    Route(const RoadGraph& graph, NodeId start, std::vector<EdgeId> edges);

    [[nodiscard]] const std::vector<EdgeId>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<RoadEdge>& legs() const noexcept { return legs_; }
    [[nodiscard]] bool empty() const noexcept { return edges_.empty(); }
    [[nodiscard]] double total_length_m() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
    [[nodiscard]] NodeId start_node() const noexcept { return start_; }
    [[nodiscard]] NodeId end_node() const noexcept { return legs_.empty() ? start_ : legs_.back().to; }
    [[nodiscard]] std::vector<NodeId> nodes() const;
    /// Distance from route start to the start of leg i (i == size gives the total length).
    [[nodiscard]] double leg_start_m(std::size_t i) const;
    [[nodiscard]] double max_speed_kmh() const noexcept;

    /// Route-relative coordinate of a position lying on one of the route's edges.
    [[nodiscard]] double along_m(const PathPosition& pos) const;
    [[nodiscard]] bool contains(const PathPosition& pos) const noexcept;
    /// Position at `along` meters from the start; vertices resolve to the start of the next leg.
    [[nodiscard]] PathPosition at(double along) const;

  private:
    NodeId start_ = 0;
    std::vector<EdgeId> edges_;
    std::vector<RoadEdge> legs_;
    std::vector<double> cumulative_;// size = legs + 1
};

[[nodiscard]] RoadGraph load_graph(std::istream& in);
[[nodiscard]] RoadGraph load_graph_text(std::string_view text);
[[nodiscard]] RoadGraph load_graph_file(const std::filesystem::path& path);

/// Minimal-length route; ties broken towards the smallest next node id at every step.
[[nodiscard]] Route shortest_path(const RoadGraph& graph, NodeId from, NodeId to);

/// Memoizes single-source distance rows so many position pairs can be evaluated cheaply.
/// Not thread-safe; hold one per worker.
class NetworkDistanceCache {
  public:
    explicit NetworkDistanceCache(const RoadGraph& graph) : graph_(graph) {}

    [[nodiscard]] double node_distance(NodeId from, NodeId to);
    /// Shortest network distance between positions, in whichever direction is shorter.
    [[nodiscard]] double distance(const PathPosition& a, const PathPosition& b);

  private:
    double directed(const PathPosition& a, const PathPosition& b);

    const RoadGraph& graph_;
    std::unordered_map<NodeId, std::vector<double>> rows_;
};

[[nodiscard]] double network_distance_m(const RoadGraph& graph, const PathPosition& a, const PathPosition& b);

/// Route vertices plus evenly inserted points so no gap exceeds max_spacing_m.
[[nodiscard]] std::vector<PathPosition> route_target_points(const Route& route, double max_spacing_m);

/// Advances `start` along the route; nullopt means the position ran past the route end.
[[nodiscard]] std::optional<PathPosition> project_along(const Route& route, const PathPosition& start,
                                                        double distance_m);

}// namespace tcep

#endif// TCEP_ROAD_GRAPH_HPP_
