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

#include <tcep/error.hpp>
#include <tcep/road_graph.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <string>

namespace tcep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlongEpsM = 1e-9;
// Edges shorter than this (in straight-line terms) skip the length ratio check.
constexpr double kMinCheckedChordM = 1.0;

std::string node_label(NodeId id) { return "node " + std::to_string(id); }

}// namespace

// ============================================================
// ROAD GRAPH
// ============================================================

RoadGraph::RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges, double default_max_speed_kmh)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), default_max_speed_kmh_(default_max_speed_kmh) {
    if (!(default_max_speed_kmh_ > 0.0) || !std::isfinite(default_max_speed_kmh_)) {
        throw Error(ErrorKind::InvalidValue, "default_max_speed_kmh must be positive");
    }
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (!is_valid(n.point)) {
            throw Error(ErrorKind::InvalidValue, node_label(n.id) + " has coordinates out of range");
        }
        if (!index_.emplace(n.id, i).second) {
            throw Error(ErrorKind::InvalidValue, "duplicate " + node_label(n.id));
        }
    }
    out_.resize(nodes_.size());
    in_.resize(nodes_.size());
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        auto& edge = edges_[e];
        const auto from = index_.find(edge.from);
        const auto to = index_.find(edge.to);
        if (from == index_.end() || to == index_.end()) {
            throw Error(ErrorKind::DanglingEdge,
                        "edge " + std::to_string(e) + " references unknown "
                            + node_label(from == index_.end() ? edge.from : edge.to));
        }
        if (edge.from == edge.to) {
            throw Error(ErrorKind::InvalidValue, "edge " + std::to_string(e) + " is a self loop");
        }
        if (!(edge.length_m > 0.0) || !std::isfinite(edge.length_m)) {
            throw Error(ErrorKind::InvalidValue, "edge " + std::to_string(e) + " has non-positive length");
        }
        if (edge.max_speed_kmh == 0.0) {
            edge.max_speed_kmh = default_max_speed_kmh_;
        }
        if (!(edge.max_speed_kmh > 0.0) || !std::isfinite(edge.max_speed_kmh)) {
            throw Error(ErrorKind::InvalidValue, "edge " + std::to_string(e) + " has non-positive max speed");
        }
        const double chord = haversine_m(nodes_[from->second].point, nodes_[to->second].point);
        if (chord >= kMinCheckedChordM && (edge.length_m < 0.5 * chord || edge.length_m > 2.0 * chord)) {
            throw Error(ErrorKind::InvalidValue,
                        "edge " + std::to_string(e) + " length " + std::to_string(edge.length_m)
                            + " m is inconsistent with endpoint distance " + std::to_string(chord) + " m");
        }
        out_[from->second].push_back(e);
        in_[to->second].push_back(e);
    }
}

const RoadEdge& RoadGraph::edge(EdgeId id) const {
    if (id >= edges_.size()) {
        throw Error(ErrorKind::InvalidValue, "edge index " + std::to_string(id) + " out of range");
    }
    return edges_[id];
}

std::size_t RoadGraph::index_of(NodeId id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) {
        throw Error(ErrorKind::InvalidValue, "unknown " + node_label(id));
    }
    return it->second;
}

const RoadNode& RoadGraph::node(NodeId id) const { return nodes_[index_of(id)]; }

std::span<const EdgeId> RoadGraph::out_edges(NodeId id) const { return out_[index_of(id)]; }

std::span<const EdgeId> RoadGraph::in_edges(NodeId id) const { return in_[index_of(id)]; }

namespace {

std::vector<double> dijkstra(const RoadGraph& g, NodeId source, bool reversed) {
    std::vector<double> dist(g.nodes().size(), kInf);
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    const auto s = g.index_of(source);
    dist[s] = 0.0;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) {
            continue;
        }
        const NodeId uid = g.nodes()[u].id;
        for (EdgeId e : reversed ? g.in_edges(uid) : g.out_edges(uid)) {
            const auto& edge = g.edges()[e];
            const auto v = g.index_of(reversed ? edge.from : edge.to);
            const double nd = d + edge.length_m;
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        }
    }
    return dist;
}

}// namespace

std::vector<double> RoadGraph::distances_from(NodeId source) const { return dijkstra(*this, source, false); }

std::vector<double> RoadGraph::distances_to(NodeId target) const { return dijkstra(*this, target, true); }

void RoadGraph::check_position(const PathPosition& pos) const {
    const auto& e = edge(pos.edge);
    if (!(pos.offset_m >= 0.0) || pos.offset_m > e.length_m + kAlongEpsM) {
        throw Error(ErrorKind::InvalidValue, "offset " + std::to_string(pos.offset_m) + " outside edge "
                                                 + std::to_string(pos.edge));
    }
}

GeoPoint RoadGraph::point_at(const PathPosition& pos) const {
    check_position(pos);
    const auto& e = edges_[pos.edge];
    const double t = std::clamp(pos.offset_m / e.length_m, 0.0, 1.0);
    return lerp(node(e.from).point, node(e.to).point, t);
}

// ============================================================
// ROUTE
// ============================================================

Route::Route(const RoadGraph& graph, NodeId start, std::vector<EdgeId> edges) : start_(start), edges_(std::move(edges)) {
    if (!graph.contains(start)) {
        throw Error(ErrorKind::InvalidValue, "route start " + node_label(start) + " not in graph");
    }
    legs_.reserve(edges_.size());
    cumulative_.reserve(edges_.size() + 1);
    cumulative_.push_back(0.0);
    NodeId at = start;
    for (EdgeId e : edges_) {
        const auto& leg = graph.edge(e);
        if (leg.from != at) {
            throw Error(ErrorKind::InvalidValue, "route edges are not consecutive at " + node_label(at));
        }
        legs_.push_back(leg);
        cumulative_.push_back(cumulative_.back() + leg.length_m);
        at = leg.to;
    }
}

std::vector<NodeId> Route::nodes() const {
    std::vector<NodeId> out{start_};
    for (const auto& leg : legs_) {
        out.push_back(leg.to);
    }
    return out;
}

double Route::leg_start_m(std::size_t i) const { return cumulative_.at(i); }

double Route::max_speed_kmh() const noexcept {
    double best = 0.0;
    for (const auto& leg : legs_) {
        best = std::max(best, leg.max_speed_kmh);
    }
    return best;
}

bool Route::contains(const PathPosition& pos) const noexcept {
    const auto it = std::find(edges_.begin(), edges_.end(), pos.edge);
    if (it == edges_.end()) {
        return false;
    }
    const auto& leg = legs_[static_cast<std::size_t>(it - edges_.begin())];
    return pos.offset_m >= 0.0 && pos.offset_m <= leg.length_m + kAlongEpsM;
}

double Route::along_m(const PathPosition& pos) const {
    const auto it = std::find(edges_.begin(), edges_.end(), pos.edge);
    if (it == edges_.end()) {
        throw Error(ErrorKind::NotOnRoute, "edge " + std::to_string(pos.edge) + " is not on the route");
    }
    const auto i = static_cast<std::size_t>(it - edges_.begin());
    if (!(pos.offset_m >= 0.0) || pos.offset_m > legs_[i].length_m + kAlongEpsM) {
        throw Error(ErrorKind::NotOnRoute, "offset outside route edge " + std::to_string(pos.edge));
    }
    return cumulative_[i] + std::min(pos.offset_m, legs_[i].length_m);
}

PathPosition Route::at(double along) const {
    if (legs_.empty()) {
        throw Error(ErrorKind::NotOnRoute, "empty route has no positions");
    }
    const double total = total_length_m();
    if (!(along >= -kAlongEpsM) || along > total + kAlongEpsM) {
        throw Error(ErrorKind::NotOnRoute, "distance " + std::to_string(along) + " outside route");
    }
    along = std::clamp(along, 0.0, total);
    // First leg whose end lies strictly beyond `along`.
    auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end(), along);
    std::size_t i = it == cumulative_.end() ? legs_.size() - 1 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    const double offset = std::clamp(along - cumulative_[i], 0.0, legs_[i].length_m);
    return PathPosition{edges_[i], offset};
}

// ============================================================
// LOADING
// ============================================================

namespace {

template<typename T>
T require(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw Error(ErrorKind::MalformedDocument, where + ": missing \"" + key + "\"");
    }
    if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) {
            throw Error(ErrorKind::MalformedDocument, where + ": \"" + key + "\" must be a number");
        }
    } else {
        if (!it->is_number_integer()) {
            throw Error(ErrorKind::MalformedDocument, where + ": \"" + key + "\" must be an integer");
        }
    }
    return it->get<T>();
}

RoadGraph graph_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw Error(ErrorKind::MalformedDocument, "graph document must be a JSON object");
    }
    const double default_speed = require<double>(doc, "default_max_speed_kmh", "graph");
    const auto nodes = doc.find("nodes");
    const auto edges = doc.find("edges");
    if (nodes == doc.end() || !nodes->is_array() || edges == doc.end() || !edges->is_array()) {
        throw Error(ErrorKind::MalformedDocument, "graph: \"nodes\" and \"edges\" must be arrays");
    }
    std::vector<RoadNode> out_nodes;
    out_nodes.reserve(nodes->size());
    for (std::size_t i = 0; i < nodes->size(); ++i) {
        const auto& n = (*nodes)[i];
        const std::string where = "nodes[" + std::to_string(i) + "]";
        if (!n.is_object()) {
            throw Error(ErrorKind::MalformedDocument, where + " must be an object");
        }
        out_nodes.push_back(RoadNode{require<NodeId>(n, "id", where),
                                     GeoPoint{require<double>(n, "lat", where), require<double>(n, "lon", where)}});
    }
    std::vector<RoadEdge> out_edges;
    out_edges.reserve(edges->size());
    for (std::size_t i = 0; i < edges->size(); ++i) {
        const auto& e = (*edges)[i];
        const std::string where = "edges[" + std::to_string(i) + "]";
        if (!e.is_object()) {
            throw Error(ErrorKind::MalformedDocument, where + " must be an object");
        }
        RoadEdge edge{require<NodeId>(e, "from", where), require<NodeId>(e, "to", where),
                      require<double>(e, "length_m", where), 0.0};
        if (e.contains("max_speed_kmh") && !e["max_speed_kmh"].is_null()) {
            edge.max_speed_kmh = require<double>(e, "max_speed_kmh", where);
            if (edge.max_speed_kmh == 0.0) {
                throw Error(ErrorKind::InvalidValue, where + ": max_speed_kmh must be positive");
            }
        }
        out_edges.push_back(edge);
    }
    return RoadGraph(std::move(out_nodes), std::move(out_edges), default_speed);
}

}// namespace

RoadGraph load_graph_text(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedDocument, std::string("graph document is not valid JSON: ") + e.what());
    }
    return graph_from_json(doc);
}

RoadGraph load_graph(std::istream& in) {
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_graph_text(buffer.str());
}

RoadGraph load_graph_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::MalformedDocument, "cannot open graph file " + path.string());
    }
    return load_graph(in);
}

// ============================================================
// ROUTING
// ============================================================

Route shortest_path(const RoadGraph& graph, NodeId from, NodeId to) {
    if (!graph.contains(from) || !graph.contains(to)) {
        throw Error(ErrorKind::InvalidValue, "shortest_path endpoints must exist in the graph");
    }
    const auto to_target = graph.distances_to(to);
    const double total = to_target[graph.index_of(from)];
    if (!std::isfinite(total)) {
        throw Error(ErrorKind::NoRoute, "no route from " + node_label(from) + " to " + node_label(to));
    }
    // Walk forward along tight edges, always stepping to the smallest next node id.
    std::vector<EdgeId> edges;
    NodeId at = from;
    while (at != to) {
        const double here = to_target[graph.index_of(at)];
        const double tol = 1e-9 * std::max(1.0, here);
        std::optional<EdgeId> pick;
        for (EdgeId e : graph.out_edges(at)) {
            const auto& edge = graph.edges()[e];
            const double rest = to_target[graph.index_of(edge.to)];
            if (std::abs(edge.length_m + rest - here) > tol || !(rest < here)) {
                continue;
            }
            if (!pick) {
                pick = e;
                continue;
            }
            const auto& best = graph.edges()[*pick];
            if (edge.to < best.to || (edge.to == best.to && edge.length_m < best.length_m)) {
                pick = e;
            }
        }
        if (!pick) {
            throw Error(ErrorKind::NoRoute, "route reconstruction failed at " + node_label(at));
        }
        edges.push_back(*pick);
        at = graph.edges()[*pick].to;
    }
    return Route(graph, from, std::move(edges));
}

double NetworkDistanceCache::node_distance(NodeId from, NodeId to) {
    auto it = rows_.find(from);
    if (it == rows_.end()) {
        it = rows_.emplace(from, graph_.distances_from(from)).first;
    }
    return it->second[graph_.index_of(to)];
}

double NetworkDistanceCache::directed(const PathPosition& a, const PathPosition& b) {
    const auto& ea = graph_.edges()[a.edge];
    const auto& eb = graph_.edges()[b.edge];
    double best = kInf;
    if (a.edge == b.edge && b.offset_m >= a.offset_m) {
        best = b.offset_m - a.offset_m;
    }
    // A position at either end of its edge sits on that vertex and may leave or arrive through any edge there.
    const std::pair<NodeId, double> exits[2] = {{ea.to, std::max(0.0, ea.length_m - a.offset_m)}, {ea.from, 0.0}};
    const std::pair<NodeId, double> entries[2] = {{eb.from, b.offset_m}, {eb.to, 0.0}};
    const std::size_t n_exits = a.offset_m == 0.0 ? 2 : 1;
    const std::size_t n_entries = b.offset_m >= eb.length_m ? 2 : 1;
    for (std::size_t i = 0; i < n_exits; ++i) {
        for (std::size_t j = 0; j < n_entries; ++j) {
            const double via = node_distance(exits[i].first, entries[j].first);
            if (std::isfinite(via)) {
                best = std::min(best, exits[i].second + via + entries[j].second);
            }
        }
    }
    return best;
}

double NetworkDistanceCache::distance(const PathPosition& a, const PathPosition& b) {
    graph_.check_position(a);
    graph_.check_position(b);
    if (a == b) {
        return 0.0;
    }
    const double d = std::min(directed(a, b), directed(b, a));
    if (!std::isfinite(d)) {
        throw Error(ErrorKind::NoRoute, "positions are not connected");
    }
    return d;
}

double network_distance_m(const RoadGraph& graph, const PathPosition& a, const PathPosition& b) {
    NetworkDistanceCache cache(graph);
    return cache.distance(a, b);
}

std::vector<PathPosition> route_target_points(const Route& route, double max_spacing_m) {
    if (route.empty()) {
        throw Error(ErrorKind::InvalidValue, "target points need a non-empty route");
    }
    if (!(max_spacing_m > 0.0)) {
        throw Error(ErrorKind::InvalidValue, "max_spacing_m must be positive");
    }
    std::vector<PathPosition> out;
    for (std::size_t i = 0; i < route.legs().size(); ++i) {
        const double len = route.legs()[i].length_m;
        const auto parts = static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_spacing_m - 1e-12)));
        for (std::size_t k = 0; k < parts; ++k) {
            out.push_back(PathPosition{route.edges()[i], len * static_cast<double>(k) / static_cast<double>(parts)});
        }
    }
    out.push_back(PathPosition{route.edges().back(), route.legs().back().length_m});
    return out;
}

std::optional<PathPosition> project_along(const Route& route, const PathPosition& start, double distance_m) {
    const double from = route.along_m(start);
    if (!(distance_m >= 0.0)) {
        throw Error(ErrorKind::InvalidValue, "projection distance must be non-negative");
    }
    if (distance_m == 0.0) {
        return start;
    }
    const double target = from + distance_m;
    if (target > route.total_length_m() + kAlongEpsM) {
        return std::nullopt;
    }
    return route.at(target);
}

}// namespace tcep
