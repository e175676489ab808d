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

#include <tcep/camera.hpp>
#include <tcep/error.hpp>

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace tcep {

void validate(const CameraMeta& cam) {
    const auto fail = [&](const std::string& what) {
        throw Error(ErrorKind::InvalidValue, "camera " + cam.id + ": " + what);
    };
    if (cam.id.empty()) {
        throw Error(ErrorKind::InvalidValue, "camera id must not be empty");
    }
    if (!is_valid(cam.point)) {
        fail("coordinates out of range");
    }
    if (cam.image_width_px <= 0 || cam.image_height_px <= 0) {
        fail("image dimensions must be positive");
    }
    const auto mpp_ok = [](double v) { return v > 0.001 && v < 10.0; };
    if (!mpp_ok(cam.meters_per_pixel)) {
        fail("meters_per_pixel must lie in (0.001, 10)");
    }
    if (cam.mpp_near.has_value() != cam.mpp_far.has_value()) {
        fail("mpp_near and mpp_far must be given together");
    }
    if (cam.mpp_near && (!mpp_ok(*cam.mpp_near) || !mpp_ok(*cam.mpp_far))) {
        fail("near/far meters_per_pixel must lie in (0.001, 10)");
    }
    if (!(cam.clip_seconds > 0.0) || !(cam.refresh_seconds > 0.0)) {
        fail("refresh_seconds and clip_seconds must be positive");
    }
    if (cam.refresh_seconds < cam.clip_seconds) {
        fail("refresh_seconds must be at least clip_seconds");
    }
    if (!(cam.jitter_px >= 0.0)) {
        fail("jitter_px must be non-negative");
    }
}

namespace {

double number(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        throw Error(ErrorKind::MalformedDocument, where + ": \"" + key + "\" must be a number");
    }
    return it->get<double>();
}

std::optional<double> optional_number(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return std::nullopt;
    }
    return number(obj, key, where);
}

std::string text(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw Error(ErrorKind::MalformedDocument, where + ": \"" + key + "\" must be a string");
    }
    return it->get<std::string>();
}

int integer(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer()) {
        throw Error(ErrorKind::MalformedDocument, where + ": \"" + key + "\" must be an integer");
    }
    return it->get<int>();
}

CameraMeta camera_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) {
        throw Error(ErrorKind::MalformedDocument, where + " must be an object");
    }
    CameraMeta cam;
    cam.id = text(j, "id", where);
    cam.point = GeoPoint{number(j, "lat", where), number(j, "lon", where)};
    cam.road_name = text(j, "road_name", where);
    cam.image_width_px = integer(j, "image_width_px", where);
    cam.image_height_px = integer(j, "image_height_px", where);
    cam.meters_per_pixel = number(j, "meters_per_pixel", where);
    cam.refresh_seconds = number(j, "refresh_seconds", where);
    cam.clip_seconds = number(j, "clip_seconds", where);
    const auto node = j.find("nearest_node");
    if (node == j.end() || !node->is_number_integer()) {
        throw Error(ErrorKind::MalformedDocument, where + ": \"nearest_node\" must be an integer");
    }
    cam.nearest_node = node->get<NodeId>();
    if (const auto flip = j.find("flip_direction"); flip != j.end()) {
        if (!flip->is_boolean()) {
            throw Error(ErrorKind::MalformedDocument, where + ": \"flip_direction\" must be a boolean");
        }
        cam.flip_direction = flip->get<bool>();
    }
    cam.jitter_px = optional_number(j, "jitter_px", where).value_or(cam.jitter_px);
    cam.mpp_near = optional_number(j, "mpp_near", where);
    cam.mpp_far = optional_number(j, "mpp_far", where);
    cam.lane_pixel_gap_px = optional_number(j, "lane_pixel_gap_px", where);
    cam.reference_gap_m = optional_number(j, "reference_gap_m", where);
    validate(cam);
    return cam;
}

}// namespace

std::vector<CameraMeta> load_registry_text(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedDocument, std::string("camera registry is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) {
        throw Error(ErrorKind::MalformedDocument, "camera registry must be a JSON array");
    }
    std::vector<CameraMeta> out;
    out.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        auto cam = camera_from_json(doc[i], "cameras[" + std::to_string(i) + "]");
        if (std::any_of(out.begin(), out.end(), [&](const CameraMeta& c) { return c.id == cam.id; })) {
            throw Error(ErrorKind::InvalidValue, "duplicate camera id " + cam.id);
        }
        out.push_back(std::move(cam));
    }
    return out;
}

std::vector<CameraMeta> load_registry(std::istream& in) {
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_registry_text(buffer.str());
}

std::vector<CameraMeta> load_registry_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::MalformedDocument, "cannot open camera registry " + path.string());
    }
    return load_registry(in);
}

std::string road_slug(std::string_view road_name) {
    std::string out;
    bool pending_gap = false;
    for (unsigned char c : road_name) {
        if (std::isspace(c)) {
            pending_gap = !out.empty();
            continue;
        }
        if (pending_gap) {
            out.push_back('-');
            pending_gap = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

namespace {

std::vector<const CameraMeta*> cameras_on(const std::vector<CameraMeta>& registry, std::string_view road_name) {
    const auto slug = road_slug(road_name);
    std::vector<const CameraMeta*> out;
    for (const auto& cam : registry) {
        if (road_slug(cam.road_name) == slug) {
            out.push_back(&cam);
        }
    }
    return out;
}

}// namespace

Route resolve_road_route(const RoadGraph& graph, const std::vector<CameraMeta>& registry, std::string_view road_name) {
    const auto cams = cameras_on(registry, road_name);
    if (cams.empty()) {
        throw Error(ErrorKind::UnknownRoad, "no cameras registered on road \"" + std::string(road_name) + "\"");
    }
    for (const auto* cam : cams) {
        if (!graph.contains(cam->nearest_node)) {
            throw Error(ErrorKind::InvalidValue,
                        "camera " + cam->id + " references unknown node " + std::to_string(cam->nearest_node));
        }
    }
    if (cams.size() == 1) {
        return Route(graph, cams.front()->nearest_node, {});
    }
    double best = -1.0;
    NodeId from = cams.front()->nearest_node;
    NodeId to = from;
    // Improvement beyond summation noise keeps the earlier-listed camera as the start on equal distances.
    for (std::size_t i = 0; i < cams.size(); ++i) {
        const auto dist = graph.distances_from(cams[i]->nearest_node);
        for (std::size_t j = 0; j < cams.size(); ++j) {
            const double d = dist[graph.index_of(cams[j]->nearest_node)];
            if (i != j && std::isfinite(d) && d > best + 1e-6) {
                best = d;
                from = cams[i]->nearest_node;
                to = cams[j]->nearest_node;
            }
        }
    }
    if (best < 0.0) {
        throw Error(ErrorKind::NoRoute, "cameras on road \"" + std::string(road_name) + "\" are not connected");
    }
    return shortest_path(graph, from, to);
}

std::vector<CameraMeta> find_cameras(const RoadGraph& graph, const std::vector<CameraMeta>& registry,
                                     std::string_view road_name, const Route& route, double radius_m) {
    struct Placed {
        const CameraMeta* cam;
        double along;
    };
    std::vector<Placed> placed;
    const auto cams = cameras_on(registry, road_name);
    for (const auto* cam : cams) {
        double best_dist = std::numeric_limits<double>::infinity();
        double best_along = 0.0;
        if (route.empty()) {
            best_dist = haversine_m(cam->point, graph.node(route.start_node()).point);
        }
        for (std::size_t i = 0; i < route.legs().size(); ++i) {
            const auto& leg = route.legs()[i];
            const GeoPoint a = graph.node(leg.from).point;
            const GeoPoint b = graph.node(leg.to).point;
            const auto proj = project_onto_segment(cam->point, a, b);
            if (proj.distance_m < best_dist) {
                best_dist = proj.distance_m;
                best_along = route.leg_start_m(i) + proj.t * leg.length_m;
            }
        }
        if (best_dist <= radius_m) {
            placed.push_back(Placed{cam, best_along});
        }
    }
    std::stable_sort(placed.begin(), placed.end(), [](const Placed& a, const Placed& b) { return a.along < b.along; });
    std::vector<CameraMeta> out;
    out.reserve(placed.size());
    for (const auto& p : placed) {
        out.push_back(*p.cam);
    }
    return out;
}

}// namespace tcep
