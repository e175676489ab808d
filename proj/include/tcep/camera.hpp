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

#ifndef TCEP_CAMERA_HPP_
#define TCEP_CAMERA_HPP_

#include <tcep/geo.hpp>
#include <tcep/road_graph.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcep {

inline constexpr double kDefaultCameraSearchRadiusM = 100.0;

/**
 * @brief Static metadata for one road camera, as stored in the camera registry document.
 *
 * `flip_direction` marks cameras mounted facing against the road's reference direction.
 * `mpp_near`/`mpp_far` optionally replace the single meters-per-pixel scalar with one value
 * for the lower (near) and one for the upper (far) half of the image.
 */
struct CameraMeta {
    std::string id;
    GeoPoint point;
    std::string road_name;
    int image_width_px = 0;
    int image_height_px = 0;
    double meters_per_pixel = 0.0;
    double refresh_seconds = 0.0;
    double clip_seconds = 0.0;
    NodeId nearest_node = 0;
    bool flip_direction = false;
    double jitter_px = 8.0;
    std::optional<double> mpp_near;
    std::optional<double> mpp_far;
    std::optional<double> lane_pixel_gap_px;
    std::optional<double> reference_gap_m;
};

void validate(const CameraMeta& cam);

[[nodiscard]] std::vector<CameraMeta> load_registry_text(std::string_view text);
[[nodiscard]] std::vector<CameraMeta> load_registry(std::istream& in);
[[nodiscard]] std::vector<CameraMeta> load_registry_file(const std::filesystem::path& path);

/// Lowercased road name with runs of whitespace replaced by single hyphens.
[[nodiscard]] std::string road_slug(std::string_view road_name);

/**
 * Route spanning a named road: the shortest path between the two registry cameras on that
 * road that lie farthest apart in network terms, oriented from the camera listed first.
 * A road with a single camera yields an empty route at that camera's node.
 */
[[nodiscard]] Route resolve_road_route(const RoadGraph& graph, const std::vector<CameraMeta>& registry,
                                       std::string_view road_name);

/// Cameras on `road_name` within `radius_m` of the route, ordered by projected position along it.
[[nodiscard]] std::vector<CameraMeta> find_cameras(const RoadGraph& graph, const std::vector<CameraMeta>& registry,
                                                   std::string_view road_name, const Route& route,
                                                   double radius_m = kDefaultCameraSearchRadiusM);

}// namespace tcep

#endif// TCEP_CAMERA_HPP_
