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

#ifndef TCEP_SIMULATOR_HPP_
#define TCEP_SIMULATOR_HPP_

#include <tcep/camera.hpp>
#include <tcep/road_graph.hpp>
#include <tcep/track_stream.hpp>
#include <tcep/types.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcep {

/// Simulated vehicle. Direction is relative to the road: outgoing travels the camera path in order.
struct SimVehicle {
    std::int64_t id = 0;
    /// Offset from the scenario start at which the vehicle passes the first camera's centre line.
    std::int64_t entry_ms = 0;
    double speed_mps = 0.0;
    Direction direction = Direction::Outgoing;
    VehicleClass cls = VehicleClass::Car;
    std::vector<std::string> camera_path;
    /// Stationary vehicles only: which travel lane they sit in, and for how long.
    Direction lane = Direction::Outgoing;
    double dwell_s = 0.0;
};

struct SimCamera {
    std::string id;
    /// Shifts this camera's clip schedule relative to the scenario start.
    std::int64_t offset_ms = 0;
};

struct SimulationConfig {
    std::int64_t start_ms = 0;
    double fps = 30.0;
    /// Number of clips recorded per camera, one every refresh_seconds, each clip_seconds long.
    int cycles = 1;
    /// Standard deviation of Gaussian noise added to box positions; 0 renders exactly.
    double noise_px = 0.0;
    double min_confidence = 0.9;
    double max_confidence = 0.9;
    std::vector<SimCamera> cameras;
    std::vector<SimVehicle> vehicles;
};

/// One contiguous appearance of a vehicle in one camera clip.
struct Sighting {
    std::string camera_id;
    std::int64_t track_id = 0;
    std::int64_t first_ts_ms = 0;
    std::int64_t last_ts_ms = 0;
    std::size_t frames = 0;
    /// Direction the camera should report after applying flip_direction.
    Direction direction = Direction::Outgoing;
};

struct GroundTruthVehicle {
    std::int64_t id = 0;
    VehicleClass cls = VehicleClass::Car;
    Direction direction = Direction::Outgoing;
    double speed_mps = 0.0;
    std::vector<Sighting> sightings;
};

struct Simulation {
    /// Frames per camera, in emission order.
    std::map<std::string, std::vector<DetectionFrame>> streams;
    std::vector<GroundTruthVehicle> truth;
};

[[nodiscard]] SimulationConfig load_simulation_text(std::string_view text);
[[nodiscard]] SimulationConfig load_simulation_file(const std::filesystem::path& path);

/// Pixel box size for a class at the reference 352x288 image scale.
struct BoxSize {
    double w;
    double h;
};
[[nodiscard]] BoxSize box_size(VehicleClass cls) noexcept;

/**
 * Renders every camera clip. Arrival times at later cameras follow the network distance from
 * the first camera of the path. Throws InconsistentScenario for unknown cameras, disconnected
 * paths, or vehicles that would skip the whole image between two frames.
 */
[[nodiscard]] Simulation simulate(const SimulationConfig& config, const std::vector<CameraMeta>& registry,
                                  const RoadGraph& graph, std::uint64_t seed);

/// Writes one `<camera_id>.jsonl` file per stream.
void write_streams(const Simulation& sim, const std::filesystem::path& dir);

}// namespace tcep

#endif// TCEP_SIMULATOR_HPP_
