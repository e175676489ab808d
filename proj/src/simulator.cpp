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
#include <tcep/kinematics.hpp>
#include <tcep/simulator.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace tcep {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::MalformedDocument, "simulation: " + what); }

template <typename T>
T field_or(const json& obj, const char* key, T fallback) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return fallback;
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        bad(std::string("\"") + key + "\" has the wrong type");
    }
}

SimVehicle vehicle_from_json(const json& j, std::size_t index) {
    const std::string where = "vehicles[" + std::to_string(index) + "]";
    if (!j.is_object()) {
        bad(where + " must be an object");
    }
    SimVehicle v;
    v.id = field_or<std::int64_t>(j, "id", static_cast<std::int64_t>(index) + 1);
    v.entry_ms = field_or<std::int64_t>(j, "entry_ms", 0);
    v.speed_mps = field_or<double>(j, "speed_mps", 0.0);
    const auto dir = direction_from_name(field_or<std::string>(j, "direction", "outgoing"));
    if (!dir) {
        bad(where + ": unknown direction");
    }
    v.direction = *dir;
    const auto cls = vehicle_class_from_name(field_or<std::string>(j, "class", "car"));
    if (!cls) {
        bad(where + ": unknown class");
    }
    v.cls = *cls;
    v.camera_path = field_or<std::vector<std::string>>(j, "camera_path", {});
    const auto lane = direction_from_name(field_or<std::string>(j, "lane", "outgoing"));
    if (!lane || *lane == Direction::Stationary) {
        bad(where + ": lane must be incoming or outgoing");
    }
    v.lane = *lane;
    v.dwell_s = field_or<double>(j, "dwell_s", 0.0);
    return v;
}

}// namespace

SimulationConfig load_simulation_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        bad(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        bad("document must be an object");
    }
    SimulationConfig cfg;
    cfg.start_ms = field_or<std::int64_t>(doc, "start_ms", 0);
    cfg.fps = field_or<double>(doc, "fps", cfg.fps);
    cfg.cycles = field_or<int>(doc, "cycles", cfg.cycles);
    cfg.noise_px = field_or<double>(doc, "noise_px", 0.0);
    cfg.min_confidence = field_or<double>(doc, "min_confidence", cfg.min_confidence);
    cfg.max_confidence = field_or<double>(doc, "max_confidence", cfg.max_confidence);
    const auto cams = doc.find("cameras");
    if (cams == doc.end() || !cams->is_array()) {
        bad("\"cameras\" must be an array");
    }
    for (const auto& c : *cams) {
        if (c.is_string()) {
            cfg.cameras.push_back(SimCamera{c.get<std::string>(), 0});
        } else if (c.is_object() && c.contains("id") && c["id"].is_string()) {
            cfg.cameras.push_back(SimCamera{c["id"].get<std::string>(), field_or<std::int64_t>(c, "offset_ms", 0)});
        } else {
            bad("camera entries must be ids or {\"id\", \"offset_ms\"} objects");
        }
    }
    if (const auto veh = doc.find("vehicles"); veh != doc.end()) {
        if (!veh->is_array()) {
            bad("\"vehicles\" must be an array");
        }
        for (std::size_t i = 0; i < veh->size(); ++i) {
            cfg.vehicles.push_back(vehicle_from_json((*veh)[i], i));
        }
    }
    return cfg;
}

SimulationConfig load_simulation_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::MalformedDocument, "cannot open simulation " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return load_simulation_text(buf.str());
}

BoxSize box_size(VehicleClass cls) noexcept {
    switch (cls) {
        case VehicleClass::Car: return {36.0, 28.0};
        case VehicleClass::Bus: return {60.0, 56.0};
        case VehicleClass::Truck: return {56.0, 50.0};
        case VehicleClass::Bicycle: return {14.0, 24.0};
        case VehicleClass::Motorcycle: return {16.0, 24.0};
    }
    return {36.0, 28.0};
}

namespace {

[[noreturn]] void inconsistent(const std::string& what) { throw Error(ErrorKind::InconsistentScenario, what); }

/// One vehicle's schedule at one camera.
struct Passage {
    std::size_t vehicle;
    /// Absolute time the centroid crosses mid-image (moving) or the dwell start (stationary).
    double t_ms;
    double dwell_ms;
    Direction image_direction;
    Direction image_lane;
    double w;
    double h;
};

const CameraMeta& find_camera(const std::vector<CameraMeta>& registry, const std::string& id) {
    const auto it = std::find_if(registry.begin(), registry.end(), [&](const CameraMeta& c) { return c.id == id; });
    if (it == registry.end()) {
        inconsistent("camera " + id + " is not in the registry");
    }
    return *it;
}

}// namespace

Simulation simulate(const SimulationConfig& config, const std::vector<CameraMeta>& registry, const RoadGraph& graph,
                    std::uint64_t seed) {
    if (!(config.fps > 0.0) || config.cycles < 1) {
        inconsistent("fps must be positive and cycles at least 1");
    }
    if (config.min_confidence < 0.0 || config.max_confidence > 1.0 || config.min_confidence > config.max_confidence) {
        inconsistent("confidence range must lie within [0, 1]");
    }
    const double frame_ms = 1000.0 / config.fps;

    std::map<std::string, std::vector<Passage>> passages;
    Simulation sim;
    for (std::size_t vi = 0; vi < config.vehicles.size(); ++vi) {
        const auto& v = config.vehicles[vi];
        if (v.camera_path.empty()) {
            inconsistent("vehicle " + std::to_string(v.id) + " has an empty camera path");
        }
        const bool stationary = v.direction == Direction::Stationary;
        if (stationary ? v.speed_mps != 0.0 || !(v.dwell_s > 0.0) : !(v.speed_mps > 0.0)) {
            inconsistent("vehicle " + std::to_string(v.id)
                         + (stationary ? " must have zero speed and positive dwell" : " must have positive speed"));
        }
        sim.truth.push_back(GroundTruthVehicle{v.id, v.cls, v.direction, v.speed_mps, {}});
        const auto& first = find_camera(registry, v.camera_path.front());
        const auto dist = graph.distances_from(first.nearest_node);
        for (const auto& cam_id : v.camera_path) {
            const auto& cam = find_camera(registry, cam_id);
            const double d = dist[graph.index_of(cam.nearest_node)];
            if (!std::isfinite(d)) {
                inconsistent("vehicle " + std::to_string(v.id) + " cannot reach camera " + cam_id);
            }
            const double scale = cam.image_height_px / 288.0;
            const auto size = box_size(v.cls);
            Passage p{vi, static_cast<double>(config.start_ms + v.entry_ms), v.dwell_s * 1000.0, v.direction, v.lane,
                      size.w * scale, size.h * scale};
            if (!stationary) {
                p.t_ms += d / v.speed_mps * 1000.0;
                const double step_px = v.speed_mps * frame_ms / 1000.0 / cam.meters_per_pixel;
                if (step_px >= cam.image_height_px - p.h) {
                    inconsistent("vehicle " + std::to_string(v.id) + " crosses camera " + cam_id
                                 + " faster than the frame rate can render");
                }
                p.image_lane = v.direction;
            }
            if (cam.flip_direction) {
                p.image_direction = flip(p.image_direction);
                p.image_lane = flip(p.image_lane);
            }
            passages[cam_id].push_back(p);
        }
    }

    for (std::size_t ci = 0; ci < config.cameras.size(); ++ci) {
        const auto& sc = config.cameras[ci];
        const auto& cam = find_camera(registry, sc.id);
        std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + ci);
        std::normal_distribution<double> noise(0.0, config.noise_px > 0.0 ? config.noise_px : 1.0);
        std::uniform_real_distribution<double> conf(config.min_confidence, config.max_confidence);
        const double W = cam.image_width_px;
        const double H = cam.image_height_px;
        const auto refresh_ms = static_cast<std::int64_t>(std::llround(cam.refresh_seconds * 1000.0));
        const auto frames_per_clip = static_cast<std::int64_t>(std::ceil(cam.clip_seconds * config.fps - 1e-9));
        auto& stream = sim.streams[sc.id];
        const auto& here = passages[sc.id];
        std::int64_t frame_index = 0;
        std::int64_t next_track = 1;
        for (int cycle = 0; cycle < config.cycles; ++cycle) {
            const std::int64_t clip_start = config.start_ms + sc.offset_ms + cycle * refresh_ms;
            std::map<std::size_t, std::int64_t> clip_tracks;// passage index -> track id
            for (std::int64_t k = 0; k < frames_per_clip; ++k) {
                DetectionFrame frame;
                frame.camera_id = sc.id;
                frame.ts_ms = clip_start + static_cast<std::int64_t>(std::llround(static_cast<double>(k) * frame_ms));
                frame.frame_index = frame_index++;
                const double t = static_cast<double>(frame.ts_ms);
                for (std::size_t pi = 0; pi < here.size(); ++pi) {
                    const auto& p = here[pi];
                    const auto& v = config.vehicles[p.vehicle];
                    double cy = H / 2.0;
                    if (p.image_direction == Direction::Stationary) {
                        if (t < p.t_ms || t > p.t_ms + p.dwell_ms) {
                            continue;
                        }
                    } else {
                        const double offset = v.speed_mps * (t - p.t_ms) / 1000.0 / cam.meters_per_pixel;
                        cy = p.image_direction == Direction::Outgoing ? H / 2.0 - offset : H / 2.0 + offset;
                    }
                    double y = std::round(cy - p.h / 2.0);
                    if (y < 0.0 || y > H - p.h) {
                        continue;
                    }
                    const double cx = (p.image_lane == Direction::Outgoing ? 0.3 : 0.7) * W;
                    double x = std::round(cx - p.w / 2.0);
                    if (config.noise_px > 0.0) {
                        x = std::clamp(std::round(x + noise(rng)), 0.0, W - p.w);
                        y = std::clamp(std::round(y + noise(rng)), 0.0, H - p.h);
                    }
                    auto [it, fresh] = clip_tracks.try_emplace(pi, next_track);
                    if (fresh) {
                        ++next_track;
                        const Direction reported = v.direction;
                        sim.truth[p.vehicle].sightings.push_back(
                            Sighting{sc.id, it->second, frame.ts_ms, frame.ts_ms, 0, reported});
                    }
                    auto& sightings = sim.truth[p.vehicle].sightings;
                    const auto s = std::find_if(sightings.rbegin(), sightings.rend(), [&](const Sighting& x) {
                        return x.camera_id == sc.id && x.track_id == it->second;
                    });
                    s->last_ts_ms = frame.ts_ms;
                    ++s->frames;
                    frame.boxes.push_back(TrackedBox{it->second, v.cls, conf(rng), BoundingBox{x, y, p.w, p.h}});
                }
                std::sort(frame.boxes.begin(), frame.boxes.end(),
                          [](const TrackedBox& a, const TrackedBox& b) { return a.track_id < b.track_id; });
                stream.push_back(std::move(frame));
            }
        }
    }
    return sim;
}

void write_streams(const Simulation& sim, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [camera, frames] : sim.streams) {
        std::ofstream out(dir / (camera + ".jsonl"));
        if (!out) {
            throw Error(ErrorKind::MalformedDocument, "cannot write " + (dir / (camera + ".jsonl")).string());
        }
        write_stream(out, frames);
    }
}

}// namespace tcep
