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
#include <tcep/track_stream.hpp>

#include <json.hpp>

#include <cmath>
#include <istream>
#include <ostream>

namespace tcep {

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::Schema, what); }

std::int64_t integer_field(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        schema(std::string("missing \"") + key + "\"");
    }
    if (!it->is_number_integer()) {
        schema(std::string("\"") + key + "\" must be an integer");
    }
    return it->get<std::int64_t>();
}

double number_field(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        schema(std::string("missing \"") + key + "\"");
    }
    if (!it->is_number()) {
        schema(std::string("\"") + key + "\" must be a number");
    }
    const double v = it->get<double>();
    if (!std::isfinite(v)) {
        schema(std::string("\"") + key + "\" must be finite");
    }
    return v;
}

void only_keys(const json& obj, std::initializer_list<std::string_view> allowed, const char* where) {
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (auto a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            schema(std::string("unknown key \"") + key + "\" in " + where);
        }
    }
}

TrackedBox decode_box(const json& j, std::size_t index) {
    const std::string where = "boxes[" + std::to_string(index) + "]";
    if (!j.is_object()) {
        schema(where + " must be an object");
    }
    only_keys(j, {"track_id", "class", "conf", "bbox"}, where.c_str());
    TrackedBox box;
    try {
        box.track_id = integer_field(j, "track_id");
        const auto cls = j.find("class");
        if (cls == j.end() || !cls->is_string()) {
            schema("\"class\" must be a string");
        }
        const auto parsed = vehicle_class_from_name(cls->get_ref<const std::string&>());
        if (!parsed) {
            schema("unknown vehicle class \"" + cls->get<std::string>() + "\"");
        }
        box.cls = *parsed;
        box.confidence = number_field(j, "conf");
        if (box.confidence < 0.0 || box.confidence > 1.0) {
            schema("\"conf\" must lie in [0, 1]");
        }
        const auto bbox = j.find("bbox");
        if (bbox == j.end() || !bbox->is_array() || bbox->size() != 4) {
            schema("\"bbox\" must be an array [x, y, w, h]");
        }
        double v[4];
        for (std::size_t k = 0; k < 4; ++k) {
            const auto& c = (*bbox)[k];
            if (!c.is_number() || !std::isfinite(c.get<double>())) {
                schema("\"bbox\" entries must be finite numbers");
            }
            v[k] = c.get<double>();
        }
        box.bbox = BoundingBox{v[0], v[1], v[2], v[3]};
        if (box.bbox.x < 0.0 || box.bbox.y < 0.0 || !(box.bbox.w > 0.0) || !(box.bbox.h > 0.0)) {
            schema("\"bbox\" must have non-negative origin and positive size");
        }
    } catch (const Error& e) {
        schema(where + ": " + e.what());
    }
    return box;
}

}// namespace

DetectionFrame decode_track_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception&) {
        schema("line is not valid JSON");
    }
    if (!j.is_object()) {
        schema("line must be a JSON object");
    }
    only_keys(j, {"camera_id", "ts_ms", "frame_index", "boxes", "pre_ms"}, "frame");
    DetectionFrame frame;
    const auto cam = j.find("camera_id");
    if (cam == j.end() || !cam->is_string() || cam->get_ref<const std::string&>().empty()) {
        schema("\"camera_id\" must be a non-empty string");
    }
    frame.camera_id = cam->get<std::string>();
    frame.ts_ms = integer_field(j, "ts_ms");
    frame.frame_index = integer_field(j, "frame_index");
    if (frame.frame_index < 0) {
        schema("\"frame_index\" must be non-negative");
    }
    const auto boxes = j.find("boxes");
    if (boxes == j.end() || !boxes->is_array()) {
        schema("\"boxes\" must be an array");
    }
    frame.boxes.reserve(boxes->size());
    for (std::size_t i = 0; i < boxes->size(); ++i) {
        frame.boxes.push_back(decode_box((*boxes)[i], i));
    }
    if (j.contains("pre_ms")) {
        frame.pre_ms = number_field(j, "pre_ms");
        if (*frame.pre_ms < 0.0) {
            schema("\"pre_ms\" must be non-negative");
        }
    }
    return frame;
}

std::string encode_track_line(const DetectionFrame& frame) {
    json boxes = json::array();
    for (const auto& b : frame.boxes) {
        boxes.push_back(json{{"track_id", b.track_id},
                             {"class", std::string(to_string(b.cls))},
                             {"conf", b.confidence},
                             {"bbox", json::array({b.bbox.x, b.bbox.y, b.bbox.w, b.bbox.h})}});
    }
    json j{{"camera_id", frame.camera_id},
           {"ts_ms", frame.ts_ms},
           {"frame_index", frame.frame_index},
           {"boxes", std::move(boxes)}};
    if (frame.pre_ms) {
        j["pre_ms"] = *frame.pre_ms;
    }
    return j.dump();
}

bool boxes_within(const DetectionFrame& frame, const CameraMeta& cam) noexcept {
    const auto w = static_cast<double>(cam.image_width_px);
    const auto h = static_cast<double>(cam.image_height_px);
    for (const auto& b : frame.boxes) {
        if (b.bbox.x < 0.0 || b.bbox.y < 0.0 || b.bbox.x + b.bbox.w > w || b.bbox.y + b.bbox.h > h) {
            return false;
        }
    }
    return true;
}

bool MonotonicityCheck::accept(const DetectionFrame& frame) {
    const auto it = last_.find(frame.camera_id);
    if (it != last_.end() && (frame.ts_ms <= it->second.first || frame.frame_index <= it->second.second)) {
        return false;
    }
    last_[frame.camera_id] = {frame.ts_ms, frame.frame_index};
    return true;
}

void MonotonicityCheck::check(const DetectionFrame& frame) {
    if (!accept(frame)) {
        throw Error(ErrorKind::TimestampRegression,
                    "camera " + frame.camera_id + ": frame " + std::to_string(frame.frame_index) + " at "
                        + std::to_string(frame.ts_ms) + " ms does not advance the stream");
    }
}

std::vector<DetectionFrame> read_stream(std::istream& in) {
    std::vector<DetectionFrame> out;
    MonotonicityCheck order;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        try {
            auto frame = decode_track_line(line);
            order.check(frame);
            out.push_back(std::move(frame));
        } catch (const Error& e) {
            throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_stream(std::ostream& out, const std::vector<DetectionFrame>& frames) {
    for (const auto& f : frames) {
        out << encode_track_line(f) << '\n';
    }
}

}// namespace tcep
