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

#ifndef TCEP_TRACK_STREAM_HPP_
#define TCEP_TRACK_STREAM_HPP_

#include <tcep/camera.hpp>
#include <tcep/types.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcep {

/// Pixel rectangle, top-left origin.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool operator==(const BoundingBox&) const = default;
};

struct TrackedBox {
    std::int64_t track_id = 0;
    VehicleClass cls = VehicleClass::Car;
    double confidence = 0.0;
    BoundingBox bbox;

    bool operator==(const TrackedBox&) const = default;
};

/// One camera frame worth of tracked detections; the unit of the JSONL wire format.
struct DetectionFrame {
    std::string camera_id;
    std::int64_t ts_ms = 0;
    std::int64_t frame_index = 0;
    std::vector<TrackedBox> boxes;
    /// Detector-side inference time for this frame, when the producer reports it.
    std::optional<double> pre_ms;

    bool operator==(const DetectionFrame&) const = default;
};

/// Decodes one JSONL line. Throws Error(Schema) describing the first violation.
[[nodiscard]] DetectionFrame decode_track_line(std::string_view line);
[[nodiscard]] std::string encode_track_line(const DetectionFrame& frame);

/// True when every box lies inside the camera's image.
[[nodiscard]] bool boxes_within(const DetectionFrame& frame, const CameraMeta& cam) noexcept;

/// Enforces strictly increasing ts_ms and frame_index per camera.
class MonotonicityCheck {
  public:
    /// Throws Error(TimestampRegression) when `frame` does not advance its camera's stream.
    void check(const DetectionFrame& frame);
    /// Non-throwing variant; does not record the frame when it is rejected.
    [[nodiscard]] bool accept(const DetectionFrame& frame);

  private:
    std::map<std::string, std::pair<std::int64_t, std::int64_t>, std::less<>> last_;
};

/**
 * Reads a whole JSONL track document. Blank lines are skipped. Errors carry the 1-based
 * line number: Error(Schema) for malformed lines, Error(TimestampRegression) for ordering.
 */
[[nodiscard]] std::vector<DetectionFrame> read_stream(std::istream& in);

void write_stream(std::ostream& out, const std::vector<DetectionFrame>& frames);

}// namespace tcep

#endif// TCEP_TRACK_STREAM_HPP_
