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

#ifndef TCEP_WINDOWING_HPP_
#define TCEP_WINDOWING_HPP_

#include <tcep/road_graph.hpp>
#include <tcep/track_stream.hpp>
#include <tcep/types.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tcep {

/// A tumbling window [start_ms, end_ms) over one camera's frames.
struct TimeWindow {
    std::string camera_id;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    std::vector<DetectionFrame> frames;
    /// Only the trailing window of a stream can be partial.
    bool partial = false;
    /// Span of the window actually observed; equals end_ms - start_ms unless partial.
    std::int64_t covered_ms = 0;

    [[nodiscard]] double length_s() const noexcept { return static_cast<double>(end_ms - start_ms) / 1000.0; }
    [[nodiscard]] double covered_s() const noexcept { return static_cast<double>(covered_ms) / 1000.0; }
};

/// Window length in whole milliseconds; throws InvalidValue unless positive.
[[nodiscard]] std::int64_t window_length_ms(double length_s);

/**
 * @brief Incremental tumbling window builder for one camera stream.
 *
 * Windows are aligned to the first frame. Windows with no frames are emitted for gaps so the
 * sequence stays contiguous. Input must already be monotone.
 */
class WindowBuilder {
  public:
    WindowBuilder(std::string camera_id, double length_s);

    /// Adds a frame; returns every window the frame closed, oldest first.
    [[nodiscard]] std::vector<TimeWindow> push(DetectionFrame frame);
    /// Closes every window ending at or before `ts_ms`, which must precede the next frame.
    [[nodiscard]] std::vector<TimeWindow> advance_to(std::int64_t ts_ms);
    /// Closes the stream. Returns the trailing window, if any frame was ever pushed.
    [[nodiscard]] std::optional<TimeWindow> finish();

    [[nodiscard]] std::int64_t length_ms() const noexcept { return length_ms_; }
    /// End of the window currently being filled, if one is open.
    [[nodiscard]] std::optional<std::int64_t> current_end_ms() const noexcept {
        return current_ ? std::optional<std::int64_t>(current_->end_ms) : std::nullopt;
    }

  private:
    TimeWindow open_window(std::int64_t start) const;
    [[nodiscard]] std::int64_t median_delta_ms() const;

    std::string camera_id_;
    std::int64_t length_ms_;
    std::optional<TimeWindow> current_;
    std::optional<std::int64_t> last_ts_;
    std::vector<std::int64_t> deltas_;
};

/// Batch form of WindowBuilder.
[[nodiscard]] std::vector<TimeWindow> time_window(const std::vector<DetectionFrame>& stream, double length_s);

/// Travel sense of a carryover vehicle with respect to the segment route.
enum class Heading { Forward, Backward };

struct CarryoverEntry {
    std::string camera_id;
    std::int64_t vehicle_id = 0;
    VehicleClass cls = VehicleClass::Car;
    Heading heading = Heading::Forward;
    /// Speed as measured, kept for reporting.
    double raw_speed_mps = 0.0;
    /// Speed used for projection, clamped to the segment's maximum.
    double speed_mps = 0.0;
    bool speed_anomaly = false;
    std::int64_t departure_ms = 0;
    /// Distance covered since departure at the last update; never decreases.
    double progress_m = 0.0;
};

struct CarryoverSample {
    std::string camera_id;
    std::int64_t vehicle_id = 0;
    Heading heading = Heading::Forward;
    double speed_mps = 0.0;
    /// Route coordinate from the segment start.
    double along_m = 0.0;
};

/// Vehicles that left one camera of a segment and are still between the two cameras.
class CarryoverStore {
  public:
    /// Adds or replaces the entry keyed by (camera_id, vehicle_id). Speed is clamped to max_speed_mps.
    void insert(const std::string& camera_id, std::int64_t vehicle_id, VehicleClass cls, Heading heading,
                double speed_mps, std::int64_t departure_ms, double max_speed_mps);

    [[nodiscard]] const std::vector<CarryoverEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    void clear() noexcept { entries_.clear(); }

    /// See carryover_update.
    std::vector<CarryoverSample> advance(const Route& segment, std::int64_t now_ms, double processing_latency_s,
                                         double max_age_s);

  private:
    std::vector<CarryoverEntry> entries_;
};

inline constexpr double kDefaultCarryoverMaxAgeS = 60.0;

/**
 * Advances every entry to distance speed * (now - departure + latency) from its starting camera,
 * evicts entries that ran past the far end or are older than max_age_s, and returns the rest.
 * Forward entries start at the segment start, backward ones at its end.
 */
std::vector<CarryoverSample> carryover_update(CarryoverStore& store, const Route& segment, std::int64_t now_ms,
                                              double processing_latency_s,
                                              double max_age_s = kDefaultCarryoverMaxAgeS);

}// namespace tcep

#endif// TCEP_WINDOWING_HPP_
