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

#ifndef TCEP_KINEMATICS_HPP_
#define TCEP_KINEMATICS_HPP_

#include <tcep/camera.hpp>
#include <tcep/types.hpp>
#include <tcep/windowing.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tcep {

inline constexpr std::size_t kMinTrackSamples = 5;
inline constexpr double kMinTrackSpanS = 0.5;
inline constexpr double kMinLaneWidthM = 2.5;
inline constexpr double kMaxLaneWidthM = 4.0;

/// Bounding-box centre in top-left pixel coordinates.
struct TrackSample {
    std::int64_t ts_ms = 0;
    double x = 0.0;
    double y = 0.0;
    double confidence = 0.0;
};

struct Track {
    std::int64_t track_id = 0;
    VehicleClass cls = VehicleClass::Car;
    std::vector<TrackSample> samples;

    [[nodiscard]] double span_s() const noexcept;
};

struct Calibration {
    double meters_per_pixel = 0.0;
    std::optional<double> lane_pixel_gap_px;
    std::optional<double> reference_gap_m;
};

/// meters_per_pixel = reference_gap_m / lane_pixel_gap_px. Lane widths outside [2.5, 4.0] m are rejected.
[[nodiscard]] Calibration calibrate(double lane_pixel_gap_px, double reference_gap_m);

/// Scale at an image row: the near value below mid-height, the far value above, else the single scalar.
[[nodiscard]] double meters_per_pixel_at(const CameraMeta& cam, double centroid_y) noexcept;

/// Groups passing boxes by track id; samples are ordered and a repeated id within one frame keeps its first box.
[[nodiscard]] std::vector<Track> group_tracks(const std::vector<DetectionFrame>& frames, double confidence_min,
                                              const std::set<VehicleClass>& classes);

/// group_tracks over a window, dropping tracks with fewer than min_samples samples.
[[nodiscard]] std::vector<Track> build_tracks(const TimeWindow& window, double confidence_min,
                                              const std::set<VehicleClass>& classes,
                                              std::size_t min_samples = kMinTrackSamples);

/// Net vertical motion in bottom-left coordinates: falling is incoming, rising is outgoing.
[[nodiscard]] Direction estimate_direction(const Track& track, int image_height_px, double jitter_px);

/// First-to-last centroid displacement over elapsed time. Throws InsufficientSpan below 0.5 s.
[[nodiscard]] double estimate_speed(const Track& track, const Calibration& cal);
/// As above with the camera's scale averaged between the first and last centroid rows.
[[nodiscard]] double estimate_speed(const Track& track, const CameraMeta& cam);

[[nodiscard]] Direction flip(Direction d) noexcept;

struct VehicleRecord {
    std::int64_t vehicle_id = 0;
    VehicleClass cls = VehicleClass::Car;
    Direction direction = Direction::Stationary;
    /// Travel lane; equals direction for moving vehicles, for stationary ones it comes from the image side.
    Direction lane = Direction::Outgoing;
    double speed_mps = 0.0;
    std::string camera_id;
    std::int64_t window_end_ms = 0;
    std::int64_t first_ts_ms = 0;
    std::int64_t last_ts_ms = 0;
    std::size_t samples = 0;
};

/// Builds the record for a trusted track, applying the camera's flip_direction.
[[nodiscard]] VehicleRecord make_record(const Track& track, const CameraMeta& cam, std::int64_t window_end_ms);

struct DirectionCounts {
    std::size_t incoming = 0;
    std::size_t outgoing = 0;
    std::size_t stationary = 0;

    [[nodiscard]] std::size_t total() const noexcept { return incoming + outgoing + stationary; }
    bool operator==(const DirectionCounts&) const = default;
};

[[nodiscard]] DirectionCounts count_by_direction(const std::vector<VehicleRecord>& records) noexcept;

/// Kinematic summary of one closed window.
struct WindowObservation {
    std::string camera_id;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    bool partial = false;
    std::int64_t covered_ms = 0;
    std::size_t frame_count = 0;
    /// Vehicles whose track ended in this window.
    std::vector<VehicleRecord> records;
    /// Tracks that ended here without enough samples or span to be trusted.
    std::size_t rejected_tracks = 0;
    /// Mean number of passing boxes per frame; nullopt for a window without frames.
    std::optional<double> mean_occupancy;
};

/**
 * @brief Per-camera track state carried across window boundaries.
 *
 * A track still visible in a window's last frame stays open and is finished in a later
 * window, so each vehicle is reported exactly once with its full-length speed.
 */
class TrackAccumulator {
  public:
    TrackAccumulator(CameraMeta cam, double confidence_min, std::set<VehicleClass> classes);

    /// Consumes the next window. `final_window` closes every open track.
    [[nodiscard]] WindowObservation process(const TimeWindow& window, bool final_window = false);

    [[nodiscard]] std::size_t open_tracks() const noexcept { return open_.size(); }
    [[nodiscard]] const CameraMeta& camera() const noexcept { return cam_; }

  private:
    CameraMeta cam_;
    double confidence_min_;
    std::set<VehicleClass> classes_;
    std::map<std::int64_t, std::vector<std::pair<TrackSample, VehicleClass>>> open_;
};

}// namespace tcep

#endif// TCEP_KINEMATICS_HPP_
