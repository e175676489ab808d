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

#ifndef TCEP_OUTPUT_HPP_
#define TCEP_OUTPUT_HPP_

#include <tcep/geo.hpp>
#include <tcep/interpolation.hpp>
#include <tcep/latency.hpp>
#include <tcep/metrics.hpp>
#include <tcep/veql.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcep {

enum class ColorBucket { Green, Orange, Red, Brown, NoData };

[[nodiscard]] std::string_view to_string(ColorBucket bucket) noexcept;

/// Lower speed bounds (km/h) of each band; brown is everything below red_min.
struct ColorBuckets {
    double green_min_kmh = 45.0;
    double orange_min_kmh = 30.0;
    double red_min_kmh = 20.0;
};

/// Throws InvalidValue for a negative speed or bounds that are not strictly decreasing.
[[nodiscard]] ColorBucket color_bucket(std::optional<double> speed_kmh, const ColorBuckets& bounds = {});

struct CameraStatus {
    std::string camera_id;
    GeoPoint point;
    bool faulty = false;
    /// Stats of the camera's latest window; absent until its first window closes.
    std::optional<TrafficStats> stats;
    /// The operator's headline value for this camera, when defined.
    std::optional<double> value;
};

struct TargetStatus {
    double along_m = 0.0;
    GeoPoint point;
    std::optional<double> outgoing_kmh;
    std::optional<double> incoming_kmh;
    std::size_t outgoing_samples = 0;
    std::size_t incoming_samples = 0;
};

struct RouteVertex {
    double along_m = 0.0;
    GeoPoint point;
};

struct SegmentStatus {
    std::string segment_id;
    std::string camera_a;
    std::string camera_b;
    double length_m = 0.0;
    /// Route vertices, used to draw spans between targets.
    std::vector<RouteVertex> vertices;
    /// Tick of the last evaluation; absent while no adjacent camera has reported.
    std::optional<std::int64_t> computed_ms;
    std::size_t fresh_samples = 0;
    std::size_t carryover_samples = 0;
    std::optional<double> density_per_mile;
    std::optional<double> vc_ratio;
    std::optional<LosGrade> los;
    std::vector<TargetStatus> targets;
};

/// Complete published state of one subscription after one tick.
struct Snapshot {
    std::string subscription_id;
    OperatorKind op = OperatorKind::TrafficCongestion;
    std::string road_name;
    std::string road_slug;
    std::uint64_t sequence = 0;
    std::int64_t tick_ms = 0;
    std::vector<CameraStatus> cameras;
    std::vector<SegmentStatus> segments;
};

[[nodiscard]] nlohmann::json to_json(const TrafficStats& stats);
[[nodiscard]] nlohmann::json to_json(const Snapshot& snapshot);
[[nodiscard]] nlohmann::json to_json(const LatencySummary& summary);
[[nodiscard]] Snapshot snapshot_from_json(const nlohmann::json& doc);
/// Canonical one-line serialization; identical snapshots give identical bytes.
[[nodiscard]] std::string serialize(const Snapshot& snapshot);
[[nodiscard]] Snapshot load_snapshot_file(const std::filesystem::path& path);

[[nodiscard]] SegmentStatus describe_segment(const RoadGraph& graph, const Segment& segment);
/// Fills the evaluation part of `status` from an operator result.
void apply_estimate(SegmentStatus& status, const SegmentEstimate& estimate);

/**
 * FeatureCollection with one LineString per consecutive target pair per direction. A span's
 * speed is the mean of its two endpoint estimates, or the one that exists.
 */
[[nodiscard]] nlohmann::json to_geojson(const Snapshot& snapshot, const ColorBuckets& bounds = {});

/// Per-camera stats and per-segment density for one road.
[[nodiscard]] nlohmann::json road_stats_json(const Snapshot& snapshot);

}// namespace tcep

#endif// TCEP_OUTPUT_HPP_
