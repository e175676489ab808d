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

#ifndef TCEP_INTERPOLATION_HPP_
#define TCEP_INTERPOLATION_HPP_

#include <tcep/camera.hpp>
#include <tcep/kinematics.hpp>
#include <tcep/metrics.hpp>
#include <tcep/road_graph.hpp>
#include <tcep/windowing.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tcep {

/// Distances below this are treated as coincident with the target.
inline constexpr double kCoincidentM = 1e-6;

enum class SampleSource { Fresh, Carryover };

struct CongestionSample {
    PathPosition position;
    double along_m = 0.0;
    double speed_mps = 0.0;
    SampleSource source = SampleSource::Fresh;
    /// Incoming or Outgoing, never Stationary.
    Direction direction = Direction::Outgoing;
};

struct TargetEstimate {
    PathPosition position;
    double along_m = 0.0;
    /// nullopt when no sample contributed.
    std::optional<double> speed_mps;
    std::size_t sample_count = 0;
};

/**
 * Inverse-distance weighted mean sum(d_i^-p S_i) / sum(d_i^-p). Weights are evaluated relative to
 * the nearest distance so large p cannot underflow. Coincident samples (d < 1e-6) decide the
 * value alone. Unreachable samples (infinite distance) are ignored; with none left the result is nullopt.
 */
[[nodiscard]] std::optional<double> idw_estimate(std::span<const double> distances, std::span<const double> speeds,
                                                 double p);

/// Fresh records at the route ends (camera A at 0, camera B at the total length) plus carryover samples.
[[nodiscard]] std::vector<CongestionSample> place_samples(const std::vector<VehicleRecord>& records_a,
                                                          const std::vector<VehicleRecord>& records_b,
                                                          const std::vector<CarryoverSample>& carryover,
                                                          const Route& route);

/// Network-distance IDW at `target` over all given samples; samples with no route to it are ignored.
[[nodiscard]] TargetEstimate nbidw(NetworkDistanceCache& distances, const Route& route,
                                   const std::vector<CongestionSample>& samples, const PathPosition& target, double p);
[[nodiscard]] TargetEstimate nbidw(const RoadGraph& graph, const Route& route,
                                   const std::vector<CongestionSample>& samples, const PathPosition& target, double p);

struct InterpolationConfig {
    double idw_p = 2.0;
    double target_spacing_m = 50.0;
    double processing_latency_s = 2.0;
    double carryover_max_age_s = kDefaultCarryoverMaxAgeS;
    double capacity_per_mile = kDefaultCapacityPerMile;
};

/// Road between two consecutive cameras.
struct Segment {
    std::string id;
    std::string camera_a;
    std::string camera_b;
    Route route;
    std::vector<PathPosition> targets;
};

[[nodiscard]] Segment make_segment(const RoadGraph& graph, const CameraMeta& a, const CameraMeta& b,
                                   double target_spacing_m);

struct SegmentEstimate {
    std::string segment_id;
    std::int64_t now_ms = 0;
    std::vector<TargetEstimate> outgoing;
    std::vector<TargetEstimate> incoming;
    std::size_t fresh_samples = 0;
    std::size_t carryover_samples = 0;
    DensityVc density;
    LosGrade los = LosGrade::A;
};

/**
 * One evaluation of the congestion operator on a segment: advance carryover, drop carryover
 * vehicles that are still fresh at either camera, place samples, interpolate each direction at
 * every target, then record vehicles leaving the cameras into the segment.
 */
[[nodiscard]] SegmentEstimate congestion_segment(NetworkDistanceCache& distances, const Segment& segment,
                                                 const std::vector<VehicleRecord>& fresh_a,
                                                 const std::vector<VehicleRecord>& fresh_b, CarryoverStore& store,
                                                 std::int64_t now_ms, const InterpolationConfig& config);

}// namespace tcep

#endif// TCEP_INTERPOLATION_HPP_
