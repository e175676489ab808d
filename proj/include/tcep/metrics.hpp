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

#ifndef TCEP_METRICS_HPP_
#define TCEP_METRICS_HPP_

#include <tcep/kinematics.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcep {

inline constexpr double kDefaultCapacityPerMile = 900.0;
inline constexpr double kSecondsPerHour = 3600.0;

/// count * target_scale_s / interval_s.
[[nodiscard]] double flow_rate(double count, double interval_s, double target_scale_s = kSecondsPerHour);

/// Mean of speed_mps * 3.6; nullopt for no records.
[[nodiscard]] std::optional<double> mean_speed_kmh(const std::vector<VehicleRecord>& records);

struct DensityVc {
    double density_per_mile = 0.0;
    double vc_ratio = 0.0;
};

[[nodiscard]] DensityVc density_and_vc(double count, double segment_length_miles,
                                       double capacity_per_mile = kDefaultCapacityPerMile);

enum class LosGrade { A, B, C, D, E, F };

[[nodiscard]] LosGrade los_grade(double vc_ratio);
[[nodiscard]] char to_char(LosGrade grade) noexcept;

struct EvalScore {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    double error_rate_pct = 0.0;
    /// Set when some ratio had a zero denominator and was defined as 0.
    bool degenerate = false;
};

/// Precision, recall, their harmonic mean and the count error rate relative to `relevant`.
[[nodiscard]] EvalScore f_score(std::size_t relevant_matched, std::size_t matched, std::size_t relevant);

[[nodiscard]] double mean_f_score(const std::vector<double>& per_camera);

/// Per-camera statistics for one window.
struct TrafficStats {
    std::string camera_id;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    bool partial = false;
    bool faulty = false;
    std::size_t count_in = 0;
    std::size_t count_out = 0;
    std::size_t count_stationary = 0;
    std::optional<double> flow_per_hour_in;
    std::optional<double> flow_per_hour_out;
    std::optional<double> mean_speed_kmh;
    /// Vehicles per mile inside the camera's field of view, averaged over the window's frames.
    std::optional<double> density_per_mile;
    std::optional<double> vc_ratio;
    std::optional<LosGrade> los;
    std::size_t speed_anomalies = 0;
};

/// Road length covered by the image height, in meters.
[[nodiscard]] double field_of_view_m(const CameraMeta& cam) noexcept;

[[nodiscard]] TrafficStats compute_stats(const WindowObservation& obs, const CameraMeta& cam, double max_speed_mps,
                                         double capacity_per_mile = kDefaultCapacityPerMile);

}// namespace tcep

#endif// TCEP_METRICS_HPP_
