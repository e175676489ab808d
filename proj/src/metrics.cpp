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
#include <tcep/geo.hpp>
#include <tcep/metrics.hpp>

#include <cmath>

namespace tcep {

double flow_rate(double count, double interval_s, double target_scale_s) {
    if (!(interval_s > 0.0)) {
        throw Error(ErrorKind::InvalidValue, "flow interval must be positive");
    }
    return count * target_scale_s / interval_s;
}

std::optional<double> mean_speed_kmh(const std::vector<VehicleRecord>& records) {
    if (records.empty()) {
        return std::nullopt;
    }
    double sum = 0.0;
    for (const auto& r : records) {
        sum += r.speed_mps * 3.6;
    }
    return sum / static_cast<double>(records.size());
}

DensityVc density_and_vc(double count, double segment_length_miles, double capacity_per_mile) {
    if (!(segment_length_miles > 0.0)) {
        throw Error(ErrorKind::InvalidValue, "segment length must be positive");
    }
    if (!(capacity_per_mile > 0.0)) {
        throw Error(ErrorKind::InvalidValue, "capacity must be positive");
    }
    const double density = count / segment_length_miles;
    return DensityVc{density, density / capacity_per_mile};
}

LosGrade los_grade(double vc_ratio) {
    if (!(vc_ratio >= 0.0)) {
        throw Error(ErrorKind::InvalidValue, "V/C ratio must be non-negative");
    }
    if (vc_ratio < 0.6) {
        return LosGrade::A;
    }
    if (vc_ratio < 0.7) {
        return LosGrade::B;
    }
    if (vc_ratio < 0.8) {
        return LosGrade::C;
    }
    if (vc_ratio < 0.9) {
        return LosGrade::D;
    }
    if (vc_ratio <= 1.0) {
        return LosGrade::E;
    }
    return LosGrade::F;
}

char to_char(LosGrade grade) noexcept { return static_cast<char>('A' + static_cast<int>(grade)); }

EvalScore f_score(std::size_t relevant_matched, std::size_t matched, std::size_t relevant) {
    if (relevant_matched > matched || relevant_matched > relevant) {
        throw Error(ErrorKind::InvalidValue, "relevant_matched cannot exceed matched or relevant");
    }
    EvalScore s;
    const auto rm = static_cast<double>(relevant_matched);
    if (matched > 0) {
        s.precision = rm / static_cast<double>(matched);
    } else {
        s.degenerate = true;
    }
    if (relevant > 0) {
        s.recall = rm / static_cast<double>(relevant);
        s.error_rate_pct = (static_cast<double>(relevant) - rm) / static_cast<double>(relevant) * 100.0;
    } else {
        s.degenerate = true;
    }
    if (s.precision + s.recall > 0.0) {
        s.f_score = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    } else {
        s.degenerate = true;
    }
    return s;
}

double mean_f_score(const std::vector<double>& per_camera) {
    if (per_camera.empty()) {
        throw Error(ErrorKind::NoData, "mean F-score of no cameras");
    }
    double sum = 0.0;
    for (double f : per_camera) {
        sum += f;
    }
    return sum / static_cast<double>(per_camera.size());
}

double field_of_view_m(const CameraMeta& cam) noexcept {
    const double h = static_cast<double>(cam.image_height_px);
    if (cam.mpp_near && cam.mpp_far) {
        return h / 2.0 * (*cam.mpp_near + *cam.mpp_far);
    }
    return h * cam.meters_per_pixel;
}

TrafficStats compute_stats(const WindowObservation& obs, const CameraMeta& cam, double max_speed_mps,
                           double capacity_per_mile) {
    TrafficStats s;
    s.camera_id = obs.camera_id;
    s.start_ms = obs.start_ms;
    s.end_ms = obs.end_ms;
    s.partial = obs.partial;
    const auto counts = count_by_direction(obs.records);
    s.count_in = counts.incoming;
    s.count_out = counts.outgoing;
    s.count_stationary = counts.stationary;
    if (obs.covered_ms > 0) {
        const double interval = static_cast<double>(obs.covered_ms) / 1000.0;
        s.flow_per_hour_in = flow_rate(static_cast<double>(counts.incoming), interval);
        s.flow_per_hour_out = flow_rate(static_cast<double>(counts.outgoing), interval);
    }
    s.mean_speed_kmh = mean_speed_kmh(obs.records);
    for (const auto& r : obs.records) {
        if (r.speed_mps > max_speed_mps) {
            ++s.speed_anomalies;
        }
    }
    if (obs.mean_occupancy) {
        const auto dv = density_and_vc(*obs.mean_occupancy, field_of_view_m(cam) / kMetersPerMile, capacity_per_mile);
        s.density_per_mile = dv.density_per_mile;
        s.vc_ratio = dv.vc_ratio;
        s.los = los_grade(dv.vc_ratio);
    }
    return s;
}

}// namespace tcep
