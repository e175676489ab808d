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

#include <algorithm>
#include <array>
#include <cmath>

namespace tcep {

double Track::span_s() const noexcept {
    if (samples.size() < 2) {
        return 0.0;
    }
    return static_cast<double>(samples.back().ts_ms - samples.front().ts_ms) / 1000.0;
}

Calibration calibrate(double lane_pixel_gap_px, double reference_gap_m) {
    if (!(lane_pixel_gap_px > 0.0) || !(reference_gap_m > 0.0) || !std::isfinite(lane_pixel_gap_px)) {
        throw Error(ErrorKind::InvalidValue, "lane pixel gap and reference gap must be positive");
    }
    if (reference_gap_m < kMinLaneWidthM || reference_gap_m > kMaxLaneWidthM) {
        throw Error(ErrorKind::CalibrationRejected,
                    "reference lane width " + std::to_string(reference_gap_m) + " m is outside [2.5, 4.0] m");
    }
    return Calibration{reference_gap_m / lane_pixel_gap_px, lane_pixel_gap_px, reference_gap_m};
}

double meters_per_pixel_at(const CameraMeta& cam, double centroid_y) noexcept {
    if (!cam.mpp_near || !cam.mpp_far) {
        return cam.meters_per_pixel;
    }
    return centroid_y >= cam.image_height_px / 2.0 ? *cam.mpp_near : *cam.mpp_far;
}

namespace {

using Tagged = std::pair<TrackSample, VehicleClass>;

VehicleClass majority_class(const std::vector<Tagged>& samples) {
    std::array<std::size_t, kAllVehicleClasses.size()> votes{};
    for (const auto& s : samples) {
        ++votes[static_cast<std::size_t>(s.second)];
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < votes.size(); ++i) {
        if (votes[i] > votes[best]) {
            best = i;
        }
    }
    return kAllVehicleClasses[best];
}

Track to_track(std::int64_t id, const std::vector<Tagged>& tagged) {
    Track t;
    t.track_id = id;
    t.cls = majority_class(tagged);
    t.samples.reserve(tagged.size());
    for (const auto& s : tagged) {
        t.samples.push_back(s.first);
    }
    return t;
}

void collect(const DetectionFrame& frame, double confidence_min, const std::set<VehicleClass>& classes,
             std::map<std::int64_t, std::vector<Tagged>>& into, std::size_t& passing) {
    for (const auto& b : frame.boxes) {
        if (b.confidence < confidence_min || !classes.contains(b.cls)) {
            continue;
        }
        auto& samples = into[b.track_id];
        if (!samples.empty() && samples.back().first.ts_ms >= frame.ts_ms) {
            continue;
        }
        ++passing;
        samples.emplace_back(TrackSample{frame.ts_ms, b.bbox.x + b.bbox.w / 2.0, b.bbox.y + b.bbox.h / 2.0,
                                         b.confidence},
                             b.cls);
    }
}

void require_span(const Track& track) {
    if (track.samples.size() < 2 || track.span_s() < kMinTrackSpanS) {
        throw Error(ErrorKind::InsufficientSpan,
                    "track " + std::to_string(track.track_id) + " spans less than 0.5 s");
    }
}

double displacement_px(const Track& track) {
    const auto& a = track.samples.front();
    const auto& b = track.samples.back();
    return std::hypot(b.x - a.x, b.y - a.y);
}

bool trusted(const Track& track) {
    return track.samples.size() >= kMinTrackSamples && track.span_s() >= kMinTrackSpanS;
}

}// namespace

std::vector<Track> group_tracks(const std::vector<DetectionFrame>& frames, double confidence_min,
                                const std::set<VehicleClass>& classes) {
    std::map<std::int64_t, std::vector<Tagged>> grouped;
    std::size_t passing = 0;
    for (const auto& f : frames) {
        collect(f, confidence_min, classes, grouped, passing);
    }
    std::vector<Track> out;
    out.reserve(grouped.size());
    for (const auto& [id, tagged] : grouped) {
        out.push_back(to_track(id, tagged));
    }
    return out;
}

std::vector<Track> build_tracks(const TimeWindow& window, double confidence_min, const std::set<VehicleClass>& classes,
                                std::size_t min_samples) {
    auto tracks = group_tracks(window.frames, confidence_min, classes);
    std::erase_if(tracks, [&](const Track& t) { return t.samples.size() < min_samples; });
    return tracks;
}

Direction estimate_direction(const Track& track, int image_height_px, double jitter_px) {
    if (track.samples.size() < 2) {
        throw Error(ErrorKind::IndeterminateDirection,
                    "track " + std::to_string(track.track_id) + " has a single sample");
    }
    const double h = static_cast<double>(image_height_px);
    const double first = h - track.samples.front().y;
    const double last = h - track.samples.back().y;
    const double dy = last - first;
    if (dy < -jitter_px) {
        return Direction::Incoming;
    }
    if (dy > jitter_px) {
        return Direction::Outgoing;
    }
    return Direction::Stationary;
}

double estimate_speed(const Track& track, const Calibration& cal) {
    require_span(track);
    return displacement_px(track) * cal.meters_per_pixel / track.span_s();
}

double estimate_speed(const Track& track, const CameraMeta& cam) {
    require_span(track);
    const double mpp = (meters_per_pixel_at(cam, track.samples.front().y)
                        + meters_per_pixel_at(cam, track.samples.back().y))
                     / 2.0;
    return displacement_px(track) * mpp / track.span_s();
}

Direction flip(Direction d) noexcept {
    switch (d) {
        case Direction::Incoming: return Direction::Outgoing;
        case Direction::Outgoing: return Direction::Incoming;
        case Direction::Stationary: return Direction::Stationary;
    }
    return d;
}

VehicleRecord make_record(const Track& track, const CameraMeta& cam, std::int64_t window_end_ms) {
    VehicleRecord r;
    r.vehicle_id = track.track_id;
    r.cls = track.cls;
    r.camera_id = cam.id;
    r.window_end_ms = window_end_ms;
    r.first_ts_ms = track.samples.front().ts_ms;
    r.last_ts_ms = track.samples.back().ts_ms;
    r.samples = track.samples.size();
    r.direction = estimate_direction(track, cam.image_height_px, cam.jitter_px);
    if (r.direction == Direction::Stationary) {
        double sum_x = 0.0;
        for (const auto& s : track.samples) {
            sum_x += s.x;
        }
        const bool left = sum_x / static_cast<double>(track.samples.size()) < cam.image_width_px / 2.0;
        r.lane = left ? Direction::Outgoing : Direction::Incoming;
        r.speed_mps = 0.0;
    } else {
        r.lane = r.direction;
        r.speed_mps = estimate_speed(track, cam);
    }
    if (cam.flip_direction) {
        r.direction = flip(r.direction);
        r.lane = flip(r.lane);
    }
    return r;
}

DirectionCounts count_by_direction(const std::vector<VehicleRecord>& records) noexcept {
    DirectionCounts c;
    for (const auto& r : records) {
        switch (r.direction) {
            case Direction::Incoming: ++c.incoming; break;
            case Direction::Outgoing: ++c.outgoing; break;
            case Direction::Stationary: ++c.stationary; break;
        }
    }
    return c;
}

TrackAccumulator::TrackAccumulator(CameraMeta cam, double confidence_min, std::set<VehicleClass> classes)
    : cam_(std::move(cam)), confidence_min_(confidence_min), classes_(std::move(classes)) {}

WindowObservation TrackAccumulator::process(const TimeWindow& window, bool final_window) {
    WindowObservation obs;
    obs.camera_id = window.camera_id;
    obs.start_ms = window.start_ms;
    obs.end_ms = window.end_ms;
    obs.partial = window.partial;
    obs.covered_ms = window.covered_ms;
    obs.frame_count = window.frames.size();

    std::size_t passing = 0;
    for (const auto& f : window.frames) {
        collect(f, confidence_min_, classes_, open_, passing);
    }
    if (!window.frames.empty()) {
        obs.mean_occupancy = static_cast<double>(passing) / static_cast<double>(window.frames.size());
    }

    // A track seen in the closing frame may continue into the next window.
    const bool may_continue = !final_window && !window.frames.empty();
    const std::int64_t last_frame_ts = may_continue ? window.frames.back().ts_ms : 0;
    for (auto it = open_.begin(); it != open_.end();) {
        const bool continues = may_continue && it->second.back().first.ts_ms == last_frame_ts;
        if (continues) {
            ++it;
            continue;
        }
        const Track track = to_track(it->first, it->second);
        if (trusted(track)) {
            obs.records.push_back(make_record(track, cam_, window.end_ms));
        } else {
            ++obs.rejected_tracks;
        }
        it = open_.erase(it);
    }
    return obs;
}

}// namespace tcep
