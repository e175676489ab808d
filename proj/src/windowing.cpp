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
#include <tcep/windowing.hpp>

#include <algorithm>
#include <cmath>

namespace tcep {

std::int64_t window_length_ms(double length_s) {
    if (!std::isfinite(length_s) || !(length_s > 0.0)) {
        throw Error(ErrorKind::InvalidValue, "window length must be positive");
    }
    const auto ms = static_cast<std::int64_t>(std::llround(length_s * 1000.0));
    if (ms < 1) {
        throw Error(ErrorKind::InvalidValue, "window length must be at least 1 ms");
    }
    return ms;
}

WindowBuilder::WindowBuilder(std::string camera_id, double length_s)
    : camera_id_(std::move(camera_id)), length_ms_(window_length_ms(length_s)) {}

TimeWindow WindowBuilder::open_window(std::int64_t start) const {
    TimeWindow w;
    w.camera_id = camera_id_;
    w.start_ms = start;
    w.end_ms = start + length_ms_;
    w.covered_ms = length_ms_;
    return w;
}

std::vector<TimeWindow> WindowBuilder::push(DetectionFrame frame) {
    std::vector<TimeWindow> closed;
    if (!current_) {
        current_ = open_window(frame.ts_ms);
    }
    while (frame.ts_ms >= current_->end_ms) {
        const auto next_start = current_->end_ms;
        closed.push_back(std::move(*current_));
        current_ = open_window(next_start);
    }
    if (last_ts_) {
        deltas_.push_back(frame.ts_ms - *last_ts_);
    }
    last_ts_ = frame.ts_ms;
    current_->frames.push_back(std::move(frame));
    return closed;
}

std::vector<TimeWindow> WindowBuilder::advance_to(std::int64_t ts_ms) {
    std::vector<TimeWindow> closed;
    if (!current_) {
        return closed;
    }
    while (current_->end_ms <= ts_ms) {
        const auto next_start = current_->end_ms;
        closed.push_back(std::move(*current_));
        current_ = open_window(next_start);
    }
    return closed;
}

std::int64_t WindowBuilder::median_delta_ms() const {
    if (deltas_.empty()) {
        return 0;
    }
    auto d = deltas_;
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    return *mid;
}

std::optional<TimeWindow> WindowBuilder::finish() {
    if (!current_ || current_->frames.empty()) {
        current_.reset();
        return std::nullopt;
    }
    TimeWindow w = std::move(*current_);
    current_.reset();
    const std::int64_t med = median_delta_ms();
    // The last frame stands for one frame interval; a window missing less than half of one is full.
    if (*last_ts_ + med < w.end_ms - med / 2) {
        w.partial = true;
        w.covered_ms = std::max<std::int64_t>(1, std::min(w.end_ms, *last_ts_ + med) - w.start_ms);
    }
    last_ts_.reset();
    deltas_.clear();
    return w;
}

std::vector<TimeWindow> time_window(const std::vector<DetectionFrame>& stream, double length_s) {
    std::vector<TimeWindow> out;
    std::string camera = stream.empty() ? std::string() : stream.front().camera_id;
    WindowBuilder builder(camera, length_s);
    for (const auto& f : stream) {
        auto closed = builder.push(f);
        std::move(closed.begin(), closed.end(), std::back_inserter(out));
    }
    if (auto last = builder.finish()) {
        out.push_back(std::move(*last));
    }
    return out;
}

void CarryoverStore::insert(const std::string& camera_id, std::int64_t vehicle_id, VehicleClass cls, Heading heading,
                            double speed_mps, std::int64_t departure_ms, double max_speed_mps) {
    CarryoverEntry e;
    e.camera_id = camera_id;
    e.vehicle_id = vehicle_id;
    e.cls = cls;
    e.heading = heading;
    e.raw_speed_mps = std::max(0.0, speed_mps);
    e.speed_anomaly = e.raw_speed_mps > max_speed_mps;
    e.speed_mps = std::min(e.raw_speed_mps, max_speed_mps);
    e.departure_ms = departure_ms;
    const auto same = [&](const CarryoverEntry& x) { return x.camera_id == camera_id && x.vehicle_id == vehicle_id; };
    if (const auto it = std::find_if(entries_.begin(), entries_.end(), same); it != entries_.end()) {
        if (it->departure_ms == e.departure_ms && it->speed_mps == e.speed_mps) {
            e.progress_m = it->progress_m;
        }
        *it = std::move(e);
    } else {
        entries_.push_back(std::move(e));
    }
}

std::vector<CarryoverSample> CarryoverStore::advance(const Route& segment, std::int64_t now_ms,
                                                     double processing_latency_s, double max_age_s) {
    const double length = segment.total_length_m();
    std::vector<CarryoverSample> active;
    std::vector<CarryoverEntry> kept;
    kept.reserve(entries_.size());
    for (auto& e : entries_) {
        const double age_s = static_cast<double>(now_ms - e.departure_ms) / 1000.0;
        if (age_s > max_age_s) {
            continue;
        }
        const double elapsed_s = std::max(0.0, age_s + processing_latency_s);
        e.progress_m = std::max(e.progress_m, e.speed_mps * elapsed_s);
        if (e.progress_m > length) {
            continue;
        }
        const double along = e.heading == Heading::Forward ? e.progress_m : length - e.progress_m;
        active.push_back(CarryoverSample{e.camera_id, e.vehicle_id, e.heading, e.speed_mps, along});
        kept.push_back(std::move(e));
    }
    entries_ = std::move(kept);
    return active;
}

std::vector<CarryoverSample> carryover_update(CarryoverStore& store, const Route& segment, std::int64_t now_ms,
                                              double processing_latency_s, double max_age_s) {
    return store.advance(segment, now_ms, processing_latency_s, max_age_s);
}

}// namespace tcep
