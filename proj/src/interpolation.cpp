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
#include <tcep/interpolation.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tcep {

std::optional<double> idw_estimate(std::span<const double> distances, std::span<const double> speeds, double p) {
    if (distances.size() != speeds.size()) {
        throw Error(ErrorKind::InvalidValue, "distance and speed counts differ");
    }
    if (!(p > 0.0)) {
        throw Error(ErrorKind::InvalidValue, "decay exponent must be positive");
    }
    // Samples the target cannot reach carry no weight.
    double d_min = std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (std::isfinite(distances[i])) {
            d_min = std::min(d_min, distances[i]);
            lo = std::min(lo, speeds[i]);
            hi = std::max(hi, speeds[i]);
        }
    }
    if (!std::isfinite(d_min)) {
        return std::nullopt;
    }
    if (d_min < kCoincidentM) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < distances.size(); ++i) {
            if (distances[i] < kCoincidentM) {
                sum += speeds[i];
                ++n;
            }
        }
        return sum / static_cast<double>(n);
    }
    // (d_min / d_i)^p is d_i^-p scaled by d_min^p, which cancels in the ratio.
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (!std::isfinite(distances[i])) {
            continue;
        }
        const double w = std::pow(d_min / distances[i], p);
        num += w * speeds[i];
        den += w;
    }
    return std::clamp(num / den, lo, hi);
}

std::vector<CongestionSample> place_samples(const std::vector<VehicleRecord>& records_a,
                                            const std::vector<VehicleRecord>& records_b,
                                            const std::vector<CarryoverSample>& carryover, const Route& route) {
    std::vector<CongestionSample> out;
    if (route.empty()) {
        return out;
    }
    const double length = route.total_length_m();
    const auto fresh = [&](const std::vector<VehicleRecord>& records, double along) {
        const auto pos = route.at(along);
        for (const auto& r : records) {
            out.push_back(CongestionSample{pos, along, r.speed_mps, SampleSource::Fresh, r.lane});
        }
    };
    fresh(records_a, 0.0);
    fresh(records_b, length);
    for (const auto& c : carryover) {
        const double along = std::clamp(c.along_m, 0.0, length);
        out.push_back(CongestionSample{route.at(along), along, c.speed_mps, SampleSource::Carryover,
                                       c.heading == Heading::Forward ? Direction::Outgoing : Direction::Incoming});
    }
    return out;
}

TargetEstimate nbidw(NetworkDistanceCache& distances, const Route& route, const std::vector<CongestionSample>& samples,
                     const PathPosition& target, double p) {
    TargetEstimate est;
    est.position = target;
    est.along_m = route.along_m(target);
    est.sample_count = samples.size();
    std::vector<double> d;
    std::vector<double> s;
    d.reserve(samples.size());
    s.reserve(samples.size());
    for (const auto& sample : samples) {
        double dist = std::numeric_limits<double>::infinity();
        try {
            dist = distances.distance(sample.position, target);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoRoute) {
                throw;
            }
        }
        d.push_back(dist);
        s.push_back(sample.speed_mps);
    }
    est.speed_mps = idw_estimate(d, s, p);
    return est;
}

TargetEstimate nbidw(const RoadGraph& graph, const Route& route, const std::vector<CongestionSample>& samples,
                     const PathPosition& target, double p) {
    NetworkDistanceCache cache(graph);
    return nbidw(cache, route, samples, target, p);
}

Segment make_segment(const RoadGraph& graph, const CameraMeta& a, const CameraMeta& b, double target_spacing_m) {
    Segment seg;
    seg.id = a.id + "-" + b.id;
    seg.camera_a = a.id;
    seg.camera_b = b.id;
    seg.route = shortest_path(graph, a.nearest_node, b.nearest_node);
    if (seg.route.empty()) {
        throw Error(ErrorKind::NoRoute, "cameras " + a.id + " and " + b.id + " share a node");
    }
    seg.targets = route_target_points(seg.route, target_spacing_m);
    return seg;
}

namespace {

bool is_fresh(const CarryoverSample& c, const Segment& seg, const std::vector<VehicleRecord>& a,
              const std::vector<VehicleRecord>& b) {
    const auto& records = c.camera_id == seg.camera_a ? a : b;
    if (c.camera_id != seg.camera_a && c.camera_id != seg.camera_b) {
        return false;
    }
    return std::any_of(records.begin(), records.end(), [&](const VehicleRecord& r) { return r.vehicle_id == c.vehicle_id; });
}

}// namespace

SegmentEstimate congestion_segment(NetworkDistanceCache& distances, const Segment& segment,
                                   const std::vector<VehicleRecord>& fresh_a, const std::vector<VehicleRecord>& fresh_b,
                                   CarryoverStore& store, std::int64_t now_ms, const InterpolationConfig& config) {
    const Route& route = segment.route;
    auto carry = store.advance(route, now_ms, config.processing_latency_s, config.carryover_max_age_s);
    std::erase_if(carry, [&](const CarryoverSample& c) { return is_fresh(c, segment, fresh_a, fresh_b); });
    const auto samples = place_samples(fresh_a, fresh_b, carry, route);

    SegmentEstimate out;
    out.segment_id = segment.id;
    out.now_ms = now_ms;
    out.fresh_samples = fresh_a.size() + fresh_b.size();
    out.carryover_samples = carry.size();

    std::vector<CongestionSample> outgoing;
    std::vector<CongestionSample> incoming;
    for (const auto& s : samples) {
        (s.direction == Direction::Incoming ? incoming : outgoing).push_back(s);
    }
    for (const auto& t : segment.targets) {
        out.outgoing.push_back(nbidw(distances, route, outgoing, t, config.idw_p));
        out.incoming.push_back(nbidw(distances, route, incoming, t, config.idw_p));
    }
    out.density = density_and_vc(static_cast<double>(samples.size()), route.total_length_m() / kMetersPerMile,
                                 config.capacity_per_mile);
    out.los = los_grade(out.density.vc_ratio);

    const double s_max = route.max_speed_kmh() / 3.6;
    for (const auto& r : fresh_a) {
        if (r.direction == Direction::Outgoing) {
            store.insert(r.camera_id, r.vehicle_id, r.cls, Heading::Forward, r.speed_mps, r.last_ts_ms, s_max);
        }
    }
    for (const auto& r : fresh_b) {
        if (r.direction == Direction::Incoming) {
            store.insert(r.camera_id, r.vehicle_id, r.cls, Heading::Backward, r.speed_mps, r.last_ts_ms, s_max);
        }
    }
    return out;
}

}// namespace tcep
