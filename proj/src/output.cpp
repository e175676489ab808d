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
#include <tcep/output.hpp>

#include <fstream>
#include <sstream>

namespace tcep {

using nlohmann::json;

std::string_view to_string(ColorBucket bucket) noexcept {
    switch (bucket) {
        case ColorBucket::Green: return "green";
        case ColorBucket::Orange: return "orange";
        case ColorBucket::Red: return "red";
        case ColorBucket::Brown: return "brown";
        case ColorBucket::NoData: return "nodata";
    }
    return "nodata";
}

ColorBucket color_bucket(std::optional<double> speed_kmh, const ColorBuckets& bounds) {
    if (!(bounds.green_min_kmh > bounds.orange_min_kmh && bounds.orange_min_kmh > bounds.red_min_kmh
          && bounds.red_min_kmh > 0.0)) {
        throw Error(ErrorKind::InvalidValue, "color bucket bounds must be positive and strictly decreasing");
    }
    if (!speed_kmh) {
        return ColorBucket::NoData;
    }
    const double v = *speed_kmh;
    if (!(v >= 0.0)) {
        throw Error(ErrorKind::InvalidValue, "speed must be non-negative");
    }
    if (v >= bounds.green_min_kmh) {
        return ColorBucket::Green;
    }
    if (v >= bounds.orange_min_kmh) {
        return ColorBucket::Orange;
    }
    if (v >= bounds.red_min_kmh) {
        return ColorBucket::Red;
    }
    return ColorBucket::Brown;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_number(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    return it->get<double>();
}

json los_json(const std::optional<LosGrade>& g) { return g ? json(std::string(1, to_char(*g))) : json(nullptr); }

std::optional<LosGrade> los_from(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    const auto s = it->get<std::string>();
    if (s.size() != 1 || s[0] < 'A' || s[0] > 'F') {
        throw Error(ErrorKind::MalformedDocument, "snapshot: bad LOS grade \"" + s + "\"");
    }
    return static_cast<LosGrade>(s[0] - 'A');
}

TrafficStats stats_from_json(const json& j) {
    TrafficStats s;
    s.camera_id = j.at("camera_id").get<std::string>();
    s.start_ms = j.at("interval").at(0).get<std::int64_t>();
    s.end_ms = j.at("interval").at(1).get<std::int64_t>();
    s.partial = j.at("partial").get<bool>();
    s.faulty = j.at("faulty").get<bool>();
    s.count_in = j.at("count_in").get<std::size_t>();
    s.count_out = j.at("count_out").get<std::size_t>();
    s.count_stationary = j.at("count_stationary").get<std::size_t>();
    s.flow_per_hour_in = opt_number(j, "flow_per_hour_in");
    s.flow_per_hour_out = opt_number(j, "flow_per_hour_out");
    s.mean_speed_kmh = opt_number(j, "mean_speed_kmh");
    s.density_per_mile = opt_number(j, "density_per_mile");
    s.vc_ratio = opt_number(j, "vc_ratio");
    s.los = los_from(j, "los");
    s.speed_anomalies = j.at("speed_anomalies").get<std::size_t>();
    return s;
}

json point_json(const GeoPoint& p) { return json::array({p.lon, p.lat}); }

}// namespace

json to_json(const TrafficStats& s) {
    return json{{"camera_id", s.camera_id},
                {"interval", json::array({s.start_ms, s.end_ms})},
                {"partial", s.partial},
                {"faulty", s.faulty},
                {"count_in", s.count_in},
                {"count_out", s.count_out},
                {"count_stationary", s.count_stationary},
                {"flow_per_hour_in", opt(s.flow_per_hour_in)},
                {"flow_per_hour_out", opt(s.flow_per_hour_out)},
                {"mean_speed_kmh", opt(s.mean_speed_kmh)},
                {"density_per_mile", opt(s.density_per_mile)},
                {"vc_ratio", opt(s.vc_ratio)},
                {"los", los_json(s.los)},
                {"speed_anomalies", s.speed_anomalies}};
}

json to_json(const Snapshot& snap) {
    json cameras = json::array();
    for (const auto& c : snap.cameras) {
        cameras.push_back(json{{"camera_id", c.camera_id},
                               {"lat", c.point.lat},
                               {"lon", c.point.lon},
                               {"faulty", c.faulty},
                               {"stats", c.stats ? to_json(*c.stats) : json(nullptr)},
                               {"value", opt(c.value)}});
    }
    json segments = json::array();
    for (const auto& s : snap.segments) {
        json vertices = json::array();
        for (const auto& v : s.vertices) {
            vertices.push_back(json::array({v.along_m, v.point.lat, v.point.lon}));
        }
        json targets = json::array();
        for (const auto& t : s.targets) {
            targets.push_back(json{{"along_m", t.along_m},
                                   {"lat", t.point.lat},
                                   {"lon", t.point.lon},
                                   {"outgoing_kmh", opt(t.outgoing_kmh)},
                                   {"incoming_kmh", opt(t.incoming_kmh)},
                                   {"outgoing_samples", t.outgoing_samples},
                                   {"incoming_samples", t.incoming_samples}});
        }
        segments.push_back(json{{"segment_id", s.segment_id},
                                {"camera_a", s.camera_a},
                                {"camera_b", s.camera_b},
                                {"length_m", s.length_m},
                                {"vertices", std::move(vertices)},
                                {"computed_ms", s.computed_ms ? json(*s.computed_ms) : json(nullptr)},
                                {"fresh_samples", s.fresh_samples},
                                {"carryover_samples", s.carryover_samples},
                                {"density_per_mile", opt(s.density_per_mile)},
                                {"vc_ratio", opt(s.vc_ratio)},
                                {"los", los_json(s.los)},
                                {"targets", std::move(targets)}});
    }
    return json{{"format", "tcep-snapshot/1"},
                {"subscription", snap.subscription_id},
                {"operator", std::string(to_string(snap.op))},
                {"road", snap.road_name},
                {"slug", snap.road_slug},
                {"sequence", snap.sequence},
                {"tick_ms", snap.tick_ms},
                {"cameras", std::move(cameras)},
                {"segments", std::move(segments)}};
}

json to_json(const LatencySummary& summary) {
    const auto q = [](const Quantiles& x) {
        return json{{"count", x.count}, {"p50", x.p50}, {"p90", x.p90}, {"p99", x.p99}, {"max", x.max}};
    };
    return json{{"preprocessing_ms", q(summary.preprocessing_ms)},
                {"operator_ms", q(summary.operator_ms)},
                {"total_ms", q(summary.total_ms)}};
}

Snapshot snapshot_from_json(const json& doc) {
    try {
        if (doc.value("format", std::string()) != "tcep-snapshot/1") {
            throw Error(ErrorKind::MalformedDocument, "snapshot: unknown or missing format tag");
        }
        Snapshot snap;
        snap.subscription_id = doc.at("subscription").get<std::string>();
        const auto op = operator_from_name(doc.at("operator").get<std::string>());
        if (!op) {
            throw Error(ErrorKind::MalformedDocument, "snapshot: unknown operator");
        }
        snap.op = *op;
        snap.road_name = doc.at("road").get<std::string>();
        snap.road_slug = doc.at("slug").get<std::string>();
        snap.sequence = doc.at("sequence").get<std::uint64_t>();
        snap.tick_ms = doc.at("tick_ms").get<std::int64_t>();
        for (const auto& c : doc.at("cameras")) {
            CameraStatus cs;
            cs.camera_id = c.at("camera_id").get<std::string>();
            cs.point = GeoPoint{c.at("lat").get<double>(), c.at("lon").get<double>()};
            cs.faulty = c.at("faulty").get<bool>();
            if (!c.at("stats").is_null()) {
                cs.stats = stats_from_json(c.at("stats"));
            }
            cs.value = opt_number(c, "value");
            snap.cameras.push_back(std::move(cs));
        }
        for (const auto& s : doc.at("segments")) {
            SegmentStatus ss;
            ss.segment_id = s.at("segment_id").get<std::string>();
            ss.camera_a = s.at("camera_a").get<std::string>();
            ss.camera_b = s.at("camera_b").get<std::string>();
            ss.length_m = s.at("length_m").get<double>();
            for (const auto& v : s.at("vertices")) {
                ss.vertices.push_back(RouteVertex{v.at(0).get<double>(), GeoPoint{v.at(1).get<double>(), v.at(2).get<double>()}});
            }
            if (!s.at("computed_ms").is_null()) {
                ss.computed_ms = s.at("computed_ms").get<std::int64_t>();
            }
            ss.fresh_samples = s.at("fresh_samples").get<std::size_t>();
            ss.carryover_samples = s.at("carryover_samples").get<std::size_t>();
            ss.density_per_mile = opt_number(s, "density_per_mile");
            ss.vc_ratio = opt_number(s, "vc_ratio");
            ss.los = los_from(s, "los");
            for (const auto& t : s.at("targets")) {
                TargetStatus ts;
                ts.along_m = t.at("along_m").get<double>();
                ts.point = GeoPoint{t.at("lat").get<double>(), t.at("lon").get<double>()};
                ts.outgoing_kmh = opt_number(t, "outgoing_kmh");
                ts.incoming_kmh = opt_number(t, "incoming_kmh");
                ts.outgoing_samples = t.at("outgoing_samples").get<std::size_t>();
                ts.incoming_samples = t.at("incoming_samples").get<std::size_t>();
                ss.targets.push_back(ts);
            }
            snap.segments.push_back(std::move(ss));
        }
        return snap;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedDocument, std::string("snapshot: ") + e.what());
    }
}

std::string serialize(const Snapshot& snapshot) { return to_json(snapshot).dump(); }

Snapshot load_snapshot_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::MalformedDocument, "cannot open snapshot " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedDocument, std::string("snapshot is not valid JSON: ") + e.what());
    }
    return snapshot_from_json(doc);
}

SegmentStatus describe_segment(const RoadGraph& graph, const Segment& segment) {
    SegmentStatus s;
    s.segment_id = segment.id;
    s.camera_a = segment.camera_a;
    s.camera_b = segment.camera_b;
    s.length_m = segment.route.total_length_m();
    const auto nodes = segment.route.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        s.vertices.push_back(RouteVertex{segment.route.leg_start_m(i), graph.node(nodes[i]).point});
    }
    for (const auto& t : segment.targets) {
        s.targets.push_back(TargetStatus{segment.route.along_m(t), graph.point_at(t), std::nullopt, std::nullopt, 0, 0});
    }
    return s;
}

void apply_estimate(SegmentStatus& status, const SegmentEstimate& estimate) {
    status.computed_ms = estimate.now_ms;
    status.fresh_samples = estimate.fresh_samples;
    status.carryover_samples = estimate.carryover_samples;
    status.density_per_mile = estimate.density.density_per_mile;
    status.vc_ratio = estimate.density.vc_ratio;
    status.los = estimate.los;
    const auto kmh = [](const std::optional<double>& mps) {
        return mps ? std::optional(*mps * 3.6) : std::nullopt;
    };
    for (std::size_t i = 0; i < status.targets.size() && i < estimate.outgoing.size(); ++i) {
        status.targets[i].outgoing_kmh = kmh(estimate.outgoing[i].speed_mps);
        status.targets[i].incoming_kmh = kmh(estimate.incoming[i].speed_mps);
        status.targets[i].outgoing_samples = estimate.outgoing[i].sample_count;
        status.targets[i].incoming_samples = estimate.incoming[i].sample_count;
    }
}

namespace {

std::optional<double> span_speed(const std::optional<double>& a, const std::optional<double>& b) {
    if (a && b) {
        return (*a + *b) / 2.0;
    }
    return a ? a : b;
}

}// namespace

json to_geojson(const Snapshot& snap, const ColorBuckets& bounds) {
    json features = json::array();
    for (const auto& seg : snap.segments) {
        for (const Direction dir : {Direction::Outgoing, Direction::Incoming}) {
            for (std::size_t i = 0; i + 1 < seg.targets.size(); ++i) {
                const auto& a = seg.targets[i];
                const auto& b = seg.targets[i + 1];
                json coords = json::array({point_json(a.point)});
                for (const auto& v : seg.vertices) {
                    if (v.along_m > a.along_m && v.along_m < b.along_m) {
                        coords.push_back(point_json(v.point));
                    }
                }
                coords.push_back(point_json(b.point));
                const auto speed = dir == Direction::Outgoing ? span_speed(a.outgoing_kmh, b.outgoing_kmh)
                                                              : span_speed(a.incoming_kmh, b.incoming_kmh);
                features.push_back(json{
                    {"type", "Feature"},
                    {"geometry", json{{"type", "LineString"}, {"coordinates", std::move(coords)}}},
                    {"properties",
                     json{{"road", snap.road_name},
                          {"segment_id", seg.segment_id},
                          {"direction", std::string(to_string(dir))},
                          {"from_along_m", a.along_m},
                          {"to_along_m", b.along_m},
                          {"speed_kmh", opt(speed)},
                          {"bucket", std::string(to_string(color_bucket(speed, bounds)))},
                          {"ts_ms", seg.computed_ms ? json(*seg.computed_ms) : json(nullptr)}}}});
            }
        }
    }
    return json{{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

json road_stats_json(const Snapshot& snap) {
    json cameras = json::array();
    for (const auto& c : snap.cameras) {
        cameras.push_back(json{{"camera_id", c.camera_id},
                               {"faulty", c.faulty},
                               {"stats", c.stats ? to_json(*c.stats) : json(nullptr)},
                               {"value", opt(c.value)}});
    }
    json segments = json::array();
    for (const auto& s : snap.segments) {
        segments.push_back(json{{"segment_id", s.segment_id},
                                {"length_m", s.length_m},
                                {"density_per_mile", opt(s.density_per_mile)},
                                {"vc_ratio", opt(s.vc_ratio)},
                                {"los", los_json(s.los)}});
    }
    return json{{"road", snap.road_name},
                {"operator", std::string(to_string(snap.op))},
                {"tick_ms", snap.tick_ms},
                {"sequence", snap.sequence},
                {"cameras", std::move(cameras)},
                {"segments", std::move(segments)}};
}

}// namespace tcep
