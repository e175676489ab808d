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

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tcep {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedDocument: return "malformed-document";
        case ErrorKind::DanglingEdge: return "dangling-edge";
        case ErrorKind::InvalidValue: return "invalid-value";
        case ErrorKind::NoRoute: return "no-route";
        case ErrorKind::NotOnRoute: return "not-on-route";
        case ErrorKind::UnknownRoad: return "unknown-road";
        case ErrorKind::InsufficientCameras: return "insufficient-cameras";
        case ErrorKind::Schema: return "schema";
        case ErrorKind::TimestampRegression: return "timestamp-regression";
        case ErrorKind::IndeterminateDirection: return "indeterminate-direction";
        case ErrorKind::InsufficientSpan: return "insufficient-span";
        case ErrorKind::CalibrationRejected: return "calibration-rejected";
        case ErrorKind::InconsistentScenario: return "inconsistent-scenario";
        case ErrorKind::NoData: return "no-data";
        case ErrorKind::UnknownSubscription: return "unknown-subscription";
        case ErrorKind::Query: return "query";
    }
    return "unknown";
}

namespace {
constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
}// namespace

bool is_valid(const GeoPoint& p) noexcept {
    return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0
        && p.lon <= 180.0;
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) noexcept {
    const double phi1 = deg2rad(a.lat);
    const double phi2 = deg2rad(b.lat);
    const double dphi = deg2rad(b.lat - a.lat);
    const double dlambda = deg2rad(b.lon - a.lon);
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

GeoPoint lerp(const GeoPoint& a, const GeoPoint& b, double t) noexcept {
    return GeoPoint{a.lat + (b.lat - a.lat) * t, a.lon + (b.lon - a.lon) * t};
}

SegmentProjection project_onto_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) noexcept {
    const double k = std::cos(deg2rad(p.lat));
    auto project = [&](const GeoPoint& q) {
        return std::pair{deg2rad(q.lon - p.lon) * k * kEarthRadiusM, deg2rad(q.lat - p.lat) * kEarthRadiusM};
    };
    const auto [ax, ay] = project(a);
    const auto [bx, by] = project(b);
    const double dx = bx - ax;
    const double dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(-(ax * dx + ay * dy) / len2, 0.0, 1.0);
    }
    const double cx = ax + t * dx;
    const double cy = ay + t * dy;
    return SegmentProjection{std::hypot(cx, cy), t};
}

}// namespace tcep
