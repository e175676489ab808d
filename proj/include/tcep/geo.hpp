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

#ifndef TCEP_GEO_HPP_
#define TCEP_GEO_HPP_

namespace tcep {

/// IUGG mean Earth radius.
inline constexpr double kEarthRadiusM = 6371008.8;
inline constexpr double kMetersPerMile = 1609.344;

/// WGS84 position in degrees.
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    bool operator==(const GeoPoint&) const = default;
};

[[nodiscard]] bool is_valid(const GeoPoint& p) noexcept;

/// Great-circle distance in meters on the mean-radius sphere.
[[nodiscard]] double haversine_m(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Linear interpolation in degree space; adequate at street scale.
[[nodiscard]] GeoPoint lerp(const GeoPoint& a, const GeoPoint& b, double t) noexcept;

struct SegmentProjection {
    double distance_m = 0.0;
    /// Fraction along a-b of the closest point, in [0, 1].
    double t = 0.0;
};

/// Closest point of segment a-b to p, measured in a local equirectangular projection.
[[nodiscard]] SegmentProjection project_onto_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) noexcept;

}// namespace tcep

#endif// TCEP_GEO_HPP_
