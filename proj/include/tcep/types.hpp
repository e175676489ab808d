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

#ifndef TCEP_TYPES_HPP_
#define TCEP_TYPES_HPP_

#include <array>
#include <optional>
#include <string_view>

namespace tcep {

/// The closed set of vehicle classes the detector reports.
enum class VehicleClass { Bus, Car, Truck, Bicycle, Motorcycle };

inline constexpr std::array kAllVehicleClasses{VehicleClass::Bus, VehicleClass::Car, VehicleClass::Truck,
                                               VehicleClass::Bicycle, VehicleClass::Motorcycle};

[[nodiscard]] std::string_view to_string(VehicleClass cls) noexcept;
/// Case-sensitive, lowercase names only ("car", "bus", ...).
[[nodiscard]] std::optional<VehicleClass> vehicle_class_from_name(std::string_view name) noexcept;

/// Incoming traffic approaches the camera; outgoing moves away from it.
enum class Direction { Incoming, Outgoing, Stationary };

[[nodiscard]] std::string_view to_string(Direction d) noexcept;
[[nodiscard]] std::optional<Direction> direction_from_name(std::string_view name) noexcept;

/// Lane side in the camera image. Outgoing traffic uses the left lane.
enum class LaneSide { Left, Right };

[[nodiscard]] std::string_view to_string(LaneSide side) noexcept;

}// namespace tcep

#endif// TCEP_TYPES_HPP_
