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

#include <tcep/types.hpp>

namespace tcep {

std::string_view to_string(VehicleClass cls) noexcept {
    switch (cls) {
        case VehicleClass::Bus: return "bus";
        case VehicleClass::Car: return "car";
        case VehicleClass::Truck: return "truck";
        case VehicleClass::Bicycle: return "bicycle";
        case VehicleClass::Motorcycle: return "motorcycle";
    }
    return "unknown";
}

std::optional<VehicleClass> vehicle_class_from_name(std::string_view name) noexcept {
    for (auto cls : kAllVehicleClasses) {
        if (to_string(cls) == name) {
            return cls;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Direction d) noexcept {
    switch (d) {
        case Direction::Incoming: return "incoming";
        case Direction::Outgoing: return "outgoing";
        case Direction::Stationary: return "stationary";
    }
    return "unknown";
}

std::optional<Direction> direction_from_name(std::string_view name) noexcept {
    for (auto d : {Direction::Incoming, Direction::Outgoing, Direction::Stationary}) {
        if (to_string(d) == name) {
            return d;
        }
    }
    return std::nullopt;
}

std::string_view to_string(LaneSide side) noexcept { return side == LaneSide::Left ? "left" : "right"; }

}// namespace tcep
