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

#ifndef TCEP_ERROR_HPP_
#define TCEP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace tcep {

enum class ErrorKind {
    MalformedDocument,
    DanglingEdge,
    InvalidValue,
    NoRoute,
    NotOnRoute,
    UnknownRoad,
    InsufficientCameras,
    Schema,
    TimestampRegression,
    IndeterminateDirection,
    InsufficientSpan,
    CalibrationRejected,
    InconsistentScenario,
    NoData,
    UnknownSubscription,
    Query,
};

const char* to_string(ErrorKind kind);

/// Base error for everything the library throws. Carries a machine-checkable kind.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

}// namespace tcep

#endif// TCEP_ERROR_HPP_
