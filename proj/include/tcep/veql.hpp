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

#ifndef TCEP_VEQL_HPP_
#define TCEP_VEQL_HPP_

#include <tcep/camera.hpp>
#include <tcep/error.hpp>
#include <tcep/road_graph.hpp>
#include <tcep/types.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tcep {

enum class OperatorKind { TrafficCongestion, VehicleCount, FlowRate, MeanSpeed, Density, LevelOfService };

inline constexpr std::array kAllOperatorKinds{OperatorKind::TrafficCongestion, OperatorKind::VehicleCount,
                                              OperatorKind::FlowRate,          OperatorKind::MeanSpeed,
                                              OperatorKind::Density,           OperatorKind::LevelOfService};

/// Query-language spelling, e.g. "Traffic_Congestion".
[[nodiscard]] std::string_view to_string(OperatorKind op) noexcept;
/// Case-insensitive lookup of the query-language spelling.
[[nodiscard]] std::optional<OperatorKind> operator_from_name(std::string_view name) noexcept;
/// Operators whose output lives between cameras and so need at least two of them.
[[nodiscard]] bool needs_segments(OperatorKind op) noexcept;

enum class Combinator { Or, And };

inline constexpr double kDefaultConfidenceMin = 0.4;

struct QueryAst {
    OperatorKind op = OperatorKind::TrafficCongestion;
    /// Object predicates in source order. Duplicates are kept so printing is faithful.
    std::vector<VehicleClass> predicates;
    /// Single combinator joining the predicates; always Or when there is only one.
    Combinator combinator = Combinator::Or;
    /// Whitespace-collapsed road name as written.
    std::string road_name;
    double window_seconds = 0.0;
    /// The WITH CONFIDENCE percentage, when the clause is present.
    std::optional<double> confidence_percent;

    [[nodiscard]] std::set<VehicleClass> object_classes() const;
    [[nodiscard]] double confidence_min() const noexcept;

    bool operator==(const QueryAst&) const = default;
};

class VeqlError : public Error {
  public:
    enum class Stage { Lexical, Syntax, Semantic };

    VeqlError(Stage stage, std::size_t position, const std::string& message);

    [[nodiscard]] Stage stage() const noexcept { return stage_; }
    /// Byte offset into the query text.
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

  private:
    Stage stage_;
    std::size_t position_;
};

[[nodiscard]] std::string_view to_string(VeqlError::Stage stage) noexcept;

/// Parses one query. Every failure is a VeqlError; nothing else escapes.
[[nodiscard]] QueryAst parse_query(std::string_view text);

/// Canonical text for an AST; parse_query(to_veql(ast)) == ast.
[[nodiscard]] std::string to_veql(const QueryAst& ast);

struct ValidatedQuery {
    QueryAst ast;
    Route route;
    /// Cameras on the road in route order.
    std::vector<CameraMeta> cameras;
};

/// Resolves the road to a route and camera list. Throws UnknownRoad or InsufficientCameras.
[[nodiscard]] ValidatedQuery validate_against(const QueryAst& ast, const std::vector<CameraMeta>& registry,
                                              const RoadGraph& graph);

}// namespace tcep

#endif// TCEP_VEQL_HPP_
