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

#ifndef TCEP_ENGINE_HPP_
#define TCEP_ENGINE_HPP_

#include <tcep/camera.hpp>
#include <tcep/interpolation.hpp>
#include <tcep/kinematics.hpp>
#include <tcep/latency.hpp>
#include <tcep/output.hpp>
#include <tcep/road_graph.hpp>
#include <tcep/veql.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcep {

struct EngineConfig {
    /// Windows buffered between the window builder and kinematics of each camera.
    std::size_t queue_capacity = 10;
    /// Consecutive bad lines after which a camera is quarantined.
    std::size_t quarantine_threshold = 3;
    /// Serialized snapshots kept in RunResult::snapshot_log; 0 keeps all.
    std::size_t snapshot_retention = 0;
    /// Upper bound on a query's window length.
    double window_cap_s = 60.0;
    InterpolationConfig interpolation;
    /// Replace processing_latency_s by the measured median operator latency, refreshed every 60 s.
    bool auto_latency = false;
    /// Replay frames at their recorded pace; false replays as fast as possible.
    bool pacing = false;
    /// Playback speed multiplier when pacing.
    double pace_factor = 1.0;
    ColorBuckets buckets;
};

/// Reads the engine config JSON. Unknown keys are rejected so typos do not pass silently.
[[nodiscard]] EngineConfig load_engine_config_text(std::string_view text);
[[nodiscard]] EngineConfig load_engine_config_file(const std::filesystem::path& path);

/// Raw track lines per camera id, in arrival order.
using CameraFeeds = std::map<std::string, std::vector<std::string>>;

/// Reads `<camera_id>.jsonl` files from a directory.
[[nodiscard]] CameraFeeds load_feeds_dir(const std::filesystem::path& dir);
[[nodiscard]] CameraFeeds feeds_from_frames(const std::map<std::string, std::vector<DetectionFrame>>& streams);

enum class SubscriptionState { Running, Stopped };

struct Subscription {
    std::string id;
    QueryAst ast;
    Route route;
    std::vector<CameraMeta> cameras;
    /// Consecutive camera pairs in route order.
    std::vector<Segment> segments;
    SubscriptionState state = SubscriptionState::Running;
};

/// Receives every snapshot as it is published.
class SnapshotSink {
  public:
    virtual ~SnapshotSink() = default;
    virtual void publish(std::shared_ptr<const Snapshot> snapshot, const LatencySummary& latency) = 0;
};

struct RunResult {
    std::vector<std::string> snapshot_log;
    std::shared_ptr<const Snapshot> final_snapshot;
    /// Every finished vehicle record, in publish order.
    std::vector<VehicleRecord> records;
    std::vector<std::string> faulty_cameras;
    std::size_t skipped_lines = 0;
    std::size_t dropped_windows = 0;
    std::vector<LatencyRecord> latencies;
    LatencySummary latency;
};

/**
 * @brief Owns subscriptions and runs their camera pipelines.
 *
 * Each camera gets an ingest/window thread and a kinematics thread joined by a bounded queue.
 * The calling thread merges all cameras' window results in (window end, camera order) order,
 * which makes every run over the same input produce the same snapshots.
 */
class Engine {
  public:
    Engine(const RoadGraph& graph, std::vector<CameraMeta> registry, EngineConfig config = {});
    ~Engine();
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    /// Validates and registers a query; returns the new subscription id.
    std::string register_query(const QueryAst& ast);
    void stop(const std::string& id);
    [[nodiscard]] const Subscription& subscription(const std::string& id) const;
    [[nodiscard]] const EngineConfig& config() const noexcept { return config_; }

    /// Runs the subscription over one batch of feeds. Carryover and sequence numbers persist across calls.
    RunResult run_once(const std::string& id, const CameraFeeds& feeds, SnapshotSink* sink = nullptr);

  private:
    struct State;

    const RoadGraph& graph_;
    std::vector<CameraMeta> registry_;
    EngineConfig config_;
    std::uint64_t next_id_ = 1;
    std::map<std::string, std::unique_ptr<State>> subs_;
};

}// namespace tcep

#endif// TCEP_ENGINE_HPP_
