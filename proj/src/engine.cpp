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

#include <tcep/bounded_queue.hpp>
#include <tcep/engine.hpp>
#include <tcep/error.hpp>
#include <tcep/track_stream.hpp>
#include <tcep/windowing.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace tcep {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double read_number(const json& doc, const char* key, double fallback) {
    if (!doc.contains(key)) {
        return fallback;
    }
    const auto& v = doc.at(key);
    if (!v.is_number()) {
        throw Error(ErrorKind::Schema, std::string("engine config: ") + key + " must be a number");
    }
    return v.get<double>();
}

std::size_t read_count(const json& doc, const char* key, std::size_t fallback) {
    if (!doc.contains(key)) {
        return fallback;
    }
    const auto& v = doc.at(key);
    if (!v.is_number_unsigned()) {
        throw Error(ErrorKind::Schema, std::string("engine config: ") + key + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

bool read_bool(const json& doc, const char* key, bool fallback) {
    if (!doc.contains(key)) {
        return fallback;
    }
    const auto& v = doc.at(key);
    if (!v.is_boolean()) {
        throw Error(ErrorKind::Schema, std::string("engine config: ") + key + " must be a boolean");
    }
    return v.get<bool>();
}

void require_positive(double v, const char* what) {
    if (!std::isfinite(v) || !(v > 0.0)) {
        throw Error(ErrorKind::InvalidValue, std::string("engine config: ") + what + " must be positive");
    }
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::optional<double> median(std::vector<double> v) {
    if (v.empty()) {
        return std::nullopt;
    }
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) {
        return *mid;
    }
    const double hi = *mid;
    const double lo = *std::max_element(v.begin(), mid);
    return (lo + hi) / 2.0;
}

enum class ItemKind { Window, Fault, Done };

constexpr std::int64_t kLastKey = std::numeric_limits<std::int64_t>::max();

struct IngestItem {
    ItemKind kind = ItemKind::Window;
    TimeWindow window;
    bool final_window = false;
    Clock::time_point closed;
    std::int64_t key = 0;
};

struct MergeItem {
    ItemKind kind = ItemKind::Window;
    std::size_t camera = 0;
    std::int64_t key = 0;
    WindowObservation obs;
    Clock::time_point closed;
    std::optional<double> pre_ms;
    std::uint64_t arrival = 0;
};

/**
 * Per-camera result deques feeding the matcher. In ordered mode an item is released only when
 * every camera still running has one queued, and the smallest (window end, camera index) goes
 * first. Live mode releases items in arrival order.
 */
class MergeInbox {
  public:
    MergeInbox(std::size_t cameras, std::size_t capacity, bool ordered)
        : heads_(cameras), finished_(cameras, false), capacity_(capacity), ordered_(ordered) {}

    void push(MergeItem item) {
        std::unique_lock lock(mutex_);
        auto& q = heads_[item.camera];
        changed_.wait(lock, [&] { return q.size() < capacity_ || item.kind != ItemKind::Window; });
        item.arrival = next_arrival_++;
        q.push_back(std::move(item));
        changed_.notify_all();
    }

    std::optional<MergeItem> pop() {
        std::unique_lock lock(mutex_);
        std::optional<std::size_t> pick;
        changed_.wait(lock, [&] {
            pick = choose();
            return pick.has_value() || all_finished();
        });
        if (!pick) {
            return std::nullopt;
        }
        MergeItem item = std::move(heads_[*pick].front());
        heads_[*pick].pop_front();
        if (item.kind != ItemKind::Window) {
            finished_[*pick] = true;
        }
        changed_.notify_all();
        return item;
    }

  private:
    [[nodiscard]] bool all_finished() const {
        return std::all_of(finished_.begin(), finished_.end(), [](bool f) { return f; });
    }

    [[nodiscard]] std::optional<std::size_t> choose() const {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < heads_.size(); ++i) {
            if (finished_[i]) {
                continue;
            }
            if (heads_[i].empty()) {
                if (ordered_) {
                    return std::nullopt;
                }
                continue;
            }
            const auto& h = heads_[i].front();
            if (!best) {
                best = i;
                continue;
            }
            const auto& b = heads_[*best].front();
            const bool earlier = ordered_ ? h.key < b.key : h.arrival < b.arrival;
            if (earlier) {
                best = i;
            }
        }
        return best;
    }

    std::mutex mutex_;
    std::condition_variable changed_;
    std::vector<std::deque<MergeItem>> heads_;
    std::vector<bool> finished_;
    std::size_t capacity_;
    bool ordered_;
    std::uint64_t next_arrival_ = 0;
};

struct IngestCounters {
    std::size_t skipped = 0;
    std::size_t dropped = 0;
};

class Pacer {
  public:
    Pacer(bool enabled, std::int64_t first_ts_ms, double factor, Clock::time_point epoch)
        : enabled_(enabled), first_ts_ms_(first_ts_ms), factor_(factor), epoch_(epoch) {}

    void wait_for(std::int64_t ts_ms) const {
        if (!enabled_) {
            return;
        }
        const double offset_ms = static_cast<double>(ts_ms - first_ts_ms_) / factor_;
        std::this_thread::sleep_until(epoch_ + std::chrono::microseconds(static_cast<std::int64_t>(offset_ms * 1000.0)));
    }
    [[nodiscard]] bool enabled() const noexcept { return enabled_; }

  private:
    bool enabled_;
    std::int64_t first_ts_ms_;
    double factor_;
    Clock::time_point epoch_;
};

void run_ingest(const std::vector<std::string>& lines, const CameraMeta& cam, double window_s,
                const EngineConfig& config, const Pacer& pacer, BoundedQueue<IngestItem>& queue,
                IngestCounters& counters) {
    WindowBuilder builder(cam.id, window_s);
    MonotonicityCheck order;
    std::size_t consecutive = 0;

    const auto emit = [&](std::vector<TimeWindow> windows) {
        for (auto& w : windows) {
            IngestItem item;
            item.key = w.end_ms;
            item.window = std::move(w);
            item.closed = Clock::now();
            if (pacer.enabled()) {
                if (queue.push_drop_oldest(std::move(item))) {
                    ++counters.dropped;
                }
            } else {
                queue.push(std::move(item));
            }
        }
    };

    for (const auto& line : lines) {
        if (is_blank(line)) {
            continue;
        }
        std::optional<DetectionFrame> frame;
        try {
            auto f = decode_track_line(line);
            if (f.camera_id == cam.id && boxes_within(f, cam) && order.accept(f)) {
                frame = std::move(f);
            }
        } catch (const Error&) {
        }
        if (!frame) {
            ++counters.skipped;
            if (++consecutive >= config.quarantine_threshold) {
                IngestItem fault;
                fault.kind = ItemKind::Fault;
                fault.key = builder.current_end_ms().value_or(0);
                queue.push(std::move(fault));
                return;
            }
            continue;
        }
        consecutive = 0;
        if (pacer.enabled()) {
            // Close windows on time even when the next frame is far away.
            while (const auto end = builder.current_end_ms()) {
                if (*end > frame->ts_ms) {
                    break;
                }
                pacer.wait_for(*end);
                emit(builder.advance_to(*end));
            }
            pacer.wait_for(frame->ts_ms);
        }
        emit(builder.push(std::move(*frame)));
    }
    if (auto last = builder.finish()) {
        IngestItem item;
        item.key = last->end_ms;
        item.window = std::move(*last);
        item.final_window = true;
        item.closed = Clock::now();
        queue.push(std::move(item));
    }
    IngestItem done;
    done.kind = ItemKind::Done;
    done.key = kLastKey;
    queue.push(std::move(done));
}

void run_kinematics(std::size_t index, const CameraMeta& cam, const QueryAst& ast, BoundedQueue<IngestItem>& queue,
                    MergeInbox& inbox) {
    TrackAccumulator acc(cam, ast.confidence_min(), ast.object_classes());
    while (auto item = queue.pop()) {
        MergeItem out;
        out.kind = item->kind;
        out.camera = index;
        out.key = item->key;
        if (item->kind == ItemKind::Window) {
            out.obs = acc.process(item->window, item->final_window);
            out.closed = item->closed;
            std::vector<double> pre;
            for (const auto& f : item->window.frames) {
                if (f.pre_ms) {
                    pre.push_back(*f.pre_ms);
                }
            }
            out.pre_ms = median(std::move(pre));
        }
        const bool last = item->kind != ItemKind::Window;
        inbox.push(std::move(out));
        if (last) {
            break;
        }
    }
}

std::optional<std::int64_t> first_timestamp(const std::vector<std::string>& lines) {
    for (const auto& line : lines) {
        if (is_blank(line)) {
            continue;
        }
        try {
            return decode_track_line(line).ts_ms;
        } catch (const Error&) {
        }
    }
    return std::nullopt;
}

std::optional<double> headline_value(OperatorKind op, const TrafficStats& s) {
    switch (op) {
        case OperatorKind::VehicleCount:
            return static_cast<double>(s.count_in + s.count_out + s.count_stationary);
        case OperatorKind::FlowRate:
            if (s.flow_per_hour_in && s.flow_per_hour_out) {
                return *s.flow_per_hour_in + *s.flow_per_hour_out;
            }
            return std::nullopt;
        case OperatorKind::MeanSpeed:
        case OperatorKind::TrafficCongestion:
            return s.mean_speed_kmh;
        case OperatorKind::Density:
            return s.density_per_mile;
        case OperatorKind::LevelOfService:
            return s.vc_ratio;
    }
    return std::nullopt;
}

}// namespace

EngineConfig load_engine_config_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedDocument, std::string("engine config: ") + e.what());
    }
    if (!doc.is_object()) {
        throw Error(ErrorKind::Schema, "engine config must be a JSON object");
    }
    static const std::set<std::string> known{
        "queue_capacity",  "quarantine_threshold", "snapshot_retention",   "window_cap_s",
        "idw_p",           "target_spacing_m",     "processing_latency_s", "carryover_max_age_s",
        "capacity_per_mile", "auto_latency",       "pacing",               "pace_factor",
        "color_buckets"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key)) {
            throw Error(ErrorKind::Schema, "engine config: unknown key \"" + key + "\"");
        }
    }
    EngineConfig c;
    c.queue_capacity = read_count(doc, "queue_capacity", c.queue_capacity);
    c.quarantine_threshold = read_count(doc, "quarantine_threshold", c.quarantine_threshold);
    c.snapshot_retention = read_count(doc, "snapshot_retention", c.snapshot_retention);
    c.window_cap_s = read_number(doc, "window_cap_s", c.window_cap_s);
    c.interpolation.idw_p = read_number(doc, "idw_p", c.interpolation.idw_p);
    c.interpolation.target_spacing_m = read_number(doc, "target_spacing_m", c.interpolation.target_spacing_m);
    c.interpolation.processing_latency_s =
        read_number(doc, "processing_latency_s", c.interpolation.processing_latency_s);
    c.interpolation.carryover_max_age_s = read_number(doc, "carryover_max_age_s", c.interpolation.carryover_max_age_s);
    c.interpolation.capacity_per_mile = read_number(doc, "capacity_per_mile", c.interpolation.capacity_per_mile);
    c.auto_latency = read_bool(doc, "auto_latency", c.auto_latency);
    c.pacing = read_bool(doc, "pacing", c.pacing);
    c.pace_factor = read_number(doc, "pace_factor", c.pace_factor);
    if (doc.contains("color_buckets")) {
        const auto& b = doc.at("color_buckets");
        if (!b.is_object()) {
            throw Error(ErrorKind::Schema, "engine config: color_buckets must be an object");
        }
        for (const auto& [key, value] : b.items()) {
            if (key != "green_min_kmh" && key != "orange_min_kmh" && key != "red_min_kmh") {
                throw Error(ErrorKind::Schema, "engine config: unknown color_buckets key \"" + key + "\"");
            }
        }
        c.buckets.green_min_kmh = read_number(b, "green_min_kmh", c.buckets.green_min_kmh);
        c.buckets.orange_min_kmh = read_number(b, "orange_min_kmh", c.buckets.orange_min_kmh);
        c.buckets.red_min_kmh = read_number(b, "red_min_kmh", c.buckets.red_min_kmh);
        if (!(c.buckets.green_min_kmh > c.buckets.orange_min_kmh && c.buckets.orange_min_kmh > c.buckets.red_min_kmh
              && c.buckets.red_min_kmh > 0.0)) {
            throw Error(ErrorKind::InvalidValue, "engine config: color bucket bounds must be positive and decreasing");
        }
    }
    if (c.queue_capacity == 0 || c.quarantine_threshold == 0) {
        throw Error(ErrorKind::InvalidValue, "engine config: queue_capacity and quarantine_threshold must be positive");
    }
    require_positive(c.window_cap_s, "window_cap_s");
    require_positive(c.interpolation.idw_p, "idw_p");
    require_positive(c.interpolation.target_spacing_m, "target_spacing_m");
    require_positive(c.interpolation.carryover_max_age_s, "carryover_max_age_s");
    require_positive(c.interpolation.capacity_per_mile, "capacity_per_mile");
    require_positive(c.pace_factor, "pace_factor");
    if (!std::isfinite(c.interpolation.processing_latency_s) || c.interpolation.processing_latency_s < 0.0) {
        throw Error(ErrorKind::InvalidValue, "engine config: processing_latency_s must be non-negative");
    }
    return c;
}

EngineConfig load_engine_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::MalformedDocument, "cannot open engine config " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return load_engine_config_text(buf.str());
}

CameraFeeds load_feeds_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error(ErrorKind::MalformedDocument, "not a directory: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    CameraFeeds feeds;
    for (const auto& p : files) {
        std::ifstream in(p);
        if (!in) {
            throw Error(ErrorKind::MalformedDocument, "cannot open " + p.string());
        }
        auto& lines = feeds[p.stem().string()];
        std::string line;
        while (std::getline(in, line)) {
            lines.push_back(line);
        }
    }
    return feeds;
}

CameraFeeds feeds_from_frames(const std::map<std::string, std::vector<DetectionFrame>>& streams) {
    CameraFeeds feeds;
    for (const auto& [id, frames] : streams) {
        auto& lines = feeds[id];
        lines.reserve(frames.size());
        for (const auto& f : frames) {
            lines.push_back(encode_track_line(f));
        }
    }
    return feeds;
}

struct Engine::State {
    struct CameraState {
        std::optional<TrafficStats> stats;
        std::optional<double> value;
        std::vector<VehicleRecord> latest;
        std::optional<std::int64_t> latest_end_ms;
        bool faulty = false;
    };

    Subscription sub;
    std::string slug;
    std::int64_t window_ms = 0;
    std::vector<CameraState> cameras;
    std::vector<SegmentStatus> segment_status;
    std::vector<CarryoverStore> carryover;
    std::uint64_t sequence = 0;
    std::int64_t last_tick_ms = 0;
    std::shared_ptr<const Snapshot> last;

    void reset() {
        cameras.assign(sub.cameras.size(), CameraState{});
        carryover.assign(sub.segments.size(), CarryoverStore{});
        sequence = 0;
        last_tick_ms = 0;
        last.reset();
    }
};

Engine::Engine(const RoadGraph& graph, std::vector<CameraMeta> registry, EngineConfig config)
    : graph_(graph), registry_(std::move(registry)), config_(config) {}

Engine::~Engine() = default;

std::string Engine::register_query(const QueryAst& ast) {
    if (ast.window_seconds > config_.window_cap_s) {
        throw Error(ErrorKind::Query, "window of " + std::to_string(ast.window_seconds) + " s exceeds the cap of "
                                          + std::to_string(config_.window_cap_s) + " s");
    }
    auto validated = validate_against(ast, registry_, graph_);
    auto state = std::make_unique<State>();
    state->sub.id = "sub-" + std::to_string(next_id_++);
    state->sub.ast = ast;
    state->sub.route = std::move(validated.route);
    state->sub.cameras = std::move(validated.cameras);
    state->slug = road_slug(ast.road_name);
    state->window_ms = window_length_ms(ast.window_seconds);
    if (needs_segments(ast.op)) {
        for (std::size_t i = 0; i + 1 < state->sub.cameras.size(); ++i) {
            auto seg = make_segment(graph_, state->sub.cameras[i], state->sub.cameras[i + 1],
                                    config_.interpolation.target_spacing_m);
            state->segment_status.push_back(describe_segment(graph_, seg));
            state->sub.segments.push_back(std::move(seg));
        }
    }
    state->reset();
    const auto id = state->sub.id;
    subs_.emplace(id, std::move(state));
    return id;
}

void Engine::stop(const std::string& id) {
    const auto it = subs_.find(id);
    if (it == subs_.end()) {
        throw Error(ErrorKind::UnknownSubscription, "unknown subscription " + id);
    }
    it->second->sub.state = SubscriptionState::Stopped;
    it->second->reset();
}

const Subscription& Engine::subscription(const std::string& id) const {
    const auto it = subs_.find(id);
    if (it == subs_.end()) {
        throw Error(ErrorKind::UnknownSubscription, "unknown subscription " + id);
    }
    return it->second->sub;
}

RunResult Engine::run_once(const std::string& id, const CameraFeeds& feeds, SnapshotSink* sink) {
    const auto it = subs_.find(id);
    if (it == subs_.end()) {
        throw Error(ErrorKind::UnknownSubscription, "unknown subscription " + id);
    }
    State& st = *it->second;
    if (st.sub.state == SubscriptionState::Stopped) {
        throw Error(ErrorKind::InvalidValue, "subscription " + id + " is stopped");
    }
    const auto& cams = st.sub.cameras;
    const std::size_t n = cams.size();
    for (auto& c : st.cameras) {
        c.faulty = false;
    }

    static const std::vector<std::string> kNoLines;
    std::vector<const std::vector<std::string>*> lines(n, &kNoLines);
    std::optional<std::int64_t> first_ts;
    for (std::size_t i = 0; i < n; ++i) {
        if (const auto f = feeds.find(cams[i].id); f != feeds.end()) {
            lines[i] = &f->second;
            if (const auto t = first_timestamp(f->second)) {
                first_ts = first_ts ? std::min(*first_ts, *t) : *t;
            }
        }
    }
    const Pacer pacer(config_.pacing, first_ts.value_or(0), config_.pace_factor, Clock::now());

    std::vector<std::unique_ptr<BoundedQueue<IngestItem>>> queues;
    std::vector<IngestCounters> counters(n);
    for (std::size_t i = 0; i < n; ++i) {
        queues.push_back(std::make_unique<BoundedQueue<IngestItem>>(config_.queue_capacity));
    }
    MergeInbox inbox(n, config_.queue_capacity, !config_.pacing);

    const double window_s = static_cast<double>(st.window_ms) / 1000.0;
    std::vector<std::thread> threads;
    threads.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        threads.emplace_back([&, i] {
            try {
                run_ingest(*lines[i], cams[i], window_s, config_, pacer, *queues[i], counters[i]);
            } catch (...) {
                IngestItem fault;
                fault.kind = ItemKind::Fault;
                queues[i]->push(std::move(fault));
            }
            queues[i]->close();
        });
        threads.emplace_back([&, i] {
            try {
                run_kinematics(i, cams[i], st.sub.ast, *queues[i], inbox);
            } catch (...) {
                MergeItem fault;
                fault.kind = ItemKind::Fault;
                fault.camera = i;
                inbox.push(std::move(fault));
                queues[i]->close();
            }
        });
    }

    RunResult result;
    LatencyTracker latency;
    std::deque<std::string> log;
    const OperatorKind op = st.sub.ast.op;
    const double route_max = st.sub.route.empty() ? graph_.default_max_speed_kmh() : st.sub.route.max_speed_kmh();
    const double max_speed_mps = route_max / 3.6;
    NetworkDistanceCache distances(graph_);
    InterpolationConfig icfg = config_.interpolation;
    auto latency_refreshed = Clock::now();

    const auto fresh_records = [&](std::size_t cam, std::int64_t now_ms) -> std::vector<VehicleRecord> {
        const auto& c = st.cameras[cam];
        if (c.faulty || !c.latest_end_ms || now_ms - *c.latest_end_ms >= st.window_ms) {
            return {};
        }
        return c.latest;
    };

    const auto publish = [&](std::int64_t tick_ms, const MergeItem* source) {
        auto snap = std::make_shared<Snapshot>();
        snap->subscription_id = st.sub.id;
        snap->op = op;
        snap->road_name = st.sub.ast.road_name;
        snap->road_slug = st.slug;
        snap->sequence = ++st.sequence;
        snap->tick_ms = tick_ms;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = st.cameras[i];
            snap->cameras.push_back(CameraStatus{cams[i].id, cams[i].point, c.faulty, c.stats, c.value});
        }
        snap->segments = st.segment_status;
        log.push_back(serialize(*snap));
        if (config_.snapshot_retention > 0 && log.size() > config_.snapshot_retention) {
            log.pop_front();
        }
        st.last = snap;
        st.last_tick_ms = tick_ms;
        if (source != nullptr && source->kind == ItemKind::Window) {
            LatencyRecord rec;
            rec.preprocessing_ms = source->pre_ms;
            rec.operator_ms = std::chrono::duration<double, std::milli>(Clock::now() - source->closed).count();
            rec.total_ms = rec.operator_ms + source->pre_ms.value_or(0.0);
            latency.add(rec);
        }
        if (sink != nullptr) {
            sink->publish(snap, latency.summary());
        }
    };

    while (auto item = inbox.pop()) {
        const std::size_t i = item->camera;
        auto& cs = st.cameras[i];
        if (item->kind == ItemKind::Done) {
            continue;
        }
        if (item->kind == ItemKind::Fault) {
            cs.faulty = true;
            cs.latest.clear();
            if (cs.stats) {
                cs.stats->faulty = true;
            }
            result.faulty_cameras.push_back(cams[i].id);
            publish(st.last_tick_ms, nullptr);
            continue;
        }
        const std::int64_t now_ms = item->obs.end_ms;
        auto stats = compute_stats(item->obs, cams[i], max_speed_mps, config_.interpolation.capacity_per_mile);
        cs.value = headline_value(op, stats);
        cs.stats = std::move(stats);
        cs.latest = item->obs.records;
        cs.latest_end_ms = now_ms;
        result.records.insert(result.records.end(), item->obs.records.begin(), item->obs.records.end());

        if (config_.auto_latency && Clock::now() - latency_refreshed >= std::chrono::seconds(60)) {
            if (const auto med = latency.median_operator_ms()) {
                icfg.processing_latency_s = *med / 1000.0;
            }
            latency_refreshed = Clock::now();
        }
        for (std::size_t s = (i == 0 ? 0 : i - 1); s < st.sub.segments.size() && s <= i; ++s) {
            const auto est = congestion_segment(distances, st.sub.segments[s], fresh_records(s, now_ms),
                                                fresh_records(s + 1, now_ms), st.carryover[s], now_ms, icfg);
            apply_estimate(st.segment_status[s], est);
        }
        publish(now_ms, &*item);
    }
    for (auto& t : threads) {
        t.join();
    }
    for (const auto& c : counters) {
        result.skipped_lines += c.skipped;
        result.dropped_windows += c.dropped;
    }
    result.snapshot_log.assign(log.begin(), log.end());
    result.final_snapshot = st.last;
    result.latencies = latency.records();
    result.latency = latency.summary();
    return result;
}

}// namespace tcep
