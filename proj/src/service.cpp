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
#include <tcep/service.hpp>

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <charconv>

namespace tcep {

using nlohmann::json;

SnapshotHub::SnapshotHub() : state_(std::make_shared<const State>()) {}

void SnapshotHub::publish(std::shared_ptr<const Snapshot> snapshot, const LatencySummary& latency) {
    auto next = std::make_shared<State>(*std::atomic_load(&state_));
    next->roads[snapshot->road_slug] = std::move(snapshot);
    next->latency = latency;
    std::atomic_store(&state_, std::shared_ptr<const State>(std::move(next)));
}

std::shared_ptr<const SnapshotHub::State> SnapshotHub::state() const {
    return std::atomic_load(&state_);
}

std::shared_ptr<const Snapshot> SnapshotHub::road(const std::string& slug) const {
    const auto s = state();
    const auto it = s->roads.find(slug);
    return it == s->roads.end() ? nullptr : it->second;
}

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kGeoJson = "application/geo+json";

HttpResponse error_response(int status, const std::string& message) {
    return HttpResponse{status, kJson, json{{"error", message}}.dump()};
}

HttpResponse json_response(const json& doc, const char* type = kJson) {
    return HttpResponse{200, type, doc.dump()};
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] == '/') {
            ++i;
            continue;
        }
        const auto j = path.find('/', i);
        parts.push_back(path.substr(i, j == std::string::npos ? std::string::npos : j - i));
        i = j == std::string::npos ? path.size() : j;
    }
    return parts;
}

}// namespace

HttpResponse handle_get(const SnapshotHub& hub, const std::string& path, const ColorBuckets& buckets) {
    const auto parts = split_path(path);
    const auto state = hub.state();
    if (parts.size() == 1 && parts[0] == "healthz") {
        return json_response(json{{"status", "ok"}, {"roads", state->roads.size()}});
    }
    const bool roads = parts.size() == 3 && parts[0] == "roads" && (parts[2] == "overlay" || parts[2] == "stats");
    const bool camera = parts.size() == 3 && parts[0] == "cameras" && parts[2] == "stats";
    const bool latency = parts.size() == 2 && parts[0] == "metrics" && parts[1] == "latency";
    if (!roads && !camera && !latency) {
        return error_response(404, "no such endpoint");
    }
    if (state->roads.empty()) {
        return error_response(503, "no snapshot published yet");
    }
    if (latency) {
        return json_response(state->latency ? to_json(*state->latency) : to_json(LatencySummary{}));
    }
    if (roads) {
        const auto it = state->roads.find(parts[1]);
        if (it == state->roads.end()) {
            return error_response(404, "unknown road " + parts[1]);
        }
        if (parts[2] == "overlay") {
            return json_response(to_geojson(*it->second, buckets), kGeoJson);
        }
        return json_response(road_stats_json(*it->second));
    }
    for (const auto& [slug, snap] : state->roads) {
        for (const auto& c : snap->cameras) {
            if (c.camera_id != parts[1]) {
                continue;
            }
            if (!c.stats) {
                return error_response(503, "camera " + c.camera_id + " has not closed a window yet");
            }
            auto doc = to_json(*c.stats);
            doc["faulty"] = c.faulty;
            doc["road"] = snap->road_name;
            return json_response(doc);
        }
    }
    return error_response(404, "unknown camera " + parts[1]);
}

HttpService::HttpService(const SnapshotHub& hub, ColorBuckets buckets)
    : hub_(hub), buckets_(buckets), server_(std::make_unique<httplib::Server>()) {
    server_->set_default_headers({{"Cache-Control", "no-store, no-cache, must-revalidate, max-age=0"},
                                  {"Pragma", "no-cache"},
                                  {"Expires", "0"}});
    server_->Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
        const auto r = handle_get(hub_, req.path, buckets_);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    });
}

HttpService::~HttpService() {
    stop();
}

int HttpService::start(const std::string& host, int port) {
    int bound = 0;
    if (port == 0) {
        bound = server_->bind_to_any_port(host);
    } else {
        bound = server_->bind_to_port(host, port) ? port : -1;
    }
    if (bound <= 0) {
        throw Error(ErrorKind::InvalidValue, "cannot bind " + host + ":" + std::to_string(port));
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return bound;
}

void HttpService::stop() {
    if (thread_.joinable()) {
        server_->stop();
        thread_.join();
    }
}

std::pair<std::string, int> parse_listen_address(const std::string& addr) {
    std::string host = "0.0.0.0";
    std::string port_text = addr;
    if (const auto colon = addr.rfind(':'); colon != std::string::npos) {
        host = addr.substr(0, colon);
        port_text = addr.substr(colon + 1);
        if (host.empty()) {
            host = "0.0.0.0";
        }
    }
    int port = -1;
    const auto* end = port_text.data() + port_text.size();
    const auto [ptr, ec] = std::from_chars(port_text.data(), end, port);
    if (ec != std::errc() || ptr != end || port < 0 || port > 65535) {
        throw Error(ErrorKind::InvalidValue, "bad listen address \"" + addr + "\"");
    }
    return {host, port};
}

}// namespace tcep
