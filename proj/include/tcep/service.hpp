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

#ifndef TCEP_SERVICE_HPP_
#define TCEP_SERVICE_HPP_

#include <tcep/engine.hpp>
#include <tcep/latency.hpp>
#include <tcep/output.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace tcep {

/// Latest snapshot per road, replaced atomically. One writer, any number of readers.
class SnapshotHub : public SnapshotSink {
  public:
    struct State {
        std::map<std::string, std::shared_ptr<const Snapshot>> roads;
        std::optional<LatencySummary> latency;
    };

    SnapshotHub();

    void publish(std::shared_ptr<const Snapshot> snapshot, const LatencySummary& latency) override;
    [[nodiscard]] std::shared_ptr<const State> state() const;
    [[nodiscard]] std::shared_ptr<const Snapshot> road(const std::string& slug) const;

  private:
    std::shared_ptr<const State> state_;
};

struct HttpResponse {
    int status = 200;
    std::string content_type;
    std::string body;
};

/**
 * Routes a GET path against the hub. Kept separate from the socket layer so the endpoint
 * contract can be tested without a server.
 */
[[nodiscard]] HttpResponse handle_get(const SnapshotHub& hub, const std::string& path, const ColorBuckets& buckets = {});

/// HTTP front end over a hub. Every response carries cache-disabling headers.
class HttpService {
  public:
    HttpService(const SnapshotHub& hub, ColorBuckets buckets = {});
    ~HttpService();
    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port; returns the bound port.
    int start(const std::string& host, int port);
    void stop();

  private:
    const SnapshotHub& hub_;
    ColorBuckets buckets_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

/// Splits "host:port"; a bare port binds all interfaces.
[[nodiscard]] std::pair<std::string, int> parse_listen_address(const std::string& addr);

}// namespace tcep

#endif// TCEP_SERVICE_HPP_
