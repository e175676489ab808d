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

#include "oracles.hpp"

#include <tcep/error.hpp>
#include <tcep/service.hpp>

#include <gtest/gtest.h>

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <thread>

namespace {

using nlohmann::json;

std::shared_ptr<const tcep::Snapshot> make_snapshot(std::uint64_t sequence) {
    auto s = std::make_shared<tcep::Snapshot>();
    s->subscription_id = "sub-1";
    s->road_name = "Brixton Road";
    s->road_slug = "brixton-road";
    s->sequence = sequence;
    s->tick_ms = 1000 * static_cast<std::int64_t>(sequence);
    tcep::CameraStatus c1;
    c1.camera_id = "C1";
    tcep::TrafficStats st;
    st.camera_id = "C1";
    st.end_ms = s->tick_ms;
    st.count_in = 4;
    st.mean_speed_kmh = 31.5;
    c1.stats = st;
    tcep::CameraStatus c2;
    c2.camera_id = "C2";
    s->cameras = {c1, c2};
    tcep::SegmentStatus seg;
    seg.segment_id = "C1-C2";
    seg.camera_a = "C1";
    seg.camera_b = "C2";
    seg.length_m = 100.0;
    seg.vertices = {{0.0, {51.47, -0.11}}, {100.0, {51.4709, -0.11}}};
    seg.targets = {{0.0, {51.47, -0.11}, 30.0, 20.0, 1, 1}, {100.0, {51.4709, -0.11}, 40.0, std::nullopt, 1, 0}};
    seg.computed_ms = s->tick_ms;
    s->segments = {seg};
    return s;
}

tcep::LatencySummary summary() {
    tcep::LatencySummary l;
    l.operator_ms = tcep::quantiles({1.0, 2.0, 3.0});
    return l;
}

TEST(HandleGet, UnavailableBeforeFirstSnapshot) {
    tcep::SnapshotHub hub;
    EXPECT_EQ(tcep::handle_get(hub, "/roads/brixton-road/overlay").status, 503);
    EXPECT_EQ(tcep::handle_get(hub, "/cameras/C1/stats").status, 503);
    EXPECT_EQ(tcep::handle_get(hub, "/metrics/latency").status, 503);
    EXPECT_EQ(tcep::handle_get(hub, "/healthz").status, 200);
    EXPECT_EQ(tcep::handle_get(hub, "/nope").status, 404);
}

TEST(HandleGet, Endpoints) {
    tcep::SnapshotHub hub;
    hub.publish(make_snapshot(1), summary());

    const auto overlay = tcep::handle_get(hub, "/roads/brixton-road/overlay");
    EXPECT_EQ(overlay.status, 200);
    EXPECT_EQ(overlay.content_type, "application/geo+json");
    const auto doc = json::parse(overlay.body);
    EXPECT_EQ(doc["type"], "FeatureCollection");
    EXPECT_EQ(doc["features"].size(), 2u);

    const auto stats = tcep::handle_get(hub, "/roads/brixton-road/stats");
    EXPECT_EQ(stats.status, 200);
    EXPECT_EQ(json::parse(stats.body)["road"], "Brixton Road");

    const auto cam = tcep::handle_get(hub, "/cameras/C1/stats");
    EXPECT_EQ(cam.status, 200);
    EXPECT_EQ(cam.content_type, "application/json");
    const auto cj = json::parse(cam.body);
    EXPECT_EQ(cj["count_in"], 4);
    EXPECT_EQ(cj["mean_speed_kmh"], 31.5);
    EXPECT_EQ(cj["faulty"], false);

    EXPECT_EQ(tcep::handle_get(hub, "/cameras/C2/stats").status, 503);
    EXPECT_EQ(tcep::handle_get(hub, "/cameras/C99/stats").status, 404);
    EXPECT_EQ(tcep::handle_get(hub, "/roads/kennington-lane/overlay").status, 404);
    EXPECT_EQ(tcep::handle_get(hub, "/roads/brixton-road/other").status, 404);

    const auto lat = tcep::handle_get(hub, "/metrics/latency");
    EXPECT_EQ(lat.status, 200);
    const auto lj = json::parse(lat.body);
    for (const auto& key : {"preprocessing_ms", "operator_ms", "total_ms"}) {
        EXPECT_TRUE(lj.contains(key)) << key;
    }
    EXPECT_EQ(lj["operator_ms"]["p50"], 2.0);
}

TEST(SnapshotHub, ReadersSeeWholeSnapshots) {
    tcep::SnapshotHub hub;
    hub.publish(make_snapshot(1), summary());
    std::atomic<bool> stop{false};
    std::atomic<std::size_t> reads{0};
    std::vector<std::thread> readers;
    for (int r = 0; r < 3; ++r) {
        readers.emplace_back([&] {
            std::uint64_t last = 0;
            while (!stop) {
                const auto s = hub.road("brixton-road");
                ASSERT_TRUE(s);
                // Sequence never goes backwards and every field belongs to the same snapshot.
                ASSERT_GE(s->sequence, last);
                ASSERT_EQ(s->tick_ms, 1000 * static_cast<std::int64_t>(s->sequence));
                ASSERT_EQ(s->cameras[0].stats->end_ms, s->tick_ms);
                last = s->sequence;
                ++reads;
            }
        });
    }
    for (std::uint64_t i = 2; i <= 2000; ++i) {
        hub.publish(make_snapshot(i), summary());
    }
    stop = true;
    for (auto& t : readers) {
        t.join();
    }
    EXPECT_EQ(hub.road("brixton-road")->sequence, 2000u);
    EXPECT_GT(reads.load(), 0u);
}

TEST(HttpService, ServesWithCacheDisabled) {
    tcep::SnapshotHub hub;
    tcep::HttpService service(hub);
    const int port = service.start("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    httplib::Client client("127.0.0.1", port);

    auto res = client.Get("/roads/brixton-road/overlay");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 503);

    hub.publish(make_snapshot(7), summary());
    res = client.Get("/roads/brixton-road/overlay");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->get_header_value("Content-Type"), "application/geo+json");
    EXPECT_NE(res->get_header_value("Cache-Control").find("no-store"), std::string::npos);
    EXPECT_NE(res->get_header_value("Cache-Control").find("no-cache"), std::string::npos);
    EXPECT_EQ(json::parse(res->body)["features"].size(), 2u);

    res = client.Get("/cameras/C1/stats");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_FALSE(res->get_header_value("Cache-Control").empty());

    res = client.Get("/cameras/C42/stats");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 404);
    EXPECT_FALSE(res->get_header_value("Cache-Control").empty());
    service.stop();
}

TEST(ListenAddress, Parse) {
    EXPECT_EQ(tcep::parse_listen_address("127.0.0.1:8080"), std::make_pair(std::string("127.0.0.1"), 8080));
    EXPECT_EQ(tcep::parse_listen_address("9000"), std::make_pair(std::string("0.0.0.0"), 9000));
    EXPECT_THROW((void) tcep::parse_listen_address("host:port"), tcep::Error);
    EXPECT_THROW((void) tcep::parse_listen_address("host:99999"), tcep::Error);
}

}// namespace
