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

#include "generators.hpp"
#include "oracles.hpp"

#include <tcep/error.hpp>
#include <tcep/windowing.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace {

using tcep::CarryoverStore;
using tcep::DetectionFrame;
using tcep::Heading;
using tcep::TimeWindow;
using gen::frame_at;
using gen::random_stream;

constexpr double kMileM = 1609.344;
constexpr double kMphToMps = kMileM / 3600.0;

TEST(TimeWindow, NineSecondClipSplitsIntoTwoFullWindows) {
    const auto windows = tcep::time_window(gen::nine_second_clip(), 4.5);
    ASSERT_EQ(windows.size(), 2u);
    for (const auto& w : windows) {
        EXPECT_EQ(w.frames.size(), 140u);
        EXPECT_FALSE(w.partial);
        EXPECT_EQ(w.covered_ms, 4500);
        EXPECT_EQ(w.end_ms - w.start_ms, 4500);
    }
    EXPECT_EQ(windows[0].start_ms, 0);
    EXPECT_EQ(windows[1].start_ms, 4500);
}

TEST(TimeWindow, TrailingPartialWindow) {
    auto frames = gen::nine_second_clip();
    frames.resize(200);
    const auto windows = tcep::time_window(frames, 4.5);
    ASSERT_EQ(windows.size(), 2u);
    EXPECT_FALSE(windows[0].partial);
    EXPECT_TRUE(windows[1].partial);
    EXPECT_EQ(windows[1].frames.size(), 60u);
    // Last frame at round(199 * 9000 / 280) = 6396 stands for one 32 ms interval.
    EXPECT_EQ(windows[1].covered_ms, 6396 + 32 - 4500);
}

TEST(TimeWindow, EmptyStreamAndBadLength) {
    EXPECT_TRUE(tcep::time_window({}, 4.5).empty());
    EXPECT_THROW((void) tcep::time_window({}, 0.0), tcep::Error);
    EXPECT_THROW((void) tcep::time_window({}, -1.0), tcep::Error);
    EXPECT_THROW((void) tcep::window_length_ms(std::nan("")), tcep::Error);
    EXPECT_EQ(tcep::window_length_ms(4.5), 4500);
}

TEST(TimeWindow, GapsProduceEmptyWindows) {
    const std::vector<DetectionFrame> frames{frame_at(0, 0), frame_at(100, 1), frame_at(3500, 2), frame_at(3600, 3)};
    const auto windows = tcep::time_window(frames, 1.0);
    ASSERT_EQ(windows.size(), 4u);
    EXPECT_EQ(windows[0].frames.size(), 2u);
    EXPECT_TRUE(windows[1].frames.empty());
    EXPECT_TRUE(windows[2].frames.empty());
    EXPECT_EQ(windows[3].frames.size(), 2u);
    EXPECT_EQ(windows[3].start_ms, 3000);
}

TEST(TimeWindow, PartitionPropertyOnRandomStreams) {
    oracle::Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const auto stream = random_stream(rng);
        const double length_s = gen::random_window_length(rng);
        const auto windows = tcep::time_window(stream, length_s);
        ASSERT_TRUE(gen::is_partition(stream, windows, tcep::window_length_ms(length_s))) << "trial " << trial;
    }
}

TEST(WindowBuilder, IncrementalMatchesBatchWithTicks) {
    oracle::Rng rng(88);
    for (int trial = 0; trial < 200; ++trial) {
        const auto stream = random_stream(rng);
        const double length_s = rng.integer(1, 12) * 0.5;
        tcep::WindowBuilder builder("C1", length_s);
        std::vector<TimeWindow> got;
        for (const auto& f : stream) {
            // Clock ticks between frames close windows early without changing their content.
            if (const auto end = builder.current_end_ms(); end && rng.chance(0.3) && *end <= f.ts_ms) {
                for (auto& w : builder.advance_to(rng.integer64(*end, f.ts_ms))) {
                    got.push_back(std::move(w));
                }
            }
            for (auto& w : builder.push(f)) {
                got.push_back(std::move(w));
            }
        }
        if (auto last = builder.finish()) {
            got.push_back(std::move(*last));
        }
        const auto expected = tcep::time_window(stream, length_s);
        ASSERT_EQ(got.size(), expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            ASSERT_EQ(got[i].start_ms, expected[i].start_ms);
            ASSERT_EQ(got[i].frames, expected[i].frames);
            ASSERT_EQ(got[i].partial, expected[i].partial);
            ASSERT_EQ(got[i].covered_ms, expected[i].covered_ms);
        }
    }
}

TEST(WindowBuilder, AdvanceAndCurrentEnd) {
    tcep::WindowBuilder b("C1", 1.0);
    EXPECT_FALSE(b.current_end_ms().has_value());
    EXPECT_TRUE(b.advance_to(10'000).empty());
    EXPECT_TRUE(b.push(frame_at(500, 0)).empty());
    EXPECT_EQ(b.current_end_ms(), 1500);
    EXPECT_TRUE(b.advance_to(1499).empty());
    const auto closed = b.advance_to(3500);
    ASSERT_EQ(closed.size(), 3u);
    EXPECT_EQ(closed[0].frames.size(), 1u);
    EXPECT_EQ(closed[2].end_ms, 3500);
    EXPECT_EQ(b.current_end_ms(), 4500);
    EXPECT_FALSE(b.finish().has_value());
    EXPECT_FALSE(b.current_end_ms().has_value());
}

// Carryover projection.

tcep::Route mile_route(const tcep::RoadGraph& g) {
    return tcep::shortest_path(g, 1, 5);
}

TEST(Carryover, FortyMphAfterRefreshAndLatency) {
    const auto g = oracle::line_graph(5, kMileM / 4.0);
    const auto route = mile_route(g);
    ASSERT_NEAR(route.total_length_m(), kMileM, 1e-9);
    CarryoverStore store;
    const double v = 40.0 * kMphToMps;
    store.insert("C1", 7, tcep::VehicleClass::Car, Heading::Forward, v, 0, 30.0);
    const auto samples = tcep::carryover_update(store, route, 10'000, 2.0);
    ASSERT_EQ(samples.size(), 1u);
    const double expected_m = v * 12.0;
    EXPECT_LT(oracle::relative_error(samples[0].along_m, expected_m), 1e-9);
    EXPECT_NEAR(expected_m, 214.5792, 1e-9);
    EXPECT_EQ(std::round(samples[0].along_m / kMileM * 100.0) / 100.0, 0.13);
    EXPECT_NEAR(samples[0].along_m / kMileM, 0.1333, 5e-5);
    EXPECT_EQ(store.size(), 1u);
}

TEST(Carryover, BackwardHeadingStartsAtFarEnd) {
    const auto g = oracle::line_graph(5, 400.0);
    const auto route = mile_route(g);
    CarryoverStore store;
    store.insert("C2", 1, tcep::VehicleClass::Bus, Heading::Backward, 10.0, 1000, 30.0);
    const auto s = store.advance(route, 11'000, 0.0, 60.0);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_DOUBLE_EQ(s[0].along_m, 1600.0 - 100.0);
    EXPECT_EQ(s[0].heading, Heading::Backward);
}

TEST(Carryover, EvictionClampAndProgress) {
    const auto g = oracle::line_graph(3, 100.0);
    const auto route = tcep::shortest_path(g, 1, 3);
    CarryoverStore store;
    store.insert("A", 1, tcep::VehicleClass::Car, Heading::Forward, 50.0, 0, 20.0);
    ASSERT_EQ(store.entries().size(), 1u);
    EXPECT_TRUE(store.entries()[0].speed_anomaly);
    EXPECT_EQ(store.entries()[0].speed_mps, 20.0);
    EXPECT_EQ(store.entries()[0].raw_speed_mps, 50.0);

    auto s = store.advance(route, 5000, 0.0, 60.0);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_DOUBLE_EQ(s[0].along_m, 100.0);
    // An earlier clock never moves a vehicle backwards.
    s = store.advance(route, 1000, 0.0, 60.0);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_DOUBLE_EQ(s[0].along_m, 100.0);
    // Re-inserting the same departure keeps progress.
    store.insert("A", 1, tcep::VehicleClass::Car, Heading::Forward, 50.0, 0, 20.0);
    EXPECT_DOUBLE_EQ(store.entries()[0].progress_m, 100.0);
    // Past the far end: evicted.
    EXPECT_TRUE(store.advance(route, 10'001, 0.0, 60.0).empty());
    EXPECT_EQ(store.size(), 0u);

    store.insert("A", 2, tcep::VehicleClass::Car, Heading::Forward, 0.5, 0, 20.0);
    EXPECT_EQ(store.advance(route, 60'000, 0.0, 60.0).size(), 1u);
    EXPECT_TRUE(store.advance(route, 60'001, 0.0, 60.0).empty());
}

TEST(Carryover, RandomProjectionsMatchFormula) {
    oracle::Rng rng(31);
    const auto g = oracle::line_graph(9, 200.0);
    const auto route = tcep::shortest_path(g, 1, 9);
    for (int trial = 0; trial < 500; ++trial) {
        CarryoverStore store;
        const double v = rng.real(0.0, 25.0);
        const double max_v = rng.real(5.0, 30.0);
        const auto dep = rng.integer64(0, 100'000);
        const auto now = dep + rng.integer64(0, 120'000);
        const double lat = rng.real(0.0, 5.0);
        const bool fwd = rng.chance(0.5);
        store.insert("A", trial, tcep::VehicleClass::Car, fwd ? Heading::Forward : Heading::Backward, v, dep, max_v);
        const auto s = store.advance(route, now, lat, 60.0);
        const long double age = (now - dep) / 1000.0L;
        const long double d = std::min<long double>(v, max_v) * (age + lat);
        const bool keep = age <= 60.0L && d <= 1600.0L;
        ASSERT_EQ(s.size(), keep ? 1u : 0u);
        if (keep) {
            const long double along = fwd ? d : 1600.0L - d;
            ASSERT_NEAR(s[0].along_m, static_cast<double>(along), 1e-9);
        }
    }
}

}// namespace
