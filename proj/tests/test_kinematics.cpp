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
#include <tcep/kinematics.hpp>
#include <tcep/windowing.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace {

using tcep::Direction;
using tcep::ErrorKind;
using tcep::Track;
using tcep::TrackSample;
using tcep::VehicleClass;

template<typename F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const tcep::Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected tcep::Error";
    return ErrorKind::NoData;
}

tcep::CameraMeta test_camera() {
    tcep::CameraMeta cam;
    cam.id = "C1";
    cam.image_width_px = 352;
    cam.image_height_px = 288;
    cam.meters_per_pixel = 0.1;
    cam.refresh_seconds = 10;
    cam.clip_seconds = 9;
    return cam;
}

/// Constant-velocity track in top-left pixel coordinates.
Track linear_track(std::int64_t id, double x0, double y0, double vx, double vy, int n, std::int64_t dt_ms,
                   std::int64_t t0 = 0) {
    Track t;
    t.track_id = id;
    for (int i = 0; i < n; ++i) {
        const double s = static_cast<double>(i * dt_ms) / 1000.0;
        t.samples.push_back(TrackSample{t0 + i * dt_ms, x0 + vx * s, y0 + vy * s, 0.9});
    }
    return t;
}

TEST(Calibration, LaneWidthBounds) {
    EXPECT_DOUBLE_EQ(tcep::calibrate(35.0, 3.5).meters_per_pixel, 0.1);
    EXPECT_DOUBLE_EQ(tcep::calibrate(25.0, 2.5).meters_per_pixel, 0.1);
    EXPECT_DOUBLE_EQ(tcep::calibrate(40.0, 4.0).meters_per_pixel, 0.1);
    EXPECT_EQ(kind_of([] { (void) tcep::calibrate(24.0, 2.4); }), ErrorKind::CalibrationRejected);
    EXPECT_EQ(kind_of([] { (void) tcep::calibrate(41.0, 4.1); }), ErrorKind::CalibrationRejected);
    EXPECT_EQ(kind_of([] { (void) tcep::calibrate(0.0, 3.0); }), ErrorKind::InvalidValue);
    EXPECT_EQ(kind_of([] { (void) tcep::calibrate(30.0, -3.0); }), ErrorKind::InvalidValue);
}

TEST(Calibration, NearAndFarScale) {
    auto cam = test_camera();
    EXPECT_EQ(tcep::meters_per_pixel_at(cam, 10.0), 0.1);
    cam.mpp_near = 0.05;
    cam.mpp_far = 0.2;
    EXPECT_EQ(tcep::meters_per_pixel_at(cam, 200.0), 0.05);
    EXPECT_EQ(tcep::meters_per_pixel_at(cam, 144.0), 0.05);
    EXPECT_EQ(tcep::meters_per_pixel_at(cam, 143.9), 0.2);
}

TEST(Direction, ImageMotionDecides) {
    // Moving down the image approaches the camera.
    EXPECT_EQ(tcep::estimate_direction(linear_track(1, 100, 50, 0, 40, 10, 100), 288, 8.0), Direction::Incoming);
    EXPECT_EQ(tcep::estimate_direction(linear_track(1, 100, 250, 0, -40, 10, 100), 288, 8.0), Direction::Outgoing);
    EXPECT_EQ(tcep::estimate_direction(linear_track(1, 100, 100, 30, 5, 10, 100), 288, 8.0), Direction::Stationary);
    EXPECT_EQ(kind_of([] { (void) tcep::estimate_direction(linear_track(1, 0, 0, 0, 1, 1, 100), 288, 8.0); }),
              ErrorKind::IndeterminateDirection);
}

TEST(Direction, RandomTracksAgainstNetVerticalMotion) {
    oracle::Rng rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = rng.integer(2, 40);
        Track t;
        t.track_id = trial;
        double y = rng.real(0, 288);
        for (int i = 0; i < n; ++i) {
            t.samples.push_back(TrackSample{i * 33, rng.real(0, 352), y, 0.9});
            y = std::clamp(y + rng.real(-15, 15), 0.0, 288.0);
        }
        const double jitter = rng.real(0, 20);
        // Image y grows downwards, so a larger final y is net motion towards the camera.
        const double down = t.samples.back().y - t.samples.front().y;
        const Direction expected = down > jitter ? Direction::Incoming
                                   : down < -jitter ? Direction::Outgoing
                                                    : Direction::Stationary;
        ASSERT_EQ(tcep::estimate_direction(t, 288, jitter), expected);
    }
}

TEST(Speed, ConstantVelocityOracle) {
    oracle::Rng rng(4);
    for (int trial = 0; trial < 1000; ++trial) {
        const double vx = rng.real(-80, 80);
        const double vy = rng.real(-120, 120);
        const double mpp = rng.real(0.02, 0.3);
        const auto dt = rng.integer(10, 100);
        const int n = rng.integer(2, 60);
        const auto track = linear_track(1, 150, 150, vx, vy, n, dt);
        if (track.span_s() < 0.5) {
            EXPECT_EQ(kind_of([&] { (void) tcep::estimate_speed(track, tcep::Calibration{mpp, {}, {}}); }),
                      ErrorKind::InsufficientSpan);
            continue;
        }
        const long double expected = std::sqrt(static_cast<long double>(vx) * vx + static_cast<long double>(vy) * vy)
                                     * mpp;
        ASSERT_LT(oracle::relative_error(tcep::estimate_speed(track, tcep::Calibration{mpp, {}, {}}), expected), 1e-9);
    }
}

TEST(Speed, CameraScaleAveragesEndRows) {
    auto cam = test_camera();
    cam.mpp_near = 0.05;
    cam.mpp_far = 0.15;
    // From the far half into the near half: 100 px over 1 s at a mean scale of 0.1.
    const auto track = linear_track(1, 100, 100, 0, 100, 11, 100);
    EXPECT_NEAR(tcep::estimate_speed(track, cam), 10.0, 1e-12);
}

TEST(Record, FlipDirectionAndStationaryLane) {
    auto cam = test_camera();
    auto incoming = linear_track(5, 100, 40, 0, 80, 20, 100);
    incoming.cls = VehicleClass::Bus;
    auto r = tcep::make_record(incoming, cam, 9000);
    EXPECT_EQ(r.direction, Direction::Incoming);
    EXPECT_EQ(r.lane, Direction::Incoming);
    EXPECT_NEAR(r.speed_mps, 8.0, 1e-12);
    EXPECT_EQ(r.cls, VehicleClass::Bus);
    EXPECT_EQ(r.samples, 20u);
    EXPECT_EQ(r.first_ts_ms, 0);
    EXPECT_EQ(r.last_ts_ms, 1900);
    EXPECT_EQ(r.window_end_ms, 9000);
    cam.flip_direction = true;
    r = tcep::make_record(incoming, cam, 9000);
    EXPECT_EQ(r.direction, Direction::Outgoing);
    EXPECT_EQ(r.lane, Direction::Outgoing);

    cam.flip_direction = false;
    const auto parked_left = linear_track(6, 60, 150, 0, 0, 20, 100);
    r = tcep::make_record(parked_left, cam, 9000);
    EXPECT_EQ(r.direction, Direction::Stationary);
    EXPECT_EQ(r.speed_mps, 0.0);
    EXPECT_EQ(r.lane, Direction::Outgoing);
    const auto parked_right = linear_track(7, 300, 150, 0, 0, 20, 100);
    EXPECT_EQ(tcep::make_record(parked_right, cam, 9000).lane, Direction::Incoming);
    cam.flip_direction = true;
    r = tcep::make_record(parked_right, cam, 9000);
    EXPECT_EQ(r.direction, Direction::Stationary);
    EXPECT_EQ(r.lane, Direction::Outgoing);
}

TEST(Record, CountByDirection) {
    std::vector<tcep::VehicleRecord> rs(6);
    rs[0].direction = rs[1].direction = rs[2].direction = Direction::Incoming;
    rs[3].direction = Direction::Outgoing;
    rs[4].direction = rs[5].direction = Direction::Stationary;
    EXPECT_EQ(tcep::count_by_direction(rs), (tcep::DirectionCounts{3, 1, 2}));
    EXPECT_EQ(tcep::count_by_direction(rs).total(), 6u);
    EXPECT_EQ(tcep::count_by_direction({}).total(), 0u);
}

// Frame-level helpers for the grouping and accumulator tests.

struct SimVehicle {
    std::int64_t id;
    VehicleClass cls;
    std::int64_t enter_ms;
    std::int64_t leave_ms;
    double y0;
    double vy;// pixels per second, image coordinates
    double x;
    double conf;
};

std::vector<tcep::DetectionFrame> render(const std::vector<SimVehicle>& vehicles, std::int64_t duration_ms,
                                         std::int64_t dt_ms) {
    std::vector<tcep::DetectionFrame> frames;
    std::int64_t index = 0;
    for (std::int64_t ts = 0; ts < duration_ms; ts += dt_ms) {
        tcep::DetectionFrame f{"C1", ts, index++, {}, std::nullopt};
        for (const auto& v : vehicles) {
            if (ts < v.enter_ms || ts > v.leave_ms) {
                continue;
            }
            const double y = v.y0 + v.vy * static_cast<double>(ts - v.enter_ms) / 1000.0;
            f.boxes.push_back(tcep::TrackedBox{v.id, v.cls, v.conf, {v.x - 10, y - 8, 20, 16}});
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

TEST(Grouping, FiltersAndFirstBoxWins) {
    auto frames = render({{1, VehicleClass::Car, 0, 900, 50, 100, 100, 0.9},
                          {2, VehicleClass::Bicycle, 0, 900, 50, 100, 200, 0.9},
                          {3, VehicleClass::Car, 0, 900, 50, 100, 300, 0.3}},
                         1000, 100);
    frames[2].boxes.push_back(tcep::TrackedBox{1, VehicleClass::Car, 0.95, {0, 0, 4, 4}});
    const auto tracks = tcep::group_tracks(frames, 0.4, {VehicleClass::Car, VehicleClass::Bus});
    ASSERT_EQ(tracks.size(), 1u);
    EXPECT_EQ(tracks[0].track_id, 1);
    ASSERT_EQ(tracks[0].samples.size(), 10u);
    EXPECT_EQ(tracks[0].samples[2].x, 100.0);

    tcep::TimeWindow w{"C1", 0, 1000, frames, false, 1000};
    EXPECT_EQ(tcep::build_tracks(w, 0.4, {VehicleClass::Car}, 11).size(), 0u);
    EXPECT_EQ(tcep::build_tracks(w, 0.4, {VehicleClass::Car}, 10).size(), 1u);
}

TEST(Grouping, MajorityClass) {
    auto frames = render({{1, VehicleClass::Car, 0, 900, 50, 100, 100, 0.9}}, 1000, 100);
    frames[0].boxes[0].cls = VehicleClass::Truck;
    frames[1].boxes[0].cls = VehicleClass::Truck;
    const std::set<VehicleClass> all(tcep::kAllVehicleClasses.begin(), tcep::kAllVehicleClasses.end());
    EXPECT_EQ(tcep::group_tracks(frames, 0.0, all).at(0).cls, VehicleClass::Car);
}

TEST(Accumulator, TrackSpanningWindowsReportedOnceWithFullSpeed) {
    const auto cam = test_camera();
    const auto frames = render({{1, VehicleClass::Car, 1000, 7000, 20, 40, 100, 0.9}}, 9000, 100);
    const auto windows = tcep::time_window(frames, 2.0);
    tcep::TrackAccumulator acc(cam, 0.4, {VehicleClass::Car});
    std::vector<tcep::VehicleRecord> records;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto obs = acc.process(windows[i], i + 1 == windows.size());
        records.insert(records.end(), obs.records.begin(), obs.records.end());
        EXPECT_EQ(obs.frame_count, windows[i].frames.size());
    }
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].direction, Direction::Incoming);
    EXPECT_NEAR(records[0].speed_mps, 4.0, 1e-9);
    EXPECT_EQ(records[0].first_ts_ms, 1000);
    EXPECT_EQ(records[0].last_ts_ms, 7000);
    EXPECT_EQ(records[0].window_end_ms, 8000);
    EXPECT_EQ(acc.open_tracks(), 0u);
}

TEST(Accumulator, FinalWindowClosesAndShortTracksRejected) {
    const auto cam = test_camera();
    const auto frames = render({{1, VehicleClass::Car, 0, 2900, 250, -50, 100, 0.9},
                                {2, VehicleClass::Car, 2600, 2900, 250, -50, 200, 0.9}},
                               3000, 100);
    tcep::TrackAccumulator acc(cam, 0.4, {VehicleClass::Car});
    const auto obs = acc.process(tcep::TimeWindow{"C1", 0, 3000, frames, false, 3000}, true);
    ASSERT_EQ(obs.records.size(), 1u);
    EXPECT_EQ(obs.records[0].direction, Direction::Outgoing);
    EXPECT_EQ(obs.rejected_tracks, 1u);
    ASSERT_TRUE(obs.mean_occupancy.has_value());
    EXPECT_NEAR(*obs.mean_occupancy, 34.0 / 30.0, 1e-12);

    tcep::TrackAccumulator open(cam, 0.4, {VehicleClass::Car});
    EXPECT_TRUE(open.process(tcep::TimeWindow{"C1", 0, 3000, frames, false, 3000}, false).records.empty());
    EXPECT_EQ(open.open_tracks(), 2u);
    // An empty window means the camera stopped seeing the road; open tracks end there.
    const auto gap = open.process(tcep::TimeWindow{"C1", 3000, 6000, {}, false, 3000}, false);
    EXPECT_EQ(gap.records.size(), 1u);
    EXPECT_FALSE(gap.mean_occupancy.has_value());
    EXPECT_EQ(open.open_tracks(), 0u);
}

TEST(Accumulator, RandomClipsMatchWholeTrackOracle) {
    oracle::Rng rng(12);
    const auto cam = test_camera();
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<SimVehicle> vs;
        const int n = rng.integer(0, 8);
        for (int i = 0; i < n; ++i) {
            const auto enter = rng.integer64(0, 80) * 100;
            const auto leave = std::min<std::int64_t>(enter + rng.integer64(0, 60) * 100, 8900);
            const double vy = rng.chance(0.2) ? 0.0 : rng.real(-30, 30);
            vs.push_back({i + 1, VehicleClass::Car, enter, leave, 144, vy, rng.real(20, 330), 0.9});
        }
        const auto frames = render(vs, 9000, 100);
        const auto windows = tcep::time_window(frames, rng.integer(1, 18) * 0.5);
        tcep::TrackAccumulator acc(cam, 0.4, {VehicleClass::Car});
        std::map<std::int64_t, tcep::VehicleRecord> got;
        for (std::size_t i = 0; i < windows.size(); ++i) {
            for (const auto& r : acc.process(windows[i], i + 1 == windows.size()).records) {
                ASSERT_TRUE(got.emplace(r.vehicle_id, r).second) << "vehicle reported twice";
            }
        }
        for (const auto& v : vs) {
            const auto samples = (v.leave_ms - v.enter_ms) / 100 + 1;
            const bool trusted = samples >= 5 && v.leave_ms - v.enter_ms >= 500;
            ASSERT_EQ(got.count(v.id), trusted ? 1u : 0u);
            if (!trusted) {
                continue;
            }
            const auto& r = got.at(v.id);
            const double span = static_cast<double>(v.leave_ms - v.enter_ms) / 1000.0;
            const double dy = v.vy * span;
            if (std::fabs(dy) > cam.jitter_px) {
                ASSERT_EQ(r.direction, dy > 0 ? Direction::Incoming : Direction::Outgoing);
                ASSERT_NEAR(r.speed_mps, std::fabs(v.vy) * cam.meters_per_pixel, 1e-9);
            } else {
                ASSERT_EQ(r.direction, Direction::Stationary);
            }
        }
    }
}

}// namespace
