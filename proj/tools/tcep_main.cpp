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

#include <tcep/camera.hpp>
#include <tcep/engine.hpp>
#include <tcep/error.hpp>
#include <tcep/output.hpp>
#include <tcep/road_graph.hpp>
#include <tcep/service.hpp>
#include <tcep/simulator.hpp>
#include <tcep/veql.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using nlohmann::json;

std::atomic<bool> g_interrupted{false};

void on_signal(int) {
    g_interrupted = true;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw tcep::Error(tcep::ErrorKind::MalformedDocument, "cannot open " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Accepts either a single snapshot document or a snapshot log, whose last line is used.
tcep::Snapshot read_snapshot(const std::string& path) {
    const auto text = read_file(path);
    try {
        return tcep::snapshot_from_json(json::parse(text));
    } catch (const json::exception&) {
    }
    std::istringstream in(text);
    std::string line;
    std::string last;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            last = line;
        }
    }
    try {
        return tcep::snapshot_from_json(json::parse(last));
    } catch (const json::exception& e) {
        throw tcep::Error(tcep::ErrorKind::MalformedDocument, "snapshot is not valid JSON: " + std::string(e.what()));
    }
}

}// namespace

int main(int argc, char** argv) {
    CLI::App app{"Traffic estimation engine over road camera track streams"};
    app.require_subcommand(1);

    std::string graph_path;
    std::string cameras_path;
    std::string query_text;
    std::string query_file;
    std::string input;
    std::string config_path;
    std::string serve_addr;
    std::string log_path;
    std::string final_path;
    std::uint64_t seed = 1;
    bool no_pacing = false;
    double pace_factor = 0.0;
    double serve_for_s = -1.0;

    auto* run = app.add_subcommand("run", "Run a continuous query over camera feeds");
    run->add_option("--graph", graph_path, "Road graph JSON")->required();
    run->add_option("--cameras", cameras_path, "Camera registry JSON")->required();
    auto* q = run->add_option("--query", query_text, "VEQL query text");
    auto* qf = run->add_option("--query-file", query_file, "File holding the VEQL query");
    q->excludes(qf);
    run->add_option("--input", input, "Directory of <camera>.jsonl files, or simulate:<scenario.json>")->required();
    run->add_option("--config", config_path, "Engine config JSON");
    run->add_flag("--no-pacing", no_pacing, "Replay as fast as possible, in deterministic order");
    run->add_option("--pace-factor", pace_factor, "Playback speed multiplier when pacing");
    run->add_option("--serve", serve_addr, "Serve snapshots over HTTP at [host:]port");
    run->add_option("--serve-for", serve_for_s, "Keep serving this many seconds after the input ends");
    run->add_option("--snapshot-log", log_path, "Append every snapshot to this JSONL file");
    run->add_option("--snapshot-out", final_path, "Write the final snapshot to this file");
    run->add_option("--seed", seed, "Simulation seed for simulate: inputs");

    std::string snapshot_path;
    std::string out_path;
    auto* exp = app.add_subcommand("export-overlay", "Write the GeoJSON overlay of a snapshot");
    exp->add_option("--snapshot", snapshot_path, "Snapshot file or snapshot log")->required();
    exp->add_option("--out", out_path, "Output .geojson path")->required();
    exp->add_option("--config", config_path, "Engine config JSON, for color bucket bounds");

    auto* parse = app.add_subcommand("parse", "Parse a VEQL query and print its canonical form");
    auto* pq = parse->add_option("--query", query_text, "VEQL query text");
    auto* pqf = parse->add_option("--query-file", query_file, "File holding the VEQL query");
    pq->excludes(pqf);

    std::string scenario_path;
    auto* sim = app.add_subcommand("simulate", "Render a simulation scenario to track JSONL files");
    sim->add_option("--graph", graph_path, "Road graph JSON")->required();
    sim->add_option("--cameras", cameras_path, "Camera registry JSON")->required();
    sim->add_option("--scenario", scenario_path, "Simulation scenario JSON")->required();
    sim->add_option("--out", out_path, "Output directory")->required();
    sim->add_option("--seed", seed, "Random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto load_query = [&]() {
            if (!query_file.empty()) {
                return tcep::parse_query(read_file(query_file));
            }
            if (query_text.empty()) {
                throw tcep::Error(tcep::ErrorKind::Query, "one of --query or --query-file is required");
            }
            return tcep::parse_query(query_text);
        };

        if (parse->parsed()) {
            const auto ast = load_query();
            std::cout << tcep::to_veql(ast) << '\n';
            return 0;
        }

        if (sim->parsed()) {
            const auto graph = tcep::load_graph_file(graph_path);
            const auto registry = tcep::load_registry_file(cameras_path);
            const auto result = tcep::simulate(tcep::load_simulation_file(scenario_path), registry, graph, seed);
            std::filesystem::create_directories(out_path);
            tcep::write_streams(result, out_path);
            std::cout << "wrote " << result.streams.size() << " streams to " << out_path << '\n';
            return 0;
        }

        if (exp->parsed()) {
            tcep::ColorBuckets buckets;
            if (!config_path.empty()) {
                buckets = tcep::load_engine_config_file(config_path).buckets;
            }
            const auto snap = read_snapshot(snapshot_path);
            std::ofstream out(out_path);
            if (!out) {
                throw tcep::Error(tcep::ErrorKind::MalformedDocument, "cannot write " + out_path);
            }
            out << tcep::to_geojson(snap, buckets).dump(2) << '\n';
            return 0;
        }

        const auto graph = tcep::load_graph_file(graph_path);
        const auto registry = tcep::load_registry_file(cameras_path);
        tcep::EngineConfig config;
        if (!config_path.empty()) {
            config = tcep::load_engine_config_file(config_path);
        }
        config.pacing = !no_pacing;
        if (pace_factor > 0.0) {
            config.pace_factor = pace_factor;
        }

        tcep::CameraFeeds feeds;
        constexpr std::string_view kSimulate = "simulate:";
        if (input.starts_with(kSimulate)) {
            const auto scenario = tcep::load_simulation_file(input.substr(kSimulate.size()));
            feeds = tcep::feeds_from_frames(tcep::simulate(scenario, registry, graph, seed).streams);
        } else {
            feeds = tcep::load_feeds_dir(input);
        }

        tcep::Engine engine(graph, registry, config);
        const auto id = engine.register_query(load_query());

        tcep::SnapshotHub hub;
        std::unique_ptr<tcep::HttpService> service;
        if (!serve_addr.empty()) {
            const auto [host, port] = tcep::parse_listen_address(serve_addr);
            service = std::make_unique<tcep::HttpService>(hub, config.buckets);
            const int bound = service->start(host, port);
            std::cout << "serving on " << host << ':' << bound << std::endl;
        }

        const auto result = engine.run_once(id, feeds, &hub);

        if (!log_path.empty()) {
            std::ofstream log(log_path, std::ios::app);
            if (!log) {
                throw tcep::Error(tcep::ErrorKind::MalformedDocument, "cannot write " + log_path);
            }
            for (const auto& line : result.snapshot_log) {
                log << line << '\n';
            }
        }
        if (!final_path.empty() && result.final_snapshot) {
            std::ofstream out(final_path);
            out << tcep::serialize(*result.final_snapshot) << '\n';
        }

        json summary{{"subscription", id},
                     {"snapshots", result.final_snapshot ? result.final_snapshot->sequence : 0},
                     {"records", result.records.size()},
                     {"faulty_cameras", result.faulty_cameras},
                     {"skipped_lines", result.skipped_lines},
                     {"dropped_windows", result.dropped_windows},
                     {"latency", tcep::to_json(result.latency)}};
        std::cout << summary.dump(2) << std::endl;

        if (service) {
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            const auto until = std::chrono::steady_clock::now()
                               + std::chrono::milliseconds(static_cast<std::int64_t>(serve_for_s * 1000.0));
            while (!g_interrupted && (serve_for_s < 0.0 || std::chrono::steady_clock::now() < until)) {
                std::this_thread::sleep_for(std::chrono::milliseconds(100));
            }
            service->stop();
        }
        return 0;
    } catch (const tcep::VeqlError& e) {
        std::cerr << "query error (" << tcep::to_string(e.stage()) << ", byte " << e.position() << "): " << e.what()
                  << '\n';
        return 2;
    } catch (const tcep::Error& e) {
        std::cerr << tcep::to_string(e.kind()) << ": " << e.what() << '\n';
        return 1;
    }
}
