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

// Random input generators shared by the property suites and the acceptance binary.

#ifndef TCEP_TESTS_GENERATORS_HPP_
#define TCEP_TESTS_GENERATORS_HPP_

#include "oracles.hpp"

#include <tcep/error.hpp>
#include <tcep/interpolation.hpp>
#include <tcep/track_stream.hpp>
#include <tcep/veql.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace gen {

inline tcep::PathPosition random_position(oracle::Rng& rng, const oracle::GraphSpec& g) {
    const auto e = static_cast<std::size_t>(rng.integer(0, static_cast<int>(g.edges.size()) - 1));
    const double len = g.edges[e].length_m;
    double off = 0.0;
    switch (rng.integer(0, 5)) {
    case 0:
        off = 0.0;
        break;
    case 1:
        off = len;
        break;
    case 2:
        off = std::round(rng.real(0.0, len));
        break;
    default:
        off = rng.real(0.0, len);
        break;
    }
    return tcep::PathPosition{e, off};
}

struct IdwInstance {
    oracle::GraphSpec spec;
    tcep::RoadGraph graph;
    tcep::Route route;
    std::vector<tcep::CongestionSample> samples;
    tcep::PathPosition target;
};

/// Random graph (at most 20 nodes) with a non-empty route, 1 to 10 samples anywhere and a target on the route.
inline std::optional<IdwInstance> random_idw_instance(oracle::Rng& rng) {
    auto spec = oracle::random_graph(rng, 20, rng.real(0.1, 0.4));
    if (spec.edges.empty()) {
        return std::nullopt;
    }
    auto graph = spec.build();
    std::optional<tcep::Route> route;
    for (int attempt = 0; attempt < 10 && !route; ++attempt) {
        const auto& a = rng.pick(spec.nodes);
        const auto& b = rng.pick(spec.nodes);
        if (a.id == b.id) {
            continue;
        }
        try {
            auto r = tcep::shortest_path(graph, a.id, b.id);
            if (!r.empty()) {
                route = std::move(r);
            }
        } catch (const tcep::Error&) {
        }
    }
    if (!route) {
        return std::nullopt;
    }
    IdwInstance inst{spec, std::move(graph), std::move(*route), {}, {}};
    const int n = rng.integer(1, 10);
    for (int i = 0; i < n; ++i) {
        tcep::CongestionSample s;
        s.position = random_position(rng, inst.spec);
        s.speed_mps = rng.real(0.5, 30.0);
        s.source = rng.chance(0.5) ? tcep::SampleSource::Fresh : tcep::SampleSource::Carryover;
        inst.samples.push_back(s);
    }
    const auto leg = static_cast<std::size_t>(rng.integer(0, static_cast<int>(inst.route.edges().size()) - 1));
    const double len = inst.route.legs()[leg].length_m;
    inst.target = tcep::PathPosition{inst.route.edges()[leg], rng.chance(0.2) ? 0.0 : rng.real(0.0, len)};
    return inst;
}

inline tcep::DetectionFrame frame_at(std::int64_t ts, std::int64_t index) {
    return tcep::DetectionFrame{"C1", ts, index, {}, std::nullopt};
}

/// 280 frames evenly spread over 9 s.
inline std::vector<tcep::DetectionFrame> nine_second_clip() {
    std::vector<tcep::DetectionFrame> frames;
    for (int k = 0; k < 280; ++k) {
        frames.push_back(frame_at(std::llround(k * 9000.0 / 280.0), k));
    }
    return frames;
}

/// Monotone stream with irregular spacing, bursts and long gaps.
inline std::vector<tcep::DetectionFrame> random_stream(oracle::Rng& rng) {
    std::vector<tcep::DetectionFrame> frames;
    std::int64_t ts = rng.integer64(-5'000'000, 5'000'000'000'000);
    const int n = rng.integer(0, 400);
    for (int i = 0; i < n; ++i) {
        frames.push_back(frame_at(ts, i));
        ts += rng.chance(0.03) ? rng.integer(1000, 30000) : rng.integer(1, 80);
    }
    return frames;
}

/// Window length in seconds: half the time a multiple of 0.5 s, otherwise arbitrary.
inline double random_window_length(oracle::Rng& rng) {
    return rng.chance(0.5) ? rng.integer(1, 20) * 0.5 : rng.real(0.05, 12.0);
}

/// True when `windows` tile the stream's time range and together hold every frame once, in order.
inline bool is_partition(const std::vector<tcep::DetectionFrame>& stream, const std::vector<tcep::TimeWindow>& windows,
                         std::int64_t length_ms) {
    std::vector<tcep::DetectionFrame> joined;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        if (w.end_ms - w.start_ms != length_ms || (i > 0 && w.start_ms != windows[i - 1].end_ms)) {
            return false;
        }
        if (i + 1 < windows.size() && (w.partial || w.covered_ms != length_ms)) {
            return false;
        }
        if (w.covered_ms <= 0 || w.covered_ms > length_ms) {
            return false;
        }
        for (const auto& f : w.frames) {
            if (f.ts_ms < w.start_ms || f.ts_ms >= w.end_ms) {
                return false;
            }
            joined.push_back(f);
        }
    }
    if (joined != stream) {
        return false;
    }
    return stream.empty() || (windows.front().start_ms == stream.front().ts_ms && !windows.back().frames.empty());
}

inline const std::vector<std::string>& road_words() {
    static const std::vector<std::string> words{"Brixton", "Road", "Kennington", "Lane", "A23", "42", "3.5", "St.",
                                                "Cross-Street", "Ave", "o", "where_ever", "Select", "OR", "&"};
    return words;
}

inline std::string random_road(oracle::Rng& rng) {
    std::string name;
    const int words = rng.integer(1, 4);
    for (int i = 0; i < words; ++i) {
        if (i > 0) {
            name += ' ';
        }
        name += rng.pick(road_words());
    }
    return name;
}

inline double random_number(oracle::Rng& rng, double lo, double hi) {
    switch (rng.integer(0, 2)) {
    case 0:
        return static_cast<double>(rng.integer(static_cast<int>(std::ceil(lo)), static_cast<int>(hi)));
    case 1:
        return std::round(rng.real(lo, hi) * 10.0) / 10.0;
    default:
        return rng.real(lo, hi);
    }
}

inline tcep::QueryAst random_ast(oracle::Rng& rng) {
    tcep::QueryAst ast;
    ast.op = tcep::kAllOperatorKinds[static_cast<std::size_t>(rng.integer(0, 5))];
    const int n = rng.integer(1, 5);
    ast.combinator = n > 1 && rng.chance(0.3) ? tcep::Combinator::And : tcep::Combinator::Or;
    const auto first = tcep::kAllVehicleClasses[static_cast<std::size_t>(rng.integer(0, 4))];
    for (int i = 0; i < n; ++i) {
        ast.predicates.push_back(ast.combinator == tcep::Combinator::And
                                     ? first
                                     : tcep::kAllVehicleClasses[static_cast<std::size_t>(rng.integer(0, 4))]);
    }
    ast.road_name = random_road(rng);
    ast.window_seconds = random_number(rng, 1.0, 600.0);
    if (ast.window_seconds <= 0.0) {
        ast.window_seconds = 1.0;
    }
    if (rng.chance(0.7)) {
        const double pct = random_number(rng, 1.0, 99.0);
        ast.confidence_percent = std::clamp(pct, 0.5, 99.5);
    }
    return ast;
}

/// Same query with random keyword case and spacing.
inline std::string scramble(const std::string& canonical, oracle::Rng& rng) {
    std::string out;
    bool in_quote = false;
    for (char c : canonical) {
        if (c == '\'') {
            in_quote = !in_quote;
        }
        if (c == ' ' && !in_quote) {
            out.append(static_cast<std::size_t>(rng.integer(1, 3)), rng.chance(0.2) ? '\t' : ' ');
            continue;
        }
        out.push_back(!in_quote && rng.chance(0.3) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                                                    : c);
    }
    return out;
}

inline std::string mutate(std::string s, oracle::Rng& rng) {
    const std::string alphabet = "()=>%'\" \t\nabcSELECTfromWHEREORAND0123456789._-\xE2\x80\x98\x99\x9C\x9D\x01\x7F\xFF";
    const int edits = rng.integer(1, 6);
    for (int e = 0; e < edits && !s.empty(); ++e) {
        const auto at = static_cast<std::size_t>(rng.integer(0, static_cast<int>(s.size()) - 1));
        switch (rng.integer(0, 3)) {
        case 0:
            s.erase(at, static_cast<std::size_t>(rng.integer(1, 8)));
            break;
        case 1:
            s.insert(at, 1, alphabet[static_cast<std::size_t>(rng.integer(0, static_cast<int>(alphabet.size()) - 1))]);
            break;
        case 2:
            s[at] = alphabet[static_cast<std::size_t>(rng.integer(0, static_cast<int>(alphabet.size()) - 1))];
            break;
        default:
            s = s.substr(0, at);
            break;
        }
    }
    return s;
}

/// Fuzz input number i: even i are random bytes, odd i mutate the sample query or a generated one.
inline std::string fuzz_input(oracle::Rng& rng, int i, const std::string& sample) {
    if (i % 2 == 0) {
        std::string text;
        const int len = rng.integer(0, 120);
        for (int k = 0; k < len; ++k) {
            text.push_back(static_cast<char>(rng.integer(0, 255)));
        }
        return text;
    }
    return mutate(i % 4 == 1 ? sample : tcep::to_veql(random_ast(rng)), rng);
}

}// namespace gen

#endif// TCEP_TESTS_GENERATORS_HPP_
