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

#ifndef TCEP_LATENCY_HPP_
#define TCEP_LATENCY_HPP_

#include <cstddef>
#include <mutex>
#include <optional>
#include <vector>

namespace tcep {

struct LatencyRecord {
    /// Detector-side time reported on the wire, median over the window's frames.
    std::optional<double> preprocessing_ms;
    /// Window close to snapshot publish.
    double operator_ms = 0.0;
    double total_ms = 0.0;
};

struct Quantiles {
    std::size_t count = 0;
    double p50 = 0.0;
    double p90 = 0.0;
    double p99 = 0.0;
    double max = 0.0;
};

struct LatencySummary {
    Quantiles preprocessing_ms;
    Quantiles operator_ms;
    Quantiles total_ms;
};

/// Nearest-rank quantiles; an empty input gives all zeros.
[[nodiscard]] Quantiles quantiles(std::vector<double> values);

/// Thread-safe collector shared between the matcher and readers.
class LatencyTracker {
  public:
    void add(const LatencyRecord& record);
    [[nodiscard]] LatencySummary summary() const;
    [[nodiscard]] std::vector<LatencyRecord> records() const;
    /// Median operator latency, or nullopt before the first record.
    [[nodiscard]] std::optional<double> median_operator_ms() const;

  private:
    mutable std::mutex mutex_;
    std::vector<LatencyRecord> records_;
};

}// namespace tcep

#endif// TCEP_LATENCY_HPP_
