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

#include <tcep/latency.hpp>

#include <algorithm>
#include <cmath>

namespace tcep {

Quantiles quantiles(std::vector<double> values) {
    Quantiles q;
    if (values.empty()) {
        return q;
    }
    std::sort(values.begin(), values.end());
    const auto rank = [&](double p) {
        const auto n = values.size();
        auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
        return values[std::clamp<std::size_t>(idx, 1, n) - 1];
    };
    q.count = values.size();
    q.p50 = rank(0.50);
    q.p90 = rank(0.90);
    q.p99 = rank(0.99);
    q.max = values.back();
    return q;
}

void LatencyTracker::add(const LatencyRecord& record) {
    std::lock_guard lock(mutex_);
    records_.push_back(record);
}

std::vector<LatencyRecord> LatencyTracker::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

LatencySummary LatencyTracker::summary() const {
    std::vector<double> pre;
    std::vector<double> op;
    std::vector<double> total;
    {
        std::lock_guard lock(mutex_);
        for (const auto& r : records_) {
            if (r.preprocessing_ms) {
                pre.push_back(*r.preprocessing_ms);
            }
            op.push_back(r.operator_ms);
            total.push_back(r.total_ms);
        }
    }
    return LatencySummary{quantiles(std::move(pre)), quantiles(std::move(op)), quantiles(std::move(total))};
}

std::optional<double> LatencyTracker::median_operator_ms() const {
    std::vector<double> op;
    {
        std::lock_guard lock(mutex_);
        if (records_.empty()) {
            return std::nullopt;
        }
        for (const auto& r : records_) {
            op.push_back(r.operator_ms);
        }
    }
    return quantiles(std::move(op)).p50;
}

}// namespace tcep
