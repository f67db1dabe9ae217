// Copyright 2026 The stochres Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stochres/fading_memory.h"

#include <algorithm>
#include <string>

#include "stochres/errors.h"

namespace stochres {

FadingMemoryReport fading_memory_error(const Reservoir &reservoir, std::size_t window, const InputMeasure &measure,
                                       std::size_t trials, const FadingMemoryOptions &options) {
    if (window < 1) {
        throw Error(ErrorKind::kInvalidArgument, "window h must be >= 1");
    }
    if (trials < 10) {
        throw Error(ErrorKind::kInsufficientTrials, "need at least 10 trials, got " + std::to_string(trials));
    }
    if (options.resamples < 2) {
        throw Error(ErrorKind::kInvalidArgument, "need at least 2 resampled histories");
    }
    const std::size_t dim = std::size_t{1} << reservoir.n();
    const std::size_t total = options.history_length + window;

    InputMeasure recent_measure = measure;
    recent_measure.seed = options.seed;
    InputMeasure older_measure = measure;
    older_measure.seed = options.seed ^ 0x9E3779B97F4A7C15ULL;

    FadingMemoryReport report;
    report.window = window;
    report.trials = trials;
    report.per_component.assign(dim, 0.0);

    std::vector<double> samples(options.resamples * dim);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        std::vector<double> recent = recent_measure.sample(window, trial);
        for (std::size_t r = 0; r < options.resamples; ++r) {
            std::vector<double> drive = older_measure.sample(options.history_length, trial * options.resamples + r);
            drive.insert(drive.end(), recent.begin(), recent.end());
            InputSequence seq = InputSequence::scalar(drive, total - 1);
            auto dists = reservoir.run_exact(seq);
            auto p = dists.back().probs();
            std::copy(p.begin(), p.end(), samples.begin() + static_cast<std::ptrdiff_t>(r * dim));
        }
        for (std::size_t k = 0; k < dim; ++k) {
            double mean = 0.0;
            for (std::size_t r = 0; r < options.resamples; ++r) {
                mean += samples[r * dim + k];
            }
            mean /= static_cast<double>(options.resamples);
            double ss = 0.0;
            for (std::size_t r = 0; r < options.resamples; ++r) {
                double d = samples[r * dim + k] - mean;
                ss += d * d;
            }
            report.per_component[k] += ss / static_cast<double>(options.resamples - 1);
        }
    }
    double sum = 0.0;
    for (double &e : report.per_component) {
        e /= static_cast<double>(trials);
        sum += e;
        report.max_error = std::max(report.max_error, e);
    }
    report.mean_error = sum / static_cast<double>(dim);
    return report;
}

}  // namespace stochres
