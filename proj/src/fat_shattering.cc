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

#include "stochres/fat_shattering.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "stochres/errors.h"

namespace stochres {

namespace {

// Absorbs rounding in t +- gamma for thresholds built as midpoints.
constexpr double kSlack = 1e-12;

bool above(double v, double t, double gamma) {
    return v >= t + gamma - kSlack;
}

bool below(double v, double t, double gamma) {
    return v <= t - gamma + kSlack;
}

std::vector<double> candidate_thresholds(const FunctionTable &values, std::size_t instance, double gamma) {
    std::vector<double> col;
    col.reserve(values.size());
    for (const auto &row : values) {
        col.push_back(row[instance]);
    }
    std::sort(col.begin(), col.end());
    col.erase(std::unique(col.begin(), col.end()), col.end());
    std::vector<double> out;
    for (double a : col) {
        auto it = std::lower_bound(col.begin(), col.end(), a + 2.0 * gamma - kSlack);
        if (it != col.end()) {
            out.push_back(0.5 * (a + *it));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

class Search {
  public:
    Search(const FunctionTable &values, double gamma, std::uint64_t budget)
        : values_(values), gamma_(gamma), budget_(budget) {
    }

    /// Tries every threshold tuple for one instance subset.
    bool try_subset(const std::vector<std::size_t> &subset, const std::vector<std::vector<double>> &candidates,
                    ShatterWitness &witness) {
        std::size_t d = subset.size();
        std::vector<std::size_t> pick(d, 0);
        for (std::size_t j = 0; j < d; ++j) {
            if (candidates[subset[j]].empty()) {
                return false;
            }
        }
        std::vector<double> t(d);
        while (true) {
            for (std::size_t j = 0; j < d; ++j) {
                t[j] = candidates[subset[j]][pick[j]];
            }
            if (realizes_all(subset, t, witness)) {
                return true;
            }
            std::size_t j = d;
            while (j > 0) {
                --j;
                if (++pick[j] < candidates[subset[j]].size()) {
                    break;
                }
                pick[j] = 0;
                if (j == 0) {
                    return false;
                }
            }
        }
    }

    std::uint64_t work() const {
        return work_;
    }

  private:
    bool realizes_all(const std::vector<std::size_t> &subset, const std::vector<double> &t, ShatterWitness &witness) {
        std::size_t d = subset.size();
        std::size_t patterns = std::size_t{1} << d;
        std::vector<std::size_t> first(patterns, values_.size());
        std::size_t found = 0;
        work_ += values_.size();
        if (work_ > budget_) {
            throw Error(ErrorKind::kSearchBudgetExceeded,
                        "fat-shattering search exceeded " + std::to_string(budget_) + " function evaluations");
        }
        for (std::size_t f = 0; f < values_.size(); ++f) {
            std::size_t mask = 0;
            bool decided = true;
            for (std::size_t j = 0; j < d && decided; ++j) {
                double v = values_[f][subset[j]];
                if (above(v, t[j], gamma_)) {
                    mask |= std::size_t{1} << j;
                } else if (!below(v, t[j], gamma_)) {
                    decided = false;
                }
            }
            if (decided && first[mask] == values_.size()) {
                first[mask] = f;
                if (++found == patterns) {
                    break;
                }
            }
        }
        if (found != patterns) {
            return false;
        }
        witness.instances = subset;
        witness.thresholds = t;
        witness.functions = first;
        witness.gamma = gamma_;
        return true;
    }

    const FunctionTable &values_;
    double gamma_;
    std::uint64_t budget_;
    std::uint64_t work_ = 0;
};

bool next_combination(std::vector<std::size_t> &c, std::size_t n) {
    std::size_t d = c.size();
    std::size_t j = d;
    while (j > 0) {
        --j;
        if (c[j] < n - d + j) {
            ++c[j];
            for (std::size_t k = j + 1; k < d; ++k) {
                c[k] = c[k - 1] + 1;
            }
            return true;
        }
    }
    return false;
}

}  // namespace

ShatterResult fat_shattering_lower_bound(const FunctionTable &values, double gamma, const ShatterOptions &options) {
    if (!(gamma > 0.0)) {
        throw Error(ErrorKind::kInvalidArgument, "gamma must be positive");
    }
    if (values.empty()) {
        throw Error(ErrorKind::kInvalidArgument, "empty function class");
    }
    std::size_t instances = values.front().size();
    if (values.size() > kMaxShatterFunctions || instances > kMaxShatterInstances) {
        throw Error(ErrorKind::kSearchBudgetExceeded, "class exceeds the exhaustive search limits");
    }
    for (const auto &row : values) {
        if (row.size() != instances) {
            throw Error(ErrorKind::kInvalidArgument, "ragged function table");
        }
        for (double v : row) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw Error(ErrorKind::kInvalidArgument, "function values must lie in [0, 1]");
            }
        }
    }
    std::vector<std::vector<double>> candidates(instances);
    if (options.thresholds) {
        if (options.thresholds->size() != instances) {
            throw Error(ErrorKind::kInvalidArgument, "need one pinned threshold per instance");
        }
        for (std::size_t i = 0; i < instances; ++i) {
            candidates[i] = {(*options.thresholds)[i]};
        }
    } else {
        for (std::size_t i = 0; i < instances; ++i) {
            candidates[i] = candidate_thresholds(values, i, gamma);
        }
    }

    Search search(values, gamma, options.budget);
    ShatterResult result;
    result.witness.gamma = gamma;
    for (std::size_t d = 1; d <= instances; ++d) {
        std::vector<std::size_t> subset(d);
        for (std::size_t j = 0; j < d; ++j) {
            subset[j] = j;
        }
        ShatterWitness w;
        bool ok = false;
        do {
            if (search.try_subset(subset, candidates, w)) {
                ok = true;
                break;
            }
        } while (next_combination(subset, instances));
        if (!ok) {
            break;  // any superset of an unshattered size fails too
        }
        result.dimension = d;
        result.witness = w;
    }
    result.work = search.work();
    if (result.dimension > 0 && !verify_witness(values, result.witness)) {
        throw Error(ErrorKind::kNumericCheckFailure, "shattering witness failed re-verification");
    }
    return result;
}

bool verify_witness(const FunctionTable &values, const ShatterWitness &witness) {
    std::size_t d = witness.instances.size();
    if (witness.thresholds.size() != d || witness.functions.size() != (std::size_t{1} << d)) {
        return false;
    }
    for (std::size_t mask = 0; mask < witness.functions.size(); ++mask) {
        std::size_t f = witness.functions[mask];
        if (f >= values.size()) {
            return false;
        }
        for (std::size_t j = 0; j < d; ++j) {
            double v = values[f].at(witness.instances[j]);
            double t = witness.thresholds[j];
            bool ok = (mask >> j & 1U) ? v >= t + witness.gamma - kSlack : v <= t - witness.gamma + kSlack;
            if (!ok) {
                return false;
            }
        }
    }
    return true;
}

FunctionTable switching_subset_class(const SwitchingFamily &family) {
    if (family.k > 16) {
        throw Error(ErrorKind::kSearchBudgetExceeded, "subset class of more than 16 signals");
    }
    std::vector<std::vector<double>> at_center;
    for (double c : family.centers) {
        at_center.push_back(family.evaluate(c));
    }
    FunctionTable table;
    for (std::size_t subset = 0; subset < (std::size_t{1} << family.k); ++subset) {
        std::vector<double> row(family.k, 0.0);
        for (std::size_t i = 0; i < family.k; ++i) {
            for (std::size_t j = 0; j < family.k; ++j) {
                if (subset >> j & 1U) {
                    row[i] += at_center[i][j];
                }
            }
            row[i] = std::clamp(row[i], 0.0, 1.0);
        }
        table.push_back(std::move(row));
    }
    return table;
}

nlohmann::json to_json(const ShatterWitness &witness) {
    return {
        {"instances", witness.instances},
        {"thresholds", witness.thresholds},
        {"functions", witness.functions},
        {"gamma", witness.gamma},
    };
}

}  // namespace stochres
