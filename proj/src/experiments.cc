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

#include "stochres/experiments.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "stochres/errors.h"
#include "stochres/rng.h"
#include "stochres/target_basis.h"

namespace stochres {

ReservoirSpec noisy_shift_register(int n, double noise) {
    if (n < 1 || n > kMaxExactBits) {
        throw Error(ErrorKind::kInvalidArgument, "shift register size out of range");
    }
    if (!(noise >= 0.0 && noise <= 0.5)) {
        throw Error(ErrorKind::kInvalidArgument, "noise must lie in [0, 0.5]");
    }
    ReservoirSpec spec;
    spec.n = n;
    for (int i = n - 1; i >= 1; --i) {
        spec.gates.push_back(StochasticGate::copy(i - 1, i));
    }
    spec.gates.push_back(StochasticGate::reset(0, DriveFunction::polynomial({0.5, 0.5})));
    for (int i = 0; i < n; ++i) {
        spec.gates.push_back(StochasticGate::flip(i, DriveFunction::constant(noise)));
    }
    return spec;
}

double noisy_shift_register_ipc(int n, double noise) {
    double c2 = (1.0 - 2.0 * noise) * (1.0 - 2.0 * noise);
    double ipc = 1.0;
    double term = 1.0;
    for (int i = 1; i <= n; ++i) {
        term *= c2;
        ipc *= 1.0 + term;
    }
    return ipc;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw Error(ErrorKind::kInvalidArgument, "line fit needs at least two paired points");
    }
    auto m = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw Error(ErrorKind::kInvalidArgument, "line fit needs distinct abscissae");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - fit.intercept - fit.slope * x[i];
        ssr += r * r;
    }
    fit.residual_rms = std::sqrt(ssr / m);
    fit.slope_stderr = x.size() > 2 ? std::sqrt(ssr / (m - 2.0) / sxx) : 0.0;
    return fit;
}

namespace {

struct Moments {
    std::vector<double> sum_p;
    std::vector<double> sum_p2;
    std::size_t rows = 0;

    explicit Moments(std::size_t d) : sum_p(d, 0.0), sum_p2(d, 0.0) {
    }

    void add(const std::vector<double> &p) {
        for (std::size_t k = 0; k < p.size(); ++k) {
            sum_p[k] += p[k];
            sum_p2[k] += p[k] * p[k];
        }
        ++rows;
    }

    double ipc() const {
        double v = 0.0;
        for (std::size_t k = 0; k < sum_p.size(); ++k) {
            if (sum_p[k] > 0.0) {
                v += sum_p2[k] / sum_p[k];
            }
        }
        return v;
    }

    void merge(const Moments &other) {
        for (std::size_t k = 0; k < sum_p.size(); ++k) {
            sum_p[k] += other.sum_p[k];
            sum_p2[k] += other.sum_p2[k];
        }
        rows += other.rows;
    }
};

}  // namespace

ScalingCurve scan_system_size(const ReservoirFamily &family, std::span<const int> n_values, double noise,
                              const InputMeasure &measure, const ScanBudget &budget) {
    if (!(noise >= 0.0 && noise <= 0.5)) {
        throw Error(ErrorKind::kInvalidArgument, "noise must lie in [0, 0.5]");
    }
    if (budget.batches < 2 || budget.steps < budget.batches) {
        throw Error(ErrorKind::kInvalidArgument, "need at least two batches with one step each");
    }
    measure.validate();
    ScalingCurve curve;
    curve.noise = noise;
    for (int n : n_values) {
        if (n > kMaxScanBits) {
            throw Error(ErrorKind::kExactModeOverflow,
                        "n=" + std::to_string(n) + " exceeds the exact-mode limit of " + std::to_string(kMaxScanBits));
        }
        if (n < 1) {
            throw Error(ErrorKind::kInvalidArgument, "n must be positive");
        }
    }
    for (int n : n_values) {
        Reservoir res = build_reservoir(family(n, noise));
        std::size_t washout = budget.washout ? budget.washout : 2 * static_cast<std::size_t>(n);
        std::vector<double> drive = measure.sample(washout + budget.steps, static_cast<std::uint64_t>(n));
        BitstringDistribution init = res.initial_state();
        std::vector<double> p(init.probs().begin(), init.probs().end());
        for (std::size_t t = 0; t < washout; ++t) {
            res.step_exact_inplace(p, drive[t]);
        }
        std::size_t dim = p.size();
        std::vector<Moments> batches(budget.batches, Moments(dim));
        for (std::size_t t = 0; t < budget.steps; ++t) {
            res.step_exact_inplace(p, drive[washout + t]);
            batches[t * budget.batches / budget.steps].add(p);
        }
        Moments all(dim);
        std::vector<double> per_batch;
        for (const auto &b : batches) {
            all.merge(b);
            per_batch.push_back(b.ipc());
        }
        double mean = std::accumulate(per_batch.begin(), per_batch.end(), 0.0) / static_cast<double>(per_batch.size());
        double var = 0.0;
        for (double v : per_batch) {
            var += (v - mean) * (v - mean);
        }
        var /= static_cast<double>(per_batch.size() - 1);
        curve.n.push_back(n);
        curve.ipc.push_back(all.ipc());
        curve.ipc_stderr.push_back(std::sqrt(var / static_cast<double>(per_batch.size())));
    }

    if (curve.n.size() >= 2) {
        std::vector<double> x;
        std::vector<double> lx;
        std::vector<double> ly;
        for (std::size_t i = 0; i < curve.n.size(); ++i) {
            x.push_back(curve.n[i]);
            lx.push_back(std::log(static_cast<double>(curve.n[i])));
            ly.push_back(std::log(curve.ipc[i]));
        }
        curve.log_ipc_vs_n = fit_line(x, ly);
        if (curve.n.front() != curve.n.back() || curve.n.size() > 2) {
            curve.log_ipc_vs_log_n = fit_line(lx, ly);
        }
        curve.subexponential_consistent =
            curve.log_ipc_vs_n.slope < std::log(2.0) - 3.0 * curve.log_ipc_vs_n.slope_stderr;
        curve.ratio_strictly_decreasing = true;
        for (std::size_t i = 1; i < curve.n.size(); ++i) {
            double prev = curve.ipc[i - 1] / std::ldexp(1.0, curve.n[i - 1]);
            double cur = curve.ipc[i] / std::ldexp(1.0, curve.n[i]);
            if (!(cur < prev)) {
                curve.ratio_strictly_decreasing = false;
            }
        }
    }
    return curve;
}

const char *tail_kind_name(TailFit::Kind kind) {
    switch (kind) {
    case TailFit::Kind::kPolynomial:
        return "polynomial";
    case TailFit::Kind::kExponential:
        return "exponential";
    case TailFit::Kind::kInconclusive:
        return "inconclusive";
    }
    return "unknown";
}

TailFit classify_tails(std::span<const double> grid, std::span<const double> values, std::optional<TailRegion> region,
                       double origin) {
    if (grid.size() != values.size() || grid.size() < 3) {
        throw Error(ErrorKind::kInvalidArgument, "tail fit needs matching grid and values");
    }
    TailRegion r;
    if (region) {
        r = *region;
    } else {
        r.lo = grid[grid.size() / 2];
        r.hi = grid.back();
    }
    std::vector<double> u;
    std::vector<double> lu;
    std::vector<double> lp;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < r.lo || grid[i] > r.hi) {
            continue;
        }
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            throw Error(ErrorKind::kNonpositiveSignal, "signal is not positive at u=" + std::to_string(grid[i]));
        }
        if (!(grid[i] - origin > 0.0)) {
            throw Error(ErrorKind::kInvalidArgument, "tail region must lie above the origin");
        }
        u.push_back(grid[i]);
        lu.push_back(std::log(grid[i] - origin));
        lp.push_back(std::log(values[i]));
    }
    if (u.size() < 3) {
        throw Error(ErrorKind::kInvalidArgument, "tail region holds fewer than three points");
    }
    LinearFit poly = fit_line(lu, lp);
    LinearFit expo = fit_line(u, lp);
    TailFit out;
    out.degree = -poly.slope;
    out.rate = -expo.slope;
    out.residual_polynomial = poly.residual_rms;
    out.residual_exponential = expo.residual_rms;
    out.region_lo = r.lo;
    out.region_hi = r.hi;
    out.points = u.size();
    double hi = std::max(poly.residual_rms, expo.residual_rms);
    double lo = std::min(poly.residual_rms, expo.residual_rms);
    if (hi - lo <= 0.1 * hi) {
        out.kind = TailFit::Kind::kInconclusive;
    } else if (poly.residual_rms < expo.residual_rms) {
        out.kind = TailFit::Kind::kPolynomial;
    } else {
        out.kind = TailFit::Kind::kExponential;
    }
    return out;
}

const char *tail_family_name(TailKind kind) {
    return kind == TailKind::kExponential ? "exponential" : "polynomial";
}

double SwitchingFamily::min_peak() const {
    return *std::min_element(peaks.begin(), peaks.end());
}

std::vector<double> SwitchingFamily::evaluate(double u) const {
    std::vector<double> out(k);
    if (kind == TailKind::kExponential) {
        // Work in log2 so far-away drives do not underflow every bump.
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) {
            out[i] = -sharpness * std::abs(u - centers[i]);
            top = std::max(top, out[i]);
        }
        for (auto &v : out) {
            v = std::exp2(v - top);
        }
    } else {
        for (std::size_t i = 0; i < k; ++i) {
            double z = (u - centers[i]) / sharpness;
            out[i] = 1.0 / (1.0 + z * z);
        }
    }
    double total = std::accumulate(out.begin(), out.end(), 0.0);
    for (auto &v : out) {
        v /= total;
    }
    return out;
}

SwitchingFamily switching_family(TailKind kind, std::size_t k, double lo, double hi, double sharpness,
                                 std::size_t grid_points) {
    if (k == 0) {
        throw Error(ErrorKind::kInvalidArgument, "need at least one signal");
    }
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorKind::kInvalidArgument, "domain must be a finite interval");
    }
    if (!(sharpness > 0.0) || !std::isfinite(sharpness)) {
        throw Error(ErrorKind::kInvalidArgument, "sharpness must be positive");
    }
    if (grid_points < 2) {
        throw Error(ErrorKind::kInvalidArgument, "grid needs two points");
    }
    SwitchingFamily fam;
    fam.kind = kind;
    fam.k = k;
    fam.sharpness = sharpness;
    fam.lo = lo;
    fam.hi = hi;
    double width = (hi - lo) / static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i) {
        fam.centers.push_back(lo + (static_cast<double>(i) + 0.5) * width);
    }
    fam.signals.assign(k, std::vector<double>(grid_points));
    for (std::size_t g = 0; g < grid_points; ++g) {
        double u = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
        fam.grid.push_back(u);
        auto v = fam.evaluate(u);
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            fam.signals[i][g] = v[i];
            total += v[i];
        }
        fam.normalization_residual = std::max(fam.normalization_residual, std::abs(total - 1.0));
    }
    for (std::size_t i = 0; i < k; ++i) {
        double peak = fam.evaluate(fam.centers[i])[i];
        fam.peaks.push_back(peak);
        fam.confusion.push_back(1.0 - peak);
    }
    return fam;
}

double hwhm_matched_width(double beta) {
    if (!(beta > 0.0)) {
        throw Error(ErrorKind::kInvalidArgument, "beta must be positive");
    }
    return 1.0 / beta;
}

BetaSweep sweep_exponential_beta(std::size_t k, double lo, double hi, double target_min_peak, double beta_start,
                                 double beta_step, double beta_stop) {
    if (!(beta_start > 0.0) || !(beta_step > 0.0) || beta_stop < beta_start) {
        throw Error(ErrorKind::kInvalidArgument, "bad beta sweep range");
    }
    BetaSweep sweep;
    auto count = static_cast<std::size_t>(std::floor((beta_stop - beta_start) / beta_step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
        double beta = beta_start + beta_step * static_cast<double>(i);
        double peak = switching_family(TailKind::kExponential, k, lo, hi, beta, 2).min_peak();
        sweep.beta.push_back(beta);
        sweep.min_peak.push_back(peak);
        if (!sweep.selected && peak >= target_min_peak) {
            sweep.selected = beta;
        }
    }
    return sweep;
}

PowerBasisReport power_basis_demo(int n, std::size_t rows, const InputMeasure &measure, int extra_degrees) {
    if (n < 1 || n > kMaxPowerBasisBits) {
        throw Error(ErrorKind::kInvalidArgument, "power basis demo supports 1 <= n <= 6");
    }
    if (extra_degrees < 0) {
        throw Error(ErrorKind::kInvalidArgument, "extra_degrees must be non-negative");
    }
    measure.validate();
    std::size_t cols = std::size_t{1} << n;
    std::vector<double> x = measure.sample(rows, 0);

    SignalMatrix signals;
    signals.mode = SignalMode::kMoment;
    signals.n = n;
    signals.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t t = 0; t < rows; ++t) {
        double v = 1.0;
        for (std::size_t j = 0; j < cols; ++j) {
            signals.data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = v;
            v *= x[t];
        }
    }
    for (std::size_t j = 0; j < cols; ++j) {
        signals.labels.push_back(j);
    }

    PowerBasisReport rep;
    rep.n = n;
    rep.rows = rows;
    rep.columns = cols;
    Eigen::MatrixXd g1 = signals.data.transpose() * signals.data / static_cast<double>(rows);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g1, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues().reverse();
    rep.g1_eigenvalues.assign(ev.data(), ev.data() + ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) >= rep.rank_tolerance * ev(0)) {
            ++rep.numeric_rank;
        }
    }
    if (rep.numeric_rank < cols) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "n=%d: numeric rank %zu of %zu at relative tolerance %.3g (eigenvalues %.3e .. %.3e)", n,
                      rep.numeric_rank, cols, rep.rank_tolerance, ev(0), ev(ev.size() - 1));
        throw Error(ErrorKind::kConditioningFailure, buf);
    }
    TargetBasis basis = TargetBasis::legendre(measure, 0, static_cast<int>(cols) - 1 + extra_degrees);
    rep.capacity = total_capacity(signals, basis, x, 0);
    return rep;
}

LearnabilityCurve sample_complexity_curve(double q, std::span<const std::size_t> m0_grid, std::size_t trials,
                                          std::uint64_t seed) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw Error(ErrorKind::kInvalidArgument, "q must lie in [0, 1]");
    }
    if (trials < kMinLearnabilityTrials) {
        throw Error(ErrorKind::kInvalidArgument, "need at least 1000 trials");
    }
    LearnabilityCurve curve;
    curve.q = q;
    curve.trials = trials;
    for (std::size_t j = 0; j < m0_grid.size(); ++j) {
        std::size_t m0 = m0_grid[j];
        double exact = std::pow(1.0 - q, static_cast<double>(m0));
        std::size_t zeros = 0;
        for (std::size_t r = 0; r < trials; ++r) {
            CounterStream rng(seed, j, r);
            bool all_zero = true;
            for (std::size_t s = 0; s < m0 && all_zero; ++s) {
                all_zero = !rng.next_bernoulli(q);
            }
            zeros += all_zero ? 1 : 0;
        }
        curve.m0.push_back(m0);
        curve.exact_all_zero.push_back(exact);
        curve.empirical_all_zero.push_back(static_cast<double>(zeros) / static_cast<double>(trials));
        curve.binomial_sigma.push_back(std::sqrt(exact * (1.0 - exact) / static_cast<double>(trials)));
        curve.approximation.push_back(static_cast<double>(m0) * q);
        curve.small_mq.push_back(static_cast<double>(m0) * q < 0.1);
    }
    return curve;
}

std::size_t detection_sample_size(double q) {
    if (!(q > 0.0 && q <= 1.0)) {
        throw Error(ErrorKind::kInvalidArgument, "detection needs q in (0, 1]");
    }
    if (q == 1.0) {
        return 1;
    }
    auto m = static_cast<std::size_t>(std::ceil(std::log(2.0) / -std::log1p(-q)));
    auto miss = [q](std::size_t k) { return std::pow(1.0 - q, static_cast<double>(k)); };
    while (m > 1 && miss(m - 1) <= 0.5) {
        --m;
    }
    while (miss(m) > 0.5) {
        ++m;
    }
    return m;
}

std::vector<DetectionRow> detection_schedule(std::span<const int> n_values) {
    std::vector<DetectionRow> rows;
    for (int n : n_values) {
        if (n < 1 || n > 62) {
            throw Error(ErrorKind::kInvalidArgument, "n out of range");
        }
        DetectionRow row;
        row.n = n;
        row.q = static_cast<double>(n) * static_cast<double>(n) / std::ldexp(1.0, n);
        if (row.q > 1.0) {
            throw Error(ErrorKind::kInvalidArgument, "n^2 / 2^n exceeds 1 at n=" + std::to_string(n));
        }
        row.m0 = detection_sample_size(row.q);
        row.ln2_over_q = std::log(2.0) / row.q;
        row.relative_gap = static_cast<double>(row.m0) / row.ln2_over_q - 1.0;
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json to_json(const LinearFit &fit) {
    return {{"slope", fit.slope},
            {"intercept", fit.intercept},
            {"slope_stderr", fit.slope_stderr},
            {"residual_rms", fit.residual_rms}};
}

nlohmann::json to_json(const ScalingCurve &curve) {
    return {
        {"n", curve.n},
        {"ipc", curve.ipc},
        {"ipc_stderr", curve.ipc_stderr},
        {"lambda", curve.noise},
        {"fit_log_ipc_vs_n", to_json(curve.log_ipc_vs_n)},
        {"fit_log_ipc_vs_log_n", to_json(curve.log_ipc_vs_log_n)},
        {"subexponential_consistent", curve.subexponential_consistent},
        {"ratio_strictly_decreasing", curve.ratio_strictly_decreasing},
    };
}

nlohmann::json to_json(const TailFit &fit) {
    return {
        {"kind", tail_kind_name(fit.kind)},
        {"degree", fit.degree},
        {"rate", fit.rate},
        {"residual_polynomial", fit.residual_polynomial},
        {"residual_exponential", fit.residual_exponential},
        {"region", {fit.region_lo, fit.region_hi}},
        {"points", fit.points},
    };
}

nlohmann::json to_json(const SwitchingFamily &family) {
    return {
        {"kind", tail_family_name(family.kind)},
        {"k", family.k},
        {"sharpness", family.sharpness},
        {"domain", {family.lo, family.hi}},
        {"centers", family.centers},
        {"peaks", family.peaks},
        {"confusion", family.confusion},
        {"min_peak", family.min_peak()},
        {"normalization_residual", family.normalization_residual},
    };
}

nlohmann::json to_json(const PowerBasisReport &report) {
    return {
        {"n", report.n},
        {"rows", report.rows},
        {"columns", report.columns},
        {"numeric_rank", report.numeric_rank},
        {"rank_tolerance", report.rank_tolerance},
        {"g1_eigenvalues", report.g1_eigenvalues},
        {"capacity", to_json(report.capacity)},
    };
}

nlohmann::json to_json(const LearnabilityCurve &curve) {
    std::vector<int> small(curve.small_mq.begin(), curve.small_mq.end());
    return {
        {"q", curve.q},
        {"trials", curve.trials},
        {"m0", curve.m0},
        {"exact_all_zero", curve.exact_all_zero},
        {"empirical_all_zero", curve.empirical_all_zero},
        {"binomial_sigma", curve.binomial_sigma},
        {"approximation_m0q", curve.approximation},
        {"small_m0q", small},
    };
}

}  // namespace stochres
