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

// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are the contract values, not tuned to the results.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "../test_util.h"
#include "stochres/capacity.h"
#include "stochres/errors.h"
#include "stochres/experiments.h"
#include "stochres/fat_shattering.h"
#include "stochres/quantum_embed.h"
#include "stochres/readout.h"
#include "stochres/runner.h"

namespace {

using namespace stochres;
using stochres::testing::random_reservoir;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

SignalMatrix exact_series(const Reservoir &res, std::size_t steps, std::size_t washout, std::uint64_t seed) {
    auto drive = InputMeasure::uniform(-1, 1, seed).sample(steps + washout);
    return probability_signals(res.run_exact(InputSequence::scalar(drive, washout)));
}

Outcome method_agreement() {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        int n = 1 + i % 6;
        Reservoir res = build_reservoir(random_reservoir(n, 1000 + static_cast<std::uint64_t>(i)));
        SignalMatrix s = exact_series(res, 400, 4 * static_cast<std::size_t>(n), static_cast<std::uint64_t>(i));
        auto g = gram_matrices(s);
        double spectral = ipc_spectral(eigentask_decomposition(g.g1, g.g2)).value;
        double trace = ipc_probability_rep(s).value;
        worst = std::max(worst, std::abs(spectral - trace));
    }
    return {worst <= 1e-8, fmt("50 reservoirs, max |spectral - trace| = %.3g (tol 1e-8)", worst)};
}

Outcome bound_suite() {
    std::size_t cases = 0, violations = 0, exceptions = 0;
    for (int i = 0; i < 1000; ++i) {
        int n = 1 + i % 5;
        try {
            Reservoir res = build_reservoir(random_reservoir(n, 5000 + static_cast<std::uint64_t>(i)));
            std::vector<double> drive;
            auto measure = InputMeasure::uniform(-1, 1, static_cast<std::uint64_t>(i));
            drive = measure.sample(300 + 4);
            SignalMatrix s = probability_signals(res.run_exact(InputSequence::scalar(drive, 4)));
            auto g = gram_matrices(s);
            auto d = eigentask_decomposition(g.g1, g.g2);
            double spectral = ipc_spectral(d).value;
            if (!(spectral >= 0.0 && spectral <= static_cast<double>(d.retained_rank) + 1e-9)) {
                ++violations;
            }
            double trace = ipc_probability_rep(s).value;
            if (!(trace <= static_cast<double>(s.cols()) + 1e-9)) {
                ++violations;
            }
            auto basis = TargetBasis::legendre(measure, 2, 2);
            IPCReport sum = total_capacity(s, basis, drive, 4);
            for (double c : sum.terms) {
                if (!(c >= 0.0 && c <= 1.0)) {
                    ++violations;
                }
            }
            if (!(sum.value <= static_cast<double>(s.cols()) + 1e-9)) {
                ++violations;
            }
            ++cases;
        } catch (const std::exception &) {
            ++exceptions;
        }
    }
    bool ok = cases >= 1000 && violations == 0 && exceptions == 0;
    return {ok, std::to_string(cases) + " cases, " + std::to_string(violations) + " violations, " +
                    std::to_string(exceptions) + " exceptions"};
}

Outcome closed_form_anchor() {
    ReservoirSpec spec;
    spec.n = 1;
    spec.gates.push_back(StochasticGate::reset(0, DriveFunction::polynomial({0.5, 0.5})));
    Reservoir res = build_reservoir(spec);
    QuadratureRule rule = gauss_legendre(64);
    std::vector<BitstringDistribution> dists;
    for (double u : rule.nodes) {
        dists.push_back(res.step_exact(res.initial_state(), u));
    }
    SignalMatrix s = probability_signals(dists);
    s.row_weights = Eigen::Map<Eigen::VectorXd>(rule.weights.data(), 64);
    auto g = gram_matrices(s);
    auto d = eigentask_decomposition(g.g1, g.g2);
    double ipc = ipc_spectral(d).value;
    bool ok = d.sigma_sq.size() == 2 && std::abs(d.sigma_sq[0]) <= 1e-3 && std::abs(d.sigma_sq[1] - 2.0) <= 1e-3 &&
              std::abs(ipc - 4.0 / 3.0) <= 1e-3;
    char buf[160];
    std::snprintf(buf, sizeof buf, "sigma^2 = {%.6f, %.6f}, IPC = %.6f (want {0, 2}, 4/3, tol 1e-3)",
                  d.sigma_sq.size() > 0 ? d.sigma_sq[0] : NAN, d.sigma_sq.size() > 1 ? d.sigma_sq[1] : NAN, ipc);
    return {ok, buf};
}

Outcome exponential_vs_polynomial() {
    auto power = power_basis_demo(3, 100000, InputMeasure::uniform(-1, 1, 1));
    bool a = power.numeric_rank == 8 && std::abs(power.capacity.value - 8.0) <= 0.05;
    std::vector<int> ns = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    ScanBudget budget;
    budget.seed = 1;
    auto curve = scan_system_size(noisy_shift_register, ns, 0.05, InputMeasure::binary(-1, 1, 1), budget);
    double bound = std::numbers::ln2 - 3.0 * curve.log_ipc_vs_n.slope_stderr;
    bool b = curve.ratio_strictly_decreasing && curve.log_ipc_vs_n.slope < bound;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "(a) rank %zu, capacity %.4f; (b) ratio decreasing %s, slope %.4f < %.4f",
                  power.numeric_rank, power.capacity.value, curve.ratio_strictly_decreasing ? "yes" : "no",
                  curve.log_ipc_vs_n.slope, bound);
    return {a && b, buf};
}

Outcome uniform_noise_limit() {
    std::vector<int> ns = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    auto curve = scan_system_size(noisy_shift_register, ns, 0.5, InputMeasure::binary(-1, 1, 1));
    double worst = 0.0;
    for (double v : curve.ipc) {
        worst = std::max(worst, std::abs(v - 1.0));
    }
    return {worst <= 1e-9, fmt("n = 1..10, max |IPC - 1| = %.3g (tol 1e-9)", worst)};
}

Outcome switching_signals() {
    auto sweep = sweep_exponential_beta(4, 0.0, 1.0, 0.99, 0.5, 0.01, 40.0);
    if (!sweep.selected) {
        return {false, "no beta up to 40 reaches min peak 0.99"};
    }
    double beta = *sweep.selected;
    auto expo = switching_family(TailKind::kExponential, 4, 0.0, 1.0, beta);
    auto poly = switching_family(TailKind::kPolynomial, 4, 0.0, 1.0, hwhm_matched_width(beta));
    double gap = expo.min_peak() - poly.min_peak();
    double resid = std::max(expo.normalization_residual, poly.normalization_residual);
    bool ok = expo.min_peak() >= 0.99 && gap >= 0.05 && resid < 1e-9;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "beta %.2f: exponential min peak %.5f, polynomial %.5f, gap %.4f (need >= 0.05), residual %.2g",
                  beta, expo.min_peak(), poly.min_peak(), gap, resid);
    return {ok, buf};
}

Outcome learnability() {
    std::vector<std::size_t> grid = {1, 10, 100};
    double worst_exact = 0.0, worst_sigma = 0.0;
    for (double q : {0.01, 0.1}) {
        auto c = sample_complexity_curve(q, grid, 10000, 1);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double want = std::pow(1.0 - q, static_cast<double>(grid[i]));
            worst_exact = std::max(worst_exact, std::abs(c.exact_all_zero[i] - want));
            double sigma = std::sqrt(want * (1.0 - want) / 10000.0);
            double dev = std::abs(c.empirical_all_zero[i] - want);
            worst_sigma = std::max(worst_sigma, sigma > 0.0 ? dev / sigma : (dev > 0.0 ? INFINITY : 0.0));
        }
    }
    std::vector<int> ns;
    for (int n = 8; n <= 16; ++n) {
        ns.push_back(n);
    }
    auto rows = detection_schedule(ns);
    double worst_gap = 0.0;
    std::string offenders;
    for (const auto &r : rows) {
        worst_gap = std::max(worst_gap, std::abs(r.relative_gap));
        if (std::abs(r.relative_gap) > 0.05) {
            offenders += " n=" + std::to_string(r.n) + fmt(" (%+.1f%%)", 100.0 * r.relative_gap);
        }
    }
    bool ok = worst_exact <= 1e-12 && worst_sigma <= 3.0 && worst_gap <= 0.05;
    char buf[256];
    std::snprintf(buf, sizeof buf, "exact err %.2g, worst empirical dev %.2f sigma, worst m0 gap vs ln2/q %.1f%%",
                  worst_exact, worst_sigma, 100.0 * worst_gap);
    std::string detail = buf;
    if (!offenders.empty()) {
        detail += ";" + offenders;
    }
    return {ok, detail};
}

Outcome fat_shattering() {
    FunctionTable single = {{0.2, 0.8, 0.5}};
    auto r0 = fat_shattering_lower_bound(single, 0.1);
    FunctionTable two = {{0.0}, {1.0}};
    auto r1 = fat_shattering_lower_bound(two, 0.4);
    auto sweep = sweep_exponential_beta(4, 0.0, 1.0, 0.99, 0.5, 0.01, 40.0);
    auto family = switching_family(TailKind::kExponential, 4, 0.0, 1.0, sweep.selected.value_or(40.0));
    FunctionTable cls = switching_subset_class(family);
    auto r2 = fat_shattering_lower_bound(cls, 0.3, {.thresholds = std::vector<double>(4, 0.5)});
    bool verified = verify_witness(two, r1.witness) && verify_witness(cls, r2.witness) &&
                    (r0.dimension == 0 || verify_witness(single, r0.witness));
    bool ok = r0.dimension == 0 && r1.dimension == 1 && r2.dimension >= 2 && verified;
    return {ok, "singleton d=" + std::to_string(r0.dimension) + ", {0,1} d=" + std::to_string(r1.dimension) +
                    ", switching K=4 d=" + std::to_string(r2.dimension) + (verified ? ", witnesses verified" : ", witness check failed")};
}

Outcome appendix_suite() {
    double diag = 0.0;
    for (double p : {0.0, 0.25, 0.5, 1.0}) {
        auto out = bernoulli_channel(p, DensityMatrix::basis_state(1, 0)).output.rho;
        diag = std::max({diag, std::abs(out(0, 0).real() - p), std::abs(out(1, 1).real() - (1.0 - p))});
    }
    CounterStream rng(42, 9, 0);
    double paths = 0.0;
    for (int i = 0; i < 100; ++i) {
        Eigen::Matrix2cd a;
        for (int k = 0; k < 4; ++k) {
            a.data()[k] = {rng.next_double() - 0.5, rng.next_double() - 0.5};
        }
        DensityMatrix rho;
        rho.rho = a * a.adjoint();
        rho.rho /= rho.rho.trace().real();
        paths = std::max(paths, bernoulli_channel(rng.next_double(), rho).path_disagreement);
    }
    auto cos2 = [](double t) { return std::cos(t) * std::cos(t); };
    double order = rate_convergence_order(cos2, 0.1, 1.4, 1e-3);
    double leak = 0.0;
    for (double theta : {0.0, std::numbers::pi / 6, std::numbers::pi / 2}) {
        leak = std::max(leak, correlated_flip_check(2, 0, 1, theta).leaked_population);
    }
    bool ok = diag <= 1e-12 && paths <= 1e-12 && std::abs(order - 2.0) <= 0.2 && leak <= 1e-12;
    char buf[256];
    std::snprintf(buf, sizeof buf, "diagonal err %.2g, path gap %.2g, rate order %.3f, flip leak %.2g", diag, paths,
                  order, leak);
    return {ok, buf};
}

Outcome transforms() {
    CounterStream rng(77, 10, 0);
    double worst = 0.0;
    for (int c = 0; c < 100; ++c) {
        int n = 1 + c % 12;
        std::size_t dim = std::size_t{1} << n;
        auto p = stochres::testing::random_distribution(dim, rng);
        auto m = moments_from_probabilities(p, n);
        auto back = probabilities_from_moments(m, n);
        for (std::size_t a = 0; a < dim; ++a) {
            double brute = 0.0;
            for (std::size_t x = 0; x < dim; ++x) {
                if ((x & a) == a) {
                    brute += p[x];
                }
            }
            worst = std::max({worst, std::abs(brute - m[a]), std::abs(back[a] - p[a])});
        }
    }
    return {worst <= 1e-12, fmt("100 cases n = 1..12, max error %.3g (tol 1e-12)", worst)};
}

Outcome reproducibility() {
    namespace fs = std::filesystem;
    fs::path root = fs::temp_directory_path() / "stochres_acceptance_repro";
    fs::remove_all(root);
    std::size_t compared = 0;
    std::string mismatched;
    for (const auto &name : experiment_names()) {
        RunConfig one;
        one.experiment = name;
        one.seed = 20261016;
        one.out_dir = root / (name + "_t1");
        RunConfig eight = one;
        eight.threads = 8;
        eight.out_dir = root / (name + "_t8");
        auto a = run_experiment(one);
        auto b = run_experiment(eight);
        if (a.files.size() != b.files.size()) {
            mismatched += " " + name;
            continue;
        }
        for (std::size_t i = 0; i < a.files.size(); ++i) {
            ++compared;
            if (a.files[i].path != b.files[i].path || a.files[i].sha256 != b.files[i].sha256) {
                mismatched += " " + name + "/" + a.files[i].path;
            }
        }
    }
    fs::remove_all(root);
    return {mismatched.empty() && compared > 0,
            std::to_string(compared) + " artifacts compared at 1 vs 8 threads" +
                (mismatched.empty() ? ", all byte-identical" : ", differ:" + mismatched)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"method agreement", method_agreement},
        {"bound suite", bound_suite},
        {"closed-form anchor", closed_form_anchor},
        {"deterministic exponential vs noisy polynomial", exponential_vs_polynomial},
        {"uniform-noise limit", uniform_noise_limit},
        {"switching signals", switching_signals},
        {"learnability curve", learnability},
        {"fat-shattering brute force", fat_shattering},
        {"appendix suite", appendix_suite},
        {"transform correctness", transforms},
        {"reproducibility", reproducibility},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        auto start = std::chrono::steady_clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
