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

#include "stochres/runner.h"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "stochres/capacity.h"
#include "stochres/csv.h"
#include "stochres/experiments.h"
#include "stochres/fat_shattering.h"
#include "stochres/quantum_embed.h"
#include "stochres/readout.h"
#include "stochres/reservoir_io.h"
#include "stochres/rng.h"
#include "stochres/target_basis.h"

#ifndef STOCHRES_VERSION_STRING
#define STOCHRES_VERSION_STRING "0.1.0-unknown"
#endif

namespace stochres {

using nlohmann::json;

namespace {

const std::map<std::string, std::vector<std::string>> &param_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"ipc", {"reservoir", "measure", "steps", "washout", "shots", "max_delay", "max_degree"}},
        {"scan-n", {"family", "n_min", "n_max", "lambda", "steps", "batches", "washout", "measure"}},
        {"switching",
         {"k", "lo", "hi", "beta", "target_min_peak", "beta_start", "beta_step", "beta_stop", "grid_points"}},
        {"tails", {"draws", "noise", "grid_points", "lo", "hi"}},
        {"power-basis", {"n", "rows", "extra_degrees", "measure"}},
        {"learnability", {"q", "m0", "trials", "detection_n"}},
        {"fat-shatter",
         {"k", "lo", "hi", "beta", "target_min_peak", "kind", "gamma", "thresholds", "budget"}},
        {"embed-check", {"random_cases"}},
    };
    return keys;
}

const std::vector<std::string> kToleranceKeys = {"rank_tolerance", "capacity_threshold"};

[[noreturn]] void config_error(const std::string &msg) {
    throw Error(ErrorKind::kConfigValidation, msg);
}

void reject_unknown(const json &obj, const std::vector<std::string> &allowed, const std::string &context) {
    if (!obj.is_object()) {
        config_error(context + " must be an object");
    }
    for (const auto &item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            config_error("unknown key \"" + item.key() + "\" in " + context);
        }
    }
}

/// Typed lookups with defaults; type mismatches become ConfigValidation.
class Params {
  public:
    explicit Params(const json &obj) : obj_(obj) {
    }

    template <typename T>
    T get(const std::string &key, T fallback) const {
        if (!obj_.contains(key) || obj_.at(key).is_null()) {
            return fallback;
        }
        try {
            return obj_.at(key).get<T>();
        } catch (const json::exception &e) {
            config_error("bad value for \"" + key + "\": " + e.what());
        }
    }

    bool has(const std::string &key) const {
        return obj_.contains(key) && !obj_.at(key).is_null();
    }

    const json &raw(const std::string &key) const {
        return obj_.at(key);
    }

  private:
    const json &obj_;
};

InputMeasure measure_from_json(const json &doc, InputMeasure fallback, std::uint64_t seed) {
    InputMeasure m = fallback;
    m.seed = seed;
    if (doc.is_null()) {
        return m;
    }
    reject_unknown(doc, {"kind", "lo", "hi", "order", "seed"}, "measure");
    Params p(doc);
    std::string kind = p.get<std::string>("kind", "uniform");
    if (kind == "uniform") {
        m.kind = InputMeasure::Kind::kUniformInterval;
    } else if (kind == "binary") {
        m.kind = InputMeasure::Kind::kUniformBinary;
    } else if (kind == "quadrature") {
        m.kind = InputMeasure::Kind::kQuadratureGrid;
    } else {
        config_error("unknown measure kind \"" + kind + "\"");
    }
    m.lo = p.get<double>("lo", m.lo);
    m.hi = p.get<double>("hi", m.hi);
    m.order = p.get<std::size_t>("order", m.order);
    m.seed = p.get<std::uint64_t>("seed", seed);
    m.validate();
    return m;
}

const char *measure_kind_name(InputMeasure::Kind kind) {
    switch (kind) {
    case InputMeasure::Kind::kUniformInterval:
        return "uniform";
    case InputMeasure::Kind::kUniformBinary:
        return "binary";
    case InputMeasure::Kind::kQuadratureGrid:
        return "quadrature";
    }
    return "unknown";
}

json measure_to_json(const InputMeasure &m) {
    return {{"kind", measure_kind_name(m.kind)}, {"lo", m.lo}, {"hi", m.hi}, {"order", m.order}, {"seed", m.seed}};
}

ReservoirSpec default_ipc_reservoir() {
    ReservoirSpec spec;
    spec.n = 1;
    spec.gates.push_back(StochasticGate::reset(0, DriveFunction::polynomial({0.5, 0.5})));
    return spec;
}

struct Context {
    const RunConfig &config;
    RunManifest &manifest;
    Params params;
    std::vector<Artifact> out;

    double rank_tolerance() const {
        return Params(config.tolerances).get<double>("rank_tolerance", kDefaultRankTolerance);
    }

    CapacityOptions capacity_options() const {
        CapacityOptions o;
        Params t(config.tolerances);
        if (t.has("capacity_threshold")) {
            o.threshold = t.get<double>("capacity_threshold", 0.0);
        }
        return o;
    }

    void fail(const std::string &check) {
        manifest.checks_passed = false;
        manifest.failed_checks.push_back(check);
    }
};

void run_ipc(Context &ctx) {
    const auto &p = ctx.params;
    ReservoirSpec spec = p.has("reservoir") ? reservoir_spec_from_json(p.raw("reservoir")) : default_ipc_reservoir();
    Reservoir res = build_reservoir(spec);
    InputMeasure measure = measure_from_json(p.has("measure") ? p.raw("measure") : json(),
                                             InputMeasure::quadrature_grid(64, -1.0, 1.0), ctx.config.seed);
    auto steps = p.get<std::size_t>("steps", 2000);
    auto washout = p.get<std::size_t>("washout", 50);
    auto shots = p.get<std::size_t>("shots", 0);
    int max_delay = p.get<int>("max_delay", 2);
    int max_degree = p.get<int>("max_degree", 3);

    SignalMatrix signals;
    std::vector<double> drive;
    std::size_t first = 0;
    std::optional<TargetBasis> basis;
    json doc;
    if (measure.kind == InputMeasure::Kind::kQuadratureGrid) {
        // One step from the initial state per node, weighted by the rule.
        QuadratureRule rule = measure.integration_rule(measure.order);
        std::vector<BitstringDistribution> dists;
        for (double u : rule.nodes) {
            dists.push_back(res.step_exact(res.initial_state(), u));
        }
        signals = probability_signals(dists);
        signals.row_weights = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(),
                                                                 static_cast<Eigen::Index>(rule.weights.size()));
        drive = rule.nodes;
        basis = TargetBasis::legendre(measure, 0, max_degree);
        doc["evaluation"] = "single step per quadrature node";
    } else {
        if (washout < static_cast<std::size_t>(std::max(max_delay, 0))) {
            config_error("washout must cover max_delay");
        }
        drive = measure.sample(washout + steps, 0);
        InputSequence inputs = InputSequence::scalar(drive, washout);
        auto dists = res.run_exact(inputs);
        signals = probability_signals(dists);
        first = washout;
        basis = TargetBasis::legendre(measure, max_delay, max_degree);
        doc["evaluation"] = "time series";
        if (shots > 0) {
            TrajectoryEnsemble ens = res.sample_trajectories(inputs, shots, ctx.config.seed, ctx.config.threads);
            SignalMatrix emp = empirical_probabilities(ens);
            auto g = gram_matrices(emp);
            auto d = eigentask_decomposition(g.g1, g.g2, ctx.rank_tolerance());
            doc["empirical_spectral"] = to_json(ipc_spectral(d));
            doc["empirical_decomposition"] = to_json(d);
            doc["shots"] = shots;
        }
    }

    GramMatrices g = gram_matrices(signals);
    EigentaskDecomposition decomp = eigentask_decomposition(g.g1, g.g2, ctx.rank_tolerance());
    IPCReport spectral = ipc_spectral(decomp);
    IPCReport trace = ipc_probability_rep(signals);
    doc["spectral"] = to_json(spectral);
    doc["probability_trace"] = to_json(trace);
    doc["decomposition"] = to_json(decomp);
    doc["measure"] = measure_to_json(measure);
    doc["method_gap"] = std::abs(spectral.value - trace.value);
    if (std::abs(spectral.value - trace.value) > 1e-8) {
        ctx.fail("spectral and probability-trace IPC disagree");
    }

    std::vector<std::vector<double>> cap_rows;
    try {
        IPCReport sum = total_capacity(signals, *basis, drive, first, ctx.capacity_options());
        doc["basis_sum"] = to_json(sum);
        for (std::size_t i = 0; i < sum.terms.size(); ++i) {
            cap_rows.push_back({static_cast<double>(i), static_cast<double>(basis->functions()[i].total_degree),
                                sum.terms[i]});
        }
    } catch (const Error &e) {
        if (e.kind() != ErrorKind::kBasisNotOrthonormal) {
            throw;
        }
        doc["basis_sum"] = nullptr;
        doc["basis_sum_note"] = e.what();
    }

    std::vector<std::vector<double>> task_rows;
    for (std::size_t k = 0; k < decomp.sigma_sq.size(); ++k) {
        double s2 = decomp.sigma_sq[k];
        task_rows.push_back({static_cast<double>(k), s2, spectral.terms[k]});
    }
    ctx.out.push_back(Artifact::document("ipc.json", doc));
    ctx.out.push_back(Artifact::csv("eigentasks.csv", {"k", "sigma_sq", "ipc_term"}, task_rows));
    ctx.out.push_back(Artifact::csv("capacities.csv", {"index", "total_degree", "capacity"}, cap_rows));
}

void run_scan(Context &ctx) {
    const auto &p = ctx.params;
    auto family = p.get<std::string>("family", "noisy_shift_register");
    if (family != "noisy_shift_register") {
        config_error("unknown family \"" + family + "\"");
    }
    int n_min = p.get<int>("n_min", 2);
    int n_max = p.get<int>("n_max", 10);
    if (n_min < 1 || n_max < n_min) {
        config_error("need 1 <= n_min <= n_max");
    }
    double lambda = p.get<double>("lambda", 0.05);
    ScanBudget budget;
    budget.steps = p.get<std::size_t>("steps", budget.steps);
    budget.batches = p.get<std::size_t>("batches", budget.batches);
    budget.washout = p.get<std::size_t>("washout", budget.washout);
    budget.seed = ctx.config.seed;
    InputMeasure measure = measure_from_json(p.has("measure") ? p.raw("measure") : json(),
                                             InputMeasure::binary(-1.0, 1.0), ctx.config.seed);
    std::vector<int> ns;
    for (int n = n_min; n <= n_max; ++n) {
        ns.push_back(n);
    }
    ScalingCurve curve = scan_system_size(noisy_shift_register, ns, lambda, measure, budget);
    std::vector<std::vector<double>> rows;
    std::vector<double> closed;
    for (std::size_t i = 0; i < curve.n.size(); ++i) {
        rows.push_back({static_cast<double>(curve.n[i]), curve.ipc[i], curve.ipc_stderr[i], curve.noise});
        closed.push_back(noisy_shift_register_ipc(curve.n[i], lambda));
    }
    json doc = to_json(curve);
    doc["family"] = family;
    doc["measure"] = measure_to_json(measure);
    if (measure.kind == InputMeasure::Kind::kUniformBinary && measure.lo == -1.0 && measure.hi == 1.0) {
        doc["closed_form_ipc"] = closed;
    }
    ctx.out.push_back(Artifact::csv("scaling.csv", {"n", "ipc", "ipc_stderr", "lambda"}, rows));
    ctx.out.push_back(Artifact::document("scaling.json", doc));
}

double select_beta(const Params &p, std::size_t k, double lo, double hi, json &doc) {
    if (p.has("beta")) {
        return p.get<double>("beta", 1.0);
    }
    double target = p.get<double>("target_min_peak", 0.99);
    BetaSweep sweep = sweep_exponential_beta(k, lo, hi, target, p.get<double>("beta_start", 0.05),
                                             p.get<double>("beta_step", 0.01), p.get<double>("beta_stop", 50.0));
    if (!sweep.selected) {
        throw Error(ErrorKind::kNumericCheckFailure, "no beta in the sweep reaches the target peak");
    }
    doc["beta_sweep_target"] = target;
    return *sweep.selected;
}

std::vector<std::vector<double>> family_rows(const SwitchingFamily &fam) {
    std::vector<std::vector<double>> rows;
    for (std::size_t g = 0; g < fam.grid.size(); ++g) {
        std::vector<double> row{fam.grid[g]};
        for (std::size_t i = 0; i < fam.k; ++i) {
            row.push_back(fam.signals[i][g]);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void run_switching(Context &ctx) {
    const auto &p = ctx.params;
    auto k = p.get<std::size_t>("k", 4);
    double lo = p.get<double>("lo", 0.0);
    double hi = p.get<double>("hi", 4.0);
    auto grid = p.get<std::size_t>("grid_points", 401);
    json doc;
    double beta = select_beta(p, k, lo, hi, doc);
    double width = hwhm_matched_width(beta);
    SwitchingFamily expo = switching_family(TailKind::kExponential, k, lo, hi, beta, grid);
    SwitchingFamily poly = switching_family(TailKind::kPolynomial, k, lo, hi, width, grid);
    doc["beta"] = beta;
    doc["matched_width"] = width;
    doc["exponential"] = to_json(expo);
    doc["polynomial"] = to_json(poly);
    doc["min_peak_gap"] = expo.min_peak() - poly.min_peak();
    if (std::max(expo.normalization_residual, poly.normalization_residual) > 1e-9) {
        ctx.fail("switching signals do not sum to 1");
    }
    std::vector<std::string> header{"u"};
    for (std::size_t i = 0; i < k; ++i) {
        header.push_back("s" + std::to_string(i));
    }
    ctx.out.push_back(Artifact::document("switching.json", doc));
    ctx.out.push_back(Artifact::csv("switching_exponential.csv", header, family_rows(expo)));
    ctx.out.push_back(Artifact::csv("switching_polynomial.csv", header, family_rows(poly)));
}

void run_tails(Context &ctx) {
    const auto &p = ctx.params;
    auto draws = p.get<std::size_t>("draws", 100);
    double noise = p.get<double>("noise", 0.01);
    auto points = p.get<std::size_t>("grid_points", 200);
    double lo = p.get<double>("lo", 1.0);
    double hi = p.get<double>("hi", 100.0);
    if (!(lo > 0.0) || !(hi > lo) || points < 6) {
        config_error("tails needs 0 < lo < hi and at least 6 grid points");
    }
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    std::vector<std::vector<double>> rows;
    std::size_t correct = 0;
    for (std::size_t d = 0; d < draws; ++d) {
        CounterStream rng(ctx.config.seed, 0x7a11ULL, d);
        bool exponential = d % 2 == 1;
        double param = exponential ? 0.05 + 0.45 * rng.next_double() : 1.0 + 3.0 * rng.next_double();
        std::vector<double> values(points);
        for (std::size_t i = 0; i < points; ++i) {
            double clean = exponential ? std::exp2(-param * grid[i]) : std::pow(grid[i], -param);
            values[i] = clean * std::exp(noise * (2.0 * rng.next_double() - 1.0));
        }
        TailFit fit = classify_tails(grid, values);
        double planted = exponential ? 1.0 : 0.0;
        double got = fit.kind == TailFit::Kind::kPolynomial ? 0.0 : fit.kind == TailFit::Kind::kExponential ? 1.0 : 2.0;
        correct += got == planted ? 1 : 0;
        rows.push_back({static_cast<double>(d), planted, param, got, fit.degree, fit.rate});
    }
    json doc = {{"draws", draws},
                {"noise", noise},
                {"correct", correct},
                {"accuracy", draws ? static_cast<double>(correct) / static_cast<double>(draws) : 0.0},
                {"kind_codes", {{"polynomial", 0}, {"exponential", 1}, {"inconclusive", 2}}}};
    ctx.out.push_back(Artifact::csv("tails.csv", {"draw", "planted", "parameter", "classified", "degree", "rate"}, rows));
    ctx.out.push_back(Artifact::document("tails.json", doc));
}

void run_power_basis(Context &ctx) {
    const auto &p = ctx.params;
    int n = p.get<int>("n", 3);
    auto rows = p.get<std::size_t>("rows", 100000);
    int extra = p.get<int>("extra_degrees", 3);
    InputMeasure measure = measure_from_json(p.has("measure") ? p.raw("measure") : json(),
                                             InputMeasure::uniform(-1.0, 1.0), ctx.config.seed);
    PowerBasisReport rep = power_basis_demo(n, rows, measure, extra);
    std::vector<std::vector<double>> cap_rows;
    for (std::size_t i = 0; i < rep.capacity.terms.size(); ++i) {
        cap_rows.push_back({static_cast<double>(i), rep.capacity.terms[i]});
    }
    ctx.out.push_back(Artifact::document("power_basis.json", to_json(rep)));
    ctx.out.push_back(Artifact::csv("power_basis_capacities.csv", {"degree", "capacity"}, cap_rows));
}

void run_learnability(Context &ctx) {
    const auto &p = ctx.params;
    auto qs = p.get<std::vector<double>>("q", {0.01, 0.1});
    auto m0 = p.get<std::vector<std::size_t>>("m0", {1, 10, 100});
    auto trials = p.get<std::size_t>("trials", 10000);
    auto ns = p.get<std::vector<int>>("detection_n", {8, 9, 10, 11, 12, 13, 14, 15, 16});
    std::vector<std::vector<double>> rows;
    json curves = json::array();
    for (std::size_t j = 0; j < qs.size(); ++j) {
        LearnabilityCurve c = sample_complexity_curve(qs[j], m0, trials, ctx.config.seed + j);
        for (std::size_t i = 0; i < c.m0.size(); ++i) {
            rows.push_back({c.q, static_cast<double>(c.m0[i]), c.exact_all_zero[i], c.empirical_all_zero[i],
                            c.binomial_sigma[i], c.approximation[i], c.small_mq[i] ? 1.0 : 0.0});
            if (std::abs(c.empirical_all_zero[i] - c.exact_all_zero[i]) > 3.0 * c.binomial_sigma[i] + 1e-15) {
                ctx.fail("empirical all-zero frequency outside 3 sigma");
            }
        }
        curves.push_back(to_json(c));
    }
    std::vector<std::vector<double>> det_rows;
    json det = json::array();
    for (const auto &r : detection_schedule(ns)) {
        det_rows.push_back({static_cast<double>(r.n), r.q, static_cast<double>(r.m0), r.ln2_over_q, r.relative_gap});
        det.push_back({{"n", r.n}, {"q", r.q}, {"m0", r.m0}, {"ln2_over_q", r.ln2_over_q}, {"relative_gap", r.relative_gap}});
    }
    ctx.out.push_back(Artifact::csv("learnability.csv",
                                    {"q", "m0", "exact_all_zero", "empirical_all_zero", "binomial_sigma",
                                     "approximation_m0q", "small_m0q"},
                                    rows));
    ctx.out.push_back(Artifact::csv("detection.csv", {"n", "q", "m0", "ln2_over_q", "relative_gap"}, det_rows));
    ctx.out.push_back(Artifact::document("learnability.json", {{"curves", curves}, {"detection", det}}));
}

void run_fat_shatter(Context &ctx) {
    const auto &p = ctx.params;
    auto k = p.get<std::size_t>("k", 4);
    double lo = p.get<double>("lo", 0.0);
    double hi = p.get<double>("hi", 4.0);
    auto kind_name = p.get<std::string>("kind", "exponential");
    double gamma = p.get<double>("gamma", 0.3);
    json doc;
    double beta = select_beta(p, k, lo, hi, doc);
    TailKind kind;
    double sharpness = beta;
    if (kind_name == "exponential") {
        kind = TailKind::kExponential;
    } else if (kind_name == "polynomial") {
        kind = TailKind::kPolynomial;
        sharpness = hwhm_matched_width(beta);
    } else {
        config_error("unknown kind \"" + kind_name + "\"");
    }
    SwitchingFamily fam = switching_family(kind, k, lo, hi, sharpness, 2);
    FunctionTable table = switching_subset_class(fam);
    ShatterOptions opts;
    opts.budget = p.get<std::uint64_t>("budget", opts.budget);
    if (!p.has("thresholds")) {
        opts.thresholds = std::vector<double>(k, 0.5);
    } else if (p.raw("thresholds").is_number()) {
        opts.thresholds = std::vector<double>(k, p.get<double>("thresholds", 0.5));
    } else if (p.raw("thresholds").is_string() && p.raw("thresholds") == "search") {
        opts.thresholds.reset();
    } else {
        opts.thresholds = p.get<std::vector<double>>("thresholds", {});
    }
    ShatterResult r = fat_shattering_lower_bound(table, gamma, opts);
    bool verified = r.dimension == 0 || verify_witness(table, r.witness);
    if (!verified) {
        ctx.fail("witness re-verification");
    }
    doc["kind"] = kind_name;
    doc["beta"] = beta;
    doc["sharpness"] = sharpness;
    doc["gamma"] = gamma;
    doc["dimension"] = r.dimension;
    doc["witness"] = to_json(r.witness);
    doc["verified"] = verified;
    doc["work"] = r.work;
    doc["thresholds_searched"] = !opts.thresholds.has_value();
    std::vector<std::string> header{"function"};
    for (std::size_t i = 0; i < k; ++i) {
        header.push_back("x" + std::to_string(i));
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t f = 0; f < table.size(); ++f) {
        std::vector<double> row{static_cast<double>(f)};
        row.insert(row.end(), table[f].begin(), table[f].end());
        rows.push_back(std::move(row));
    }
    ctx.out.push_back(Artifact::document("fat_shatter.json", doc));
    ctx.out.push_back(Artifact::csv("fat_shatter_class.csv", header, rows));
}

void run_embed_check(Context &ctx) {
    auto cases = ctx.params.get<std::size_t>("random_cases", 100);
    auto checks = embed_check_suite(ctx.config.seed, cases);
    json list = json::array();
    std::vector<std::vector<double>> rows;
    bool all = true;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        list.push_back(to_json(checks[i]));
        rows.push_back({static_cast<double>(i), checks[i].residual, checks[i].tolerance, checks[i].pass ? 1.0 : 0.0});
        if (!checks[i].pass) {
            all = false;
            ctx.fail(checks[i].name);
        }
    }
    ctx.out.push_back(Artifact::document("embed_check.json", {{"checks", list}, {"all_pass", all}}));
    ctx.out.push_back(Artifact::csv("embed_check.csv", {"index", "residual", "tolerance", "pass"}, rows));
}

std::string utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

const std::vector<std::string> &experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto &kv : param_keys()) {
            v.push_back(kv.first);
        }
        return v;
    }();
    return names;
}

RunConfig RunConfig::from_json(const json &doc) {
    reject_unknown(doc, {"experiment", "seed", "threads", "out_dir", "params", "tolerances"}, "config");
    Params p(doc);
    RunConfig c;
    c.experiment = p.get<std::string>("experiment", "");
    c.seed = p.get<std::uint64_t>("seed", c.seed);
    c.threads = p.get<unsigned>("threads", c.threads);
    c.out_dir = p.get<std::string>("out_dir", c.out_dir.string());
    if (p.has("params")) {
        c.params = doc.at("params");
    }
    if (p.has("tolerances")) {
        c.tolerances = doc.at("tolerances");
    }
    if (!c.params.is_object() || !c.tolerances.is_object()) {
        config_error("params and tolerances must be objects");
    }
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::kIOFailure, "cannot read " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        config_error(path.string() + ": " + e.what());
    }
    return from_json(doc);
}

void RunConfig::validate() const {
    auto it = param_keys().find(experiment);
    if (it == param_keys().end()) {
        throw Error(ErrorKind::kUnknownExperiment, "\"" + experiment + "\"");
    }
    reject_unknown(params, it->second, "params");
    reject_unknown(tolerances, kToleranceKeys, "tolerances");
    if (threads == 0) {
        config_error("threads must be positive");
    }
}

json RunConfig::canonical() const {
    return {{"experiment", experiment}, {"seed", seed}, {"params", params}, {"tolerances", tolerances}};
}

std::string RunConfig::hash() const {
    return sha256_hex(canonical().dump());
}

Artifact Artifact::csv(std::string name, std::vector<std::string> header, std::vector<std::vector<double>> rows) {
    Artifact a;
    a.name = std::move(name);
    a.header = std::move(header);
    a.rows = std::move(rows);
    return a;
}

Artifact Artifact::document(std::string name, nlohmann::json body) {
    Artifact a;
    a.name = std::move(name);
    a.json = std::move(body);
    return a;
}

std::string sha256_hex(const std::string &bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::kIOFailure, "SHA-256 digest failed");
    }
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string tool_version() {
    return STOCHRES_VERSION_STRING;
}

std::vector<FileEntry> write_results(const std::vector<Artifact> &artifacts, const std::filesystem::path &out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw Error(ErrorKind::kIOFailure, "cannot create " + out_dir.string() + ": " + ec.message());
    }
    std::vector<FileEntry> files;
    for (const auto &a : artifacts) {
        auto path = out_dir / a.name;
        if (!a.json) {
            io::write_csv(path, a.header, a.rows);
        } else {
            std::ofstream out(path, std::ios::binary);
            out << a.json->dump(2) << '\n';
            if (!out) {
                throw Error(ErrorKind::kIOFailure, "cannot write " + path.string());
            }
        }
        std::ifstream in(path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        if (!in) {
            throw Error(ErrorKind::kIOFailure, "cannot read back " + path.string());
        }
        std::string bytes = buf.str();
        files.push_back({a.name, sha256_hex(bytes), bytes.size()});
    }
    return files;
}

json RunManifest::to_json() const {
    json list = json::array();
    for (const auto &f : files) {
        list.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    return {
        {"experiment", experiment},
        {"config_hash", config_hash},
        {"seed", seed},
        {"version", version},
        {"started", started},
        {"finished", finished},
        {"runtime_seconds", runtime_seconds},
        {"files", list},
        {"checks_passed", checks_passed},
        {"failed_checks", failed_checks},
    };
}

std::vector<Artifact> compute_artifacts(const RunConfig &config, RunManifest &manifest) {
    config.validate();
    Context ctx{config, manifest, Params(config.params), {}};
    static const std::map<std::string, void (*)(Context &)> table = {
        {"ipc", run_ipc},
        {"scan-n", run_scan},
        {"switching", run_switching},
        {"tails", run_tails},
        {"power-basis", run_power_basis},
        {"learnability", run_learnability},
        {"fat-shatter", run_fat_shatter},
        {"embed-check", run_embed_check},
    };
    table.at(config.experiment)(ctx);
    return std::move(ctx.out);
}

RunManifest run_experiment(const RunConfig &config) {
    RunManifest m;
    m.experiment = config.experiment;
    m.config_hash = config.hash();
    m.seed = config.seed;
    m.version = tool_version();
    m.started = utc_now();
    auto t0 = std::chrono::steady_clock::now();
    auto artifacts = compute_artifacts(config, m);
    m.files = write_results(artifacts, config.out_dir);
    m.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.finished = utc_now();
    std::ofstream out(config.out_dir / "manifest.json", std::ios::binary);
    out << m.to_json().dump(2) << '\n';
    if (!out) {
        throw Error(ErrorKind::kIOFailure, "cannot write manifest");
    }
    return m;
}

int exit_code_for(const Error &error) {
    switch (error.kind()) {
    case ErrorKind::kConfigValidation:
    case ErrorKind::kUnknownExperiment:
    case ErrorKind::kInvalidArgument:
        return 2;
    case ErrorKind::kIOFailure:
        return 4;
    default:
        return 3;
    }
}

}  // namespace stochres
