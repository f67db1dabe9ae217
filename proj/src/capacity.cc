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

#include "stochres/capacity.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "stochres/errors.h"

namespace stochres {

namespace {

constexpr double kClipTolerance = 1e-10;
constexpr double kPsdTolerance = 1e-8;

double default_threshold(const SignalMatrix &signals) {
    if (signals.row_weights.size() > 0) {
        return 1e-9;
    }
    return 4.0 / std::sqrt(static_cast<double>(signals.rows()));
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd &m) {
    return 0.5 * (m + m.transpose());
}

bool is_diagonal(const Eigen::MatrixXd &m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (i != j && m(i, j) != 0.0) {
                return false;
            }
        }
    }
    return true;
}

void require_psd(const Eigen::VectorXd &eigenvalues, const char *name) {
    double top = eigenvalues.cwiseAbs().maxCoeff();
    double low = eigenvalues.minCoeff();
    if (low < -kPsdTolerance * top) {
        throw Error(ErrorKind::kNotPSD, std::string(name) + " has eigenvalue " + std::to_string(low));
    }
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd &g2, double tol) {
    if (is_diagonal(g2)) {
        Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(g2.rows(), g2.cols());
        for (Eigen::Index i = 0; i < g2.rows(); ++i) {
            if (g2(i, i) < 0.0) {
                throw Error(ErrorKind::kNotPSD, "G2 has a negative diagonal entry");
            }
            if (g2(i, i) > 0.0) {
                inv(i, i) = 1.0 / g2(i, i);
            }
        }
        return inv;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(g2));
    const Eigen::VectorXd &ev = es.eigenvalues();
    require_psd(ev, "G2");
    double cut = tol * ev.maxCoeff();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > cut && ev(i) > 0.0) {
            inv(i) = 1.0 / ev(i);
        }
    }
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

nlohmann::json finite_or_null(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return nullptr;
}

}  // namespace

CapacitySolver::CapacitySolver(const SignalMatrix &signals, const CapacityOptions &options) {
    signals.validate();
    if (signals.rows() == 0) {
        throw Error(ErrorKind::kInvalidSignals, "no rows");
    }
    total_cols_ = signals.cols();
    sqrt_w_ = signals.weights().cwiseSqrt();
    for (std::size_t j = 0; j < total_cols_; ++j) {
        if (signals.data.col(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff() == 0.0) {
            dropped_.push_back(j);
        } else {
            kept_.push_back(j);
        }
    }
    if (kept_.empty()) {
        throw Error(ErrorKind::kDegenerateSignals, "every signal column is identically zero");
    }
    if (!dropped_.empty()) {
        warnings_.push_back("dropped " + std::to_string(dropped_.size()) + " all-zero columns");
    }
    if (signals.rows() < kept_.size()) {
        warnings_.push_back("fewer rows than signal columns");
    }
    Eigen::MatrixXd a(signals.data.rows(), static_cast<Eigen::Index>(kept_.size()));
    for (std::size_t j = 0; j < kept_.size(); ++j) {
        a.col(static_cast<Eigen::Index>(j)) =
            sqrt_w_.cwiseProduct(signals.data.col(static_cast<Eigen::Index>(kept_[j])));
    }
    cod_.compute(a);
    threshold_ = options.threshold.value_or(default_threshold(signals));
}

CapacityReport CapacitySolver::solve(std::span<const double> target) const {
    if (static_cast<Eigen::Index>(target.size()) != sqrt_w_.size()) {
        throw Error(ErrorKind::kInvalidArgument, "target length does not match signal rows");
    }
    Eigen::VectorXd y(sqrt_w_.size());
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        double v = target[static_cast<std::size_t>(t)];
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::kInvalidArgument, "non-finite target value");
        }
        y(t) = sqrt_w_(t) * v;
    }
    double norm = y.squaredNorm();
    if (norm == 0.0) {
        throw Error(ErrorKind::kZeroTarget, "target is identically zero");
    }

    // The explained part of y is its projection onto the leading rank()
    // columns of Q.
    Eigen::VectorXd qty = cod_.householderQ().transpose() * y;
    double explained = qty.head(cod_.rank()).squaredNorm();
    Eigen::VectorXd coef = cod_.solve(y);

    CapacityReport rep;
    rep.rows = static_cast<std::size_t>(y.size());
    rep.threshold = threshold_;
    rep.dropped_columns = dropped_;
    rep.warnings = warnings_;
    rep.raw_capacity = explained / norm;
    rep.capacity = std::clamp(rep.raw_capacity, 0.0, 1.0);
    rep.clipped = rep.capacity != rep.raw_capacity;
    if (rep.clipped) {
        rep.warnings.push_back("capacity clipped from " + std::to_string(rep.raw_capacity));
    }
    rep.below_threshold = rep.capacity < threshold_;
    rep.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total_cols_));
    for (std::size_t j = 0; j < kept_.size(); ++j) {
        rep.weights(static_cast<Eigen::Index>(kept_[j])) = coef(static_cast<Eigen::Index>(j));
    }
    return rep;
}

CapacityReport capacity(const SignalMatrix &signals, std::span<const double> target, const CapacityOptions &options) {
    return CapacitySolver(signals, options).solve(target);
}

Eigen::MatrixXd GramMatrices::readout_g2(std::size_t readout_shots) const {
    if (readout_shots == 0) {
        throw Error(ErrorKind::kInvalidArgument, "readout shots must be positive");
    }
    return g1 + (g2 - g1) / static_cast<double>(readout_shots);
}

GramMatrices gram_matrices(const SignalMatrix &signals) {
    signals.validate();
    GramMatrices out;
    out.mode = signals.mode;
    out.rows = signals.rows();
    out.shots = signals.shots;
    Eigen::VectorXd w = signals.weights();
    const Eigen::MatrixXd &x = signals.data;
    Eigen::MatrixXd g1 = x.transpose() * w.asDiagonal() * x;
    Eigen::VectorXd mean = x.transpose() * w;

    switch (signals.mode) {
    case SignalMode::kExactProbability:
        out.g1 = symmetrized(g1);
        out.g2 = mean.asDiagonal();
        break;
    case SignalMode::kEmpiricalFrequency: {
        if (!signals.shots) {
            throw Error(ErrorKind::kMissingShotMetadata, "empirical signals need a shot count");
        }
        double s = static_cast<double>(*signals.shots);
        if (*signals.shots < 2) {
            throw Error(ErrorKind::kMissingShotMetadata,
                        "G1 cannot be separated from shot noise with a single shot per row");
        }
        // E[f f^T] = p p^T + (diag p - p p^T) / S for S one-hot shots.
        Eigen::MatrixXd diag = mean.asDiagonal();
        out.g1 = symmetrized((g1 - diag / s) / (1.0 - 1.0 / s));
        out.g2 = diag;
        break;
    }
    case SignalMode::kMoment: {
        std::unordered_map<std::uint64_t, Eigen::Index> index;
        for (std::size_t j = 0; j < signals.labels.size(); ++j) {
            index.emplace(signals.labels[j], static_cast<Eigen::Index>(j));
        }
        // A product of bits squared is itself, so <m_A m_B> = <m_{A|B}>.
        auto d = static_cast<Eigen::Index>(signals.cols());
        out.g2.resize(d, d);
        for (Eigen::Index a = 0; a < d; ++a) {
            for (Eigen::Index b = 0; b < d; ++b) {
                auto it = index.find(signals.labels[static_cast<std::size_t>(a)] |
                                     signals.labels[static_cast<std::size_t>(b)]);
                if (it == index.end()) {
                    throw Error(ErrorKind::kInvalidSignals, "moment set is not closed under union");
                }
                out.g2(a, b) = mean(it->second);
            }
        }
        out.g1 = symmetrized(g1);
        break;
    }
    case SignalMode::kGeneric:
        throw Error(ErrorKind::kInvalidSignals, "Gram matrices need probability or moment signals");
    }
    return out;
}

EigentaskDecomposition eigentask_decomposition(const Eigen::MatrixXd &g1, const Eigen::MatrixXd &g2,
                                               double rank_tolerance) {
    if (g1.rows() != g1.cols() || g2.rows() != g2.cols() || g1.rows() != g2.rows() || g1.rows() == 0) {
        throw Error(ErrorKind::kInvalidArgument, "G1 and G2 must be square and of equal size");
    }
    if (!g1.allFinite() || !g2.allFinite()) {
        throw Error(ErrorKind::kInvalidArgument, "non-finite Gram entries");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(g1));
    const Eigen::VectorXd &ev = es.eigenvalues();
    require_psd(ev, "G1");
    double top = ev.maxCoeff();
    if (!(top > 0.0)) {
        throw Error(ErrorKind::kEmptyRank, "G1 has no positive eigenvalue");
    }

    EigentaskDecomposition out;
    out.signal_count = static_cast<std::size_t>(g1.rows());
    out.rank_tolerance = rank_tolerance;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = ev.size() - 1; i >= 0; --i) {
        if (ev(i) >= rank_tolerance * top) {
            keep.push_back(i);
        }
    }
    auto r = static_cast<Eigen::Index>(keep.size());
    out.retained_rank = keep.size();
    out.dropped_dims = out.signal_count - out.retained_rank;
    out.g1_basis.resize(g1.rows(), r);
    out.g1_eigenvalues.resize(r);
    for (Eigen::Index j = 0; j < r; ++j) {
        out.g1_basis.col(j) = es.eigenvectors().col(keep[static_cast<std::size_t>(j)]);
        out.g1_eigenvalues(j) = ev(keep[static_cast<std::size_t>(j)]);
    }

    Eigen::VectorXd half = out.g1_eigenvalues.cwiseSqrt();
    Eigen::MatrixXd scaled = out.g1_basis * half.asDiagonal();
    Eigen::MatrixXd k = symmetrized(scaled.transpose() * pseudo_inverse(g2, rank_tolerance) * scaled);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ks(k);

    // Largest mu first gives ascending sigma^2.
    out.sigma_sq.resize(static_cast<std::size_t>(r));
    out.eigentasks.resize(r, r);
    for (Eigen::Index j = 0; j < r; ++j) {
        Eigen::Index src = r - 1 - j;
        double mu = ks.eigenvalues()(src);
        double s2 = mu > 0.0 ? 1.0 / mu - 1.0 : std::numeric_limits<double>::infinity();
        if (s2 < 0.0) {
            if (s2 < -kClipTolerance) {
                ++out.negative_clipped;
                out.most_negative = std::min(out.most_negative, s2);
            }
            s2 = 0.0;
        }
        out.sigma_sq[static_cast<std::size_t>(j)] = s2;
        out.eigentasks.col(j) = ks.eigenvectors().col(src);
    }
    out.task_readouts = out.g1_basis * half.cwiseInverse().asDiagonal() * out.eigentasks;
    return out;
}

const char *ipc_method_name(IPCReport::Method method) {
    switch (method) {
    case IPCReport::Method::kSpectral:
        return "spectral";
    case IPCReport::Method::kProbabilityTrace:
        return "probability-trace";
    case IPCReport::Method::kBasisSum:
        return "basis-sum";
    }
    return "unknown";
}

IPCReport ipc_spectral(const EigentaskDecomposition &decomp) {
    IPCReport rep;
    rep.method = IPCReport::Method::kSpectral;
    rep.signal_count = decomp.signal_count;
    rep.retained_rank = decomp.retained_rank;
    for (std::size_t k = 0; k < decomp.sigma_sq.size(); ++k) {
        double s2 = decomp.sigma_sq[k];
        double term = std::isfinite(s2) ? 1.0 / (1.0 + s2) : 0.0;
        rep.terms.push_back(term);
        rep.term_labels.push_back("task_" + std::to_string(k));
        rep.value += term;
    }
    rep.note = "sum runs over the retained rank of G1";
    return rep;
}

IPCReport ipc_probability_rep(const SignalMatrix &signals) {
    signals.validate();
    if (signals.mode != SignalMode::kExactProbability) {
        throw Error(ErrorKind::kInvalidSignals, "probability-trace IPC needs exact-probability signals");
    }
    Eigen::VectorXd w = signals.weights();
    IPCReport rep;
    rep.method = IPCReport::Method::kProbabilityTrace;
    rep.signal_count = signals.cols();
    for (Eigen::Index k = 0; k < signals.data.cols(); ++k) {
        auto col = signals.data.col(k);
        double m1 = w.dot(col);
        if (m1 <= 0.0) {
            ++rep.skipped_columns;
            continue;
        }
        double m2 = w.dot(col.cwiseProduct(col));
        rep.terms.push_back(m2 / m1);
        rep.term_labels.push_back("p_" + std::to_string(signals.labels[static_cast<std::size_t>(k)]));
        rep.value += m2 / m1;
    }
    rep.retained_rank = rep.terms.size();
    if (rep.skipped_columns > 0) {
        rep.note = "skipped " + std::to_string(rep.skipped_columns) + " zero-mean columns";
    }
    return rep;
}

IPCReport total_capacity(const SignalMatrix &signals, const TargetBasis &basis, std::span<const double> drive,
                         std::size_t first_index, const CapacityOptions &options) {
    basis.check_orthonormal();
    if (first_index < static_cast<std::size_t>(basis.max_delay())) {
        throw Error(ErrorKind::kInvalidArgument, "first row lacks the history the basis needs");
    }
    if (first_index + signals.rows() > drive.size()) {
        throw Error(ErrorKind::kInvalidArgument, "drive is shorter than the signal rows");
    }
    CapacitySolver solver(signals, options);
    IPCReport rep;
    rep.method = IPCReport::Method::kBasisSum;
    rep.signal_count = signals.cols();
    rep.threshold = solver.threshold();
    rep.max_delay = basis.max_delay();
    rep.max_degree = basis.max_degree();
    // Sampled targets are orthonormal only in expectation; without this the
    // sum can exceed the signal rank at small T. Gram-Schmidt in the row
    // inner product, graded order, so the i-th term keeps L_i's new part.
    Eigen::VectorXd w = signals.weights();
    std::vector<Eigen::VectorXd> done;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        auto series = basis.evaluate_series(i, drive, first_index, signals.rows());
        Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(series.data(), static_cast<Eigen::Index>(series.size()));
        double before = std::sqrt(w.dot(y.cwiseProduct(y)));
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &q : done) {
                y -= w.dot(q.cwiseProduct(y)) * q;
            }
        }
        double after = std::sqrt(w.dot(y.cwiseProduct(y)));
        double c = 0.0;
        if (after > 1e-8 * before) {
            done.push_back(y / after);
            try {
                c = solver.solve(std::span<const double>(y.data(), static_cast<std::size_t>(y.size()))).capacity;
            } catch (const Error &e) {
                if (e.kind() != ErrorKind::kZeroTarget) {
                    throw;
                }
            }
        }
        rep.terms.push_back(c);
        rep.term_labels.push_back(basis.functions()[i].label());
        if (c < rep.threshold) {
            ++rep.excluded_terms;
        } else {
            rep.value += c;
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(signals.data);
    rep.retained_rank = static_cast<std::size_t>(lu.rank());
    rep.note = "truncated at max_delay=" + std::to_string(basis.max_delay()) +
               ", max_degree=" + std::to_string(basis.max_degree());
    return rep;
}

nlohmann::json to_json(const CapacityReport &report) {
    return {
        {"capacity", report.capacity},
        {"raw_capacity", report.raw_capacity},
        {"clipped", report.clipped},
        {"weights", std::vector<double>(report.weights.data(), report.weights.data() + report.weights.size())},
        {"rows", report.rows},
        {"threshold", report.threshold},
        {"below_threshold", report.below_threshold},
        {"dropped_columns", report.dropped_columns},
        {"warnings", report.warnings},
    };
}

nlohmann::json to_json(const EigentaskDecomposition &decomp) {
    nlohmann::json s2 = nlohmann::json::array();
    for (double v : decomp.sigma_sq) {
        s2.push_back(finite_or_null(v));
    }
    return {
        {"sigma_sq", s2},
        {"signal_count", decomp.signal_count},
        {"retained_rank", decomp.retained_rank},
        {"dropped_dims", decomp.dropped_dims},
        {"rank_tolerance", decomp.rank_tolerance},
        {"negative_clipped", decomp.negative_clipped},
        {"most_negative", decomp.most_negative},
    };
}

nlohmann::json to_json(const IPCReport &report) {
    nlohmann::json j = {
        {"ipc", report.value},
        {"method", ipc_method_name(report.method)},
        {"terms", report.terms},
        {"term_labels", report.term_labels},
        {"signal_count", report.signal_count},
        {"retained_rank", report.retained_rank},
        {"skipped_columns", report.skipped_columns},
        {"excluded_terms", report.excluded_terms},
        {"threshold", report.threshold},
        {"note", report.note},
    };
    j["max_delay"] = report.max_delay ? nlohmann::json(*report.max_delay) : nlohmann::json(nullptr);
    j["max_degree"] = report.max_degree ? nlohmann::json(*report.max_degree) : nlohmann::json(nullptr);
    return j;
}

}  // namespace stochres
