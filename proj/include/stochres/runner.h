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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stochres/errors.h"

namespace stochres {

/// Top-level config:
///   {"experiment", "seed", "threads", "out_dir", "params": {...}, "tolerances": {...}}
/// `params` keys depend on the experiment; unknown keys anywhere are rejected.
struct RunConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::filesystem::path out_dir = "out";
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json tolerances = nlohmann::json::object();

    static RunConfig from_json(const nlohmann::json &doc);
    static RunConfig load(const std::filesystem::path &path);

    /// Canonical form: everything that affects results (no threads, no
    /// output directory), keys sorted.
    nlohmann::json canonical() const;
    std::string hash() const;

    /// Checks the experiment name and every params key without running.
    void validate() const;
};

const std::vector<std::string> &experiment_names();

struct Artifact {
    std::string name;  // file name inside the output directory
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::optional<nlohmann::json> json;  // set for JSON artifacts

    static Artifact csv(std::string name, std::vector<std::string> header, std::vector<std::vector<double>> rows);
    static Artifact document(std::string name, nlohmann::json body);
};

struct FileEntry {
    std::string path;
    std::string sha256;
    std::uintmax_t bytes = 0;
};

/// CSV with %.17g numbers, JSON with sorted keys. Throws IOFailure.
std::vector<FileEntry> write_results(const std::vector<Artifact> &artifacts, const std::filesystem::path &out_dir);

struct RunManifest {
    std::string experiment;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string version;
    std::string started;
    std::string finished;
    double runtime_seconds = 0.0;
    std::vector<FileEntry> files;
    bool checks_passed = true;
    std::vector<std::string> failed_checks;

    nlohmann::json to_json() const;
};

/// Runs the experiment without touching the filesystem.
std::vector<Artifact> compute_artifacts(const RunConfig &config, RunManifest &manifest);

/// Runs, writes artifacts plus manifest.json into config.out_dir.
RunManifest run_experiment(const RunConfig &config);

std::string sha256_hex(const std::string &bytes);
std::string tool_version();

/// 2 for config errors, 4 for I/O, 3 for everything numeric.
int exit_code_for(const Error &error);

}  // namespace stochres
