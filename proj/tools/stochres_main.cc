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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stochres/runner.h"

int main(int argc, char **argv) {
    CLI::App app{"Stochastic bit reservoir experiments"};
    app.set_version_flag("--version", stochres::tool_version());
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<unsigned> threads;

    for (const auto &name : stochres::experiment_names()) {
        auto *sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "root seed (overrides the config)");
        sub->add_option("--out-dir", out_dir, "output directory (overrides the config)");
        sub->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::string experiment = app.get_subcommands().front()->get_name();
    try {
        stochres::RunConfig config;
        if (!config_path.empty()) {
            config = stochres::RunConfig::load(config_path);
        }
        if (config.experiment.empty()) {
            config.experiment = experiment;
        } else if (config.experiment != experiment) {
            throw stochres::Error(stochres::ErrorKind::kConfigValidation,
                                  "config is for \"" + config.experiment + "\", not \"" + experiment + "\"");
        }
        if (seed) {
            config.seed = *seed;
        }
        if (out_dir) {
            config.out_dir = *out_dir;
        }
        if (threads) {
            config.threads = *threads;
        }
        auto manifest = stochres::run_experiment(config);
        std::cout << manifest.to_json().dump(2) << '\n';
        if (!manifest.checks_passed) {
            std::cerr << "numeric checks failed:";
            for (const auto &c : manifest.failed_checks) {
                std::cerr << ' ' << c << ';';
            }
            std::cerr << '\n';
            return 3;
        }
        return 0;
    } catch (const stochres::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return stochres::exit_code_for(e);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
