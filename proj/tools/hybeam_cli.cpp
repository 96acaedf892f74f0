// SPDX-License-Identifier: Apache-2.0
//
// hybeam - hybrid beamforming simulation library for multiuser MIMO-OFDM
// Copyright (C) 2026 hybeam contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Command-line front end.
//
//   hybeam gen-channel --out ch.bin [--config cfg] [--seed N] [--trial T]
//   hybeam run         --out m.csv  [--config cfg] [--result-out r.json]
//   hybeam sweep       --out s.csv  [--config cfg]
//   hybeam ber         --out b.csv  [--config cfg]
//   hybeam converge    --out t.csv  [--config cfg]
//
// Exit codes: 0 success, 2 configuration/usage, 3 file I/O, 4 solver,
// 5 internal. Failures print one machine-readable line to stderr:
//   error: category=<config|io|solver|internal|usage> message="..."

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hybeam/hybeam.hpp"

namespace {

using hybeam::config::HarnessConfig;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::string algos;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool out_required)
{
    cmd->add_option("--config", args.config_path, "configuration file (key = value)");
    auto* out = cmd->add_option("--out", args.out_path, "output file");
    if (out_required)
        out->required();
    cmd->add_option("--algos", args.algos, "comma-separated algorithm list override");
    cmd->add_option("--seed", args.seed, "master seed override")
        ->envname("HYBEAM_SEED")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--workers", args.workers, "concurrent trial workers");
}

HarnessConfig load_config(const CommonArgs& args)
{
    HarnessConfig cfg = args.config_path.empty()
                            ? HarnessConfig{}
                            : hybeam::config::parse_config(args.config_path);
    if (args.seed_set)
        cfg.sys.seed = args.seed;
    if (!args.algos.empty())
        cfg.algos = hybeam::config::parse_algorithm_list(args.algos);
    if (args.workers != 0)
        cfg.scenario.workers = args.workers;
    cfg.sys.validate();
    return cfg;
}

void emit_output(const hybeam::harness::Output& out, const std::string& path)
{
    hybeam::csv::atomic_write(path, out.csv);
    for (const std::string& w : out.warnings)
        std::cerr << "warning: " << w << "\n";
}

nlohmann::json result_json(const HarnessConfig& cfg)
{
    const hybeam::Rng rng(cfg.sys.seed);
    const auto sc = hybeam::framework::run_scenario(cfg.sys, cfg.algos, cfg.trials, rng,
                                                    cfg.scenario);
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t t = 0; t < sc.trials.size(); ++t)
        for (std::size_t a = 0; a < sc.modes.size(); ++a) {
            const auto& outcome = sc.trials[t][a];
            nlohmann::json j{{"trial", t},
                             {"algorithm", hybeam::to_string(sc.modes[a])},
                             {"ok", outcome.ok}};
            if (outcome.ok) {
                j["iterations"] = outcome.run.iterations;
                j["converged"] = outcome.run.converged;
                j["trace"] = outcome.run.trace;
                j["weighted_sum_rate"] = outcome.metrics.weighted_sum_rate;
            } else {
                j["error"] = outcome.error;
            }
            runs.push_back(std::move(j));
        }
    return runs;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hybeam - hybrid beamforming link simulator for multiuser MIMO-OFDM"};
    app.require_subcommand(1);

    CommonArgs gen_args, run_args, sweep_args, ber_args, conv_args;
    std::uint64_t gen_trial = 0;
    std::string run_result_out, run_channel_in;

    CLI::App* gen = app.add_subcommand("gen-channel", "write one channel realization");
    add_common(gen, gen_args, true);
    gen->add_option("--trial", gen_trial, "trial index of the realization");

    CLI::App* run = app.add_subcommand("run", "single scenario, full metrics CSV");
    add_common(run, run_args, true);
    run->add_option("--result-out", run_result_out, "also write run results as JSON");
    run->add_option("--channel-in", run_channel_in, "use a stored channel (trials = 1)");
    std::string run_digital_trace_out, run_analog_trace_out;
    run->add_option("--digital-trace-out", run_digital_trace_out,
                    "per-subcarrier digital convergence traces (CSV)");
    run->add_option("--analog-trace-out", run_analog_trace_out,
                    "analog-stage convergence trace (CSV)");

    CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo parameter sweep CSV");
    add_common(sweep, sweep_args, true);

    CLI::App* ber = app.add_subcommand("ber", "16-QAM bit error rate CSV");
    add_common(ber, ber_args, true);

    CLI::App* conv = app.add_subcommand("converge", "outer-iteration trace CSV");
    add_common(conv, conv_args, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: category=usage message=\"" << e.what() << "\"\n";
        return 2;
    }

    try {
        if (gen->parsed()) {
            const HarnessConfig cfg = load_config(gen_args);
            hybeam::RngStream ch_rng =
                hybeam::Rng(cfg.sys.seed).stream(hybeam::Stream::channel, gen_trial);
            const hybeam::ChannelSet ch = hybeam::channel::to_frequency(
                hybeam::channel::gen_geometric_channel(cfg.sys, ch_rng), cfg.sys.K);
            hybeam::channel::save_channel(ch, gen_args.out_path);
            std::cout << cfg.echo();
        } else if (run->parsed()) {
            const HarnessConfig cfg = load_config(run_args);
            const hybeam::ChannelSet preloaded =
                run_channel_in.empty() ? hybeam::ChannelSet{}
                                       : hybeam::channel::load_channel(run_channel_in);
            const hybeam::harness::Output out = hybeam::harness::run_single(
                cfg, run_channel_in.empty() ? nullptr : &preloaded);
            emit_output(out, run_args.out_path);
            if (!run_result_out.empty())
                hybeam::csv::atomic_write(run_result_out, result_json(cfg).dump(2) + "\n");
            if (!run_digital_trace_out.empty())
                emit_output(hybeam::harness::run_digital_trace(cfg), run_digital_trace_out);
            if (!run_analog_trace_out.empty())
                emit_output(hybeam::harness::run_analog_trace(cfg), run_analog_trace_out);
            std::cout << cfg.echo();
        } else if (sweep->parsed()) {
            const HarnessConfig cfg = load_config(sweep_args);
            emit_output(hybeam::harness::run_sweep(cfg), sweep_args.out_path);
            std::cout << cfg.echo();
        } else if (ber->parsed()) {
            const HarnessConfig cfg = load_config(ber_args);
            emit_output(hybeam::harness::run_ber(cfg), ber_args.out_path);
            std::cout << cfg.echo();
        } else if (conv->parsed()) {
            const HarnessConfig cfg = load_config(conv_args);
            emit_output(hybeam::harness::run_converge(cfg), conv_args.out_path);
            std::cout << cfg.echo();
        }
    } catch (const hybeam::config::ConfigError& e) {
        std::cerr << "error: category=config message=\"" << e.what() << "\"\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: category=config message=\"" << e.what() << "\"\n";
        return 2;
    } catch (const hybeam::FileError& e) {
        std::cerr << "error: category=io message=\"" << e.what() << "\"\n";
        return 3;
    } catch (const hybeam::SolverError& e) {
        std::cerr << "error: category=solver message=\"" << e.what() << "\"\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: category=internal message=\"" << e.what() << "\"\n";
        return 5;
    }
    return 0;
}
