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
// Experiment drivers behind the CLI: parameter sweeps, BER simulation and
// convergence-trace export. All outputs are deterministic functions of the
// configuration and seed; sub-streams are keyed by (seed, trial, algorithm)
// only, so sweep points share channel and noise draws (common random
// numbers) and results are independent of the worker count.

#ifndef HYBEAM_HARNESS_HPP
#define HYBEAM_HARNESS_HPP

#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "ber.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "framework.hpp"
#include "parallel.hpp"

namespace hybeam::harness {

inline constexpr const char* kLongHeader = "point,trial,algorithm,metric,user,subcarrier,value\n";
inline constexpr const char* kMetricsHeader = "trial,k,u,rate,mse,sinr,iota,bound\n";
inline constexpr const char* kTraceHeader = "algorithm,init,trial,iteration,objective\n";

struct Output {
    std::string csv;
    std::vector<std::string> warnings; // per-trial failures, already formatted
};

struct SweepPoint {
    std::string label;
    config::HarnessConfig cfg;
};

// Materializes one configuration per sweep value. A configuration without a
// sweep is a single point labeled by its theta_db.
inline std::vector<SweepPoint> expand_sweep(const config::HarnessConfig& base)
{
    using config::SweepParameter;
    std::vector<SweepPoint> points;

    const auto push_scalar = [&](double v, config::HarnessConfig cfg) {
        points.push_back({csv::fmt(v), std::move(cfg)});
    };

    switch (base.sweep_parameter) {
    case SweepParameter::none:
        points.push_back({csv::fmt(base.theta_db), base});
        break;
    case SweepParameter::theta_db:
        for (double v : base.sweep_values) {
            config::HarnessConfig cfg = base;
            cfg.theta_db = v;
            cfg.sys.theta = std::pow(10.0, v / 10.0);
            push_scalar(v, std::move(cfg));
        }
        break;
    case SweepParameter::varsigma_h_sq:
        for (double v : base.sweep_values) {
            if (v < 0.0 || v > 1.0)
                throw config::ConfigError("sweep_values: varsigma_h_sq must lie in [0, 1]");
            config::HarnessConfig cfg = base;
            cfg.scenario.csi.varsigma_h_sq = v;
            push_scalar(v, std::move(cfg));
        }
        break;
    case SweepParameter::users:
        if (base.sys.weights.n_elem != 0)
            throw config::ConfigError(
                "sweep_parameter=users requires default (equal) weights");
        if (!base.sys.stream_allocation.empty())
            throw config::ConfigError(
                "sweep_parameter=users conflicts with a fixed stream_allocation");
        for (double v : base.sweep_values) {
            if (v < 1.0 || v != std::floor(v))
                throw config::ConfigError("sweep_values: user counts must be positive integers");
            config::HarnessConfig cfg = base;
            cfg.sys.U = static_cast<arma::uword>(v);
            cfg.sys.validate();
            push_scalar(v, std::move(cfg));
        }
        break;
    case SweepParameter::nrf:
        if (!base.sys.stream_allocation.empty())
            throw config::ConfigError(
                "sweep_parameter=nrf conflicts with a fixed stream_allocation");
        for (double v : base.sweep_values) {
            if (v < 1.0 || v != std::floor(v))
                throw config::ConfigError("sweep_values: RF-chain counts must be positive integers");
            config::HarnessConfig cfg = base;
            cfg.sys.N_RF = static_cast<arma::uword>(v);
            cfg.sys.validate();
            push_scalar(v, std::move(cfg));
        }
        break;
    case SweepParameter::weights:
        for (const arma::vec& l : base.sweep_weight_values) {
            if (l.n_elem != base.sys.U)
                throw config::ConfigError("sweep_values: weight vectors must have U entries");
            config::HarnessConfig cfg = base;
            auto [z, scale] = metrics::renormalize_weights(l);
            cfg.sys.weights = z;
            cfg.weight_scale = scale;
            std::string label;
            for (arma::uword i = 0; i < l.n_elem; ++i)
                label += (i ? ":" : "") + csv::fmt(l(i));
            points.push_back({label, std::move(cfg)});
        }
        break;
    }
    return points;
}

namespace detail {

inline void append_failures(const framework::ScenarioResult& sc, const std::string& point,
                            std::vector<std::string>& warnings)
{
    for (std::size_t t = 0; t < sc.trials.size(); ++t)
        for (std::size_t a = 0; a < sc.modes.size(); ++a)
            if (!sc.trials[t][a].ok)
                warnings.push_back("point " + point + " trial " + std::to_string(t) + " " +
                                   to_string(sc.modes[a]) + ": " + sc.trials[t][a].error);
}

} // namespace detail

// Sweep output: per (point, trial, algorithm) one rate row per (k, u) plus
// one weighted-sum-rate summary row with user = subcarrier = -1.
inline Output run_sweep(const config::HarnessConfig& base)
{
    Output out;
    std::ostringstream o;
    o << kLongHeader;
    for (const SweepPoint& pt : expand_sweep(base)) {
        const Rng rng(pt.cfg.sys.seed);
        const framework::ScenarioResult sc =
            framework::run_scenario(pt.cfg.sys, pt.cfg.algos, pt.cfg.trials, rng,
                                    pt.cfg.scenario);
        detail::append_failures(sc, pt.label, out.warnings);
        for (std::size_t t = 0; t < sc.trials.size(); ++t)
            for (std::size_t a = 0; a < sc.modes.size(); ++a) {
                const auto& outcome = sc.trials[t][a];
                if (!outcome.ok)
                    continue;
                const char* algo = to_string(sc.modes[a]);
                const MetricsReport& m = outcome.metrics;
                for (arma::uword k = 0; k < m.rate.n_cols; ++k)
                    for (arma::uword u = 0; u < m.rate.n_rows; ++u)
                        o << pt.label << ',' << t << ',' << algo << ",rate," << u << ',' << k
                          << ',' << csv::fmt(m.rate(u, k)) << '\n';
                o << pt.label << ',' << t << ',' << algo << ",wsr,-1,-1,"
                  << csv::fmt(m.weighted_sum_rate) << '\n';
            }
    }
    out.csv = o.str();
    return out;
}

// Single-scenario output: the full metrics report, one row per
// (trial, subcarrier, user). An optional preloaded channel replaces the
// generated one (trials must then be 1).
inline Output run_single(const config::HarnessConfig& cfg,
                         const ChannelSet* preloaded = nullptr)
{
    if (preloaded && cfg.trials != 1)
        throw config::ConfigError("a preloaded channel requires trials = 1");
    if (preloaded && (preloaded->M() != cfg.sys.M || preloaded->U() != cfg.sys.U ||
                      preloaded->K() != cfg.sys.K))
        throw config::ConfigError("preloaded channel dimensions disagree with the configuration");

    Output out;
    std::ostringstream o;
    o << kMetricsHeader;
    const Rng rng(cfg.sys.seed);

    std::vector<std::vector<framework::TrialOutcome>> rows(cfg.trials);
    parallel_for(cfg.trials, cfg.scenario.workers, [&](std::size_t t) {
        RngStream ch_rng = rng.stream(Stream::channel, t);
        const ChannelSet H = preloaded
                                 ? *preloaded
                                 : channel::to_frequency(
                                       channel::gen_geometric_channel(cfg.sys, ch_rng),
                                       cfg.sys.K);
        rows[t].resize(cfg.algos.size());
        for (std::size_t a = 0; a < cfg.algos.size(); ++a) {
            rows[t][a].mode = cfg.algos[a];
            RngStream noise_rng = rng.stream(Stream::noise, t, a + 1);
            RngStream init_rng = rng.stream(Stream::init, t, a + 1);
            try {
                auto [run, report] = framework::run_algorithm(
                    cfg.algos[a], H, cfg.sys, cfg.scenario.solver, cfg.scenario.csi, noise_rng,
                    init_rng);
                rows[t][a].run = std::move(run);
                rows[t][a].metrics = std::move(report);
                rows[t][a].ok = true;
            } catch (const std::exception& e) {
                rows[t][a].error = e.what();
            }
        }
    });

    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t a = 0; a < rows[t].size(); ++a) {
            const auto& outcome = rows[t][a];
            if (!outcome.ok) {
                out.warnings.push_back("trial " + std::to_string(t) + " " +
                                       to_string(outcome.mode) + ": " + outcome.error);
                continue;
            }
            const MetricsReport& m = outcome.metrics;
            for (arma::uword k = 0; k < m.rate.n_cols; ++k)
                for (arma::uword u = 0; u < m.rate.n_rows; ++u)
                    o << t << ',' << k << ',' << u << ',' << csv::fmt(m.rate(u, k)) << ','
                      << csv::fmt(m.mse(u, k)) << ',' << csv::fmt(m.sinr(u, k)) << ','
                      << csv::fmt(m.iota(k)) << ',' << csv::fmt(m.bound(k)) << '\n';
        }
    out.csv = o.str();
    return out;
}

// BER output: per (theta point, trial, algorithm) one row per user and one
// aggregate row, metric "ber". The theta grid comes from sweep_values when
// sweep_parameter is theta_db (or unset with values given); otherwise the
// single configured theta_db is used.
inline Output run_ber(const config::HarnessConfig& base)
{
    using config::SweepParameter;
    if (base.sweep_parameter != SweepParameter::none &&
        base.sweep_parameter != SweepParameter::theta_db)
        throw config::ConfigError("ber supports only theta_db sweeps");
    if (base.symbols_per_trial < 1000)
        throw config::ConfigError("symbols_per_trial must be at least 1000");

    std::vector<double> thetas = base.sweep_values;
    if (thetas.empty())
        thetas.push_back(base.theta_db);

    Output out;
    std::ostringstream o;
    o << kLongHeader;
    for (double theta_db : thetas) {
        config::HarnessConfig cfg = base;
        cfg.theta_db = theta_db;
        cfg.sys.theta = std::pow(10.0, theta_db / 10.0);
        const std::string label = csv::fmt(theta_db);
        const Rng rng(cfg.sys.seed);

        struct BerRow {
            bool ok = false;
            std::string error;
            ber::BerResult result;
        };
        std::vector<std::vector<BerRow>> rows(cfg.trials);
        parallel_for(cfg.trials, cfg.scenario.workers, [&](std::size_t t) {
            RngStream ch_rng = rng.stream(Stream::channel, t);
            const ChannelSet H = channel::to_frequency(
                channel::gen_geometric_channel(cfg.sys, ch_rng), cfg.sys.K);
            rows[t].resize(cfg.algos.size());
            for (std::size_t a = 0; a < cfg.algos.size(); ++a) {
                RngStream noise_rng = rng.stream(Stream::noise, t, a + 1);
                RngStream init_rng = rng.stream(Stream::init, t, a + 1);
                RngStream link_rng = rng.stream(Stream::noise, t, 1000 + a);
                try {
                    auto [run, report] = framework::run_algorithm(
                        cfg.algos[a], H, cfg.sys, cfg.scenario.solver, cfg.scenario.csi,
                        noise_rng, init_rng);
                    rows[t][a].result = ber::simulate_ber(H, run.F, run.W, cfg.sys.theta,
                                                          cfg.symbols_per_trial, link_rng);
                    rows[t][a].ok = true;
                } catch (const std::exception& e) {
                    rows[t][a].error = e.what();
                }
            }
        });

        for (std::size_t t = 0; t < rows.size(); ++t)
            for (std::size_t a = 0; a < rows[t].size(); ++a) {
                const char* algo = to_string(cfg.algos[a]);
                if (!rows[t][a].ok) {
                    out.warnings.push_back("point " + label + " trial " + std::to_string(t) +
                                           " " + algo + ": " + rows[t][a].error);
                    continue;
                }
                const ber::BerResult& r = rows[t][a].result;
                for (arma::uword u = 0; u < r.per_user.n_elem; ++u)
                    o << label << ',' << t << ',' << algo << ",ber," << u << ",-1,"
                      << csv::fmt(r.per_user(u)) << '\n';
                o << label << ',' << t << ',' << algo << ",ber,-1,-1,"
                  << csv::fmt(r.aggregate) << '\n';
            }
    }
    out.csv = o.str();
    return out;
}

// Per-subcarrier digital convergence traces: each configured iterative
// digital algorithm runs from random initialization on the first trial's
// channel with the closed-form analog precoder. One row per
// (algorithm, k, iteration).
inline Output run_digital_trace(const config::HarnessConfig& cfg)
{
    Output out;
    std::ostringstream o;
    o << "algorithm,k,iteration,objective\n";
    const Rng rng(cfg.sys.seed);
    RngStream ch_rng = rng.stream(Stream::channel, 0);
    const ChannelSet H =
        channel::to_frequency(channel::gen_geometric_channel(cfg.sys, ch_rng), cfg.sys.K);
    const arma::vec z = cfg.sys.effective_weights();
    const auto [F0, W0] = cmdd::cmdd_precode(H, cfg.sys);
    const arma::cx_mat F = F0.physical();
    const conic::SeparableSolver solver(cfg.scenario.solver.socp_tol);

    for (Mode m : cfg.algos) {
        if (m != Mode::LAOHB && m != Mode::AOHB)
            continue;
        for (arma::uword k = 0; k < cfg.sys.K; ++k) {
            RngStream init_rng = rng.stream(Stream::init, 0, 3000 + k);
            const digital::DigitalResult res =
                m == Mode::LAOHB
                    ? digital::locally_optimal_digital(
                          F, H.H.slice(k), z, cfg.sys.theta, cfg.scenario.solver.digital_omega,
                          cfg.scenario.solver.socp_max_iters, init_rng, nullptr, solver)
                    : digital::wmmse_digital(F, H.H.slice(k), z, cfg.sys.theta,
                                             cfg.scenario.solver.digital_omega,
                                             cfg.scenario.solver.wmmse_max_iters, init_rng);
            for (std::size_t i = 0; i < res.trace.size(); ++i)
                o << to_string(m) << ',' << k << ',' << i << ',' << csv::fmt(res.trace[i])
                  << '\n';
        }
    }
    out.csv = o.str();
    return out;
}

// Analog-stage trace: objective per conjugate-gradient iteration on the
// first trial's channel, starting from the closed-form precoders.
inline Output run_analog_trace(const config::HarnessConfig& cfg)
{
    Output out;
    std::ostringstream o;
    o << "iteration,objective\n";
    const Rng rng(cfg.sys.seed);
    RngStream ch_rng = rng.stream(Stream::channel, 0);
    const ChannelSet H =
        channel::to_frequency(channel::gen_geometric_channel(cfg.sys, ch_rng), cfg.sys.K);
    const arma::vec z = cfg.sys.effective_weights();
    const auto [F0, W0] = cmdd::cmdd_precode(H, cfg.sys);
    const manifold::AnalogResult res = manifold::optimize_analog(
        arma::vectorise(F0.unit()), H, W0, z, cfg.sys.theta, cfg.scenario.solver);
    for (std::size_t i = 0; i < res.trace.size(); ++i)
        o << i << ',' << csv::fmt(res.trace[i]) << '\n';
    out.csv = o.str();
    return out;
}

// Convergence traces of the alternating framework under closed-form vs
// random initialization, one row per outer iteration.
inline Output run_converge(const config::HarnessConfig& base)
{
    std::vector<Mode> modes;
    for (Mode m : base.algos)
        if (m == Mode::LAOHB || m == Mode::AOHB)
            modes.push_back(m);
    if (modes.empty())
        throw config::ConfigError("converge requires laohb or aohb in algos");

    Output out;
    std::ostringstream o;
    o << kTraceHeader;
    const Rng rng(base.sys.seed);

    struct TraceRow {
        bool ok = false;
        std::string error;
        std::vector<double> trace;
    };
    // [trial][mode][init: 0 = cmdd, 1 = random]
    std::vector<std::vector<std::array<TraceRow, 2>>> rows(base.trials);
    parallel_for(base.trials, base.scenario.workers, [&](std::size_t t) {
        RngStream ch_rng = rng.stream(Stream::channel, t);
        const ChannelSet H = channel::to_frequency(
            channel::gen_geometric_channel(base.sys, ch_rng), base.sys.K);
        rows[t].resize(modes.size());
        for (std::size_t a = 0; a < modes.size(); ++a) {
            for (int init = 0; init < 2; ++init) {
                RngStream noise_rng = rng.stream(Stream::noise, t, 2000 + 2 * a + init);
                RngStream init_rng = rng.stream(Stream::init, t, 2000 + 2 * a + init);
                SolverOptions opt = base.scenario.solver;
                opt.random_init = (init == 1);
                try {
                    auto [run, report] = framework::run_algorithm(
                        modes[a], H, base.sys, opt, base.scenario.csi, noise_rng, init_rng);
                    rows[t][a][init].trace = run.trace;
                    rows[t][a][init].ok = true;
                } catch (const std::exception& e) {
                    rows[t][a][init].error = e.what();
                }
            }
        }
    });

    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t a = 0; a < modes.size(); ++a)
            for (int init = 0; init < 2; ++init) {
                const TraceRow& r = rows[t][a][init];
                const char* algo = to_string(modes[a]);
                const char* init_name = init == 0 ? "cmdd" : "random";
                if (!r.ok) {
                    out.warnings.push_back("trial " + std::to_string(t) + " " + algo + "/" +
                                           init_name + ": " + r.error);
                    continue;
                }
                for (std::size_t i = 0; i < r.trace.size(); ++i)
                    o << algo << ',' << init_name << ',' << t << ',' << i << ','
                      << csv::fmt(r.trace[i]) << '\n';
            }
    out.csv = o.str();
    return out;
}

} // namespace hybeam::harness

#endif
