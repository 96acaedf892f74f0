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
// Alternating maximization over the analog and digital precoders (the
// LAOHB / AOHB modes), the fully digital weighted-MMSE benchmark, and the
// Monte-Carlo scenario driver.

#ifndef HYBEAM_FRAMEWORK_HPP
#define HYBEAM_FRAMEWORK_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "channel.hpp"
#include "cmdd.hpp"
#include "digital.hpp"
#include "manifold.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace hybeam::framework {

namespace detail {

// Digital block of one outer iteration: solves every subcarrier with the
// mode's algorithm, warm-started from the current precoders.
inline void digital_block(Mode mode, const arma::cx_mat& F, const ChannelSet& H,
                          const arma::vec& z, double theta, const SolverOptions& opt,
                          RngStream& rng, DigitalPrecoderSet& W)
{
    const conic::SeparableSolver solver(opt.socp_tol);
    for (arma::uword k = 0; k < H.K(); ++k) {
        const arma::cx_mat warm = W.W.slice(k);
        if (mode == Mode::LAOHB)
            W.W.slice(k) = digital::locally_optimal_digital(F, H.H.slice(k), z, theta,
                                                            opt.digital_omega,
                                                            opt.socp_max_iters, rng, &warm,
                                                            solver)
                               .W;
        else
            W.W.slice(k) = digital::wmmse_digital(F, H.H.slice(k), z, theta,
                                                  opt.digital_omega, opt.wmmse_max_iters, rng,
                                                  &warm)
                               .W;
    }
}

} // namespace detail

// Alternating maximization: analog stage by Riemannian
// conjugate gradient, digital stage by the mode's per-subcarrier solver.
// Stops when the weighted sum rate stalls. For LAOHB the recorded trace is
// non-decreasing: an outer step that fails to improve the objective is
// discarded and the run terminates at the previous iterate. For AOHB the
// trace may dip (the digital block minimizes an upper bound) and the
// best-observed iterate is returned.
inline RunResult alternate_maximize(const ChannelSet& H, const SystemConfig& cfg, Mode mode,
                                    const AnalogPrecoder& F0, const DigitalPrecoderSet& W0,
                                    const SolverOptions& opt, RngStream& rng)
{
    if (mode != Mode::LAOHB && mode != Mode::AOHB)
        throw std::invalid_argument("alternate_maximize: mode must be LAOHB or AOHB");
    const arma::vec z = cfg.effective_weights();

    RunResult res;
    res.mode = mode;
    arma::cx_vec x = arma::vectorise(F0.unit());
    res.F = F0.physical();
    res.W = W0;
    double f = metrics::weighted_sum_rate(H, res.F, res.W, z, cfg.theta);
    res.trace.push_back(f);

    arma::cx_mat best_F = res.F;
    DigitalPrecoderSet best_W = res.W;
    double best_f = f;

    for (int t = 0; t < opt.outer_max_iters; ++t) {
        const manifold::AnalogResult ar =
            manifold::optimize_analog(x, H, res.W, z, cfg.theta, opt);
        const arma::cx_mat F_cand = manifold::precoder_from_point(ar.x, cfg.M, cfg.N_RF);
        DigitalPrecoderSet W_cand = res.W;
        detail::digital_block(mode, F_cand, H, z, cfg.theta, opt, rng, W_cand);
        const double f_cand = metrics::weighted_sum_rate(H, F_cand, W_cand, z, cfg.theta);

        if (mode == Mode::LAOHB && f_cand < f) {
            // Neither block can improve further; keep the previous iterate.
            res.converged = true;
            break;
        }

        x = ar.x;
        res.F = F_cand;
        res.W = std::move(W_cand);
        res.trace.push_back(f_cand);
        ++res.iterations;
        if (f_cand > best_f) {
            best_f = f_cand;
            best_F = res.F;
            best_W = res.W;
        }
        const double rel = std::abs(f_cand - f) / std::max(std::abs(f), 1e-12);
        f = f_cand;
        if (rel < opt.outer_omega) {
            res.converged = true;
            break;
        }
    }

    if (mode == Mode::AOHB && best_f > f) {
        res.F = best_F;
        res.W = best_W;
    }
    return res;
}

// Pure digital weighted-MMSE benchmark: per subcarrier
//   V = (H Z^H Z H^H + (1/theta) I)^{-1} H Z^H,
// normalized per user to ||w_u|| = 1 (the analog stage is the identity).
inline DigitalPrecoderSet full_digital_baseline(const ChannelSet& ch, const SystemConfig& cfg)
{
    const arma::uword M = ch.M();
    const arma::uword U = ch.U();
    const arma::vec z = cfg.effective_weights();
    const arma::cx_mat eye_m = arma::eye<arma::cx_mat>(M, M);

    DigitalPrecoderSet W;
    W.W.set_size(M, U, ch.K());
    for (arma::uword k = 0; k < ch.K(); ++k) {
        const arma::cx_mat& H_k = ch.H.slice(k);
        const arma::cx_mat sys = H_k * arma::diagmat(z % z) * H_k.t() + (1.0 / cfg.theta) * eye_m;
        arma::cx_mat V;
        if (!arma::solve(V, sys, H_k * arma::diagmat(z), arma::solve_opts::likely_sympd))
            throw SolverError("full_digital_baseline: singular system matrix");
        W.W.slice(k) = digital::normalize_digital(V, eye_m);
    }
    return W;
}

// CSI accuracy levels of one run; 1.0 means perfect knowledge. The analog
// stage sees the corrupted physical channel, the digital stage the
// corrupted effective channel derived from the true one.
struct CsiModel {
    double varsigma_h_sq = 1.0;
    double varsigma_g_sq = 1.0;
};

// Runs one algorithm on one channel realization, including the imperfect
// CSI pipeline, and evaluates metrics against the true channel.
inline std::pair<RunResult, MetricsReport> run_algorithm(Mode mode, const ChannelSet& H_true,
                                                         const SystemConfig& cfg,
                                                         const SolverOptions& opt,
                                                         const CsiModel& csi,
                                                         RngStream& noise_rng,
                                                         RngStream& init_rng)
{
    const arma::vec z = cfg.effective_weights();
    const double vh = std::sqrt(csi.varsigma_h_sq);
    const double vg = std::sqrt(csi.varsigma_g_sq);
    const ChannelSet H_design = channel::corrupt_physical_csi(H_true, vh, noise_rng);

    RunResult res;
    res.mode = mode;

    if (mode == Mode::FullDigital) {
        res.F = arma::eye<arma::cx_mat>(cfg.M, cfg.M);
        res.W = full_digital_baseline(H_design, cfg);
        res.converged = true;
    } else if (mode == Mode::CMDD) {
        auto [F, W] = cmdd::cmdd_precode(H_design, cfg);
        res.F = F.physical();
        res.W = std::move(W);
        res.converged = true;
    } else {
        AnalogPrecoder F0 = AnalogPrecoder::unchecked(arma::cx_mat());
        DigitalPrecoderSet W0;
        if (opt.random_init) {
            arma::cx_mat X(cfg.M, cfg.N_RF);
            for (cx& v : X)
                v = std::exp(cx(0.0, init_rng.uniform(0.0, 2.0 * M_PI)));
            F0 = AnalogPrecoder::unchecked(std::move(X));
            W0 = digital::random_digital_init(F0.physical(), cfg, init_rng);
        } else {
            auto [F_c, W_c] = cmdd::cmdd_precode(H_design, cfg);
            F0 = std::move(F_c);
            W0 = std::move(W_c);
        }
        res = alternate_maximize(H_design, cfg, mode, F0, W0, opt, init_rng);
    }

    // Hybrid modes re-solve the digital stage on the estimated effective
    // channel derived from the true physical one.
    if (mode != Mode::FullDigital && csi.varsigma_g_sq < 1.0) {
        const conic::SeparableSolver solver(opt.socp_tol);
        const EffectiveChannel G_hat =
            channel::corrupt_effective_csi(metrics::effective_channel(H_true, res.F), vg,
                                           noise_rng);
        for (arma::uword k = 0; k < H_true.K(); ++k) {
            const arma::cx_mat warm = res.W.W.slice(k);
            if (mode == Mode::LAOHB)
                res.W.W.slice(k) =
                    digital::locally_optimal_digital_eff(res.F, G_hat.G.slice(k), z, cfg.theta,
                                                         opt.digital_omega, opt.socp_max_iters,
                                                         init_rng, &warm, solver)
                        .W;
            else if (mode == Mode::AOHB)
                res.W.W.slice(k) =
                    digital::wmmse_digital_eff(res.F, G_hat.G.slice(k), z, cfg.theta,
                                               opt.digital_omega, opt.wmmse_max_iters, init_rng,
                                               &warm)
                        .W;
            else
                res.W.W.slice(k) = digital::normalize_digital(
                    cmdd::mmse_digital_cmdd(G_hat.G.slice(k), z, cfg.theta), res.F);
        }
    }

    if (res.trace.empty())
        res.trace.push_back(metrics::weighted_sum_rate(H_true, res.F, res.W, z, cfg.theta));
    MetricsReport report = metrics::evaluate(H_true, res.F, res.W, z, cfg.theta);
    return {std::move(res), std::move(report)};
}

struct TrialOutcome {
    Mode mode = Mode::LAOHB;
    bool ok = false;
    std::string error;
    RunResult run;
    MetricsReport metrics;
};

struct ScenarioOptions {
    SolverOptions solver;
    CsiModel csi;
    unsigned workers = 1;
};

struct ScenarioResult {
    std::vector<Mode> modes;
    std::vector<std::vector<TrialOutcome>> trials; // [trial][mode index]

    // Mean weighted sum rate over successful trials of one mode.
    double mean_wsr(arma::uword mode_index) const
    {
        double sum = 0.0;
        arma::uword n = 0;
        for (const auto& t : trials)
            if (t[mode_index].ok) {
                sum += t[mode_index].metrics.weighted_sum_rate;
                ++n;
            }
        return n ? sum / static_cast<double>(n) : 0.0;
    }
};

// Monte-Carlo driver: `trials` channel realizations, each algorithm run on
// the same draws. Sub-streams are derived from (seed, trial, algorithm), so
// results do not depend on the worker count and one failed trial never
// aborts the sweep.
inline ScenarioResult run_scenario(const SystemConfig& cfg, const std::vector<Mode>& modes,
                                   arma::uword trials, const Rng& rng,
                                   const ScenarioOptions& opt = {})
{
    cfg.validate();
    ScenarioResult out;
    out.modes = modes;
    out.trials.resize(trials);

    parallel_for(trials, opt.workers, [&](std::size_t t) {
        RngStream ch_rng = rng.stream(Stream::channel, t);
        const ChannelSet H =
            channel::to_frequency(channel::gen_geometric_channel(cfg, ch_rng), cfg.K);

        auto& row = out.trials[t];
        row.resize(modes.size());
        for (std::size_t a = 0; a < modes.size(); ++a) {
            row[a].mode = modes[a];
            RngStream noise_rng = rng.stream(Stream::noise, t, a + 1);
            RngStream init_rng = rng.stream(Stream::init, t, a + 1);
            try {
                auto [run, report] =
                    run_algorithm(modes[a], H, cfg, opt.solver, opt.csi, noise_rng, init_rng);
                row[a].run = std::move(run);
                row[a].metrics = std::move(report);
                row[a].ok = true;
            } catch (const std::exception& e) {
                row[a].ok = false;
                row[a].error = e.what();
            }
        }
    });
    return out;
}

} // namespace hybeam::framework

#endif
