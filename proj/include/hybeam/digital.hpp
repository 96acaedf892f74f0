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
// Per-subcarrier digital precoding: the locally optimal design (receiver and
// factor updates alternating with a conic subproblem) and the cheaper
// weighted-MMSE iteration. Both operate on the effective channel G = F^H H
// and return precoders under the per-user hybrid power constraint.

#ifndef HYBEAM_DIGITAL_HPP
#define HYBEAM_DIGITAL_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "metrics.hpp"
#include "rng.hpp"
#include "socp.hpp"
#include "types.hpp"

namespace hybeam::digital {

// Weight-derived constants of the geometric-mean reformulation, evaluated
// for one subcarrier's MSE vector.
//
// Note on nu: the product constraint prod_u nu_u = 1 requires the exponent
// inside the geometric mean to be the per-user weight z_i, i.e.
//   nu_u = (prod_i xi_i^{z_i})^{1/U} / xi_u^{z_u}.
struct FactorSet {
    arma::vec gamma; // 1 / (1 - z_u)
    arma::vec mu;    // 1 / z_u - 1
    arma::vec kappa; // z_u mu_u^{1 - z_u}
    arma::vec nu;
    arma::vec zeta;
    arma::vec eta;   // kappa_u zeta_u^{mu_u}
};

inline FactorSet update_factors(const arma::vec& xi, const arma::vec& z)
{
    const arma::uword U = xi.n_elem;
    if (z.n_elem != U || U == 0)
        throw std::invalid_argument("update_factors: dimension mismatch");
    for (arma::uword u = 0; u < U; ++u) {
        if (!(xi(u) > 0.0) || xi(u) > 1.0)
            throw std::invalid_argument("update_factors: xi must be in (0, 1]");
        if (!(z(u) > 0.0) || !(z(u) < 1.0))
            throw std::invalid_argument("update_factors: weights must be in (0, 1)");
    }

    FactorSet f;
    f.gamma.set_size(U);
    f.mu.set_size(U);
    f.kappa.set_size(U);
    f.nu.set_size(U);
    f.zeta.set_size(U);
    f.eta.set_size(U);

    double log_gm = 0.0; // log prod_i xi_i^{z_i}
    for (arma::uword u = 0; u < U; ++u)
        log_gm += z(u) * std::log(xi(u));

    for (arma::uword u = 0; u < U; ++u) {
        f.gamma(u) = 1.0 / (1.0 - z(u));
        f.mu(u) = 1.0 / z(u) - 1.0;
        f.kappa(u) = z(u) * std::pow(f.mu(u), 1.0 - z(u));
        f.nu(u) = std::exp(log_gm / static_cast<double>(U) - z(u) * std::log(xi(u)));
        f.zeta(u) = std::pow(std::pow(f.nu(u), f.gamma(u)) / (f.mu(u) * xi(u)),
                             1.0 / (f.mu(u) + 1.0));
        f.eta(u) = f.kappa(u) * std::pow(f.zeta(u), f.mu(u));
    }
    return f;
}

// One conic step: minimizes the residual cone under the per-user power
// cones for fixed receivers and weights. Returns the precoder and the
// achieved residual norm chi.
inline std::pair<arma::cx_mat, double> solve_socp_step(const arma::cx_mat& G_k,
                                                       const arma::cx_vec& b_k,
                                                       const arma::vec& eta,
                                                       const arma::cx_mat& F,
                                                       const conic::SocpSolver& solver =
                                                           conic::default_solver(),
                                                       const arma::cx_mat* warm = nullptr)
{
    conic::SocpProblem p{G_k, b_k, eta, F};
    const conic::SocpSolution sol = solver.solve(p, warm);
    return {sol.W, sol.chi};
}

// w_u = v_u / ||F v_u||. Degenerate columns (zero after analog precoding)
// are an error: the caller decides whether to redraw.
inline arma::cx_mat normalize_digital(const arma::cx_mat& V, const arma::cx_mat& F)
{
    arma::cx_mat W(V.n_rows, V.n_cols);
    for (arma::uword u = 0; u < V.n_cols; ++u) {
        const double n = arma::norm(F * V.col(u), "fro");
        if (!(n > 1e-154))
            throw std::invalid_argument("normalize_digital: degenerate column " +
                                        std::to_string(u));
        W.col(u) = V.col(u) / n;
    }
    return W;
}

// Random start: entries uniform on the complex unit square, then normalized
// per user. Degenerate draws are redrawn.
inline arma::cx_mat random_digital_init_k(const arma::cx_mat& F, arma::uword U,
                                          RngStream& rng)
{
    const arma::uword N_RF = F.n_cols;
    arma::cx_mat V(N_RF, U);
    for (int attempt = 0; attempt < 100; ++attempt) {
        for (arma::uword u = 0; u < U; ++u)
            for (arma::uword n = 0; n < N_RF; ++n)
                V(n, u) = cx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        bool ok = true;
        for (arma::uword u = 0; u < U && ok; ++u)
            ok = arma::norm(F * V.col(u), "fro") > 1e-154;
        if (ok)
            return normalize_digital(V, F);
    }
    throw SolverError("random_digital_init: persistent degenerate draws");
}

inline DigitalPrecoderSet random_digital_init(const arma::cx_mat& F, const SystemConfig& cfg,
                                              RngStream& rng)
{
    DigitalPrecoderSet W;
    W.W.set_size(F.n_cols, cfg.U, cfg.K);
    for (arma::uword k = 0; k < cfg.K; ++k)
        W.W.slice(k) = random_digital_init_k(F, cfg.U, rng);
    return W;
}

struct DigitalResult {
    arma::cx_mat W;
    std::vector<double> trace; // block-descent objective per iteration
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline arma::vec mses(const arma::cx_mat& G, const arma::cx_mat& W, double theta)
{
    arma::vec xi(G.n_cols);
    for (arma::uword u = 0; u < G.n_cols; ++u)
        xi(u) = metrics::user_mse(G.col(u), W, u, theta);
    return xi;
}

inline arma::cx_vec receivers(const arma::cx_mat& G, const arma::cx_mat& W, double theta)
{
    arma::cx_vec b(G.n_cols);
    for (arma::uword u = 0; u < G.n_cols; ++u)
        b(u) = metrics::mmse_receiver(G.col(u), W, u, theta);
    return b;
}

inline double weighted_gm(const arma::vec& xi, const arma::vec& z)
{
    double lg = 0.0;
    for (arma::uword u = 0; u < xi.n_elem; ++u)
        lg += z(u) * std::log(xi(u));
    return std::exp(lg);
}

} // namespace detail

// Locally optimal digital precoding for one subcarrier: alternates
// {receiver + factor update} with the conic step until the weighted
// geometric mean of MSEs stalls. The returned precoder satisfies the
// power constraints with equality (terminal normalization).
//
// For U = 1 the geometric mean degenerates to the single MSE and the cone
// weight is immaterial; the factor update is skipped with eta = 1.
//
// The _eff variant works on a given effective channel (possibly an
// estimate); F still defines the power cones.
inline DigitalResult locally_optimal_digital_eff(const arma::cx_mat& F, const arma::cx_mat& G,
                                                 const arma::vec& z, double theta, double omega,
                                                 int max_iters, RngStream& rng,
                                                 const arma::cx_mat* W0 = nullptr,
                                                 const conic::SocpSolver& solver =
                                                     conic::default_solver())
{
    const arma::uword U = G.n_cols;

    DigitalResult res;
    res.W = W0 ? *W0 : random_digital_init_k(F, U, rng);

    double gm = detail::weighted_gm(detail::mses(G, res.W, theta), z);
    res.trace.push_back(gm);
    arma::cx_mat best_W = res.W;
    double best_gm = gm;

    for (int t = 0; t < max_iters; ++t) {
        const arma::cx_vec b = detail::receivers(G, res.W, theta);
        arma::vec eta(U, arma::fill::ones);
        if (U > 1) {
            const arma::vec xi = detail::mses(G, res.W, theta);
            eta = update_factors(xi, z).eta;
        }
        auto [W_new, chi] = solve_socp_step(G, b, eta, F, solver, &res.W);
        res.W = std::move(W_new);
        ++res.iterations;

        const double gm_new = detail::weighted_gm(detail::mses(G, res.W, theta), z);
        res.trace.push_back(gm_new);
        if (gm_new < best_gm) {
            best_gm = gm_new;
            best_W = res.W;
        }
        const double rel = std::abs(gm_new - gm) / std::max(gm, 1e-300);
        gm = gm_new;
        if (rel < omega) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged)
        res.W = best_W; // cap reached: keep the best iterate

    // Restore the equality power constraint for metric evaluation. Columns
    // that ended at zero (a receiver collapsed) are redrawn.
    for (arma::uword u = 0; u < U; ++u)
        if (!(arma::norm(F * res.W.col(u), "fro") > 1e-154))
            res.W.col(u) = random_digital_init_k(F, 1, rng);
    res.W = normalize_digital(res.W, F);
    return res;
}

inline DigitalResult locally_optimal_digital(const arma::cx_mat& F, const arma::cx_mat& H_k,
                                             const arma::vec& z, double theta, double omega,
                                             int max_iters, RngStream& rng,
                                             const arma::cx_mat* W0 = nullptr,
                                             const conic::SocpSolver& solver =
                                                 conic::default_solver())
{
    return locally_optimal_digital_eff(F, metrics::effective_channel(H_k, F), z, theta, omega,
                                       max_iters, rng, W0, solver);
}

// Unnormalized weighted-MMSE precoder for fixed receivers:
//   V = (G B Z^H Z B^H G^H + Tr[Z B^H B Z^H]/(U theta) F^H F)^{-1} G B Z^H.
// Returns zero when every receiver is zero (the regularizer vanishes with
// the numerator).
inline arma::cx_mat wmmse_step(const arma::cx_mat& G_k, const arma::cx_vec& b_k,
                               const arma::vec& z, const arma::cx_mat& F, double theta)
{
    const arma::uword N_RF = G_k.n_rows;
    const arma::uword U = G_k.n_cols;
    if (b_k.n_elem != U || z.n_elem != U)
        throw std::invalid_argument("wmmse_step: dimension mismatch");

    double trace_zbbz = 0.0;
    for (arma::uword u = 0; u < U; ++u)
        trace_zbbz += z(u) * z(u) * std::norm(b_k(u));
    if (trace_zbbz == 0.0)
        return arma::cx_mat(N_RF, U, arma::fill::zeros);

    arma::vec zb2(U);
    arma::cx_vec zb(U);
    for (arma::uword u = 0; u < U; ++u) {
        zb2(u) = z(u) * z(u) * std::norm(b_k(u));
        zb(u) = z(u) * b_k(u);
    }
    const arma::cx_mat sys = G_k * arma::diagmat(zb2) * G_k.t() +
                             (trace_zbbz / (static_cast<double>(U) * theta)) * (F.t() * F);
    const arma::cx_mat rhs = G_k * arma::diagmat(zb);
    arma::cx_mat V;
    if (!arma::solve(V, sys, rhs, arma::solve_opts::likely_sympd))
        throw SolverError("wmmse_step: singular system matrix");
    return V;
}

// Weighted-MMSE digital precoding for one subcarrier (receiver update,
// MMSE step, normalization). The block objective sum_u z_u xi_u is not
// guaranteed monotone; the trace is recorded and the best iterate is kept
// when the iteration cap is reached.
inline DigitalResult wmmse_digital_eff(const arma::cx_mat& F, const arma::cx_mat& G,
                                       const arma::vec& z, double theta, double omega,
                                       int max_iters, RngStream& rng,
                                       const arma::cx_mat* W0 = nullptr)
{
    const arma::uword U = G.n_cols;

    DigitalResult res;
    res.W = W0 ? *W0 : random_digital_init_k(F, U, rng);

    const auto objective = [&](const arma::cx_mat& W) {
        return arma::dot(z, detail::mses(G, W, theta));
    };

    double obj = objective(res.W);
    res.trace.push_back(obj);
    arma::cx_mat best_W = res.W;
    double best_obj = obj;

    for (int t = 0; t < max_iters; ++t) {
        const arma::cx_vec b = detail::receivers(G, res.W, theta);
        arma::cx_mat V = wmmse_step(G, b, z, F, theta);
        for (arma::uword u = 0; u < U; ++u)
            if (!(arma::norm(F * V.col(u), "fro") > 1e-154))
                V.col(u) = random_digital_init_k(F, 1, rng);
        res.W = normalize_digital(V, F);
        ++res.iterations;

        const double obj_new = objective(res.W);
        res.trace.push_back(obj_new);
        if (obj_new < best_obj) {
            best_obj = obj_new;
            best_W = res.W;
        }
        const double rel = std::abs(obj_new - obj) / std::max(obj, 1e-300);
        obj = obj_new;
        if (rel < omega) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged)
        res.W = best_W;
    return res;
}

inline DigitalResult wmmse_digital(const arma::cx_mat& F, const arma::cx_mat& H_k,
                                   const arma::vec& z, double theta, double omega,
                                   int max_iters, RngStream& rng,
                                   const arma::cx_mat* W0 = nullptr)
{
    return wmmse_digital_eff(F, metrics::effective_channel(H_k, F), z, theta, omega, max_iters,
                             rng, W0);
}

} // namespace hybeam::digital

#endif
