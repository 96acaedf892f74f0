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
// Closed-form hybrid precoding: per-user eigendecomposition of the
// all-subcarrier channel Gram matrix, stream allocation by dominant
// eigenvalues, phase projection onto the constant-modulus set, and
// per-carrier weighted MMSE for the digital stage.

#ifndef HYBEAM_CMDD_HPP
#define HYBEAM_CMDD_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "digital.hpp"
#include "metrics.hpp"
#include "types.hpp"

namespace hybeam::cmdd {

// Eigendecomposition of H_u H_u^H with eigenvalues sorted descending and
// clamped at zero. H_u stacks the user's channel vectors of all subcarriers
// (M x K).
inline std::pair<arma::vec, arma::cx_mat> user_eigs(const arma::cx_mat& H_u)
{
    if (H_u.n_rows == 0 || H_u.n_cols == 0)
        throw std::invalid_argument("user_eigs: empty channel matrix");
    const arma::cx_mat gram = H_u * H_u.t();
    arma::vec rho;
    arma::cx_mat P;
    if (!arma::eig_sym(rho, P, 0.5 * (gram + gram.t())))
        throw SolverError("user_eigs: eigendecomposition failed");
    // eig_sym returns ascending order
    rho = arma::reverse(rho);
    P = arma::fliplr(P);
    rho = arma::clamp(rho, 0.0, arma::datum::inf);
    return {rho, P};
}

// Distributes N_RF streams: every user keeps its dominant eigenvector, the
// remaining N_RF - U slots go to the globally largest leftover eigenvalues.
// Ties break toward the lower user index, then the lower eigen-index, so
// the allocation is deterministic. The selected-eigenvalue sum is maximal
// among all feasible allocations.
inline std::vector<arma::uword> allocate_streams(const std::vector<arma::vec>& rhos,
                                                 arma::uword N_RF)
{
    const arma::uword U = rhos.size();
    if (U == 0)
        throw std::invalid_argument("allocate_streams: no users");
    if (N_RF < U)
        throw std::invalid_argument("allocate_streams: need N_RF >= U");

    std::vector<arma::uword> counts(U, 1);
    arma::uword remaining = N_RF - U;
    if (remaining == 0)
        return counts;

    struct Candidate {
        double value;
        arma::uword user;
        arma::uword index; // eigen-index within the user (>= 1)
    };
    std::vector<Candidate> pool;
    for (arma::uword u = 0; u < U; ++u)
        for (arma::uword i = 1; i < rhos[u].n_elem; ++i)
            pool.push_back({rhos[u](i), u, i});
    if (pool.size() < remaining)
        throw std::invalid_argument("allocate_streams: not enough eigenvalues for N_RF");

    std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
        if (a.value != b.value)
            return a.value > b.value;
        if (a.user != b.user)
            return a.user < b.user;
        return a.index < b.index;
    });
    for (arma::uword i = 0; i < remaining; ++i)
        counts[pool[i].user] += 1;
    return counts;
}

// Nearest constant-modulus matrix to P_sel in Frobenius norm: every entry
// keeps its phase at amplitude 1/sqrt(M). Zero entries take phase 0.
inline arma::cx_mat phase_project(const arma::cx_mat& P_sel)
{
    const double scale = 1.0 / std::sqrt(static_cast<double>(P_sel.n_rows));
    arma::cx_mat F_u(P_sel.n_rows, P_sel.n_cols);
    for (arma::uword j = 0; j < P_sel.n_cols; ++j)
        for (arma::uword i = 0; i < P_sel.n_rows; ++i) {
            const double mag = std::abs(P_sel(i, j));
            F_u(i, j) = (mag > 0.0) ? scale * P_sel(i, j) / mag : cx(scale, 0.0);
        }
    return F_u;
}

// Unnormalized per-carrier MMSE precoder on the effective channel:
//   V = (G Z^H Z G^H + (1/theta) I)^{-1} G Z^H.
inline arma::cx_mat mmse_digital_cmdd(const arma::cx_mat& G_k, const arma::vec& z,
                                      double theta)
{
    if (!(theta > 0.0))
        throw std::invalid_argument("mmse_digital_cmdd: theta must be positive");
    if (z.n_elem != G_k.n_cols)
        throw std::invalid_argument("mmse_digital_cmdd: weight length mismatch");
    const arma::uword N = G_k.n_rows;
    const arma::cx_mat sys = G_k * arma::diagmat(z % z) * G_k.t() +
                             (1.0 / theta) * arma::eye<arma::cx_mat>(N, N);
    arma::cx_mat V;
    if (!arma::solve(V, sys, G_k * arma::diagmat(z), arma::solve_opts::likely_sympd))
        throw SolverError("mmse_digital_cmdd: singular system matrix");
    return V;
}

// Full closed-form pipeline. Honors cfg.stream_allocation when given,
// otherwise allocates by dominant eigenvalues.
inline std::pair<AnalogPrecoder, DigitalPrecoderSet> cmdd_precode(const ChannelSet& ch,
                                                                  const SystemConfig& cfg)
{
    cfg.validate();
    const arma::uword M = ch.M();
    const arma::uword U = ch.U();
    const arma::uword K = ch.K();
    const arma::vec z = cfg.effective_weights();

    std::vector<arma::vec> rhos(U);
    std::vector<arma::cx_mat> bases(U);
    for (arma::uword u = 0; u < U; ++u) {
        arma::cx_mat H_u(M, K);
        for (arma::uword k = 0; k < K; ++k)
            H_u.col(k) = ch.H.slice(k).col(u);
        std::tie(rhos[u], bases[u]) = user_eigs(H_u);
    }

    std::vector<arma::uword> counts = cfg.stream_allocation.empty()
                                          ? allocate_streams(rhos, cfg.N_RF)
                                          : cfg.stream_allocation;

    arma::cx_mat X(M, cfg.N_RF); // unit-modulus internal representation
    arma::uword col = 0;
    for (arma::uword u = 0; u < U; ++u) {
        const arma::cx_mat proj = phase_project(bases[u].head_cols(counts[u]));
        X.cols(col, col + counts[u] - 1) =
            proj * std::sqrt(static_cast<double>(M)); // back to modulus 1
        col += counts[u];
    }
    AnalogPrecoder F = AnalogPrecoder::unchecked(X);
    const arma::cx_mat F_phys = F.physical();

    DigitalPrecoderSet W;
    W.W.set_size(cfg.N_RF, U, K);
    for (arma::uword k = 0; k < K; ++k) {
        const arma::cx_mat G_k = metrics::effective_channel(ch.H.slice(k), F_phys);
        W.W.slice(k) = digital::normalize_digital(mmse_digital_cmdd(G_k, z, cfg.theta), F_phys);
    }
    return {std::move(F), std::move(W)};
}

} // namespace hybeam::cmdd

#endif
