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
// Link metrics: per-user rates, scalar MMSE receivers, MSEs, SINRs, the
// AM/GM gap factor and its SINR-spread upper bound.

#ifndef HYBEAM_METRICS_HPP
#define HYBEAM_METRICS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "types.hpp"

namespace hybeam::metrics {

// G[k] = F^H H[k]. F is the physical analog precoder (M x N_RF).
inline arma::cx_mat effective_channel(const arma::cx_mat& H_k, const arma::cx_mat& F)
{
    if (H_k.n_rows != F.n_rows)
        throw std::invalid_argument("effective_channel: antenna dimension mismatch");
    return F.t() * H_k;
}

inline EffectiveChannel effective_channel(const ChannelSet& ch, const arma::cx_mat& F)
{
    EffectiveChannel eff;
    eff.G.set_size(F.n_cols, ch.U(), ch.K());
    for (arma::uword k = 0; k < ch.K(); ++k)
        eff.G.slice(k) = effective_channel(ch.H.slice(k), F);
    return eff;
}

// Spectral efficiency of user u at one subcarrier:
//   log2(1 + theta |h^H F w_u|^2 / (theta sum_{i != u} |h^H F w_i|^2 + 1)).
inline double user_rate(const arma::cx_mat& H_k, const arma::cx_mat& F,
                        const arma::cx_mat& W_k, arma::uword u, double theta)
{
    if (!(theta > 0.0))
        throw std::invalid_argument("user_rate: theta must be positive");
    const arma::cx_rowvec row = H_k.col(u).t() * F * W_k; // h_u^H F W
    double signal = 0.0, interference = 0.0;
    for (arma::uword i = 0; i < row.n_elem; ++i) {
        const double p = std::norm(row(i));
        if (i == u)
            signal = p;
        else
            interference += p;
    }
    return std::log2(1.0 + theta * signal / (theta * interference + 1.0));
}

// Objective of the design problem: sum_k sum_u z_u R_u[k].
inline double weighted_sum_rate(const ChannelSet& ch, const arma::cx_mat& F,
                                const DigitalPrecoderSet& W, const arma::vec& z, double theta)
{
    double total = 0.0;
    for (arma::uword k = 0; k < ch.K(); ++k)
        for (arma::uword u = 0; u < ch.U(); ++u)
            total += z(u) * user_rate(ch.H.slice(k), F, W.W.slice(k), u, theta);
    return total;
}

// Maps unconstrained positive weights l to z_u = l_u / sum(l). The returned
// scale (sum of the raw weights) converts the normalized weighted sum rate
// back to the raw-weight objective.
inline std::pair<arma::vec, double> renormalize_weights(const arma::vec& l)
{
    if (l.n_elem == 0)
        throw std::invalid_argument("renormalize_weights: empty weights");
    for (double v : l)
        if (!(v > 0.0))
            throw std::invalid_argument("renormalize_weights: weights must be positive");
    const double scale = arma::accu(l);
    return {l / scale, scale};
}

// Scalar MMSE receiver b_u[k] = (g^H W W^H g + 1/theta)^{-1} g^H w_u.
inline cx mmse_receiver(const arma::cx_vec& g_u, const arma::cx_mat& W_k, arma::uword u,
                        double theta)
{
    if (!(theta > 0.0))
        throw std::invalid_argument("mmse_receiver: theta must be positive");
    const arma::cx_rowvec gw = g_u.t() * W_k;
    const double denom = std::pow(arma::norm(gw, 2), 2.0) + 1.0 / theta;
    return gw(u) / denom;
}

// MSE under the MMSE receiver, closed scalar form:
//   xi = 1 - |g^H w_u|^2 / (||W^H g||^2 + 1/theta).
inline double user_mse(const arma::cx_vec& g_u, const arma::cx_mat& W_k, arma::uword u,
                       double theta)
{
    if (!(theta > 0.0))
        throw std::invalid_argument("user_mse: theta must be positive");
    const arma::cx_rowvec gw = g_u.t() * W_k;
    const double denom = std::pow(arma::norm(gw, 2), 2.0) + 1.0 / theta;
    return 1.0 - std::norm(gw(u)) / denom;
}

inline double sinr_from_mse(double xi)
{
    if (!(xi > 0.0) || xi > 1.0)
        throw std::invalid_argument("sinr_from_mse: xi must be in (0, 1]");
    return 1.0 / xi - 1.0;
}

// AM/GM gap factor iota = (sum z_u xi_u - prod xi_u^{z_u}) / prod xi_u^{z_u}.
// Nonnegative by the weighted AM-GM inequality.
inline double amgm_gap(const arma::vec& xi, const arma::vec& z)
{
    if (xi.n_elem != z.n_elem || xi.n_elem == 0)
        throw std::invalid_argument("amgm_gap: dimension mismatch");
    double am = 0.0, log_gm = 0.0;
    for (arma::uword u = 0; u < xi.n_elem; ++u) {
        if (!(xi(u) > 0.0))
            throw std::invalid_argument("amgm_gap: MSEs must be positive");
        am += z(u) * xi(u);
        log_gm += z(u) * std::log(xi(u));
    }
    const double gm = std::exp(log_gm);
    return (am - gm) / gm;
}

// Upper bound on the AM/GM gap at one subcarrier: (o - 1)^2 / 8 with
// o the max/min SINR ratio.
inline double amgm_gap_bound(const arma::vec& sinr)
{
    if (sinr.n_elem == 0)
        throw std::invalid_argument("amgm_gap_bound: empty SINR vector");
    const double lo = sinr.min();
    const double hi = sinr.max();
    if (!(lo > 0.0))
        throw std::invalid_argument("amgm_gap_bound: all SINRs must be positive");
    const double o = hi / lo;
    return (o - 1.0) * (o - 1.0) / 8.0;
}

// Evaluates the full per-user/per-subcarrier report for one precoder pair.
inline MetricsReport evaluate(const ChannelSet& ch, const arma::cx_mat& F,
                              const DigitalPrecoderSet& W, const arma::vec& z, double theta)
{
    const arma::uword U = ch.U();
    const arma::uword K = ch.K();
    MetricsReport r;
    r.rate.set_size(U, K);
    r.mse.set_size(U, K);
    r.sinr.set_size(U, K);
    r.rx.set_size(U, K);
    r.iota.set_size(K);
    r.bound.set_size(K);

    for (arma::uword k = 0; k < K; ++k) {
        const arma::cx_mat G_k = effective_channel(ch.H.slice(k), F);
        const arma::cx_mat& W_k = W.W.slice(k);
        arma::vec xi(U);
        for (arma::uword u = 0; u < U; ++u) {
            const arma::cx_vec g_u = G_k.col(u);
            xi(u) = user_mse(g_u, W_k, u, theta);
            r.mse(u, k) = xi(u);
            r.sinr(u, k) = 1.0 / xi(u) - 1.0;
            r.rate(u, k) = std::log2(1.0 / xi(u));
            r.rx(u, k) = mmse_receiver(g_u, W_k, u, theta);
            r.weighted_sum_rate += z(u) * r.rate(u, k);
        }
        r.iota(k) = amgm_gap(xi, z);
        r.bound(k) = (r.sinr.col(k).min() > 0.0)
                         ? amgm_gap_bound(r.sinr.col(k))
                         : std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

} // namespace hybeam::metrics

#endif
