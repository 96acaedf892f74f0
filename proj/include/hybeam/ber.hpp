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
// Gray-mapped 16-QAM link simulation. Symbols have unit average energy and
// the per-subcarrier noise is CN(0, 1/theta). Detection applies the scalar
// MMSE receiver, removes the (complex) effective signal gain, and slices to
// the nearest constellation point.

#ifndef HYBEAM_BER_HPP
#define HYBEAM_BER_HPP

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>

#include "metrics.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace hybeam::ber {

// Per-dimension amplitude scale: levels {-3,-1,1,3}/sqrt(10) give unit
// average symbol energy.
inline const double kQamScale = 1.0 / std::sqrt(10.0);

// Gray code per dimension: bit pair -> level index in {-3,-1,1,3}.
// 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3 (adjacent levels differ by 1 bit).
inline constexpr std::array<int, 4> kGrayToLevel = {0, 1, 3, 2};
inline constexpr std::array<unsigned, 4> kLevelToGray = {0, 1, 3, 2};

// 4-bit word [i1 i0 q1 q0] -> constellation point.
inline cx qam16_encode(unsigned bits)
{
    const int li = kGrayToLevel[(bits >> 2) & 0x3];
    const int lq = kGrayToLevel[bits & 0x3];
    return {kQamScale * static_cast<double>(2 * li - 3),
            kQamScale * static_cast<double>(2 * lq - 3)};
}

// Nearest-point decision, separable per dimension.
inline unsigned qam16_decide(cx y)
{
    const auto level = [](double v) -> unsigned {
        if (v < -2.0 * kQamScale)
            return 0;
        if (v < 0.0)
            return 1;
        if (v < 2.0 * kQamScale)
            return 2;
        return 3;
    };
    return (kLevelToGray[level(y.real())] << 2) | kLevelToGray[level(y.imag())];
}

struct BerResult {
    arma::vec per_user;
    double aggregate = 0.0;
};

// Monte-Carlo BER of one precoder pair over one channel realization.
// n_symbols OFDM symbols are sent, i.e. n_symbols * K * U QAM symbols.
inline BerResult simulate_ber(const ChannelSet& ch, const arma::cx_mat& F,
                              const DigitalPrecoderSet& W, double theta,
                              arma::uword n_symbols, RngStream& rng)
{
    const arma::uword U = ch.U();
    const arma::uword K = ch.K();
    const double noise_scale = std::sqrt(1.0 / theta);

    // Effective symbol-to-observation rows h_u^H F W and receiver gains.
    arma::cx_cube rows(U, U, K); // (u, :, k) = h_u^H F W[k]
    arma::cx_mat rx(U, K);       // conj applied at use
    arma::cx_mat gain(U, K);     // conj(b) * (h_u^H F w_u)
    for (arma::uword k = 0; k < K; ++k) {
        const arma::cx_mat G_k = metrics::effective_channel(ch.H.slice(k), F);
        for (arma::uword u = 0; u < U; ++u) {
            const arma::cx_rowvec row = ch.H.slice(k).col(u).t() * F * W.W.slice(k);
            rows.subcube(u, 0, k, u, U - 1, k) = row;
            rx(u, k) = metrics::mmse_receiver(G_k.col(u), W.W.slice(k), u, theta);
            gain(u, k) = std::conj(rx(u, k)) * row(u);
        }
    }

    arma::uvec bit_errors(U, arma::fill::zeros);
    std::vector<unsigned> tx_bits(U);
    arma::cx_vec s(U);
    for (arma::uword n = 0; n < n_symbols; ++n) {
        for (arma::uword k = 0; k < K; ++k) {
            for (arma::uword u = 0; u < U; ++u) {
                tx_bits[u] = static_cast<unsigned>(rng.u64() >> 60); // top 4 bits
                s(u) = qam16_encode(tx_bits[u]);
            }
            for (arma::uword u = 0; u < U; ++u) {
                cx y = noise_scale * rng.cgaussian();
                for (arma::uword i = 0; i < U; ++i)
                    y += rows(u, i, k) * s(i);
                cx est = std::conj(rx(u, k)) * y;
                if (std::abs(gain(u, k)) > 1e-300)
                    est /= gain(u, k);
                const unsigned decided = qam16_decide(est);
                bit_errors(u) += std::popcount(decided ^ tx_bits[u]);
            }
        }
    }

    BerResult res;
    res.per_user.set_size(U);
    const double bits_per_user = 4.0 * static_cast<double>(n_symbols) * static_cast<double>(K);
    for (arma::uword u = 0; u < U; ++u)
        res.per_user(u) = static_cast<double>(bit_errors(u)) / bits_per_user;
    res.aggregate = arma::mean(res.per_user);
    return res;
}

} // namespace hybeam::ber

#endif
