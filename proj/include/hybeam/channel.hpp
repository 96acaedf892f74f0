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
// Geometric clustered multipath channel generation, time-to-frequency
// conversion and imperfect-CSI models.

#ifndef HYBEAM_CHANNEL_HPP
#define HYBEAM_CHANNEL_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"
#include "types.hpp"

namespace hybeam::channel {

// Sampling period of the tapped-delay-line model. Dimensionless; cluster
// delays are drawn from [0, D*T).
inline constexpr double kSamplePeriod = 1.0;

// ULA response vector: element m is (1/sqrt(M)) exp(-j 2 pi ratio m sin(theta)).
// Unit Frobenius norm by construction.
inline arma::cx_vec array_response(double theta, arma::uword M, double spacing_ratio)
{
    if (M == 0)
        throw std::invalid_argument("array_response: M must be positive");
    arma::cx_vec a(M);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    const double phase_step = -2.0 * M_PI * spacing_ratio * std::sin(theta);
    for (arma::uword m = 0; m < M; ++m)
        a(m) = scale * std::exp(cx(0.0, phase_step * static_cast<double>(m)));
    return a;
}

// Rectangular pulse with half-open support [-T, 0).
inline double pulse_shape(double tau, double T)
{
    if (!(T > 0.0))
        throw std::invalid_argument("pulse_shape: T must be positive");
    return (tau >= -T && tau < 0.0) ? 1.0 : 0.0;
}

// Time-domain delay taps of one scenario, plus the raw draws they were
// assembled from. taps[u] is M x D with column d holding h_ud.
struct TimeDomainChannel {
    std::vector<arma::cx_mat> taps;  // per user, M x D
    std::vector<arma::vec> delays;   // per user, tau_uc (length C_u)
    std::vector<arma::mat> aods;     // per user, theta_ucl (C_u x L_uc), radians
    std::vector<arma::cx_mat> gains; // per user, alpha_ucl (C_u x L_uc)

    arma::uword users() const { return taps.size(); }
};

// Deterministic part of the channel model: assembles the delay taps
//   h_ud = sqrt(M/(C L)) sum_c [ p(dT - tau_uc) sum_l alpha_ucl a(theta_ucl) ]
// from given draws. Split out so tests can evaluate the formula on fixed
// delays/angles/gains.
inline arma::cx_mat assemble_taps(const arma::vec& delays, const arma::mat& aods,
                                  const arma::cx_mat& gains, arma::uword M, arma::uword D,
                                  double spacing_ratio)
{
    const arma::uword C = delays.n_elem;
    if (aods.n_rows != C || gains.n_rows != C || aods.n_cols != gains.n_cols)
        throw std::invalid_argument("assemble_taps: inconsistent draw dimensions");
    const arma::uword L = aods.n_cols;

    arma::cx_mat taps(M, D, arma::fill::zeros);
    const double scale = std::sqrt(static_cast<double>(M) / static_cast<double>(C * L));
    for (arma::uword c = 0; c < C; ++c) {
        arma::cx_vec cluster_sum(M, arma::fill::zeros);
        for (arma::uword l = 0; l < L; ++l)
            cluster_sum += gains(c, l) * array_response(aods(c, l), M, spacing_ratio);
        for (arma::uword d = 0; d < D; ++d) {
            const double p = pulse_shape(static_cast<double>(d) * kSamplePeriod - delays(c),
                                         kSamplePeriod);
            if (p != 0.0)
                taps.col(d) += (scale * p) * cluster_sum;
        }
    }
    return taps;
}

// Draws one clustered channel realization. Per user and cluster: delay
// uniform on [0, D*T), mean angle uniform on [0, 2 pi); per scatterer the
// AOD is the mean angle plus Laplacian spread (wrapped into [0, 2 pi)) and
// the path gain is CN(0, 1). Deterministic for a fixed stream.
inline TimeDomainChannel gen_geometric_channel(const SystemConfig& cfg, RngStream& rng)
{
    cfg.validate();
    const arma::uword C = cfg.clusters_per_user;
    const arma::uword L = cfg.scatterers_per_cluster;
    const double spread_rad = cfg.angular_spread_deg * M_PI / 180.0;
    // Laplace(0, b) has standard deviation sqrt(2) b; the configured spread
    // is the angular standard deviation.
    const double laplace_scale = spread_rad / std::sqrt(2.0);
    const double two_pi = 2.0 * M_PI;

    TimeDomainChannel td;
    td.taps.reserve(cfg.U);
    td.delays.reserve(cfg.U);
    td.aods.reserve(cfg.U);
    td.gains.reserve(cfg.U);

    for (arma::uword u = 0; u < cfg.U; ++u) {
        arma::vec delays(C);
        arma::mat aods(C, L);
        arma::cx_mat gains(C, L);
        for (arma::uword c = 0; c < C; ++c) {
            delays(c) = rng.uniform(0.0, static_cast<double>(cfg.D) * kSamplePeriod);
            const double mean_angle = rng.uniform(0.0, two_pi);
            for (arma::uword l = 0; l < L; ++l) {
                double theta = std::fmod(mean_angle + rng.laplace(laplace_scale), two_pi);
                if (theta < 0.0)
                    theta += two_pi;
                aods(c, l) = theta;
                gains(c, l) = rng.cgaussian();
            }
        }
        td.taps.push_back(assemble_taps(delays, aods, gains, cfg.M, cfg.D,
                                        cfg.element_spacing_ratio));
        td.delays.push_back(std::move(delays));
        td.aods.push_back(std::move(aods));
        td.gains.push_back(std::move(gains));
    }
    return td;
}

// Frequency-domain channel h_u[k] = sum_d h_ud exp(-j 2 pi k d / K) for
// k = 0..K-1 (H[0] is the DC bin).
inline ChannelSet to_frequency(const TimeDomainChannel& td, arma::uword K)
{
    if (td.taps.empty())
        throw std::invalid_argument("to_frequency: empty channel");
    const arma::uword M = td.taps.front().n_rows;
    const arma::uword D = td.taps.front().n_cols;
    const arma::uword U = td.users();
    if (K < D)
        throw std::invalid_argument("to_frequency: need K >= D");

    ChannelSet ch;
    ch.H.set_size(M, U, K);
    for (arma::uword k = 0; k < K; ++k) {
        for (arma::uword u = 0; u < U; ++u) {
            arma::cx_vec h(M, arma::fill::zeros);
            for (arma::uword d = 0; d < D; ++d) {
                const double phase = -2.0 * M_PI * static_cast<double>(k) *
                                     static_cast<double>(d) / static_cast<double>(K);
                h += td.taps[u].col(d) * std::exp(cx(0.0, phase));
            }
            ch.H.slice(k).col(u) = h;
        }
    }
    return ch;
}

// Imperfect physical CSI: h_hat = varsigma h + sqrt(1 - varsigma^2) e with
// e ~ CN(0, I) drawn fresh per user and subcarrier.
inline ChannelSet corrupt_physical_csi(const ChannelSet& ch, double varsigma, RngStream& rng)
{
    if (!(varsigma >= 0.0 && varsigma <= 1.0))
        throw std::invalid_argument("corrupt_physical_csi: varsigma must be in [0, 1]");
    if (varsigma == 1.0)
        return ch;
    const double err_scale = std::sqrt(1.0 - varsigma * varsigma);
    ChannelSet out;
    out.H.set_size(arma::size(ch.H));
    for (arma::uword k = 0; k < ch.K(); ++k)
        for (arma::uword u = 0; u < ch.U(); ++u)
            for (arma::uword m = 0; m < ch.M(); ++m)
                out.H(m, u, k) = varsigma * ch.H(m, u, k) + err_scale * rng.cgaussian();
    return out;
}

// Imperfect effective CSI: g_hat = varsigma g + sqrt(1 - varsigma^2)
// (||g_u[k]||_F / N_RF) e.
inline EffectiveChannel corrupt_effective_csi(const EffectiveChannel& eff, double varsigma,
                                              RngStream& rng)
{
    if (!(varsigma >= 0.0 && varsigma <= 1.0))
        throw std::invalid_argument("corrupt_effective_csi: varsigma must be in [0, 1]");
    if (varsigma == 1.0)
        return eff;
    const double err_scale = std::sqrt(1.0 - varsigma * varsigma);
    const double n_rf = static_cast<double>(eff.G.n_rows);
    EffectiveChannel out;
    out.G.set_size(arma::size(eff.G));
    for (arma::uword k = 0; k < eff.G.n_slices; ++k) {
        for (arma::uword u = 0; u < eff.G.n_cols; ++u) {
            const double gnorm = arma::norm(arma::cx_vec(eff.G.slice(k).col(u)), "fro");
            for (arma::uword n = 0; n < eff.G.n_rows; ++n)
                out.G(n, u, k) = varsigma * eff.G(n, u, k) +
                                 err_scale * (gnorm / n_rf) * rng.cgaussian();
        }
    }
    return out;
}

// --- Binary interchange -------------------------------------------------
//
// Layout: magic "HBCH", u32 version (1), u64 M, U, K, then K subcarrier
// matrices in row-major order, each entry as interleaved re/im doubles.
// Little-endian host order.

inline void save_channel(const ChannelSet& ch, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw FileError("save_channel: cannot open " + path);
    f.write("HBCH", 4);
    const std::uint32_t version = 1;
    f.write(reinterpret_cast<const char*>(&version), sizeof version);
    const std::uint64_t dims[3] = {ch.M(), ch.U(), ch.K()};
    f.write(reinterpret_cast<const char*>(dims), sizeof dims);
    for (arma::uword k = 0; k < ch.K(); ++k)
        for (arma::uword m = 0; m < ch.M(); ++m)
            for (arma::uword u = 0; u < ch.U(); ++u) {
                const double re = ch.H(m, u, k).real();
                const double im = ch.H(m, u, k).imag();
                f.write(reinterpret_cast<const char*>(&re), sizeof re);
                f.write(reinterpret_cast<const char*>(&im), sizeof im);
            }
    if (!f)
        throw FileError("save_channel: write failed for " + path);
}

inline ChannelSet load_channel(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw FileError("load_channel: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::string(magic, 4) != "HBCH")
        throw FileError("load_channel: bad magic in " + path);
    std::uint32_t version = 0;
    f.read(reinterpret_cast<char*>(&version), sizeof version);
    if (!f || version != 1)
        throw FileError("load_channel: unsupported version in " + path);
    std::uint64_t dims[3];
    f.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!f)
        throw FileError("load_channel: truncated header in " + path);
    ChannelSet ch;
    ch.H.set_size(dims[0], dims[1], dims[2]);
    for (arma::uword k = 0; k < ch.K(); ++k)
        for (arma::uword m = 0; m < ch.M(); ++m)
            for (arma::uword u = 0; u < ch.U(); ++u) {
                double re = 0.0, im = 0.0;
                f.read(reinterpret_cast<char*>(&re), sizeof re);
                f.read(reinterpret_cast<char*>(&im), sizeof im);
                ch.H(m, u, k) = cx(re, im);
            }
    if (!f)
        throw FileError("load_channel: truncated payload in " + path);
    return ch;
}

} // namespace hybeam::channel

#endif
