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

#ifndef HYBEAM_TYPES_HPP
#define HYBEAM_TYPES_HPP

#include <armadillo>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hybeam {

using cx = std::complex<double>;

// Thrown when a numerical solver reports an unusable status.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on file read/write failures.
struct FileError : std::runtime_error {
    explicit FileError(const std::string& what) : std::runtime_error(what) {}
};

// All scalar dimensions and weights of one scenario.
//
// theta is the transmit power relative to the noise power (linear scale).
// weights hold the per-user spectral-efficiency factors z_u with
// 0 < z_u < 1 and sum z_u = 1.
struct SystemConfig {
    arma::uword M = 16;    // transmit antennas
    arma::uword N_RF = 4;  // RF chains, N_RF <= M
    arma::uword K = 16;    // OFDM subcarriers
    arma::uword U = 2;     // single-antenna users, U <= N_RF
    double theta = 10.0;   // transmit SNR, linear, > 0
    arma::vec weights;     // z_1..z_U; empty means equal weights

    // Channel statistics
    arma::uword D = 8;                     // delay taps
    arma::uword clusters_per_user = 5;     // C_u, identical across users
    arma::uword scatterers_per_cluster = 10; // L_uc
    double angular_spread_deg = 10.0;      // Laplacian AOD spread (std dev)
    double element_spacing_ratio = 0.5;    // delta / lambda

    std::uint64_t seed = 1;

    // Optional per-user stream counts for the closed-form design
    // (empty = automatic allocation by dominant eigenvalues).
    std::vector<arma::uword> stream_allocation;

    arma::vec effective_weights() const
    {
        if (weights.n_elem == 0)
            return arma::vec(U, arma::fill::value(1.0 / static_cast<double>(U)));
        return weights;
    }

    void validate() const
    {
        if (M == 0 || K == 0 || D == 0)
            throw std::invalid_argument("SystemConfig: M, K and D must be positive");
        if (N_RF == 0 || N_RF > M)
            throw std::invalid_argument("SystemConfig: need 0 < N_RF <= M");
        if (U == 0 || U > N_RF)
            throw std::invalid_argument("SystemConfig: need 0 < U <= N_RF");
        if (!(theta > 0.0))
            throw std::invalid_argument("SystemConfig: theta must be positive");
        if (clusters_per_user == 0 || scatterers_per_cluster == 0)
            throw std::invalid_argument("SystemConfig: cluster/scatterer counts must be positive");
        if (weights.n_elem != 0) {
            if (weights.n_elem != U)
                throw std::invalid_argument("SystemConfig: weights length must equal U");
            for (arma::uword u = 0; u < U; ++u)
                if (!(weights(u) > 0.0) || !(weights(u) < 1.0))
                    throw std::invalid_argument("SystemConfig: weights must satisfy 0 < z_u < 1");
            if (std::abs(arma::accu(weights) - 1.0) > 1e-12)
                throw std::invalid_argument("SystemConfig: weights must sum to 1");
        }
        if (!stream_allocation.empty()) {
            if (stream_allocation.size() != U)
                throw std::invalid_argument("SystemConfig: stream_allocation length must equal U");
            arma::uword total = 0;
            for (arma::uword n : stream_allocation) {
                if (n == 0)
                    throw std::invalid_argument("SystemConfig: every user needs at least one stream");
                total += n;
            }
            if (total != N_RF)
                throw std::invalid_argument("SystemConfig: stream_allocation must sum to N_RF");
        }
    }
};

// Frequency-domain channel for all users: slice k is the M x U matrix H[k]
// whose column u is the channel vector of user u at subcarrier k.
struct ChannelSet {
    arma::cx_cube H; // M x U x K

    arma::uword M() const { return H.n_rows; }
    arma::uword U() const { return H.n_cols; }
    arma::uword K() const { return H.n_slices; }
};

// Low-dimensional channel seen by the digital stage: slice k is
// G[k] = F^H H[k] of size N_RF x U.
struct EffectiveChannel {
    arma::cx_cube G; // N_RF x U x K
};

// Constant-modulus analog precoder. The internal matrix X has unit-modulus
// entries; the physical precoder is F = X / sqrt(M), so |F_ni| = 1/sqrt(M).
// Keeping X at modulus one makes the tangent-space projection of the
// manifold optimizer exact.
class AnalogPrecoder {
public:
    static AnalogPrecoder from_unit_modulus(arma::cx_mat X)
    {
        for (const cx& v : X)
            if (std::abs(std::abs(v) - 1.0) > 1e-12)
                throw std::invalid_argument("AnalogPrecoder: entries must have unit modulus");
        return AnalogPrecoder(std::move(X));
    }

    // Skips the modulus check; for tests and internal use where the
    // invariant is established elsewhere.
    static AnalogPrecoder unchecked(arma::cx_mat X) { return AnalogPrecoder(std::move(X)); }

    const arma::cx_mat& unit() const { return X_; }

    arma::cx_mat physical() const
    {
        return X_ / std::sqrt(static_cast<double>(X_.n_rows));
    }

    arma::uword M() const { return X_.n_rows; }
    arma::uword N_RF() const { return X_.n_cols; }

private:
    explicit AnalogPrecoder(arma::cx_mat X) : X_(std::move(X)) {}
    arma::cx_mat X_;
};

// Per-subcarrier digital precoders: slice k is W[k] of size N_RF x U
// (or M x U for the fully digital baseline).
struct DigitalPrecoderSet {
    arma::cx_cube W;

    arma::uword K() const { return W.n_slices; }
};

// Per-user per-subcarrier link metrics plus the AM/GM diagnostics.
// sinr = 1/mse - 1 and rate = log2(1/mse) hold by construction.
// bound(k) is NaN when some SINR at subcarrier k is exactly zero (the
// max/min ratio is undefined there).
struct MetricsReport {
    arma::mat rate;     // U x K, bits/s/Hz
    arma::mat mse;      // U x K, in (0, 1]
    arma::mat sinr;     // U x K, linear
    arma::cx_mat rx;    // U x K, scalar MMSE receivers b_u[k]
    arma::vec iota;     // K, AM/GM gap factor per subcarrier
    arma::vec bound;    // K, (o-1)^2/8 upper bound per subcarrier
    double weighted_sum_rate = 0.0;
};

enum class Mode { FullDigital, LAOHB, AOHB, CMDD };

inline const char* to_string(Mode m)
{
    switch (m) {
    case Mode::FullDigital: return "fulldigital";
    case Mode::LAOHB: return "laohb";
    case Mode::AOHB: return "aohb";
    case Mode::CMDD: return "cmdd";
    }
    return "?";
}

// Tolerances and iteration caps of the iterative solvers.
struct SolverOptions {
    // Analog stage (Riemannian conjugate gradient)
    double manifold_omega = 1e-4;
    int manifold_max_iters = 200;
    double armijo_a = 1.0;
    double armijo_b = 0.5;
    double armijo_c = 1e-4;
    int armijo_m_max = 50;

    // Digital stage
    double digital_omega = 1e-4;
    int socp_max_iters = 100;  // locally optimal digital precoding
    int wmmse_max_iters = 500; // weighted-MMSE digital precoding
    double socp_tol = 1e-8;

    // Alternating framework
    double outer_omega = 1e-3;
    int outer_max_iters = 50;
    bool random_init = false; // default initialization is the closed-form design
};

// Outcome of one framework run.
struct RunResult {
    arma::cx_mat F;        // physical analog precoder (identity for FullDigital)
    DigitalPrecoderSet W;
    std::vector<double> trace; // weighted sum rate per outer iteration, incl. initial
    int iterations = 0;
    Mode mode = Mode::LAOHB;
    bool converged = false;
};

} // namespace hybeam

#endif
