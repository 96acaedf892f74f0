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
// Second-order cone subproblem of the locally optimal digital precoding
// step, behind a pluggable solver interface:
//
//   min_{chi, W}  chi
//   s.t.          ||F w_u||_F <= 1                                  u = 1..U
//                 ||vec( sqrt(eta) B^H G^H W - sqrt(eta) )||_F <= chi
//
// The default backend exploits the separable structure: the residual cone
// splits column-wise, so each w_u solves an independent norm-constrained
// least-squares problem whose exact solution follows from the dual secular
// equation. The returned solution is the global conic optimum to machine
// precision, so warm starts are accepted but not needed.

#ifndef HYBEAM_SOCP_HPP
#define HYBEAM_SOCP_HPP

#include <cmath>
#include <memory>
#include <stdexcept>

#include "types.hpp"

namespace hybeam::conic {

// Problem data; see the cone list above. b holds the diagonal of B[k],
// eta the (positive) diagonal of eta[k].
struct SocpProblem {
    arma::cx_mat G;  // N_RF x U effective channel at one subcarrier
    arma::cx_vec b;  // U scalar receivers
    arma::vec eta;   // U positive cone weights
    arma::cx_mat F;  // M x N_RF analog precoder defining the power cones

    void validate() const
    {
        const arma::uword U = G.n_cols;
        if (b.n_elem != U || eta.n_elem != U)
            throw std::invalid_argument("SocpProblem: receiver/weight length must equal U");
        if (F.n_cols != G.n_rows)
            throw std::invalid_argument("SocpProblem: F and G disagree on N_RF");
        if (!G.is_finite() || !b.is_finite() || !eta.is_finite() || !F.is_finite())
            throw SolverError("SocpProblem: non-finite problem data");
        for (double e : eta)
            if (!(e > 0.0))
                throw std::invalid_argument("SocpProblem: eta must be positive");
    }
};

struct SocpSolution {
    arma::cx_mat W; // N_RF x U
    double chi = 0.0;
};

class SocpSolver {
public:
    virtual ~SocpSolver() = default;
    virtual SocpSolution solve(const SocpProblem& p,
                               const arma::cx_mat* warm_start = nullptr) const = 0;
};

namespace detail {

// Exact minimizer of ||C y - t||_2 subject to ||y|| <= 1.
// If the minimum-norm least-squares solution is inside the ball it is
// returned; otherwise the boundary solution y(lam) = (C^H C + lam I)^-1 C^H t
// is located by solving sum_i s_i^2 |beta_i|^2 / (s_i^2 + lam)^2 = 1
// for the unique positive root.
inline arma::cx_vec ball_constrained_lsq(const arma::cx_mat& C, const arma::cx_vec& t,
                                         double tol)
{
    arma::cx_mat Us, V;
    arma::vec s;
    if (!arma::svd(Us, s, V, C))
        throw SolverError("ball_constrained_lsq: SVD failed");

    const double s_max = s.n_elem ? s.max() : 0.0;
    const double rank_cut = s_max * 1e-13;
    arma::uword r = 0;
    while (r < s.n_elem && s(r) > rank_cut)
        ++r;
    if (r == 0)
        return arma::cx_vec(C.n_cols, arma::fill::zeros);

    const arma::cx_vec beta = Us.head_cols(r).t() * t;
    const arma::vec s_r = s.head(r);

    double mn_norm2 = 0.0;
    for (arma::uword i = 0; i < r; ++i)
        mn_norm2 += std::norm(beta(i)) / (s_r(i) * s_r(i));
    if (mn_norm2 <= 1.0) {
        arma::cx_vec yr(r);
        for (arma::uword i = 0; i < r; ++i)
            yr(i) = beta(i) / s_r(i);
        return V.head_cols(r) * yr;
    }

    const auto phi = [&](double lam) {
        double v = 0.0;
        for (arma::uword i = 0; i < r; ++i) {
            const double d = s_r(i) * s_r(i) + lam;
            v += s_r(i) * s_r(i) * std::norm(beta(i)) / (d * d);
        }
        return v;
    };

    // phi is strictly decreasing with phi(0) > 1; phi(lam_hi) <= 1 for
    // lam_hi = ||C^H t||.
    double lo = 0.0;
    double hi = 0.0;
    for (arma::uword i = 0; i < r; ++i)
        hi += s_r(i) * s_r(i) * std::norm(beta(i));
    hi = std::sqrt(hi);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phi(mid) > 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= tol * std::max(1.0, hi))
            break;
    }
    const double lam = 0.5 * (lo + hi);

    arma::cx_vec yr(r);
    for (arma::uword i = 0; i < r; ++i)
        yr(i) = s_r(i) * beta(i) / (s_r(i) * s_r(i) + lam);
    return V.head_cols(r) * yr;
}

} // namespace detail

// Default backend. Solves the U column subproblems
//   min ||A w_u - sqrt(eta_u) e_u||  s.t.  ||F w_u|| <= 1,
// with A = sqrt(eta) B^H G^H, through the change of variables
// y = Lam^(1/2) Q^H w where F^H F = Q Lam Q^H.
class SeparableSolver : public SocpSolver {
public:
    explicit SeparableSolver(double tol = 1e-8) : tol_(tol) {}

    SocpSolution solve(const SocpProblem& p,
                       const arma::cx_mat* /*warm_start*/ = nullptr) const override
    {
        p.validate();
        const arma::uword N_RF = p.G.n_rows;
        const arma::uword U = p.G.n_cols;

        // A row u = sqrt(eta_u) conj(b_u) g_u^H
        arma::cx_mat A(U, N_RF);
        for (arma::uword u = 0; u < U; ++u)
            A.row(u) = std::sqrt(p.eta(u)) * std::conj(p.b(u)) * p.G.col(u).t();

        // Metric of the power cones. Eigenvalues are clamped upward so the
        // change of variables stays invertible; the clamped metric dominates
        // the true one, keeping solutions feasible.
        const arma::cx_mat E = p.F.t() * p.F;
        arma::vec lam;
        arma::cx_mat Q;
        if (!arma::eig_sym(lam, Q, 0.5 * (E + E.t())))
            throw SolverError("SeparableSolver: eigendecomposition of F^H F failed");
        const double lam_floor = std::max(lam.max() * 1e-14, 1e-300);
        arma::vec lam_c = arma::clamp(lam, lam_floor, arma::datum::inf);

        const arma::cx_mat to_y = Q * arma::diagmat(1.0 / arma::sqrt(lam_c)); // w = to_y * y
        const arma::cx_mat C = A * to_y;

        SocpSolution sol;
        sol.W.set_size(N_RF, U);
        double chi2 = 0.0;
        for (arma::uword u = 0; u < U; ++u) {
            arma::cx_vec t(U, arma::fill::zeros);
            t(u) = std::sqrt(p.eta(u));
            const arma::cx_vec y = detail::ball_constrained_lsq(C, t, tol_);
            sol.W.col(u) = to_y * y;
            chi2 += std::pow(arma::norm(C * y - t, 2), 2.0);
        }
        sol.chi = std::sqrt(chi2);
        return sol;
    }

private:
    double tol_;
};

inline const SocpSolver& default_solver()
{
    static const SeparableSolver solver;
    return solver;
}

} // namespace hybeam::conic

#endif
