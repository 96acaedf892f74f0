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
// Riemannian conjugate-gradient ascent of the weighted sum rate over the
// product of complex circles (the constant-modulus analog precoder).
//
// The manifold point x is stored with unit-modulus entries and the physical
// precoder is F = unvec(x)/sqrt(M). At unit modulus the orthogonal
// projection P(v) = v - Re[v o x*] o x is exactly tangent; the 1/sqrt(M)
// amplitude of the phase-shifter network is folded into F.

#ifndef HYBEAM_MANIFOLD_HPP
#define HYBEAM_MANIFOLD_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "metrics.hpp"
#include "types.hpp"

namespace hybeam::manifold {

inline void check_on_manifold(const arma::cx_vec& x)
{
    for (const cx& v : x)
        if (std::abs(std::abs(v) - 1.0) > 1e-12)
            throw std::invalid_argument("manifold: point has non-unit-modulus entries");
}

// Physical analog precoder for a manifold point.
inline arma::cx_mat precoder_from_point(const arma::cx_vec& x, arma::uword M, arma::uword N_RF)
{
    return arma::reshape(x, M, N_RF) / std::sqrt(static_cast<double>(M));
}

// Orthogonal projection onto the tangent space at x:
// P(v) = v - Re[v o x*] o x.
inline arma::cx_vec project_tangent(const arma::cx_vec& x, const arma::cx_vec& v)
{
    check_on_manifold(x);
    if (v.n_elem != x.n_elem)
        throw std::invalid_argument("project_tangent: dimension mismatch");
    arma::cx_vec out(v.n_elem);
    for (arma::uword i = 0; i < v.n_elem; ++i) {
        const double radial = (v(i) * std::conj(x(i))).real();
        out(i) = v(i) - radial * x(i);
    }
    return out;
}

// Retraction: elementwise renormalization of x + step. Entries whose sum
// lands exactly at the origin keep their previous value.
inline arma::cx_vec retract(const arma::cx_vec& x, const arma::cx_vec& step)
{
    arma::cx_vec out(x.n_elem);
    for (arma::uword i = 0; i < x.n_elem; ++i) {
        const cx s = x(i) + step(i);
        const double mag = std::abs(s);
        out(i) = (mag > 0.0) ? s / mag : x(i);
    }
    return out;
}

// Gradient of the weighted sum rate with respect to the conjugate of the
// physical precoder F:
//   df/dF* = sum_k sum_u (z_u/ln2) [ theta h h^H F W W^H / (1 + theta ||h^H F W||^2)
//                                  - theta h h^H F Wu Wu^H / (1 + theta ||h^H F Wu||^2) ]
// with Wu = W[k] minus column u.
inline arma::cx_mat euclidean_gradient_F(const ChannelSet& ch, const arma::cx_mat& F,
                                         const DigitalPrecoderSet& W, const arma::vec& z,
                                         double theta)
{
    const arma::uword U = ch.U();
    const double inv_ln2 = 1.0 / std::log(2.0);
    arma::cx_mat grad(F.n_rows, F.n_cols, arma::fill::zeros);

    for (arma::uword k = 0; k < ch.K(); ++k) {
        const arma::cx_mat& H_k = ch.H.slice(k);
        const arma::cx_mat& W_k = W.W.slice(k);
        for (arma::uword u = 0; u < U; ++u) {
            const arma::cx_vec h = H_k.col(u);
            const arma::cx_rowvec r = h.t() * F;      // h^H F
            const arma::cx_rowvec rw = r * W_k;       // h^H F W
            const arma::cx_rowvec full = rw * W_k.t();          // h^H F W W^H
            const arma::cx_rowvec drop = full - rw(u) * W_k.col(u).t();
            const double p_full = std::pow(arma::norm(rw, 2), 2.0);
            const double p_drop = p_full - std::norm(rw(u));
            const arma::cx_rowvec coeff =
                (z(u) * inv_ln2 * theta) *
                (full / (1.0 + theta * p_full) - drop / (1.0 + theta * p_drop));
            grad += h * coeff;
        }
    }
    return grad;
}

// Same gradient with respect to the conjugate of the unit-modulus point x
// (chain rule through F = unvec(x)/sqrt(M)).
inline arma::cx_vec euclidean_gradient(const arma::cx_vec& x, const ChannelSet& ch,
                                       const DigitalPrecoderSet& W, const arma::vec& z,
                                       double theta)
{
    const arma::uword M = ch.M();
    const arma::uword N_RF = x.n_elem / M;
    const arma::cx_mat F = precoder_from_point(x, M, N_RF);
    return arma::vectorise(euclidean_gradient_F(ch, F, W, z, theta)) /
           std::sqrt(static_cast<double>(M));
}

// Armijo backtracking along a tangent direction d. Accepts the largest step
// a*b^m (smallest m <= m_max) with sufficient increase
//   f(Ret_x(alpha d)) >= f(x) + c * alpha * ||d||_F^2.
// Returns alpha = 0 and f(x) when no step qualifies or d vanishes.
inline std::pair<double, double> armijo_step(const arma::cx_vec& x, const arma::cx_vec& d,
                                             const std::function<double(const arma::cx_vec&)>& f_eval,
                                             double a, double b, double c, int m_max)
{
    if (!(a > 0.0) || !(b > 0.0) || !(b < 1.0) || !(c > 0.0))
        throw std::invalid_argument("armijo_step: need a > 0, 0 < b < 1, c > 0");
    const double f0 = f_eval(x);
    const double dn2 = std::pow(arma::norm(d, 2), 2.0);
    if (dn2 < 1e-28)
        return {0.0, f0};
    double alpha = a;
    for (int m = 0; m <= m_max; ++m, alpha *= b) {
        const double f_new = f_eval(retract(x, alpha * d));
        if (f_new >= f0 + c * alpha * dn2)
            return {alpha, f_new};
    }
    return {0.0, f0};
}

struct AnalogResult {
    arma::cx_vec x;
    std::vector<double> trace; // objective per iteration, including initial value
    int iterations = 0;
    bool converged = false;
};

// Conjugate-gradient ascent with Polak-Ribiere directions and vector
// transport by projection. The returned objective never falls below the
// initial one (Armijo accepts only sufficient increases).
inline AnalogResult optimize_analog(const arma::cx_vec& x0, const ChannelSet& ch,
                                    const DigitalPrecoderSet& W, const arma::vec& z,
                                    double theta, const SolverOptions& opt = {})
{
    check_on_manifold(x0);
    const arma::uword M = ch.M();
    const arma::uword N_RF = x0.n_elem / M;
    if (x0.n_elem != M * N_RF)
        throw std::invalid_argument("optimize_analog: point length must be M*N_RF");

    const auto objective = [&](const arma::cx_vec& x) {
        return metrics::weighted_sum_rate(ch, precoder_from_point(x, M, N_RF), W, z, theta);
    };

    AnalogResult res;
    res.x = x0;
    double f = objective(res.x);
    res.trace.push_back(f);

    arma::cx_vec g = project_tangent(res.x, euclidean_gradient(res.x, ch, W, z, theta));
    arma::cx_vec d = g;
    bool d_is_gradient = true;

    for (int t = 0; t < opt.manifold_max_iters; ++t) {
        auto step = armijo_step(res.x, d, objective, opt.armijo_a, opt.armijo_b, opt.armijo_c,
                                opt.armijo_m_max);
        if (step.first == 0.0 && !d_is_gradient) {
            // A conjugate direction can stall while the gradient still
            // ascends: retry from the steepest-ascent direction before
            // declaring stationarity.
            d = g;
            d_is_gradient = true;
            step = armijo_step(res.x, d, objective, opt.armijo_a, opt.armijo_b, opt.armijo_c,
                               opt.armijo_m_max);
        }
        ++res.iterations;
        if (step.first == 0.0) {
            res.trace.push_back(f);
            res.converged = true;
            break;
        }
        const arma::cx_vec x_new = retract(res.x, step.first * d);
        const arma::cx_vec g_new =
            project_tangent(x_new, euclidean_gradient(x_new, ch, W, z, theta));

        const arma::cx_vec g_old_t = project_tangent(x_new, g);
        const double denom = std::pow(arma::norm(g_old_t, 2), 2.0);
        // Polak-Ribiere under the manifold metric <a,b> = Re[a^H b].
        double beta = 0.0;
        if (denom >= 1e-14)
            beta = arma::cdot(g_new, g_new - g_old_t).real() / denom;
        if (beta < 0.0)
            beta = 0.0; // restart with a pure gradient step
        const arma::cx_vec d_next = g_new + beta * project_tangent(x_new, d);

        const double rel = (step.second - f) / std::max(std::abs(f), 1e-12);
        res.x = x_new;
        f = step.second;
        res.trace.push_back(f);
        if (rel < opt.manifold_omega && d_is_gradient) {
            g = g_new;
            res.converged = true;
            break;
        }
        if (rel < opt.manifold_omega) {
            // Stalled on a conjugate step: take a gradient step before the
            // stopping rule may fire.
            g = g_new;
            d = g_new;
            d_is_gradient = true;
        } else {
            g = g_new;
            d = d_next;
            d_is_gradient = (beta == 0.0);
        }
    }
    return res;
}

} // namespace hybeam::manifold

#endif
