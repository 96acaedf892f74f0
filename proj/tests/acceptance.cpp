// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Each test case checks one release criterion end to end
// and prints a single pass/fail line with its runtime.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hybeam/harness.hpp"

using namespace hybeam;

namespace {

class CriterionTimer {
public:
    CriterionTimer(int id, std::string description, double budget_s)
        : id_(id), description_(std::move(description)), budget_s_(budget_s),
          start_(std::chrono::steady_clock::now())
    {
    }

    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

    void finish(bool pass) const
    {
        const double t = seconds();
        std::printf("[%s] criterion %2d: %s (%.1f s, budget %.0f s)\n",
                    pass && t < budget_s_ ? "PASS" : "FAIL", id_, description_.c_str(), t,
                    budget_s_);
        std::fflush(stdout);
        REQUIRE(pass);
        REQUIRE(t < budget_s_);
    }

private:
    int id_;
    std::string description_;
    double budget_s_;
    std::chrono::steady_clock::time_point start_;
};

SystemConfig desk_cfg()
{
    SystemConfig cfg;
    cfg.M = 16;
    cfg.N_RF = 4;
    cfg.K = 16;
    cfg.U = 2;
    cfg.theta = 10.0; // 10 dB
    cfg.D = 8;
    cfg.clusters_per_user = 5;
    cfg.scatterers_per_cluster = 10;
    cfg.seed = 1;
    return cfg;
}

framework::ScenarioOptions desk_opt()
{
    framework::ScenarioOptions opt;
    opt.solver.socp_max_iters = 20;
    opt.workers = 2;
    return opt;
}

arma::cx_mat random_cx(arma::uword rows, arma::uword cols, RngStream& rng)
{
    arma::cx_mat A(rows, cols);
    for (cx& v : A)
        v = rng.cgaussian();
    return A;
}

arma::cx_mat random_precoder(arma::uword M, arma::uword N, RngStream& rng)
{
    arma::cx_mat X(M, N);
    for (cx& v : X)
        v = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
    return X / std::sqrt(static_cast<double>(M));
}

double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double qam16_ber_analytic(double theta)
{
    const double t = std::sqrt(theta / 5.0);
    return 0.75 * q_func(t) + 0.5 * q_func(3.0 * t) - 0.25 * q_func(5.0 * t);
}

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream o;
    o << f.rdbuf();
    return o.str();
}

int run_cli(const std::string& args)
{
    const std::string cmd =
        std::string(HYBEAM_CLI_PATH) + " " + args + " >/dev/null 2>acceptance_cli.err";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

} // namespace

TEST_CASE("criterion 1: analytic gradient vs finite differences", "[acceptance]")
{
    CriterionTimer timer(1, "gradient matches central differences (rel err < 1e-6)", 10.0);
    RngStream rng(101);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const arma::uword M = 2 + (rng.u64() % 5);                          // <= 6
        const arma::uword N = 1 + (rng.u64() % std::min<arma::uword>(3, M)); // <= 3
        const arma::uword U = 1 + (rng.u64() % N);                           // <= 3
        const arma::uword K = 1 + (rng.u64() % 4);                           // <= 4

        ChannelSet ch;
        ch.H.set_size(M, U, K);
        for (cx& v : ch.H)
            v = rng.cgaussian();
        DigitalPrecoderSet W;
        W.W.set_size(N, U, K);
        for (cx& v : W.W)
            v = rng.cgaussian();
        arma::vec z(U);
        for (double& v : z)
            v = rng.uniform(0.2, 1.0);
        z /= arma::accu(z);
        const double theta = std::pow(10.0, rng.uniform(-0.3, 1.2));
        const arma::cx_mat F = random_precoder(M, N, rng);

        const arma::cx_mat g_ana = manifold::euclidean_gradient_F(ch, F, W, z, theta);
        arma::cx_mat g_num(M, N);
        const double step = 1e-6;
        const auto f_at = [&](const arma::cx_mat& Fc) {
            return metrics::weighted_sum_rate(ch, Fc, W, z, theta);
        };
        for (arma::uword j = 0; j < N; ++j)
            for (arma::uword i = 0; i < M; ++i) {
                arma::cx_mat Fp = F, Fm = F;
                Fp(i, j) += step;
                Fm(i, j) -= step;
                const double d_re = (f_at(Fp) - f_at(Fm)) / (2.0 * step);
                Fp = F;
                Fm = F;
                Fp(i, j) += cx(0.0, step);
                Fm(i, j) -= cx(0.0, step);
                const double d_im = (f_at(Fp) - f_at(Fm)) / (2.0 * step);
                g_num(i, j) = 0.5 * cx(d_re, d_im);
            }
        const double rel = arma::norm(arma::vectorise(g_num - g_ana), 2) /
                           std::max(arma::norm(arma::vectorise(g_ana), 2), 1e-12);
        worst = std::max(worst, rel);
    }
    timer.finish(worst < 1e-6);
}

TEST_CASE("criterion 2: rate-MSE duality", "[acceptance]")
{
    CriterionTimer timer(2, "|R - log2(1/xi)| < 1e-9 on 100 feasible instances", 5.0);
    RngStream rng(102);
    bool ok = true;
    for (int rep = 0; rep < 100 && ok; ++rep) {
        const arma::uword M = 2 + (rng.u64() % 7);
        const arma::uword N = 1 + (rng.u64() % std::min<arma::uword>(4, M));
        const arma::uword U = 1 + (rng.u64() % N);
        const arma::uword K = 1 + (rng.u64() % 4);
        const double theta = std::pow(10.0, rng.uniform(-0.5, 1.5));
        const arma::cx_mat F = random_precoder(M, N, rng);
        ChannelSet ch;
        ch.H.set_size(M, U, K);
        for (cx& v : ch.H)
            v = rng.cgaussian();
        DigitalPrecoderSet W;
        W.W.set_size(N, U, K);
        for (arma::uword k = 0; k < K; ++k)
            W.W.slice(k) = digital::normalize_digital(random_cx(N, U, rng), F);
        for (arma::uword k = 0; k < K && ok; ++k) {
            const arma::cx_mat G = metrics::effective_channel(ch.H.slice(k), F);
            for (arma::uword u = 0; u < U; ++u) {
                const double rate = metrics::user_rate(ch.H.slice(k), F, W.W.slice(k), u, theta);
                const double xi = metrics::user_mse(G.col(u), W.W.slice(k), u, theta);
                if (std::abs(rate - std::log2(1.0 / xi)) >= 1e-9)
                    ok = false;
            }
        }
    }
    timer.finish(ok);
}

TEST_CASE("criterion 3: AM/GM gap bound audit and anchor point", "[acceptance]")
{
    CriterionTimer timer(3, "iota <= (o-1)^2/8 on 1e4 draws; 2 dB anchor reproduces", 5.0);
    RngStream rng(103);
    bool ok = true;
    for (int rep = 0; rep < 10000 && ok; ++rep) {
        const arma::uword U = 2 + (rng.u64() % 5);
        arma::vec xi(U), z(U);
        for (arma::uword u = 0; u < U; ++u) {
            xi(u) = rng.uniform(1e-3, 0.999);
            z(u) = rng.uniform(0.05, 1.0);
        }
        z /= arma::accu(z);
        arma::vec sinr(U);
        for (arma::uword u = 0; u < U; ++u)
            sinr(u) = 1.0 / xi(u) - 1.0;
        if (metrics::amgm_gap(xi, z) > metrics::amgm_gap_bound(sinr) + 1e-12)
            ok = false;
    }

    // Anchor: 2 bits/s/Hz weighted spectral efficiency puts the weighted
    // geometric mean at 2^-2 = 0.2500; the worst-case arithmetic mean at a
    // 2 dB SINR spread is GM (1 + iota) with iota = (10^0.2 - 1)^2/8.
    const double gm = std::pow(2.0, -2.0);
    const double iota = metrics::amgm_gap_bound(arma::vec{1.0, std::pow(10.0, 0.2)});
    const double am = gm * (1.0 + iota);
    ok = ok && std::abs(gm - 0.2500) < 1e-12;
    ok = ok && std::abs(iota - 0.0428) <= 1e-4;
    ok = ok && std::abs(am - 0.2607) <= 1e-4;
    timer.finish(ok);
}

TEST_CASE("criterion 4: manifold contracts", "[acceptance]")
{
    CriterionTimer timer(4, "projection/retraction residuals; monotone ascent traces", 30.0);
    RngStream rng(104);
    bool ok = true;
    for (int rep = 0; rep < 10000 && ok; ++rep) {
        const arma::uword n = 1 + (rng.u64() % 32);
        arma::cx_vec x(n), v(n);
        for (arma::uword i = 0; i < n; ++i) {
            x(i) = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
            v(i) = 3.0 * rng.cgaussian();
        }
        const arma::cx_vec p = manifold::project_tangent(x, v);
        for (arma::uword i = 0; i < n; ++i)
            if (std::abs((p(i) * std::conj(x(i))).real()) >= 1e-10)
                ok = false;
        const arma::cx_vec r = manifold::retract(x, v);
        for (arma::uword i = 0; i < n; ++i)
            if (std::abs(std::abs(r(i)) - 1.0) >= 1e-12)
                ok = false;
    }

    for (int seed = 0; seed < 20 && ok; ++seed) {
        RngStream srng(200 + seed);
        const arma::uword M = 4, N = 2, U = 2, K = 3;
        ChannelSet ch;
        ch.H.set_size(M, U, K);
        for (cx& v : ch.H)
            v = srng.cgaussian();
        DigitalPrecoderSet W;
        W.W.set_size(N, U, K);
        for (cx& v : W.W)
            v = srng.cgaussian();
        arma::cx_vec x0(M * N);
        for (cx& v : x0)
            v = std::polar(1.0, srng.uniform(0.0, 2.0 * M_PI));
        const arma::vec z = {0.5, 0.5};
        const auto res = manifold::optimize_analog(x0, ch, W, z, 10.0);
        for (std::size_t i = 1; i < res.trace.size(); ++i)
            if (res.trace[i] < res.trace[i - 1] - 1e-12)
                ok = false;
    }
    timer.finish(ok);
}

TEST_CASE("criterion 5: brute-force optimality at micro scale", "[acceptance]")
{
    CriterionTimer timer(5, "phase-grid, allocation enumeration, projection optimality", 60.0);
    bool ok = true;

    // (a) conjugate gradient vs 1e4-point phase grid, 10 seeds
    for (int seed = 0; seed < 10 && ok; ++seed) {
        RngStream rng(300 + seed);
        ChannelSet ch;
        ch.H.set_size(2, 1, 1);
        ch.H(0, 0, 0) = rng.cgaussian();
        ch.H(1, 0, 0) = rng.cgaussian();
        DigitalPrecoderSet W;
        W.W.set_size(1, 1, 1);
        W.W(0, 0, 0) = 1.0;
        const arma::vec z = {1.0};
        const double theta = 10.0;

        double grid_best = 0.0;
        const arma::cx_vec h = ch.H.slice(0).col(0);
        for (int i = 0; i < 10000; ++i) {
            const double psi = 2.0 * M_PI * i / 10000.0;
            const double sig =
                std::norm(std::conj(h(0)) + std::conj(h(1)) * std::polar(1.0, psi)) / 2.0;
            grid_best = std::max(grid_best, std::log2(1.0 + theta * sig));
        }
        arma::cx_vec x0(2);
        for (cx& v : x0)
            v = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
        SolverOptions opt;
        opt.manifold_omega = 1e-9;
        opt.manifold_max_iters = 500;
        const auto res = manifold::optimize_analog(x0, ch, W, z, theta, opt);
        if (res.trace.back() < grid_best - 1e-3)
            ok = false;
    }

    // (b) stream allocation vs exhaustive enumeration, 100 instances
    if (ok) {
        RngStream rng(301);
        for (int rep = 0; rep < 100 && ok; ++rep) {
            const arma::uword U = 2 + (rng.u64() % 3);
            const arma::uword M = 8;
            const arma::uword N_RF = U + (rng.u64() % (8 - U + 1));
            std::vector<arma::vec> rhos(U);
            for (arma::uword u = 0; u < U; ++u) {
                arma::vec r(M);
                for (double& v : r)
                    v = rng.uniform(0.0, 10.0);
                rhos[u] = arma::sort(r, "descend");
            }
            const auto counts = cmdd::allocate_streams(rhos, N_RF);
            double got = 0.0;
            for (arma::uword u = 0; u < U; ++u)
                got += arma::accu(rhos[u].head(counts[u]));

            double best = -1.0;
            std::vector<arma::uword> c(U, 1);
            const std::function<void(arma::uword, arma::uword)> recurse =
                [&](arma::uword u, arma::uword left) {
                    if (u == U - 1) {
                        if (left >= 1 && left <= M) {
                            c[u] = left;
                            double v = 0.0;
                            for (arma::uword i = 0; i < U; ++i)
                                v += arma::accu(rhos[i].head(c[i]));
                            best = std::max(best, v);
                        }
                        return;
                    }
                    for (arma::uword n = 1; n + (U - u - 1) <= left && n <= M; ++n) {
                        c[u] = n;
                        recurse(u + 1, left - n);
                    }
                };
            recurse(0, N_RF);
            if (std::abs(got - best) > 1e-9)
                ok = false;
        }
    }

    // (c) phase projection beats every grid competitor
    if (ok) {
        RngStream rng(302);
        for (int rep = 0; rep < 20 && ok; ++rep) {
            const arma::uword M = 2 + (rng.u64() % 3);
            const arma::uword N = 1 + (rng.u64() % 3);
            const arma::cx_mat P = random_cx(M, N, rng);
            const arma::cx_mat F = cmdd::phase_project(P);
            const double base = std::pow(arma::norm(arma::vectorise(F - P), 2), 2.0);
            for (arma::uword j = 0; j < N && ok; ++j)
                for (arma::uword i = 0; i < M && ok; ++i)
                    for (int gphase = 0; gphase < 360; ++gphase) {
                        arma::cx_mat F2 = F;
                        F2(i, j) = std::polar(1.0 / std::sqrt(static_cast<double>(M)),
                                              2.0 * M_PI * gphase / 360.0);
                        if (std::pow(arma::norm(arma::vectorise(F2 - P), 2), 2.0) <
                            base - 1e-12)
                            ok = false;
                    }
        }
    }
    timer.finish(ok);
}

TEST_CASE("criterion 6: algorithm ordering at desk scale", "[acceptance]")
{
    CriterionTimer timer(6, "FullDigital >= LAOHB >= AOHB - 3% >= CMDD - 10%, 100 trials",
                         600.0);
    const SystemConfig cfg = desk_cfg();
    const auto sc = framework::run_scenario(
        cfg, {Mode::FullDigital, Mode::LAOHB, Mode::AOHB, Mode::CMDD}, 100, Rng(cfg.seed),
        desk_opt());
    const double fd = sc.mean_wsr(0);
    const double laohb = sc.mean_wsr(1);
    const double aohb = sc.mean_wsr(2);
    const double cmdd_m = sc.mean_wsr(3);
    std::printf("    means: fulldigital=%.3f laohb=%.3f aohb=%.3f cmdd=%.3f\n", fd, laohb,
                aohb, cmdd_m);

    bool ok = fd >= laohb;
    ok = ok && laohb >= aohb * (1.0 - 0.03);
    ok = ok && aohb >= cmdd_m * (1.0 - 0.10);
    ok = ok && std::abs(laohb - aohb) / std::max(laohb, aohb) < 0.03;
    for (const auto& trial : sc.trials)
        for (const auto& outcome : trial)
            ok = ok && outcome.ok;
    timer.finish(ok);
}

TEST_CASE("criterion 7: unequal weights keep LAOHB ahead", "[acceptance]")
{
    CriterionTimer timer(7, "z = [0.7, 0.3]: mean LAOHB >= mean AOHB over 50 trials", 600.0);
    SystemConfig cfg = desk_cfg();
    cfg.weights = arma::vec{0.7, 0.3};
    const auto sc =
        framework::run_scenario(cfg, {Mode::LAOHB, Mode::AOHB}, 50, Rng(cfg.seed), desk_opt());
    std::printf("    means: laohb=%.3f aohb=%.3f\n", sc.mean_wsr(0), sc.mean_wsr(1));
    timer.finish(sc.mean_wsr(0) >= sc.mean_wsr(1));
}

TEST_CASE("criterion 8: closed-form initialization saves outer iterations", "[acceptance]")
{
    CriterionTimer timer(8, "median outer iterations: cmdd init <= random init, 20 seeds",
                         600.0);
    const SystemConfig cfg = desk_cfg();
    framework::ScenarioOptions opt_c = desk_opt();
    framework::ScenarioOptions opt_r = desk_opt();
    opt_r.solver.random_init = true;

    bool ok = true;
    for (Mode mode : {Mode::AOHB, Mode::LAOHB}) {
        const auto sc_c = framework::run_scenario(cfg, {mode}, 20, Rng(11), opt_c);
        const auto sc_r = framework::run_scenario(cfg, {mode}, 20, Rng(11), opt_r);
        std::vector<int> it_c, it_r;
        for (int t = 0; t < 20; ++t) {
            ok = ok && sc_c.trials[t][0].ok && sc_r.trials[t][0].ok;
            it_c.push_back(sc_c.trials[t][0].run.iterations);
            it_r.push_back(sc_r.trials[t][0].run.iterations);
        }
        std::nth_element(it_c.begin(), it_c.begin() + 10, it_c.end());
        std::nth_element(it_r.begin(), it_r.begin() + 10, it_r.end());
        std::printf("    %s: median outer iterations cmdd=%d random=%d\n", to_string(mode),
                    it_c[10], it_r[10]);
        ok = ok && it_c[10] <= it_r[10];
    }
    timer.finish(ok);
}

TEST_CASE("criterion 9: BER against the analytic curve and across SNR", "[acceptance]")
{
    CriterionTimer timer(9, "scalar 16-QAM within 3 sigma; system BER decreasing in theta",
                         300.0);
    bool ok = true;

    // (a) scalar AWGN channel at 6, 10, 14 dB
    for (double theta_db : {6.0, 10.0, 14.0}) {
        const double theta = std::pow(10.0, theta_db / 10.0);
        ChannelSet ch;
        ch.H.set_size(1, 1, 1);
        ch.H(0, 0, 0) = 1.0;
        arma::cx_mat F(1, 1);
        F(0, 0) = 1.0;
        DigitalPrecoderSet W;
        W.W.set_size(1, 1, 1);
        W.W(0, 0, 0) = 1.0;
        const arma::uword symbols = 200000;
        RngStream rng(900 + static_cast<int>(theta_db));
        const auto res = ber::simulate_ber(ch, F, W, theta, symbols, rng);
        const double p = qam16_ber_analytic(theta);
        const double sigma = std::sqrt(p * (1.0 - p) / (4.0 * symbols));
        std::printf("    scalar %g dB: sim=%.5g analytic=%.5g (3sigma=%.2g)\n", theta_db,
                    res.aggregate, p, 3.0 * sigma);
        ok = ok && std::abs(res.aggregate - p) < 3.0 * sigma;
    }

    // (b) full system: mean BER strictly decreasing over the theta grid
    if (ok) {
        const std::vector<Mode> modes = {Mode::FullDigital, Mode::LAOHB, Mode::AOHB,
                                         Mode::CMDD};
        const arma::uword trials = 50;
        const arma::uword symbols = 1000;
        std::vector<std::vector<double>> mean_ber(modes.size()); // [mode][theta point]
        for (double theta_db : {6.0, 10.0, 14.0}) {
            SystemConfig cfg = desk_cfg();
            cfg.theta = std::pow(10.0, theta_db / 10.0);
            const Rng rng(cfg.seed);
            std::vector<std::vector<double>> ber_rows(trials);
            parallel_for(trials, 2, [&](std::size_t t) {
                RngStream ch_rng = rng.stream(Stream::channel, t);
                const ChannelSet H = channel::to_frequency(
                    channel::gen_geometric_channel(cfg, ch_rng), cfg.K);
                ber_rows[t].resize(modes.size());
                for (std::size_t a = 0; a < modes.size(); ++a) {
                    RngStream noise = rng.stream(Stream::noise, t, a + 1);
                    RngStream init = rng.stream(Stream::init, t, a + 1);
                    RngStream link = rng.stream(Stream::noise, t, 1000 + a);
                    auto opt = desk_opt();
                    auto [run, report] = framework::run_algorithm(
                        modes[a], H, cfg, opt.solver, opt.csi, noise, init);
                    ber_rows[t][a] =
                        ber::simulate_ber(H, run.F, run.W, cfg.theta, symbols, link).aggregate;
                }
            });
            for (std::size_t a = 0; a < modes.size(); ++a) {
                double acc = 0.0;
                for (arma::uword t = 0; t < trials; ++t)
                    acc += ber_rows[t][a];
                mean_ber[a].push_back(acc / trials);
            }
        }
        for (std::size_t a = 0; a < modes.size(); ++a) {
            std::printf("    %s: BER %g / %g / %g\n", to_string(modes[a]), mean_ber[a][0],
                        mean_ber[a][1], mean_ber[a][2]);
            ok = ok && mean_ber[a][0] > mean_ber[a][1];
            ok = ok && mean_ber[a][1] > mean_ber[a][2];
        }
    }
    timer.finish(ok);
}

TEST_CASE("criterion 10: imperfect CSI degrades gracefully", "[acceptance]")
{
    CriterionTimer timer(10, "mean rate non-decreasing in varsigma^2; <15% loss at 0.9",
                         300.0);
    const std::vector<Mode> modes = {Mode::LAOHB, Mode::AOHB, Mode::CMDD};
    std::vector<std::vector<double>> means(modes.size());
    for (double vs : {0.8, 0.9, 1.0}) {
        SystemConfig cfg = desk_cfg();
        framework::ScenarioOptions opt = desk_opt();
        opt.csi.varsigma_h_sq = vs;
        const auto sc = framework::run_scenario(cfg, modes, 50, Rng(cfg.seed), opt);
        for (std::size_t a = 0; a < modes.size(); ++a)
            means[a].push_back(sc.mean_wsr(a));
    }
    bool ok = true;
    for (std::size_t a = 0; a < modes.size(); ++a) {
        std::printf("    %s: wsr %0.3f / %0.3f / %0.3f\n", to_string(modes[a]), means[a][0],
                    means[a][1], means[a][2]);
        ok = ok && means[a][0] <= means[a][1];
        ok = ok && means[a][1] <= means[a][2];
        ok = ok && means[a][1] >= 0.85 * means[a][2];
    }
    timer.finish(ok);
}

TEST_CASE("criterion 11: CLI reruns are byte identical", "[acceptance]")
{
    CriterionTimer timer(11, "gen-channel/run/sweep/ber/converge reproduce byte for byte",
                         300.0);
    {
        std::ofstream f("acceptance_cfg.txt", std::ios::trunc);
        f << "M = 8\nN_RF = 2\nK = 4\nU = 2\nD = 2\n"
          << "clusters_per_user = 2\nscatterers_per_cluster = 3\n"
          << "seed = 13\ntrials = 2\nalgos = cmdd, aohb\nworkers = 2\n"
          << "symbols_per_trial = 1000\n";
    }
    bool ok = true;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"gen-channel", "acc_ch"},
        {"run", "acc_run"},
        {"sweep", "acc_sweep"},
        {"ber", "acc_ber"},
        {"converge", "acc_conv"},
    };
    for (const auto& [cmd, stem] : commands) {
        const std::string out_a = stem + "_a.dat";
        const std::string out_b = stem + "_b.dat";
        ok = ok && run_cli(cmd + " --config acceptance_cfg.txt --out " + out_a) == 0;
        ok = ok && run_cli(cmd + " --config acceptance_cfg.txt --out " + out_b) == 0;
        ok = ok && read_file(out_a) == read_file(out_b);
        std::remove(out_a.c_str());
        std::remove(out_b.c_str());
    }
    std::remove("acceptance_cfg.txt");
    std::remove("acceptance_cli.err");
    timer.finish(ok);
}
