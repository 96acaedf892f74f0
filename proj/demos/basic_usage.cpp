// SPDX-License-Identifier: Apache-2.0
//
// Minimal library walkthrough: draw one channel, design precoders with the
// closed-form and the two alternating algorithms, and print the achieved
// weighted sum rates next to the fully digital benchmark.

#include <cstdio>

#include "hybeam/hybeam.hpp"

int main()
{
    using namespace hybeam;

    SystemConfig cfg;
    cfg.M = 16;
    cfg.N_RF = 4;
    cfg.K = 16;
    cfg.U = 2;
    cfg.theta = 10.0; // 10 dB
    cfg.seed = 7;

    Rng rng(cfg.seed);
    RngStream ch_rng = rng.stream(Stream::channel, 0);
    const ChannelSet H = channel::to_frequency(channel::gen_geometric_channel(cfg, ch_rng), cfg.K);

    for (Mode mode : {Mode::FullDigital, Mode::CMDD, Mode::AOHB, Mode::LAOHB}) {
        RngStream noise = rng.stream(Stream::noise, 0, static_cast<std::uint64_t>(mode));
        RngStream init = rng.stream(Stream::init, 0, static_cast<std::uint64_t>(mode));
        auto [run, report] =
            framework::run_algorithm(mode, H, cfg, SolverOptions{}, framework::CsiModel{},
                                     noise, init);
        std::printf("%-12s  wsr = %7.3f bits/s/Hz  outer iterations = %d\n",
                    to_string(mode), report.weighted_sum_rate, run.iterations);
    }
    return 0;
}
