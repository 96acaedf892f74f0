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

#ifndef HYBEAM_RNG_HPP
#define HYBEAM_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace hybeam {

// Named sub-streams. Every consumer of randomness declares which stream it
// draws from, so trials are reproducible and parallelizable: the state of one
// stream never depends on how often another stream was used.
enum class Stream : std::uint64_t {
    channel = 1, // geometric channel realizations
    noise = 2,   // CSI errors, AWGN, data symbols
    init = 3,    // random precoder initializations
};

namespace detail {

// SplitMix64 finalizer, used to hash (seed, stream, index...) into an
// engine seed. Avalanches well even for adjacent inputs.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b)
{
    return splitmix64(splitmix64(a) ^ (0x9e3779b97f4a7c15ULL + b));
}

} // namespace detail

// One independent random stream. Samplers are implemented on top of the raw
// 64-bit engine output so that sequences are identical across standard
// library implementations (std::*_distribution makes no such guarantee).
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; never returns 0 so it is safe under log().
    double uniform_pos() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (cosine branch).
    double gaussian()
    {
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double phi = 2.0 * M_PI * uniform();
        return r * std::cos(phi);
    }

    // CN(0, 1): real and imaginary parts are N(0, 1/2).
    std::complex<double> cgaussian()
    {
        const double r = std::sqrt(-std::log(uniform_pos()));
        const double phi = 2.0 * M_PI * uniform();
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    // Laplace(0, scale) via inverse CDF.
    double laplace(double scale)
    {
        const double u = uniform() - 0.5;
        const double s = (u < 0.0) ? -1.0 : 1.0;
        return -scale * s * std::log1p(-2.0 * std::abs(u));
    }

private:
    std::mt19937_64 engine_;
};

// Root randomness source for one run. Derives named, index-addressable
// sub-streams from a single master seed.
class Rng {
public:
    explicit Rng(std::uint64_t master_seed) : master_(master_seed) {}

    std::uint64_t master() const { return master_; }

    RngStream stream(Stream s, std::uint64_t index = 0, std::uint64_t subindex = 0) const
    {
        std::uint64_t h = detail::mix(master_, static_cast<std::uint64_t>(s));
        h = detail::mix(h, index);
        h = detail::mix(h, subindex);
        return RngStream(h);
    }

private:
    std::uint64_t master_;
};

} // namespace hybeam

#endif
