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
// key = value configuration files for the CLI. Unknown keys are rejected;
// diagnostics carry the key name and line number. Raw (unnormalized)
// weights are accepted under `weights` and normalized with the scale
// recorded; `weights_final` declares already-normalized weights and is
// rejected unless they sum to one.

#ifndef HYBEAM_CONFIG_HPP
#define HYBEAM_CONFIG_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "framework.hpp"
#include "metrics.hpp"
#include "types.hpp"

namespace hybeam::config {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class SweepParameter { none, theta_db, users, varsigma_h_sq, weights, nrf };

inline const char* to_string(SweepParameter p)
{
    switch (p) {
    case SweepParameter::none: return "none";
    case SweepParameter::theta_db: return "theta_db";
    case SweepParameter::users: return "users";
    case SweepParameter::varsigma_h_sq: return "varsigma_h_sq";
    case SweepParameter::weights: return "weights";
    case SweepParameter::nrf: return "nrf";
    }
    return "?";
}

// Fully resolved run description: system config plus sweep/BER keys and
// solver knobs, with every default materialized.
struct HarnessConfig {
    SystemConfig sys;
    double theta_db = 10.0;
    double weight_scale = 1.0; // sum of raw weights when given unnormalized
    arma::uword trials = 100;
    std::vector<Mode> algos = {Mode::FullDigital, Mode::LAOHB, Mode::AOHB, Mode::CMDD};
    framework::ScenarioOptions scenario;

    SweepParameter sweep_parameter = SweepParameter::none;
    std::vector<double> sweep_values;          // scalar sweeps
    std::vector<arma::vec> sweep_weight_values; // weights sweep

    arma::uword symbols_per_trial = 2000;

    // Canonical echo of the effective configuration (defaults applied).
    std::string echo() const;
};

namespace detail {

inline std::string fmt_num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream iss(s);
    while (std::getline(iss, item, sep))
        out.push_back(trim(item));
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

struct Entry {
    std::string value;
    int line = 0;
};

class Parser {
public:
    explicit Parser(std::map<std::string, Entry> entries, std::string origin)
        : entries_(std::move(entries)), origin_(std::move(origin))
    {
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const
    {
        const auto it = entries_.find(key);
        const int line = it != entries_.end() ? it->second.line : 0;
        throw ConfigError(origin_ + ":" + std::to_string(line) + ": key '" + key + "': " + msg);
    }

    bool has(const std::string& key)
    {
        const bool present = entries_.count(key) != 0;
        if (present)
            used_.insert(entries_.find(key)->first);
        return present;
    }

    std::string raw(const std::string& key) { return entries_.at(key).value; }

    double number(const std::string& key, double fallback)
    {
        if (!has(key))
            return fallback;
        return parse_number(key, raw(key));
    }

    arma::uword unsigned_int(const std::string& key, arma::uword fallback)
    {
        if (!has(key))
            return fallback;
        const double v = parse_number(key, raw(key));
        if (v < 0.0 || v != std::floor(v))
            fail(key, "expected a nonnegative integer, got '" + raw(key) + "'");
        return static_cast<arma::uword>(v);
    }

    std::vector<double> number_list(const std::string& key)
    {
        std::vector<double> out;
        for (const std::string& tok : split(raw(key), ','))
            out.push_back(parse_number(key, tok));
        return out;
    }

    double parse_number(const std::string& key, const std::string& tok)
    {
        try {
            std::size_t pos = 0;
            const double v = std::stod(tok, &pos);
            if (pos != tok.size())
                fail(key, "trailing characters in number '" + tok + "'");
            return v;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail(key, "expected a number, got '" + tok + "'");
        }
    }

    void reject_unknown() const
    {
        for (const auto& [key, entry] : entries_)
            if (!used_.count(key))
                throw ConfigError(origin_ + ":" + std::to_string(entry.line) +
                                  ": unknown key '" + key + "'");
    }

private:
    std::map<std::string, Entry> entries_;
    std::set<std::string> used_;
    std::string origin_;
};

inline Mode parse_mode(const std::string& name, const Parser& p, const std::string& key)
{
    if (name == "fulldigital")
        return Mode::FullDigital;
    if (name == "laohb")
        return Mode::LAOHB;
    if (name == "aohb")
        return Mode::AOHB;
    if (name == "cmdd")
        return Mode::CMDD;
    p.fail(key, "unknown algorithm '" + name +
                    "' (expected fulldigital, laohb, aohb or cmdd)");
}

inline std::vector<Mode> parse_modes(const std::string& value, const Parser& p,
                                     const std::string& key)
{
    std::vector<Mode> modes;
    for (const std::string& tok : split(value, ','))
        modes.push_back(parse_mode(tok, p, key));
    if (modes.empty())
        p.fail(key, "empty algorithm list");
    return modes;
}

} // namespace detail

inline std::vector<Mode> parse_algorithm_list(const std::string& value)
{
    detail::Parser p({{"algos", {value, 0}}}, "<cli>");
    return detail::parse_modes(value, p, "algos");
}

// Parses the key = value file at `path`. Lines starting with '#' (after
// whitespace) and blank lines are ignored; inline '#' comments are
// stripped. Every violation is reported with the key and line number.
inline HarnessConfig parse_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError(path + ": cannot open config file");

    std::map<std::string, detail::Entry> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
        if (entries.count(key))
            throw ConfigError(path + ":" + std::to_string(line_no) + ": duplicate key '" +
                              key + "'");
        entries[key] = {value, line_no};
    }

    detail::Parser p(std::move(entries), path);
    HarnessConfig cfg;

    cfg.sys.M = p.unsigned_int("M", cfg.sys.M);
    cfg.sys.N_RF = p.unsigned_int("N_RF", cfg.sys.N_RF);
    cfg.sys.K = p.unsigned_int("K", cfg.sys.K);
    cfg.sys.U = p.unsigned_int("U", cfg.sys.U);
    cfg.sys.D = p.unsigned_int("D", cfg.sys.D);
    cfg.sys.clusters_per_user = p.unsigned_int("clusters_per_user", cfg.sys.clusters_per_user);
    cfg.sys.scatterers_per_cluster =
        p.unsigned_int("scatterers_per_cluster", cfg.sys.scatterers_per_cluster);
    cfg.sys.angular_spread_deg = p.number("angular_spread_deg", cfg.sys.angular_spread_deg);
    cfg.sys.element_spacing_ratio =
        p.number("element_spacing_ratio", cfg.sys.element_spacing_ratio);
    cfg.sys.seed = static_cast<std::uint64_t>(p.unsigned_int("seed", 1));
    cfg.theta_db = p.number("theta_db", cfg.theta_db);
    cfg.sys.theta = std::pow(10.0, cfg.theta_db / 10.0);

    if (p.has("weights") && p.has("weights_final"))
        p.fail("weights_final", "give either 'weights' (raw) or 'weights_final', not both");
    if (p.has("weights")) {
        const std::vector<double> raw = p.number_list("weights");
        arma::vec l(raw);
        if (l.n_elem != cfg.sys.U)
            p.fail("weights", "expected " + std::to_string(cfg.sys.U) + " values, got " +
                                  std::to_string(l.n_elem));
        for (double v : l)
            if (!(v > 0.0))
                p.fail("weights", "weights must be positive");
        auto [z, scale] = metrics::renormalize_weights(l);
        cfg.sys.weights = z;
        cfg.weight_scale = scale;
    } else if (p.has("weights_final")) {
        const std::vector<double> raw = p.number_list("weights_final");
        arma::vec z(raw);
        if (z.n_elem != cfg.sys.U)
            p.fail("weights_final", "expected " + std::to_string(cfg.sys.U) +
                                        " values, got " + std::to_string(z.n_elem));
        const double sum = arma::accu(z);
        if (std::abs(sum - 1.0) > 1e-9)
            p.fail("weights_final",
                   "declared-final weights must sum to 1, got " + detail::fmt_num(sum));
        cfg.sys.weights = z / sum; // remove residual rounding
        cfg.weight_scale = 1.0;
    }

    if (p.has("stream_allocation")) {
        const std::string v = p.raw("stream_allocation");
        if (v == "auto") {
            cfg.sys.stream_allocation.clear();
        } else if (v.rfind("fixed:", 0) == 0) {
            cfg.sys.stream_allocation.clear();
            for (const std::string& tok : detail::split(v.substr(6), ',')) {
                const double n = p.parse_number("stream_allocation", tok);
                if (n < 1.0 || n != std::floor(n))
                    p.fail("stream_allocation", "stream counts must be positive integers");
                cfg.sys.stream_allocation.push_back(static_cast<arma::uword>(n));
            }
        } else {
            p.fail("stream_allocation", "expected 'auto' or 'fixed:n1,n2,...'");
        }
    }

    cfg.trials = p.unsigned_int("trials", cfg.trials);
    if (cfg.trials == 0)
        p.fail("trials", "need at least one trial");
    if (p.has("algos"))
        cfg.algos = detail::parse_modes(p.raw("algos"), p, "algos");
    cfg.scenario.workers =
        static_cast<unsigned>(p.unsigned_int("workers", cfg.scenario.workers));
    if (cfg.scenario.workers == 0)
        p.fail("workers", "need at least one worker");

    cfg.scenario.csi.varsigma_h_sq = p.number("varsigma_h_sq", 1.0);
    cfg.scenario.csi.varsigma_g_sq = p.number("varsigma_g_sq", 1.0);
    if (cfg.scenario.csi.varsigma_h_sq < 0.0 || cfg.scenario.csi.varsigma_h_sq > 1.0)
        p.fail("varsigma_h_sq", "accuracy must lie in [0, 1]");
    if (cfg.scenario.csi.varsigma_g_sq < 0.0 || cfg.scenario.csi.varsigma_g_sq > 1.0)
        p.fail("varsigma_g_sq", "accuracy must lie in [0, 1]");

    if (p.has("init")) {
        const std::string v = p.raw("init");
        if (v == "random")
            cfg.scenario.solver.random_init = true;
        else if (v == "cmdd")
            cfg.scenario.solver.random_init = false;
        else
            p.fail("init", "expected 'cmdd' or 'random'");
    }

    SolverOptions& s = cfg.scenario.solver;
    s.manifold_omega = p.number("manifold_omega", s.manifold_omega);
    s.manifold_max_iters = static_cast<int>(p.unsigned_int("manifold_max_iters",
                                                           s.manifold_max_iters));
    s.digital_omega = p.number("digital_omega", s.digital_omega);
    s.socp_max_iters = static_cast<int>(p.unsigned_int("socp_max_iters", s.socp_max_iters));
    s.wmmse_max_iters = static_cast<int>(p.unsigned_int("wmmse_max_iters", s.wmmse_max_iters));
    s.socp_tol = p.number("socp_tolerance", s.socp_tol);
    s.outer_omega = p.number("outer_omega", s.outer_omega);
    s.outer_max_iters = static_cast<int>(p.unsigned_int("outer_max_iters", s.outer_max_iters));

    cfg.symbols_per_trial = p.unsigned_int("symbols_per_trial", cfg.symbols_per_trial);

    if (p.has("sweep_parameter")) {
        const std::string v = p.raw("sweep_parameter");
        if (v == "theta_db")
            cfg.sweep_parameter = SweepParameter::theta_db;
        else if (v == "users")
            cfg.sweep_parameter = SweepParameter::users;
        else if (v == "varsigma_h_sq")
            cfg.sweep_parameter = SweepParameter::varsigma_h_sq;
        else if (v == "weights")
            cfg.sweep_parameter = SweepParameter::weights;
        else if (v == "nrf")
            cfg.sweep_parameter = SweepParameter::nrf;
        else
            p.fail("sweep_parameter",
                   "expected theta_db, users, varsigma_h_sq, weights or nrf");
    }
    if (p.has("sweep_values")) {
        if (cfg.sweep_parameter == SweepParameter::weights) {
            for (const std::string& group : detail::split(p.raw("sweep_values"), ';')) {
                std::vector<double> vals;
                for (const std::string& tok : detail::split(group, ':'))
                    vals.push_back(p.parse_number("sweep_values", tok));
                arma::vec l(vals);
                for (double v : l)
                    if (!(v > 0.0))
                        p.fail("sweep_values", "weights must be positive");
                cfg.sweep_weight_values.push_back(l);
            }
            if (cfg.sweep_weight_values.empty())
                p.fail("sweep_values", "empty weight list");
        } else {
            cfg.sweep_values = p.number_list("sweep_values");
            if (cfg.sweep_values.empty())
                p.fail("sweep_values", "empty value list");
        }
    }
    if (cfg.sweep_parameter != SweepParameter::none && cfg.sweep_values.empty() &&
        cfg.sweep_weight_values.empty())
        p.fail("sweep_parameter", "sweep_values required when sweep_parameter is set");

    p.reject_unknown();
    if (cfg.sys.K < cfg.sys.D)
        p.fail("K", "need K >= D (" + std::to_string(cfg.sys.K) + " < " +
                         std::to_string(cfg.sys.D) + ")");
    try {
        cfg.sys.validate();
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return cfg;
}

inline std::string HarnessConfig::echo() const
{
    std::ostringstream o;
    const arma::vec z = sys.effective_weights();
    o << "M = " << sys.M << "\n"
      << "N_RF = " << sys.N_RF << "\n"
      << "K = " << sys.K << "\n"
      << "U = " << sys.U << "\n"
      << "theta_db = " << detail::fmt_num(theta_db) << "\n"
      << "weights_final =";
    for (arma::uword u = 0; u < z.n_elem; ++u)
        o << (u ? "," : " ") << detail::fmt_num(z(u));
    o << "\n"
      << "weight_scale = " << detail::fmt_num(weight_scale) << "\n"
      << "D = " << sys.D << "\n"
      << "clusters_per_user = " << sys.clusters_per_user << "\n"
      << "scatterers_per_cluster = " << sys.scatterers_per_cluster << "\n"
      << "angular_spread_deg = " << detail::fmt_num(sys.angular_spread_deg) << "\n"
      << "element_spacing_ratio = " << detail::fmt_num(sys.element_spacing_ratio) << "\n"
      << "seed = " << sys.seed << "\n"
      << "trials = " << trials << "\n"
      << "algos =";
    for (std::size_t i = 0; i < algos.size(); ++i)
        o << (i ? "," : " ") << to_string(algos[i]);
    o << "\n"
      << "workers = " << scenario.workers << "\n"
      << "varsigma_h_sq = " << detail::fmt_num(scenario.csi.varsigma_h_sq) << "\n"
      << "varsigma_g_sq = " << detail::fmt_num(scenario.csi.varsigma_g_sq) << "\n"
      << "init = " << (scenario.solver.random_init ? "random" : "cmdd") << "\n"
      << "manifold_omega = " << detail::fmt_num(scenario.solver.manifold_omega) << "\n"
      << "manifold_max_iters = " << scenario.solver.manifold_max_iters << "\n"
      << "digital_omega = " << detail::fmt_num(scenario.solver.digital_omega) << "\n"
      << "socp_max_iters = " << scenario.solver.socp_max_iters << "\n"
      << "wmmse_max_iters = " << scenario.solver.wmmse_max_iters << "\n"
      << "socp_tolerance = " << detail::fmt_num(scenario.solver.socp_tol) << "\n"
      << "outer_omega = " << detail::fmt_num(scenario.solver.outer_omega) << "\n"
      << "outer_max_iters = " << scenario.solver.outer_max_iters << "\n"
      << "symbols_per_trial = " << symbols_per_trial << "\n";
    if (!sys.stream_allocation.empty()) {
        o << "stream_allocation = fixed:";
        for (std::size_t i = 0; i < sys.stream_allocation.size(); ++i)
            o << (i ? "," : "") << sys.stream_allocation[i];
        o << "\n";
    } else {
        o << "stream_allocation = auto\n";
    }
    if (sweep_parameter != SweepParameter::none) {
        o << "sweep_parameter = " << to_string(sweep_parameter) << "\n"
          << "sweep_values =";
        if (sweep_parameter == SweepParameter::weights) {
            for (std::size_t i = 0; i < sweep_weight_values.size(); ++i) {
                o << (i ? "; " : " ");
                for (arma::uword j = 0; j < sweep_weight_values[i].n_elem; ++j)
                    o << (j ? ":" : "") << detail::fmt_num(sweep_weight_values[i](j));
            }
        } else {
            for (std::size_t i = 0; i < sweep_values.size(); ++i)
                o << (i ? "," : " ") << detail::fmt_num(sweep_values[i]);
        }
        o << "\n";
    }
    return o.str();
}

} // namespace hybeam::config

#endif
