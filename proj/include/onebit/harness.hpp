// SPDX-License-Identifier: Apache-2.0
//
// onebit-irs: one-bit symbol-level precoding with intelligent reflecting surfaces
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

// Monte-Carlo BER/SER experiments over random deployments.
//
// Every channel realization c owns the substreams (seed, tag, c) for its
// scenario, channels, symbols, noise and solver randomness. All schemes and
// all noise points of a channel reuse the same unit-variance noise samples,
// so scheme comparisons are paired.

#pragma once

#include "baselines.hpp"
#include "channel_io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace onebit
{

namespace stream
{
inline constexpr std::uint64_t ao = 8;
} // namespace stream

struct ExperimentConfig
{
    int antennas = 128;
    int elements = 32;
    int users = 14;
    int slots = 100;
    int order = 4;
    double power_db = 20.0;
    std::vector<double> noise_grid_db{20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0};
    int n_channels = 1000;
    std::vector<std::string> schemes{"onebit-md", "relaxed", "relaxed-quant", "zf-quant", "onebit-md-noirs"};
    std::uint64_t seed = 1;

    double mu = 5e-4;
    int continuation_stages = 4;
    /// Regularization of the relaxed reference; small so that it tracks the
    /// unregularized box relaxation.
    double relaxed_mu = 1e-6;
    int relaxed_continuation_stages = 8;
    double delta = 1e-2;
    int apg_max_iterations = 300;
    int max_outer = 20;
    double stop_tol = 1e-4;
    int mbi_restarts = 5;
    std::string theta_init = "random";
    std::string baseline_theta = "shared";

    int noise_draws = 1;
    unsigned threads = 1;
    /// When false the runtime column is written as nan, making the CSV a pure
    /// function of the configuration.
    bool timing = true;

    double power() const { return db_to_linear(power_db); }

    void validate() const
    {
        if (antennas < 1 || elements < 1 || users < 1 || slots < 1)
            throw std::invalid_argument("ExperimentConfig: dimensions must be at least 1");
        PskConstellation check(order);
        if (noise_grid_db.empty())
            throw std::invalid_argument("ExperimentConfig: noise grid is empty");
        if (n_channels < 1)
            throw std::invalid_argument("ExperimentConfig: n_channels must be at least 1");
        if (noise_draws < 1)
            throw std::invalid_argument("ExperimentConfig: noise_draws must be at least 1");
        if (schemes.empty())
            throw std::invalid_argument("ExperimentConfig: no schemes selected");
        for (const auto &s : schemes)
            parse_scheme(s);
        if (!(mu > 0.0) || !(relaxed_mu > 0.0) || !(delta > 0.0))
            throw std::invalid_argument("ExperimentConfig: mu, relaxed_mu and delta must be positive");
        if (theta_init != "random" && theta_init != "ones")
            throw std::invalid_argument("ExperimentConfig: theta_init must be 'random' or 'ones'");
        parse_baseline_theta(baseline_theta);
        AoConfig ao;
        ao.max_outer = max_outer;
        ao.stop_tol = stop_tol;
        ao.validate();
    }
};

inline ExperimentConfig config_from_json(const json &j)
{
    ExperimentConfig c;
    auto get = [&](const char *key, auto &field) {
        if (j.contains(key))
            field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("M", c.antennas);
    get("N", c.elements);
    get("K", c.users);
    get("T", c.slots);
    get("L", c.order);
    get("P_db", c.power_db);
    get("noise_grid_db", c.noise_grid_db);
    get("n_channels", c.n_channels);
    get("schemes", c.schemes);
    get("seed", c.seed);
    get("mu", c.mu);
    get("continuation_stages", c.continuation_stages);
    get("relaxed_mu", c.relaxed_mu);
    get("relaxed_continuation_stages", c.relaxed_continuation_stages);
    get("delta", c.delta);
    get("apg_max_iterations", c.apg_max_iterations);
    get("max_outer", c.max_outer);
    get("stop_tol", c.stop_tol);
    get("mbi_restarts", c.mbi_restarts);
    get("theta_init", c.theta_init);
    get("baseline_theta", c.baseline_theta);
    get("noise_draws", c.noise_draws);
    get("threads", c.threads);
    get("timing", c.timing);
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    return config_from_json(json::parse(in));
}

inline AoConfig ao_config(const ExperimentConfig &cfg, std::uint64_t seed)
{
    AoConfig ao;
    ao.max_outer = cfg.max_outer;
    ao.stop_tol = cfg.stop_tol;
    ao.power = cfg.power();
    ao.precoder.mu = cfg.mu;
    ao.precoder.continuation_stages = cfg.continuation_stages;
    ao.precoder.mbi_restarts = cfg.mbi_restarts;
    ao.apg.delta = cfg.delta;
    ao.apg.max_iterations = cfg.apg_max_iterations;
    ao.theta_init = cfg.theta_init == "ones" ? ThetaInit::ones : ThetaInit::random;
    ao.seed = seed;
    return ao;
}

inline PrecoderOptions relaxed_options(const ExperimentConfig &cfg)
{
    PrecoderOptions p;
    p.mu = cfg.relaxed_mu;
    p.continuation_stages = cfg.relaxed_continuation_stages;
    return p;
}

// ---------------------------------------------------------------------------
// Transmission
// ---------------------------------------------------------------------------

struct TransmissionCounts
{
    long long bit_errors = 0;
    long long bits = 0;
    long long sym_errors = 0;
    long long syms = 0;
};

/// Detects y = h_k^H x_t + n for noiseless receive points rx (K x T) with
/// n_noise draws per (k, t). Noise is drawn as unit CN(0,1) samples in the
/// order (draw, t, k) and scaled by sigma, so one substream serves every
/// noise level.
inline TransmissionCounts simulate_transmission(const CMat &rx, const SymbolFrame &symbols, double sigma2, int n_noise,
                                                Rng &rng)
{
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("simulate_transmission: noise power must be positive");
    if (n_noise < 1)
        throw std::invalid_argument("simulate_transmission: need at least one noise draw");
    if (rx.rows() != symbols.users() || rx.cols() != symbols.slots())
        throw std::invalid_argument("simulate_transmission: receive block shape differs from symbol frame");
    const PskConstellation &c = symbols.constellation();
    const double sigma = std::sqrt(sigma2);
    TransmissionCounts out;
    for (int d = 0; d < n_noise; ++d)
        for (int t = 0; t < symbols.slots(); ++t)
            for (int k = 0; k < symbols.users(); ++k)
            {
                const cplx y = rx(k, t) + sigma * sample_cn(rng);
                const int sent = symbols.index(k, t);
                const int got = c.decide_index(y);
                out.bit_errors += bit_errors(sent, got, c.order());
                out.sym_errors += sent != got ? 1 : 0;
                out.bits += c.bits_per_symbol();
                out.syms += 1;
            }
    return out;
}

inline TransmissionCounts simulate_transmission(const CMat &frame, const PhaseShifts &phases, const ChannelSet &ch,
                                                const SymbolFrame &symbols, double sigma2, int n_noise, Rng &rng)
{
    return simulate_transmission(CMat(effective_channel_matrix(ch, phases) * frame), symbols, sigma2, n_noise, rng);
}

// ---------------------------------------------------------------------------
// Experiment
// ---------------------------------------------------------------------------

/// Outcome of one scheme on one channel realization.
struct ChannelOutcome
{
    std::vector<TransmissionCounts> counts; // one per noise point
    double worst_margin = 0.0;
    double runtime_s = 0.0;
    bool ok = true;
};

struct BerRecord
{
    std::string scheme;
    double inv_sigma2_db = 0.0;
    long long bit_errors = 0;
    long long bits = 0;
    long long sym_errors = 0;
    long long syms = 0;
    double mean_worst_margin = 0.0;
    double mean_runtime_s = 0.0;
    int n_channels_ok = 0;
    int n_channels_failed = 0;

    double ber() const { return bits > 0 ? static_cast<double>(bit_errors) / static_cast<double>(bits) : 0.0; }
    double ser() const { return syms > 0 ? static_cast<double>(sym_errors) / static_cast<double>(syms) : 0.0; }
};

struct ExperimentResult
{
    std::vector<BerRecord> records; // scheme-major, noise points in grid order
    /// outcomes[scheme][channel]
    std::vector<std::vector<ChannelOutcome>> outcomes;
    std::vector<std::string> schemes;
};

/// Channel realization c of an experiment, as drawn by run_experiment.
inline std::pair<Scenario, ChannelSet> experiment_channel(const ExperimentConfig &cfg, int index)
{
    const auto c = static_cast<std::uint64_t>(index);
    ScenarioConfig sc_cfg;
    sc_cfg.users = cfg.users;
    Rng scen_rng = derive_rng(cfg.seed, {stream::scenario, c});
    Scenario sc = sample_scenario(sc_cfg, scen_rng);
    Rng ch_rng = derive_rng(cfg.seed, {stream::channels, c});
    ChannelSet ch = sample_channels(sc, cfg.antennas, cfg.elements, ch_rng);
    return {std::move(sc), std::move(ch)};
}

namespace detail
{

/// Frames and phases produced by every requested scheme on one channel.
inline std::vector<ChannelOutcome> run_channel(const ExperimentConfig &cfg, const std::vector<Scheme> &schemes, int index)
{
    using clock = std::chrono::steady_clock;
    const auto c = static_cast<std::uint64_t>(index);
    const double power = cfg.power();

    const ChannelSet ch = experiment_channel(cfg, index).second;
    const ChannelSet ch_direct = no_irs_variant(ch);
    Rng sym_rng = derive_rng(cfg.seed, {stream::symbols, c});
    const SymbolFrame symbols = SymbolFrame::random(PskConstellation(cfg.order), cfg.users, cfg.slots, sym_rng);
    const std::uint64_t solver_seed = derive_rng(cfg.seed, {stream::ao, c})();
    const AoConfig ao = ao_config(cfg, solver_seed);
    const PrecoderOptions relaxed_opts = relaxed_options(cfg);
    const BaselineTheta theta_mode = parse_baseline_theta(cfg.baseline_theta);
    const PhaseShifts ones = PhaseShifts::all_ones(cfg.elements);

    // The proposed design is needed by its own scheme and by shared baseline phases.
    bool need_md = false;
    bool need_baseline_theta = false;
    for (const auto &s : schemes)
    {
        need_md |= s.kind == SchemeKind::onebit_md && s.irs;
        need_baseline_theta |= s.kind != SchemeKind::onebit_md && s.irs;
    }
    need_md |= need_baseline_theta && theta_mode == BaselineTheta::shared;

    std::optional<AoResult> md;
    double md_time = 0.0;
    if (need_md)
    {
        const auto t0 = clock::now();
        md = alternating_optimize(ch, symbols, ao);
        md_time = std::chrono::duration<double>(clock::now() - t0).count();
    }

    PhaseShifts baseline_phases = ones;
    bool baseline_theta_ok = true;
    if (need_baseline_theta)
    {
        switch (theta_mode)
        {
        case BaselineTheta::shared:
            baseline_phases = md->phases;
            break;
        case BaselineTheta::random: {
            Rng rng = derive_rng(cfg.seed, {stream::baseline_theta, c});
            baseline_phases = PhaseShifts::random(cfg.elements, rng);
            break;
        }
        case BaselineTheta::joint: {
            AoConfig joint = ao;
            joint.x_step = XStepMode::relaxed;
            joint.precoder = relaxed_opts;
            const AoResult r = alternating_optimize(ch, symbols, joint);
            baseline_phases = r.phases;
            baseline_theta_ok = r.status != SolverStatus::numerical_failure;
            break;
        }
        }
    }

    // Relaxed frames are shared between relaxed and relaxed-quant.
    std::optional<RelaxedFrame> relaxed_irs, relaxed_direct;
    double relaxed_irs_time = 0.0, relaxed_direct_time = 0.0;
    auto relaxed_for = [&](bool irs) -> const RelaxedFrame & {
        auto &slot = irs ? relaxed_irs : relaxed_direct;
        if (!slot)
        {
            const auto t0 = clock::now();
            slot = relaxed_slp(irs ? ch : ch_direct, symbols, irs ? baseline_phases : ones, power, relaxed_opts);
            (irs ? relaxed_irs_time : relaxed_direct_time) = std::chrono::duration<double>(clock::now() - t0).count();
        }
        return *slot;
    };

    std::vector<ChannelOutcome> out(schemes.size());
    for (std::size_t si = 0; si < schemes.size(); ++si)
    {
        const Scheme &s = schemes[si];
        const ChannelSet &link = s.irs ? ch : ch_direct;
        PhaseShifts phases = s.irs ? baseline_phases : ones;
        CMat frame;
        ChannelOutcome &o = out[si];
        const auto t0 = clock::now();
        double extra = 0.0;
        switch (s.kind)
        {
        case SchemeKind::onebit_md:
            if (s.irs)
            {
                frame = md->frame;
                phases = md->phases;
                extra = md_time;
                // APG hitting its iteration cap still returns its best iterate.
                for (const auto &rec : md->trace)
                    if (rec.x_status != SolverStatus::converged || rec.theta_status == SolverStatus::numerical_failure)
                        o.ok = false;
            }
            else
            {
                const XStepResult xs = x_step(effective_channel_matrix(ch_direct, ones), symbols, ao, 1);
                frame = xs.frame;
                o.ok = xs.status == SolverStatus::converged;
            }
            break;
        case SchemeKind::relaxed:
        case SchemeKind::relaxed_quant: {
            const RelaxedFrame &rf = relaxed_for(s.irs);
            frame = s.kind == SchemeKind::relaxed ? rf.frame : quantize_onebit(rf.frame, power);
            extra = s.irs ? relaxed_irs_time : relaxed_direct_time;
            o.ok = rf.status == SolverStatus::converged && (!s.irs || baseline_theta_ok);
            break;
        }
        case SchemeKind::zf_quant: {
            const ZfResult zf = zf_precode(effective_channel_matrix(link, phases), symbols, power);
            frame = quantize_onebit(zf.frame, power);
            o.ok = !zf.rank_deficient && (!s.irs || baseline_theta_ok);
            break;
        }
        }
        o.runtime_s = std::chrono::duration<double>(clock::now() - t0).count() + extra;

        const CMat rx = effective_channel_matrix(link, phases) * frame;
        o.worst_margin = frame_worst_margin(link, phases, frame, symbols);
        for (double db : cfg.noise_grid_db)
        {
            Rng noise = derive_rng(cfg.seed, {stream::noise, c});
            o.counts.push_back(simulate_transmission(rx, symbols, 1.0 / db_to_linear(db), cfg.noise_draws, noise));
        }
    }
    return out;
}

} // namespace detail

/// Runs every scheme on n_channels realizations; channels are distributed
/// over cfg.threads workers and aggregated in channel order.
inline ExperimentResult run_experiment(const ExperimentConfig &cfg)
{
    cfg.validate();
    std::vector<Scheme> schemes;
    for (const auto &id : cfg.schemes)
        schemes.push_back(parse_scheme(id));

    const auto n = static_cast<std::size_t>(cfg.n_channels);
    std::vector<std::vector<ChannelOutcome>> per_channel(n);
    parallel_for(n, cfg.threads, [&](std::size_t c) { per_channel[c] = detail::run_channel(cfg, schemes, static_cast<int>(c)); });

    ExperimentResult res;
    res.schemes = cfg.schemes;
    res.outcomes.assign(schemes.size(), std::vector<ChannelOutcome>(n));
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t s = 0; s < schemes.size(); ++s)
            res.outcomes[s][c] = std::move(per_channel[c][s]);

    for (std::size_t s = 0; s < schemes.size(); ++s)
    {
        CompensatedSum margin, runtime;
        int ok = 0;
        for (const auto &o : res.outcomes[s])
        {
            margin.add(o.worst_margin);
            runtime.add(o.runtime_s);
            ok += o.ok ? 1 : 0;
        }
        for (std::size_t p = 0; p < cfg.noise_grid_db.size(); ++p)
        {
            BerRecord r;
            r.scheme = cfg.schemes[s];
            r.inv_sigma2_db = cfg.noise_grid_db[p];
            for (const auto &o : res.outcomes[s])
            {
                r.bit_errors += o.counts[p].bit_errors;
                r.bits += o.counts[p].bits;
                r.sym_errors += o.counts[p].sym_errors;
                r.syms += o.counts[p].syms;
            }
            r.mean_worst_margin = margin.value() / static_cast<double>(n);
            r.mean_runtime_s = cfg.timing ? runtime.value() / static_cast<double>(n)
                                          : std::numeric_limits<double>::quiet_NaN();
            r.n_channels_ok = ok;
            r.n_channels_failed = static_cast<int>(n) - ok;
            res.records.push_back(r);
        }
    }
    return res;
}

inline std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline constexpr const char *csv_header = "scheme,inv_sigma2_db,ber,ser,bit_errors,bits,sym_errors,syms,mean_worst_margin,"
                                          "mean_runtime_s,n_channels_ok,n_channels_failed";

inline void write_csv(std::ostream &os, const std::vector<BerRecord> &records)
{
    os << csv_header << '\n';
    for (const auto &r : records)
        os << r.scheme << ',' << format_double(r.inv_sigma2_db) << ',' << format_double(r.ber()) << ','
           << format_double(r.ser()) << ',' << r.bit_errors << ',' << r.bits << ',' << r.sym_errors << ',' << r.syms
           << ',' << format_double(r.mean_worst_margin) << ',' << format_double(r.mean_runtime_s) << ','
           << r.n_channels_ok << ',' << r.n_channels_failed << '\n';
}

inline std::string to_csv(const std::vector<BerRecord> &records)
{
    std::ostringstream os;
    write_csv(os, records);
    return os.str();
}

} // namespace onebit
