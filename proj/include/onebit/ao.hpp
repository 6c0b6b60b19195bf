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

// Alternating optimization of the transmit frame X (M x T) and the IRS phases.

#pragma once

#include "phase.hpp"
#include "precoder.hpp"

#include <limits>

namespace onebit
{

/// Worst margin min_{k,t} alpha_{k,t} of a frame under the given phases.
inline double frame_worst_margin(const ChannelSet &ch, const PhaseShifts &phases, const CMat &frame,
                                 const SymbolFrame &symbols)
{
    const CMat h = effective_channel_matrix(ch, phases);
    const CMat rx = h * frame; // K x T noiseless receive points
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < symbols.slots(); ++t)
        for (int k = 0; k < symbols.users(); ++k)
            worst = std::min(worst, margin(rx(k, t) * std::conj(symbols.symbol(k, t)), symbols.constellation()));
    return worst;
}

/// True when every entry of the frame is (+-s) + j(+-s).
inline bool is_onebit_frame(const CMat &frame, double amplitude)
{
    for (Eigen::Index i = 0; i < frame.size(); ++i)
    {
        const cplx v = frame.data()[i];
        if (std::abs(v.real()) != amplitude || std::abs(v.imag()) != amplitude)
            return false;
    }
    return true;
}

enum class XStepMode
{
    onebit,  // mirror descent + MBI rounding
    relaxed, // box relaxation only (continuous frame)
};

enum class ThetaInit
{
    random,
    ones,
};

struct AoConfig
{
    int max_outer = 20;
    double stop_tol = 1e-4;
    double power = 100.0;
    PrecoderOptions precoder;
    ApgOptions apg;
    bool x_first = true;
    ThetaInit theta_init = ThetaInit::random;
    XStepMode x_step = XStepMode::onebit;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    void validate() const
    {
        if (max_outer < 1)
            throw std::invalid_argument("AoConfig: max_outer must be at least 1");
        if (!(stop_tol > 0.0))
            throw std::invalid_argument("AoConfig: stop_tol must be positive");
        if (!(power > 0.0))
            throw std::invalid_argument("AoConfig: power must be positive");
    }
};

struct AoTraceRecord
{
    int outer = 0;
    double margin_after_x = 0.0;
    double margin_after_theta = 0.0;
    /// ||X^i - X^{i-1}||_F^2 + ||theta^i - theta^{i-1}||^2 (complex); infinite at i = 1.
    double change = 0.0;
    SolverStatus x_status = SolverStatus::converged;
    SolverStatus theta_status = SolverStatus::converged;
    int max_fractional = 0;
};

struct AoResult
{
    CMat frame;
    PhaseShifts phases;
    double worst_margin = 0.0;
    int outer_iterations = 0;
    bool stopped_by_tolerance = false;
    /// First non-converged inner status encountered, or converged.
    SolverStatus status = SolverStatus::converged;
    std::vector<AoTraceRecord> trace;
};

struct XStepResult
{
    CMat frame;
    SolverStatus status = SolverStatus::converged;
    int max_fractional = 0;
};

/// Solves the T per-slot problems for a fixed effective channel. Slot t draws
/// its MBI restarts from (seed, mbi, round, t).
inline XStepResult x_step(const CMat &h_eff, const SymbolFrame &symbols, const AoConfig &cfg, int round)
{
    const int slots = symbols.slots();
    const int antennas = static_cast<int>(h_eff.cols());
    XStepResult out{CMat(antennas, slots)};
    std::vector<SolverStatus> statuses(static_cast<std::size_t>(slots), SolverStatus::converged);
    std::vector<int> fractional(static_cast<std::size_t>(slots), 0);
    parallel_for(static_cast<std::size_t>(slots), cfg.threads, [&](std::size_t i) {
        const int t = static_cast<int>(i);
        const CVec s = symbols.slot(t);
        if (cfg.x_step == XStepMode::onebit)
        {
            Rng rng = derive_rng(cfg.seed, {stream::mbi, static_cast<std::uint64_t>(round), i});
            const SymbolSolution sol = solve_symbol(h_eff, s, symbols.constellation(), cfg.power, cfg.precoder, rng);
            out.frame.col(t) = unlift(sol.xbar);
            statuses[i] = sol.status;
            fractional[i] = sol.fractional;
        }
        else
        {
            const CoefficientMatrix cm = build_coefficients(h_eff, s, symbols.constellation(), cfg.power);
            const RelaxedSolution sol = solve_relaxed(cm, cfg.precoder);
            out.frame.col(t) = unlift(sol.xbar);
            statuses[i] = sol.md.status;
        }
    });
    for (int t = 0; t < slots; ++t)
    {
        if (out.status == SolverStatus::converged && statuses[static_cast<std::size_t>(t)] != SolverStatus::converged)
            out.status = statuses[static_cast<std::size_t>(t)];
        out.max_fractional = std::max(out.max_fractional, fractional[static_cast<std::size_t>(t)]);
    }
    return out;
}

/// One-bit quantized matched-filter frame; starting point when theta is
/// optimized first.
inline CMat matched_filter_onebit(const CMat &h_eff, const SymbolFrame &symbols, double power)
{
    const double s = onebit_amplitude(power, static_cast<int>(h_eff.cols()));
    CMat frame(h_eff.cols(), symbols.slots());
    for (int t = 0; t < symbols.slots(); ++t)
    {
        const CVec x = h_eff.adjoint() * symbols.slot(t);
        for (Eigen::Index m = 0; m < x.size(); ++m)
            frame(m, t) = cplx(x(m).real() >= 0.0 ? s : -s, x(m).imag() >= 0.0 ? s : -s);
    }
    return frame;
}

inline PhaseShifts theta_step(const ChannelSet &ch, const CMat &frame, const SymbolFrame &symbols,
                              const PhaseShifts &current, const ApgOptions &opts, SolverStatus &status)
{
    const PhaseCoefficients pc = build_phase_coefficients(ch, frame, symbols);
    const ApgResult res = apg_optimize(pc, current.lifted(), opts);
    status = res.status;
    return PhaseShifts::from_lifted(res.theta_bar);
}

/**
 * @brief Alternates X-steps and theta-steps until the squared change drops
 * below cfg.stop_tol or cfg.max_outer rounds have run.
 *
 * The initial phases are drawn from (seed, theta_init) before the first
 * X-step. Returns the best (X, theta) pair seen under the worst margin.
 */
inline AoResult alternating_optimize(const ChannelSet &ch, const SymbolFrame &symbols, const AoConfig &cfg)
{
    cfg.validate();
    ch.validate();
    if (symbols.users() != ch.users())
        throw std::invalid_argument("alternating_optimize: symbol frame user count differs from channel");

    PhaseShifts theta;
    if (cfg.theta_init == ThetaInit::random)
    {
        Rng rng = derive_rng(cfg.seed, {stream::theta_init});
        theta = PhaseShifts::random(ch.elements(), rng);
    }
    else
    {
        theta = PhaseShifts::all_ones(ch.elements());
    }

    AoResult res;
    res.worst_margin = -std::numeric_limits<double>::infinity();
    auto consider = [&](const CMat &frame, const PhaseShifts &phases, double m) {
        if (m > res.worst_margin || res.frame.size() == 0)
        {
            res.worst_margin = m;
            res.frame = frame;
            res.phases = phases;
        }
    };
    auto note_status = [&](SolverStatus s) {
        if (res.status == SolverStatus::converged && s != SolverStatus::converged)
            res.status = s;
    };

    CMat frame;
    if (!cfg.x_first)
        frame = matched_filter_onebit(effective_channel_matrix(ch, theta), symbols, cfg.power);

    for (int i = 1; i <= cfg.max_outer; ++i)
    {
        AoTraceRecord rec;
        rec.outer = i;
        const CMat prev_frame = frame;
        const PhaseShifts prev_theta = theta;

        auto run_x = [&]() {
            XStepResult xs = x_step(effective_channel_matrix(ch, theta), symbols, cfg, i);
            frame = std::move(xs.frame);
            rec.x_status = xs.status;
            rec.max_fractional = xs.max_fractional;
            rec.margin_after_x = frame_worst_margin(ch, theta, frame, symbols);
            consider(frame, theta, rec.margin_after_x);
        };
        auto run_theta = [&]() {
            theta = theta_step(ch, frame, symbols, theta, cfg.apg, rec.theta_status);
            rec.margin_after_theta = frame_worst_margin(ch, theta, frame, symbols);
            consider(frame, theta, rec.margin_after_theta);
        };

        if (cfg.x_first)
        {
            run_x();
            run_theta();
        }
        else
        {
            run_theta();
            run_x();
        }
        note_status(rec.x_status);
        note_status(rec.theta_status);

        if (prev_frame.size() == 0)
            rec.change = std::numeric_limits<double>::infinity();
        else
            rec.change = (frame - prev_frame).squaredNorm() + (theta.values() - prev_theta.values()).squaredNorm();
        res.trace.push_back(rec);
        res.outer_iterations = i;
        if (rec.change < cfg.stop_tol)
        {
            res.stopped_by_tolerance = true;
            break;
        }
    }
    return res;
}

} // namespace onebit
