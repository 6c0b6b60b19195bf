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

// IRS phase design for a fixed transmit frame.
//
// With u_{k,t} = W_{r,k}^H G x_t s_{k,t}^* and v_{k,t} = h_{d,k}^H x_t s_{k,t}^*
// every margin constraint becomes affine in the lifted phases
// theta_bar = [Re theta; Im theta]:
//
//     -alpha_{k,t} = max( theta_bar^T eta_{k,t} + vbar_{k,t},
//                         theta_bar^T eta_{k+K,t} + vbar_{k+K,t} ).
//
// The max over all 2KT affine terms is smoothed by log-sum-exp and minimized
// over the unit-modulus set by accelerated projected gradient.

#pragma once

#include "channel.hpp"
#include "constellation.hpp"

#include <limits>
#include <stdexcept>

namespace onebit
{

/**
 * @brief Affine terms theta_bar^T eta_j + vbar_j of the phase problem.
 *
 * Column j = t * 2K + i of `eta` holds eta_{i,t}, i in [0, 2K): the first K
 * use -q + p, the last K use -q - p.
 */
struct PhaseCoefficients
{
    Mat eta;     // 2N x 2KT
    Vec offsets; // 2KT

    int terms() const { return static_cast<int>(eta.cols()); }
    int lifted_size() const { return static_cast<int>(eta.rows()); }
};

/// @param frame M x T transmit frame (column t is x_t).
inline PhaseCoefficients build_phase_coefficients(const ChannelSet &ch, const CMat &frame, const SymbolFrame &symbols)
{
    ch.validate();
    const int users = ch.users();
    const int elements = ch.elements();
    const int slots = static_cast<int>(frame.cols());
    if (frame.rows() != ch.antennas())
        throw std::invalid_argument("build_phase_coefficients: frame rows differ from antenna count");
    if (symbols.users() != users || symbols.slots() != slots)
        throw std::invalid_argument("build_phase_coefficients: symbol frame shape differs from K x T");

    const double cot = symbols.constellation().cot();
    PhaseCoefficients out{Mat(2 * elements, 2 * users * slots), Vec(2 * users * slots)};
    const CMat reflected = ch.bs_irs * frame; // N x T, column t is G x_t
    const CMat direct = ch.direct.conjugate() * frame;
    for (int t = 0; t < slots; ++t)
    {
        for (int k = 0; k < users; ++k)
        {
            const cplx sc = std::conj(symbols.symbol(k, t));
            const CVec u = ch.irs_user.row(k).transpose().conjugate().cwiseProduct(reflected.col(t)) * sc;
            const cplx v = direct(k, t) * sc;

            Vec q(2 * elements);
            Vec p(2 * elements);
            q << u.real(), -u.imag();
            p << u.imag(), u.real();
            p *= cot;
            const int j = t * 2 * users + k;
            out.eta.col(j) = -q + p;
            out.eta.col(j + users) = -q - p;
            out.offsets(j) = -v.real() + v.imag() * cot;
            out.offsets(j + users) = -v.real() - v.imag() * cot;
        }
    }
    return out;
}

/// theta_bar^T eta_j + vbar_j for every term j.
inline Vec phase_terms(const Vec &theta_bar, const PhaseCoefficients &pc)
{
    if (theta_bar.size() != pc.eta.rows())
        throw std::invalid_argument("phase_terms: lifted phase length mismatch");
    return pc.eta.transpose() * theta_bar + pc.offsets;
}

/// Unsmoothed objective max_j (theta_bar^T eta_j + vbar_j) = -(worst margin).
inline double phase_objective(const Vec &theta_bar, const PhaseCoefficients &pc)
{
    return phase_terms(theta_bar, pc).maxCoeff();
}

/// delta * log sum_j exp(z_j / delta), evaluated around the max term.
inline double lse_value(const Vec &theta_bar, const PhaseCoefficients &pc, double delta)
{
    if (!(delta > 0.0))
        throw std::invalid_argument("lse_value: delta must be positive");
    const Vec z = phase_terms(theta_bar, pc);
    const double zmax = z.maxCoeff();
    return zmax + delta * std::log(((z.array() - zmax) / delta).exp().sum());
}

/// Softmax weights of the terms at temperature delta; they sum to one.
inline Vec lse_weights(const Vec &theta_bar, const PhaseCoefficients &pc, double delta)
{
    if (!(delta > 0.0))
        throw std::invalid_argument("lse_weights: delta must be positive");
    const Vec z = phase_terms(theta_bar, pc);
    Vec w = ((z.array() - z.maxCoeff()) / delta).exp().matrix();
    return w / w.sum();
}

inline Vec lse_gradient(const Vec &theta_bar, const PhaseCoefficients &pc, double delta)
{
    return pc.eta * lse_weights(theta_bar, pc, delta);
}

/// Rescales each pair (theta_bar_n, theta_bar_{n+N}) to unit norm; a zero
/// pair maps to (1, 0).
inline Vec project_unit_modulus(const Vec &theta_bar)
{
    if (theta_bar.size() % 2 != 0)
        throw std::invalid_argument("project_unit_modulus: lifted vector must have even length");
    const Eigen::Index n = theta_bar.size() / 2;
    Vec out(theta_bar.size());
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const double re = theta_bar(i);
        const double im = theta_bar(i + n);
        const double r = std::hypot(re, im);
        if (r > 0.0)
        {
            out(i) = re / r;
            out(i + n) = im / r;
        }
        else
        {
            out(i) = 1.0;
            out(i + n) = 0.0;
        }
    }
    return out;
}

/// max_n | theta_bar_n^2 + theta_bar_{n+N}^2 - 1 |.
inline double unit_modulus_violation(const Vec &theta_bar)
{
    const Eigen::Index n = theta_bar.size() / 2;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(theta_bar(i) * theta_bar(i) + theta_bar(i + n) * theta_bar(i + n) - 1.0));
    return worst;
}

// ---------------------------------------------------------------------------
// Momentum schedule
// ---------------------------------------------------------------------------

/// zeta_r = (1 + sqrt(1 + 4 zeta_{r-1}^2)) / 2, starting from zeta_{-1} = 0.
inline double next_zeta(double zeta_prev)
{
    return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * zeta_prev * zeta_prev));
}

/// Extrapolation weight. The default uses (zeta_r - 1) / zeta_r; the classical
/// FISTA weight (zeta_{r-1} - 1) / zeta_r is available for comparison and is
/// clamped at zero for the first step.
inline double momentum_weight(double zeta, double zeta_prev, bool classical)
{
    if (classical)
        return std::max(0.0, (zeta_prev - 1.0) / zeta);
    return (zeta - 1.0) / zeta;
}

// ---------------------------------------------------------------------------
// APG
// ---------------------------------------------------------------------------

struct ApgOptions
{
    double delta = 1e-2;
    int max_iterations = 300;
    /// Stop when ||theta^{r+1} - theta^r|| falls below this.
    double tolerance = 1e-7;
    bool classical_momentum = false;
    /// Reset momentum after this many consecutive increases of the smoothed objective.
    int restart_after = 5;
    bool record_trace = false;
};

struct ApgTraceRecord
{
    int iteration;
    double smoothed;
    double objective;
    double step;
    double feasibility; // unit_modulus_violation of the iterate
};

struct ApgResult
{
    Vec theta_bar;         // best iterate under the unsmoothed objective
    double objective = 0.0; // unsmoothed objective at theta_bar
    double smoothed = 0.0;  // lse_value at theta_bar
    int iterations = 0;
    int restarts = 0;
    SolverStatus status = SolverStatus::max_iterations;
    std::vector<ApgTraceRecord> trace;
};

namespace detail
{
/// Largest eigenvalue of eta eta^T by power iteration.
inline double spectral_bound(const Mat &eta)
{
    if (eta.size() == 0)
        return 0.0;
    Vec v = Vec::Ones(eta.rows()).normalized();
    double lambda = 0.0;
    for (int i = 0; i < 50; ++i)
    {
        Vec w = eta * (eta.transpose() * v);
        const double norm = w.norm();
        if (!(norm > 0.0))
            return 0.0;
        lambda = norm;
        v = w / norm;
    }
    return lambda;
}
} // namespace detail

/**
 * @brief Accelerated projected gradient on the log-sum-exp surrogate.
 *
 *   z^r         = theta^r + psi_r (theta^r - theta^{r-1})
 *   theta^{r+1} = P_unit( z^r - grad h(z^r) / tau_r )
 *
 * tau_r is found by backtracking on the quadratic upper bound of h around
 * z^r, starting from half the previous value (initially the power-iteration
 * estimate of ||eta eta^T|| / delta). The best iterate under the true max
 * objective is returned, including the starting point.
 */
inline ApgResult apg_optimize(const PhaseCoefficients &pc, const Vec &theta_init, const ApgOptions &opts = {})
{
    if (!(opts.delta > 0.0))
        throw std::invalid_argument("apg_optimize: delta must be positive");
    if (theta_init.size() != pc.eta.rows())
        throw std::invalid_argument("apg_optimize: initial point has wrong length");

    const double delta = opts.delta;
    Vec theta = project_unit_modulus(theta_init);
    Vec theta_prev = theta;
    double h_cur = lse_value(theta, pc, delta);

    ApgResult res;
    res.theta_bar = theta;
    res.objective = phase_objective(theta, pc);
    res.smoothed = h_cur;
    if (opts.record_trace)
        res.trace.push_back({0, h_cur, res.objective, 0.0, unit_modulus_violation(theta)});

    const double bound = detail::spectral_bound(pc.eta) / delta;
    double tau = bound > 0.0 ? bound : 1.0;
    const double tau_ceiling = tau * 1e12 + 1.0;

    double zeta_prev = 0.0;
    int increases = 0;
    res.status = SolverStatus::max_iterations;
    int it = 0;
    for (; it < opts.max_iterations; ++it)
    {
        const double zeta = next_zeta(zeta_prev);
        const double psi = momentum_weight(zeta, zeta_prev, opts.classical_momentum);
        zeta_prev = zeta;

        const Vec z = theta + psi * (theta - theta_prev);
        const double hz = lse_value(z, pc, delta);
        const Vec grad = lse_gradient(z, pc, delta);

        tau *= 0.5;
        Vec next;
        double h_next = 0.0;
        for (;;)
        {
            next = project_unit_modulus(z - grad / tau);
            h_next = lse_value(next, pc, delta);
            const Vec d = next - z;
            if (h_next <= hz + grad.dot(d) + 0.5 * tau * d.squaredNorm() + 1e-15 * std::abs(hz) || tau > tau_ceiling)
                break;
            tau *= 2.0;
        }
        if (!next.allFinite() || !std::isfinite(h_next))
        {
            res.status = SolverStatus::numerical_failure;
            break;
        }

        const double change = (next - theta).norm();
        increases = h_next > h_cur ? increases + 1 : 0;
        theta_prev = theta;
        theta = std::move(next);
        h_cur = h_next;

        const double obj = phase_objective(theta, pc);
        if (opts.record_trace)
            res.trace.push_back({it + 1, h_cur, obj, 1.0 / tau, unit_modulus_violation(theta)});
        if (obj < res.objective)
        {
            res.objective = obj;
            res.smoothed = h_cur;
            res.theta_bar = theta;
        }
        if (increases >= opts.restart_after)
        {
            zeta_prev = 0.0;
            theta_prev = theta;
            increases = 0;
            ++res.restarts;
        }
        if (change <= opts.tolerance)
        {
            res.status = SolverStatus::converged;
            ++it;
            break;
        }
    }
    res.iterations = it;
    return res;
}

} // namespace onebit
