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

// Reference transmitters: zero forcing, naive one-bit quantization and the
// box-relaxed (unquantized) symbol-level precoder.

#pragma once

#include "ao.hpp"

namespace onebit
{

struct ZfResult
{
    CMat frame; // M x T, per-slot power P before quantization
    bool rank_deficient = false;
};

/// x_t = gamma_t W s_t with W = H^+ and gamma_t chosen so ||x_t||^2 = P.
/// Rank-deficient H falls back to the thresholded pseudoinverse and is flagged.
inline ZfResult zf_precode(const CMat &h_eff, const SymbolFrame &symbols, double power)
{
    if (!(power > 0.0))
        throw std::invalid_argument("zf_precode: power must be positive");
    if (h_eff.rows() != symbols.users())
        throw std::invalid_argument("zf_precode: channel rows differ from user count");
    Eigen::CompleteOrthogonalDecomposition<CMat> cod(h_eff);
    ZfResult out;
    out.rank_deficient = cod.rank() < h_eff.rows();
    const CMat w = cod.pseudoInverse();
    out.frame.resize(h_eff.cols(), symbols.slots());
    for (int t = 0; t < symbols.slots(); ++t)
    {
        const CVec x = w * symbols.slot(t);
        const double norm = x.norm();
        out.frame.col(t) = norm > 0.0 ? CVec(x * (std::sqrt(power) / norm)) : CVec(CVec::Zero(x.size()));
    }
    return out;
}

/// Elementwise sign of real and imaginary parts scaled to sqrt(P/2M); sign(0) = +.
inline CMat quantize_onebit(const CMat &x, double power)
{
    const double s = onebit_amplitude(power, static_cast<int>(x.rows()));
    CMat out(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c)
        for (Eigen::Index r = 0; r < x.rows(); ++r)
            out(r, c) = cplx(x(r, c).real() >= 0.0 ? s : -s, x(r, c).imag() >= 0.0 ? s : -s);
    return out;
}

struct RelaxedFrame
{
    CMat frame;
    /// -f_mu(lambda*) per slot.
    Vec values;
    SolverStatus status = SolverStatus::converged;
};

/// Box-relaxed precoder: the dual solve and primal recovery of solve_symbol
/// without the rounding stage.
inline RelaxedFrame relaxed_slp(const ChannelSet &ch, const SymbolFrame &symbols, const PhaseShifts &phases,
                                double power, const PrecoderOptions &opts, unsigned threads = 1)
{
    const CMat h = effective_channel_matrix(ch, phases);
    RelaxedFrame out{CMat(ch.antennas(), symbols.slots()), Vec(symbols.slots())};
    std::vector<SolverStatus> statuses(static_cast<std::size_t>(symbols.slots()), SolverStatus::converged);
    parallel_for(static_cast<std::size_t>(symbols.slots()), threads, [&](std::size_t i) {
        const int t = static_cast<int>(i);
        const CoefficientMatrix cm = build_coefficients(h, symbols.slot(t), symbols.constellation(), power);
        const RelaxedSolution sol = solve_relaxed(cm, opts);
        out.frame.col(t) = unlift(sol.xbar);
        out.values(t) = sol.regularized_value;
        statuses[i] = sol.md.status;
    });
    for (auto s : statuses)
        if (out.status == SolverStatus::converged && s != SolverStatus::converged)
            out.status = s;
    return out;
}

inline ChannelSet no_irs_variant(const ChannelSet &ch)
{
    return without_irs(ch);
}

// ---------------------------------------------------------------------------
// Scheme identifiers
// ---------------------------------------------------------------------------

enum class SchemeKind
{
    onebit_md,
    relaxed,
    relaxed_quant,
    zf_quant,
};

struct Scheme
{
    SchemeKind kind;
    bool irs = true;
    std::string id;
};

inline Scheme parse_scheme(const std::string &id)
{
    static const std::pair<const char *, SchemeKind> table[] = {
        {"onebit-md", SchemeKind::onebit_md},
        {"relaxed", SchemeKind::relaxed},
        {"relaxed-quant", SchemeKind::relaxed_quant},
        {"zf-quant", SchemeKind::zf_quant},
    };
    if (id == "onebit-gemm" || id == "onebit-gemm-noirs")
        throw std::invalid_argument("scheme '" + id + "' is reserved and not implemented");
    const std::string suffix = "-noirs";
    const bool noirs = id.size() > suffix.size() && id.compare(id.size() - suffix.size(), suffix.size(), suffix) == 0;
    const std::string base = noirs ? id.substr(0, id.size() - suffix.size()) : id;
    for (const auto &[name, kind] : table)
        if (base == name)
            return {kind, !noirs, id};
    throw std::invalid_argument("unknown scheme '" + id + "'");
}

/// How the IRS phases are chosen for the reference transmitters.
enum class BaselineTheta
{
    shared, // phases designed by onebit-md for the same channel
    random, // independent uniform phases per channel
    joint,  // alternating optimization with the relaxed X-step
};

inline BaselineTheta parse_baseline_theta(const std::string &s)
{
    if (s == "shared")
        return BaselineTheta::shared;
    if (s == "random")
        return BaselineTheta::random;
    if (s == "joint")
        return BaselineTheta::joint;
    throw std::invalid_argument("unknown baseline theta mode '" + s + "'");
}

inline std::string to_string(BaselineTheta m)
{
    switch (m)
    {
    case BaselineTheta::shared:
        return "shared";
    case BaselineTheta::random:
        return "random";
    case BaselineTheta::joint:
        return "joint";
    }
    return "unknown";
}

} // namespace onebit
