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

#pragma once

#include "common.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace onebit
{

/// Gaussian tail probability Q(x) = P(Z > x), Z ~ N(0,1).
inline double q_function(double x)
{
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

/**
 * @brief L-ary PSK constellation with points e^{j 2 pi l / L}.
 *
 * Decision sectors are half-open: a received point whose phase lies in
 * [2 pi l/L - pi/L, 2 pi l/L + pi/L) decides for symbol l, so a point exactly
 * on a boundary belongs to the sector counter-clockwise of it. The origin
 * decides for l = 0.
 */
class PskConstellation
{
  public:
    explicit PskConstellation(int order) : order_(order)
    {
        if (order != 2 && order != 4 && order != 8 && order != 16)
            throw std::invalid_argument("PskConstellation: order must be one of 2, 4, 8, 16 (got " +
                                        std::to_string(order) + ")");
        points_.reserve(static_cast<std::size_t>(order));
        for (int l = 0; l < order; ++l)
            points_.push_back(std::polar(1.0, 2.0 * pi * l / order));
        cot_ = cot_pi_over(order);
    }

    int order() const { return order_; }
    int bits_per_symbol() const { return std::countr_zero(static_cast<unsigned>(order_)); }
    const std::vector<cplx> &points() const { return points_; }
    cplx point(int index) const { return points_.at(static_cast<std::size_t>(index)); }

    /// cot(pi/L); zero for BPSK.
    double cot() const { return cot_; }
    /// sin(pi/L).
    double sin_half_sector() const { return std::sin(pi / order_); }

    int decide_index(cplx y) const
    {
        if (y == cplx(0.0, 0.0))
            return 0;
        // Sector coordinate in units of 2 pi / L, shifted so sector l covers [l, l+1).
        double u = (std::arg(y) + pi / order_) * order_ / (2.0 * pi);
        // Phases computed from exact boundary points land within a few ulps of
        // an integer; snap those so the half-open rule is applied to the
        // intended boundary.
        const double nearest = std::round(u);
        if (std::abs(u - nearest) < 1e-12)
            u = nearest;
        int l = static_cast<int>(std::floor(u));
        l %= order_;
        if (l < 0)
            l += order_;
        return l;
    }

    cplx decide(cplx y) const { return points_[static_cast<std::size_t>(decide_index(y))]; }

  private:
    int order_;
    double cot_;
    std::vector<cplx> points_;
};

/// Safety margin of the rotated noise-free receive point z = h^H x s^*.
/// Positive exactly when z lies strictly inside the correct decision sector.
inline double margin(cplx z, const PskConstellation &c)
{
    return z.real() - std::abs(z.imag()) * c.cot();
}

/// SEP upper bound 2 Q(alpha sin(pi/L) / (sigma/sqrt 2)). The raw value may
/// exceed one for non-positive margins; clip when reporting a probability.
inline double sep_upper_bound(double alpha, double sigma2, const PskConstellation &c)
{
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("sep_upper_bound: noise power must be positive");
    const double sigma = std::sqrt(sigma2);
    return 2.0 * q_function(alpha * c.sin_half_sector() / (sigma / std::numbers::sqrt2));
}

/// Gray label of symbol index l as an integer of log2(L) bits.
inline unsigned gray_label(int index, int order)
{
    if (order < 2 || !std::has_single_bit(static_cast<unsigned>(order)))
        throw std::invalid_argument("gray_label: order must be a power of two");
    if (index < 0 || index >= order)
        throw std::out_of_range("gray_label: symbol index out of range");
    const auto l = static_cast<unsigned>(index);
    return l ^ (l >> 1);
}

/// Gray label rendered MSB first, e.g. "11" for l = 2 in QPSK.
inline std::string gray_bits(int index, const PskConstellation &c)
{
    const unsigned label = gray_label(index, c.order());
    const int nbits = c.bits_per_symbol();
    std::string out(static_cast<std::size_t>(nbits), '0');
    for (int b = 0; b < nbits; ++b)
        if (label & (1u << (nbits - 1 - b)))
            out[static_cast<std::size_t>(b)] = '1';
    return out;
}

/// Number of differing Gray bits between two symbol indices.
inline int bit_errors(int sent, int decided, int order)
{
    return std::popcount(gray_label(sent, order) ^ gray_label(decided, order));
}

/**
 * @brief K x T block of PSK symbols, stored as constellation indices.
 */
class SymbolFrame
{
  public:
    SymbolFrame(PskConstellation constellation, Eigen::MatrixXi indices)
        : constellation_(std::move(constellation)), indices_(std::move(indices))
    {
        if ((indices_.array() < 0).any() || (indices_.array() >= constellation_.order()).any())
            throw std::invalid_argument("SymbolFrame: symbol index outside the constellation");
    }

    static SymbolFrame random(const PskConstellation &c, int users, int slots, Rng &rng)
    {
        std::uniform_int_distribution<int> pick(0, c.order() - 1);
        Eigen::MatrixXi idx(users, slots);
        for (int t = 0; t < slots; ++t)
            for (int k = 0; k < users; ++k)
                idx(k, t) = pick(rng);
        return SymbolFrame(c, std::move(idx));
    }

    const PskConstellation &constellation() const { return constellation_; }
    int users() const { return static_cast<int>(indices_.rows()); }
    int slots() const { return static_cast<int>(indices_.cols()); }
    int index(int k, int t) const { return indices_(k, t); }
    const Eigen::MatrixXi &indices() const { return indices_; }
    cplx symbol(int k, int t) const { return constellation_.point(indices_(k, t)); }

    /// Symbols of slot t, one per user.
    CVec slot(int t) const
    {
        CVec s(users());
        for (int k = 0; k < users(); ++k)
            s(k) = symbol(k, t);
        return s;
    }

  private:
    PskConstellation constellation_;
    Eigen::MatrixXi indices_;
};

} // namespace onebit
