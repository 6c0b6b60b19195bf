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

#include <stdexcept>
#include <string>

namespace onebit
{

struct Point2
{
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point2 a, Point2 b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

/// Large-scale fading L(d) = ref_gain * d^{-exponent}; ref_gain is linear.
struct PathLossModel
{
    double ref_gain = 1.0;
    double exponent = 0.0;
};

inline double path_loss(double d, double ref_gain, double exponent)
{
    if (!(d > 0.0))
        throw std::invalid_argument("path_loss: distance must be positive");
    return ref_gain * std::pow(d, -exponent);
}

inline double path_loss(double d, const PathLossModel &m)
{
    return path_loss(d, m.ref_gain, m.exponent);
}

/// Geometry and path-loss parameters used to draw scenarios. Defaults follow
/// the reference deployment: BS at the origin, IRS at (20, 10), users in a
/// 10 m disk around (30, 0). The IRS cascade reference gain (-20 dB) is split
/// evenly between the two hops.
struct ScenarioConfig
{
    int users = 14;
    Point2 bs{0.0, 0.0};
    Point2 irs{20.0, 10.0};
    Point2 user_center{30.0, 0.0};
    double user_radius = 10.0;
    PathLossModel bs_user{db_to_linear(-15.0), 3.2};
    PathLossModel bs_irs{db_to_linear(-10.0), 2.2};
    PathLossModel irs_user{db_to_linear(-10.0), 2.2};
};

struct Scenario
{
    Point2 bs;
    Point2 irs;
    std::vector<Point2> users;
    PathLossModel bs_user;
    PathLossModel bs_irs;
    PathLossModel irs_user;

    int user_count() const { return static_cast<int>(users.size()); }

    void validate() const
    {
        if (users.empty())
            throw std::invalid_argument("Scenario: at least one user required");
        if (!(distance(bs, irs) > 0.0))
            throw std::invalid_argument("Scenario: BS and IRS coincide");
        for (const auto &u : users)
            if (!(distance(bs, u) > 0.0) || !(distance(irs, u) > 0.0))
                throw std::invalid_argument("Scenario: user coincides with BS or IRS");
    }
};

/// Users uniform over the disk (polar sampling with sqrt radius correction).
inline Scenario sample_scenario(const ScenarioConfig &cfg, Rng &rng)
{
    if (cfg.users < 1)
        throw std::invalid_argument("sample_scenario: need at least one user");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Scenario s{cfg.bs, cfg.irs, {}, cfg.bs_user, cfg.bs_irs, cfg.irs_user};
    s.users.reserve(static_cast<std::size_t>(cfg.users));
    for (int k = 0; k < cfg.users; ++k)
    {
        const double r = cfg.user_radius * std::sqrt(unit(rng));
        const double phi = 2.0 * pi * unit(rng);
        s.users.push_back({cfg.user_center.x + r * std::cos(phi), cfg.user_center.y + r * std::sin(phi)});
    }
    return s;
}

/**
 * @brief Channels of one realization.
 *
 * direct: K x M, row k holds h_{d,k}^T (not conjugated).
 * bs_irs: N x M matrix G.
 * irs_user: K x N, row k holds h_{r,k}^T.
 */
struct ChannelSet
{
    CMat direct;
    CMat bs_irs;
    CMat irs_user;

    int antennas() const { return static_cast<int>(direct.cols()); }
    int elements() const { return static_cast<int>(bs_irs.rows()); }
    int users() const { return static_cast<int>(direct.rows()); }

    void validate() const
    {
        if (bs_irs.cols() != direct.cols() || irs_user.rows() != direct.rows() || irs_user.cols() != bs_irs.rows())
            throw std::invalid_argument("ChannelSet: inconsistent dimensions");
        if (!direct.allFinite() || !bs_irs.allFinite() || !irs_user.allFinite())
            throw std::invalid_argument("ChannelSet: non-finite entries");
    }
};

/// Unit-modulus IRS reflection coefficients.
class PhaseShifts
{
  public:
    PhaseShifts() = default;

    explicit PhaseShifts(CVec theta) : theta_(std::move(theta))
    {
        for (Eigen::Index n = 0; n < theta_.size(); ++n)
            if (std::abs(std::abs(theta_(n)) - 1.0) > 1e-10)
                throw std::invalid_argument("PhaseShifts: coefficient " + std::to_string(n) + " is not unit-modulus");
    }

    static PhaseShifts all_ones(int elements) { return PhaseShifts(CVec::Ones(elements)); }

    static PhaseShifts random(int elements, Rng &rng)
    {
        std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
        CVec theta(elements);
        for (int n = 0; n < elements; ++n)
            theta(n) = std::polar(1.0, angle(rng));
        return PhaseShifts(std::move(theta));
    }

    /// From the real lifting [Re theta; Im theta]; pairs are renormalized.
    static PhaseShifts from_lifted(const Vec &lifted)
    {
        const Eigen::Index n = lifted.size() / 2;
        CVec theta(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double re = lifted(i);
            const double im = lifted(i + n);
            const double r = std::hypot(re, im);
            theta(i) = r > 0.0 ? cplx(re / r, im / r) : cplx(1.0, 0.0);
        }
        return PhaseShifts(std::move(theta));
    }

    int size() const { return static_cast<int>(theta_.size()); }
    const CVec &values() const { return theta_; }

    Vec lifted() const
    {
        Vec out(2 * theta_.size());
        out.head(theta_.size()) = theta_.real();
        out.tail(theta_.size()) = theta_.imag();
        return out;
    }

  private:
    CVec theta_;
};

/// Rayleigh fading scaled by the per-link path loss. Draw order is fixed:
/// direct links, then G, then IRS-user links, each row-major.
inline ChannelSet sample_channels(const Scenario &sc, int antennas, int elements, Rng &rng)
{
    if (antennas < 1 || elements < 1)
        throw std::invalid_argument("sample_channels: dimensions must be positive");
    sc.validate();
    const int users = sc.user_count();
    ChannelSet ch{CMat(users, antennas), CMat(elements, antennas), CMat(users, elements)};

    for (int k = 0; k < users; ++k)
    {
        const double pl = path_loss(distance(sc.bs, sc.users[static_cast<std::size_t>(k)]), sc.bs_user);
        for (int m = 0; m < antennas; ++m)
            ch.direct(k, m) = sample_cn(rng, pl);
    }
    const double pl_bi = path_loss(distance(sc.bs, sc.irs), sc.bs_irs);
    for (int n = 0; n < elements; ++n)
        for (int m = 0; m < antennas; ++m)
            ch.bs_irs(n, m) = sample_cn(rng, pl_bi);
    for (int k = 0; k < users; ++k)
    {
        const double pl = path_loss(distance(sc.irs, sc.users[static_cast<std::size_t>(k)]), sc.irs_user);
        for (int n = 0; n < elements; ++n)
            ch.irs_user(k, n) = sample_cn(rng, pl);
    }
    return ch;
}

/// Unit-variance i.i.d. Rayleigh channels without path loss.
inline ChannelSet sample_iid_channels(int antennas, int elements, int users, Rng &rng)
{
    ChannelSet ch{CMat(users, antennas), CMat(elements, antennas), CMat(users, elements)};
    for (int k = 0; k < users; ++k)
        for (int m = 0; m < antennas; ++m)
            ch.direct(k, m) = sample_cn(rng);
    for (int n = 0; n < elements; ++n)
        for (int m = 0; m < antennas; ++m)
            ch.bs_irs(n, m) = sample_cn(rng);
    for (int k = 0; k < users; ++k)
        for (int n = 0; n < elements; ++n)
            ch.irs_user(k, n) = sample_cn(rng);
    return ch;
}

/// Row vector h_k^H = h_{d,k}^H + theta^T W_{r,k}^H G, with W_{r,k} = Diag(h_{r,k}).
inline CRowVec effective_channel(const ChannelSet &ch, const PhaseShifts &phases, int k)
{
    if (k < 0 || k >= ch.users())
        throw std::out_of_range("effective_channel: user index out of range");
    if (phases.size() != ch.elements())
        throw std::invalid_argument("effective_channel: phase vector length differs from IRS size");
    const CVec weights = phases.values().cwiseProduct(ch.irs_user.row(k).transpose().conjugate());
    return ch.direct.row(k).conjugate() + weights.transpose() * ch.bs_irs;
}

/// K x M matrix whose rows are the effective channels h_k^H.
inline CMat effective_channel_matrix(const ChannelSet &ch, const PhaseShifts &phases)
{
    CMat h(ch.users(), ch.antennas());
    for (int k = 0; k < ch.users(); ++k)
        h.row(k) = effective_channel(ch, phases, k);
    return h;
}

/// Copy of the channel set with the reflected path removed (G = 0).
inline ChannelSet without_irs(const ChannelSet &ch)
{
    ChannelSet out = ch;
    out.bs_irs.setZero();
    return out;
}

} // namespace onebit
