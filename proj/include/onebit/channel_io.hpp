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

// JSON fixtures for scenarios and channel realizations. Complex numbers are
// [re, im] pairs; matrices are arrays of rows.
//
//   {
//     "M": 4, "N": 2, "K": 1,
//     "scenario": { "bs": [0,0], "irs": [20,10], "users": [[x,y], ...],
//                   "pathloss": { "bs_user":  {"ref_gain": g, "exponent": e},
//                                 "bs_irs":   {...}, "irs_user": {...} } },
//     "h_d": [[[re,im] x M] x K],
//     "G":   [[[re,im] x M] x N],
//     "h_r": [[[re,im] x N] x K]
//   }

#pragma once

#include "channel.hpp"

#include <json.hpp>

namespace onebit
{

using json = nlohmann::json;

inline json to_json(Point2 p)
{
    return json::array({p.x, p.y});
}

inline Point2 point_from_json(const json &j)
{
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json to_json(const PathLossModel &m)
{
    return {{"ref_gain", m.ref_gain}, {"exponent", m.exponent}};
}

inline PathLossModel pathloss_from_json(const json &j)
{
    return {j.at("ref_gain").get<double>(), j.at("exponent").get<double>()};
}

inline json to_json(const Scenario &s)
{
    json users = json::array();
    for (const auto &u : s.users)
        users.push_back(to_json(u));
    return {{"bs", to_json(s.bs)},
            {"irs", to_json(s.irs)},
            {"users", users},
            {"pathloss",
             {{"bs_user", to_json(s.bs_user)}, {"bs_irs", to_json(s.bs_irs)}, {"irs_user", to_json(s.irs_user)}}}};
}

inline Scenario scenario_from_json(const json &j)
{
    Scenario s;
    s.bs = point_from_json(j.at("bs"));
    s.irs = point_from_json(j.at("irs"));
    for (const auto &u : j.at("users"))
        s.users.push_back(point_from_json(u));
    const auto &pl = j.at("pathloss");
    s.bs_user = pathloss_from_json(pl.at("bs_user"));
    s.bs_irs = pathloss_from_json(pl.at("bs_irs"));
    s.irs_user = pathloss_from_json(pl.at("irs_user"));
    return s;
}

inline json complex_matrix_to_json(const CMat &m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
    {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline CMat complex_matrix_from_json(const json &j, Eigen::Index rows, Eigen::Index cols)
{
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw std::invalid_argument("channel fixture: unexpected row count");
    CMat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
    {
        const auto &row = j[static_cast<std::size_t>(r)];
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw std::invalid_argument("channel fixture: unexpected column count");
        for (Eigen::Index c = 0; c < cols; ++c)
        {
            const auto &e = row[static_cast<std::size_t>(c)];
            m(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    return m;
}

inline json to_json(const ChannelSet &ch)
{
    return {{"M", ch.antennas()},
            {"N", ch.elements()},
            {"K", ch.users()},
            {"h_d", complex_matrix_to_json(ch.direct)},
            {"G", complex_matrix_to_json(ch.bs_irs)},
            {"h_r", complex_matrix_to_json(ch.irs_user)}};
}

inline ChannelSet channels_from_json(const json &j)
{
    const int m = j.at("M").get<int>();
    const int n = j.at("N").get<int>();
    const int k = j.at("K").get<int>();
    ChannelSet ch{complex_matrix_from_json(j.at("h_d"), k, m), complex_matrix_from_json(j.at("G"), n, m),
                  complex_matrix_from_json(j.at("h_r"), k, n)};
    ch.validate();
    return ch;
}

/// Fixture document: channel set plus the scenario it was drawn from.
inline json fixture_to_json(const Scenario &sc, const ChannelSet &ch)
{
    json j = to_json(ch);
    j["scenario"] = to_json(sc);
    return j;
}

} // namespace onebit
