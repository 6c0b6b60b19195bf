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

// Designs a one-bit frame and IRS phases for one random deployment and
// compares the worst margin with a naively quantized zero-forcing frame.

#include <onebit/onebit.hpp>

#include <iostream>

int main()
{
    using namespace onebit;

    const int antennas = 16, elements = 8, users = 3, slots = 10;
    const double power = db_to_linear(20.0);

    ScenarioConfig sc_cfg;
    sc_cfg.users = users;
    Rng rng = derive_rng(7, {stream::scenario});
    const Scenario scenario = sample_scenario(sc_cfg, rng);
    const ChannelSet ch = sample_channels(scenario, antennas, elements, rng);
    const SymbolFrame symbols = SymbolFrame::random(PskConstellation(4), users, slots, rng);

    AoConfig cfg;
    cfg.power = power;
    cfg.seed = 7;
    const AoResult ao = alternating_optimize(ch, symbols, cfg);

    const ZfResult zf = zf_precode(effective_channel_matrix(ch, ao.phases), symbols, power);
    const CMat zf_frame = quantize_onebit(zf.frame, power);

    std::cout << "outer iterations: " << ao.outer_iterations << '\n';
    for (const auto &rec : ao.trace)
        std::cout << "  round " << rec.outer << ": margin after X " << rec.margin_after_x << ", after theta "
                  << rec.margin_after_theta << ", change " << rec.change << '\n';
    std::cout << "one-bit design worst margin: " << ao.worst_margin << '\n';
    std::cout << "ZF + quantization worst margin: " << frame_worst_margin(ch, ao.phases, zf_frame, symbols) << '\n';
    return 0;
}
