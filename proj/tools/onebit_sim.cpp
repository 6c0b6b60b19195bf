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

// Command-line front end: `run` executes a BER experiment and writes CSV,
// `fixtures dump` writes one channel realization as JSON.

#include <onebit/onebit.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

onebit::ExperimentConfig base_config(const std::string &path)
{
    return path.empty() ? onebit::ExperimentConfig{} : onebit::load_config(path);
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"One-bit symbol-level precoding with IRS: BER experiments"};
    app.require_subcommand(1);

    auto *run = app.add_subcommand("run", "run a Monte-Carlo BER experiment");
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    std::string schemes;
    unsigned threads = 0;
    bool no_timing = false;
    run->add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
    run->add_option("--out", out_path, "CSV output path (stdout if omitted)");
    auto *seed_opt = run->add_option("--seed", seed, "override the master seed");
    run->add_option("--schemes", schemes, "comma-separated scheme list override");
    run->add_option("--threads", threads, "worker threads");
    run->add_flag("--no-timing", no_timing, "write nan in the runtime column");

    auto *fixtures = app.add_subcommand("fixtures", "channel fixture utilities");
    fixtures->require_subcommand(1);
    auto *dump = fixtures->add_subcommand("dump", "write one channel realization as JSON");
    std::string dump_config;
    std::string dump_out;
    std::uint64_t dump_seed = 0;
    int channel_index = 0;
    dump->add_option("--config", dump_config, "JSON experiment configuration")->check(CLI::ExistingFile);
    dump->add_option("--out", dump_out, "output path (stdout if omitted)");
    auto *dump_seed_opt = dump->add_option("--seed", dump_seed, "override the master seed");
    dump->add_option("--channel", channel_index, "channel realization index")->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            onebit::ExperimentConfig cfg = base_config(config_path);
            if (*seed_opt)
                cfg.seed = seed;
            if (!schemes.empty())
                cfg.schemes = split_list(schemes);
            if (threads > 0)
                cfg.threads = threads;
            if (no_timing)
                cfg.timing = false;
            const onebit::ExperimentResult res = onebit::run_experiment(cfg);
            if (out_path.empty())
            {
                onebit::write_csv(std::cout, res.records);
            }
            else
            {
                std::ofstream out(out_path);
                if (!out)
                    throw std::runtime_error("cannot write '" + out_path + "'");
                onebit::write_csv(out, res.records);
            }
        }
        else if (*dump)
        {
            onebit::ExperimentConfig cfg = base_config(dump_config);
            if (*dump_seed_opt)
                cfg.seed = dump_seed;
            const auto [scenario, channels] = onebit::experiment_channel(cfg, channel_index);
            const std::string text = onebit::fixture_to_json(scenario, channels).dump(2);
            if (dump_out.empty())
            {
                std::cout << text << '\n';
            }
            else
            {
                std::ofstream out(dump_out);
                if (!out)
                    throw std::runtime_error("cannot write '" + dump_out + "'");
                out << text << '\n';
            }
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
