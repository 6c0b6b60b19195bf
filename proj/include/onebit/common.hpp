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

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <initializer_list>
#include <mutex>
#include <numbers>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

namespace onebit
{
using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using CRowVec = Eigen::RowVectorXcd;

inline constexpr double pi = std::numbers::pi;

/// Outcome of an iterative inner solver. Solvers always return a usable
/// point; the status only says how they stopped.
enum class SolverStatus
{
    converged,
    max_iterations,
    stalled,           // line search could not make progress
    rank_deficient,    // zero-forcing fell back to a pseudoinverse
    numerical_failure, // non-finite values encountered
};

inline constexpr std::string_view to_string(SolverStatus s)
{
    switch (s)
    {
    case SolverStatus::converged:
        return "converged";
    case SolverStatus::max_iterations:
        return "max_iterations";
    case SolverStatus::stalled:
        return "stalled";
    case SolverStatus::rank_deficient:
        return "rank_deficient";
    case SolverStatus::numerical_failure:
        return "numerical_failure";
    }
    return "unknown";
}

/// cot(pi/L), with the BPSK and QPSK values pinned to their exact 0 and 1.
inline double cot_pi_over(int order)
{
    if (order == 2)
        return 0.0;
    if (order == 4)
        return 1.0;
    return 1.0 / std::tan(pi / static_cast<double>(order));
}

// ---------------------------------------------------------------------------
// Random streams
//
// Every stochastic step draws from an explicitly derived substream, so results
// depend only on (seed, tags) and never on scheduling or evaluation order.
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
{
    std::uint64_t h = splitmix64(seed);
    for (auto t : tags)
        h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
    return Rng(h);
}

/// Stream tags used across modules.
namespace stream
{
inline constexpr std::uint64_t scenario = 1;
inline constexpr std::uint64_t channels = 2;
inline constexpr std::uint64_t symbols = 3;
inline constexpr std::uint64_t noise = 4;
inline constexpr std::uint64_t theta_init = 5;
inline constexpr std::uint64_t mbi = 6;
inline constexpr std::uint64_t baseline_theta = 7;
} // namespace stream

/// Circularly-symmetric complex Gaussian CN(0, variance).
inline cplx sample_cn(Rng &rng, double variance = 1.0)
{
    std::normal_distribution<double> n(0.0, 1.0);
    const double sd = std::sqrt(variance / 2.0);
    const double re = n(rng);
    const double im = n(rng);
    return {sd * re, sd * im};
}

/// Neumaier-compensated accumulator for real-valued aggregates.
class CompensatedSum
{
  public:
    void add(double v)
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must
/// write to disjoint outputs; the first exception thrown is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn &&fn)
{
    if (threads <= 1 || n <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try
            {
                fn(i);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        }
    };
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (unsigned w = 0; w < count; ++w)
        pool.emplace_back(worker);
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace onebit
