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

// Per-slot one-bit transmit design.
//
// For one symbol slot the worst-user margin problem reads
//
//     minimize_x  max_k c_k^T x      subject to  x in {-s, +s}^{2M},
//
// with x the real lifting [Re x; Im x] and s = sqrt(P / 2M). The box
// relaxation with a (mu/2)||x||^2 regularizer has a smooth dual over the
// probability simplex,
//
//     f_mu(lambda) = s * sum_m huber_{mu s}( (C lambda)_m ),
//
// which is minimized by entropic mirror descent. The primal point is
// recovered by clipping, and the entries left strictly inside the box are
// rounded by maximum-block-improvement over single-sign flips.

#pragma once

#include "constellation.hpp"

#include <bit>
#include <limits>
#include <stdexcept>

namespace onebit
{

/// [Re x; Im x].
inline Vec lift(const CVec &x)
{
    Vec out(2 * x.size());
    out.head(x.size()) = x.real();
    out.tail(x.size()) = x.imag();
    return out;
}

inline CVec unlift(const Vec &xbar)
{
    const Eigen::Index m = xbar.size() / 2;
    CVec out(m);
    for (Eigen::Index i = 0; i < m; ++i)
        out(i) = cplx(xbar(i), xbar(i + m));
    return out;
}

/// One-bit amplitude sqrt(P / 2M).
inline double onebit_amplitude(double power, int antennas)
{
    return std::sqrt(power / (2.0 * antennas));
}

/**
 * @brief Margin constraints of one symbol slot.
 *
 * Columns 0..K-1 hold -a_k + b_k, columns K..2K-1 hold -a_k - b_k, where
 * a_k = [Re g_k, -Im g_k], b_k = cot(pi/L) [Im g_k, Re g_k] and g_k = s_k^* h_k^H.
 * For every x, max_j c_j^T x equals minus the worst user margin.
 */
struct CoefficientMatrix
{
    Mat columns;      // 2M x 2K
    double amplitude; // s = sqrt(P / 2M)

    int lifted_size() const { return static_cast<int>(columns.rows()); }
    int constraints() const { return static_cast<int>(columns.cols()); }
};

/// @param h_eff K x M matrix whose rows are the effective channels h_k^H.
/// @param symbols the K symbols of the slot.
inline CoefficientMatrix build_coefficients(const CMat &h_eff, const CVec &symbols, const PskConstellation &c,
                                            double power)
{
    const Eigen::Index users = h_eff.rows();
    const Eigen::Index antennas = h_eff.cols();
    if (users < 1 || antennas < 1)
        throw std::invalid_argument("build_coefficients: need K >= 1 and M >= 1");
    if (symbols.size() != users)
        throw std::invalid_argument("build_coefficients: symbol count differs from user count");
    if (!(power > 0.0))
        throw std::invalid_argument("build_coefficients: power must be positive");

    const double cot = c.cot();
    CoefficientMatrix out{Mat(2 * antennas, 2 * users), onebit_amplitude(power, static_cast<int>(antennas))};
    for (Eigen::Index k = 0; k < users; ++k)
    {
        const CRowVec g = std::conj(symbols(k)) * h_eff.row(k);
        Vec a(2 * antennas);
        Vec b(2 * antennas);
        a << g.real().transpose(), -g.imag().transpose();
        b << g.imag().transpose(), g.real().transpose();
        b *= cot;
        out.columns.col(k) = -a + b;
        out.columns.col(k + users) = -a - b;
    }
    return out;
}

/// max_j c_j^T x.
inline double worst_objective(const Vec &xbar, const CoefficientMatrix &cm)
{
    if (xbar.size() != cm.columns.rows())
        throw std::invalid_argument("worst_objective: dimension mismatch");
    if (cm.columns.cols() == 0)
        return -std::numeric_limits<double>::infinity();
    return (cm.columns.transpose() * xbar).maxCoeff();
}

// ---------------------------------------------------------------------------
// Huber dual
// ---------------------------------------------------------------------------

inline double huber(double y, double rho)
{
    if (!(rho > 0.0))
        throw std::invalid_argument("huber: rho must be positive");
    const double a = std::abs(y);
    return a <= rho ? y * y / (2.0 * rho) : a - rho / 2.0;
}

inline double huber_derivative(double y, double rho)
{
    return std::clamp(y / rho, -1.0, 1.0);
}

inline void check_dual_args(const Vec &lambda, const CoefficientMatrix &cm, double mu)
{
    if (!(mu > 0.0))
        throw std::invalid_argument("dual: mu must be positive");
    if (lambda.size() != cm.columns.cols())
        throw std::invalid_argument("dual: lambda length differs from constraint count");
}

/// f_mu(lambda) = s * sum_m huber_{mu s}(cbar_m lambda).
inline double dual_value(const Vec &lambda, const CoefficientMatrix &cm, double mu)
{
    check_dual_args(lambda, cm, mu);
    const double s = cm.amplitude;
    const double rho = mu * s;
    const Vec w = cm.columns * lambda;
    double total = 0.0;
    for (Eigen::Index m = 0; m < w.size(); ++m)
        total += huber(w(m), rho);
    return s * total;
}

/// x*(lambda) = -clip((1/mu) C lambda, -s, s), the minimizer of the inner problem.
inline Vec recover_x(const Vec &lambda, const CoefficientMatrix &cm, double mu)
{
    check_dual_args(lambda, cm, mu);
    const double s = cm.amplitude;
    return -(cm.columns * lambda / mu).cwiseMax(-s).cwiseMin(s);
}

/// grad f_mu(lambda) = s * sum_m huber'(cbar_m lambda) cbar_m^T = -C^T x*(lambda).
inline Vec dual_gradient(const Vec &lambda, const CoefficientMatrix &cm, double mu)
{
    check_dual_args(lambda, cm, mu);
    const double s = cm.amplitude;
    const double rho = mu * s;
    const Vec w = cm.columns * lambda;
    Vec weights(w.size());
    for (Eigen::Index m = 0; m < w.size(); ++m)
        weights(m) = s * huber_derivative(w(m), rho);
    return cm.columns.transpose() * weights;
}

// ---------------------------------------------------------------------------
// Mirror descent on the simplex
// ---------------------------------------------------------------------------

struct MirrorDescentOptions
{
    int max_iterations = 20000;
    /// Stop once the primal-dual gap <grad, lambda> - min_k grad_k drops below this.
    double tolerance = 1e-8;
    double shrink = 0.5;
    double growth = 2.0;
    /// Every this many iterations, try an exact solve of the piecewise-quadratic
    /// model on the current Huber pieces and support (0 disables).
    int polish_interval = 10;
    bool record_trace = false;
};

struct MdTraceRecord
{
    int iteration;
    double value;
    double step;
    double gap;
};

struct MirrorDescentResult
{
    Vec lambda;
    double value = 0.0;
    /// <grad f, lambda> - min_k grad_k f. Equals max_k c_k^T x* - lambda^T C^T x*,
    /// the gap between the primal and dual objectives at (x*(lambda), lambda).
    double gap = 0.0;
    int iterations = 0;
    int polish_steps = 0;
    SolverStatus status = SolverStatus::max_iterations;
    std::vector<MdTraceRecord> trace;
};

namespace detail
{
struct DualState
{
    Vec lambda;
    Vec w; // C lambda
    Vec gradient;
    double value;
};

inline DualState evaluate_dual(Vec lambda, const CoefficientMatrix &cm, double mu)
{
    const double s = cm.amplitude;
    const double rho = mu * s;
    Vec w = cm.columns * lambda;
    Vec weights(w.size());
    double total = 0.0;
    for (Eigen::Index m = 0; m < w.size(); ++m)
    {
        const double a = std::abs(w(m));
        if (a <= rho)
        {
            total += w(m) * w(m) / (2.0 * rho);
            weights(m) = s * w(m) / rho;
        }
        else
        {
            total += a - rho / 2.0;
            weights(m) = w(m) > 0.0 ? s : -s;
        }
    }
    Vec gradient = cm.columns.transpose() * weights;
    return {std::move(lambda), std::move(w), std::move(gradient), s * total};
}

/// f(lambda + d) - f(lambda) from w = C lambda and dw = C d, evaluated term
/// by term so that the difference keeps full relative precision.
inline double dual_change(const Vec &w, const Vec &dw, double s, double rho)
{
    double total = 0.0;
    for (Eigen::Index m = 0; m < w.size(); ++m)
    {
        const double a = w(m);
        const double b = a + dw(m);
        const bool qa = std::abs(a) <= rho;
        const bool qb = std::abs(b) <= rho;
        if (qa && qb)
            total += dw(m) * (a + b) / (2.0 * rho);
        else if (!qa && !qb && (a > 0.0) == (b > 0.0))
            total += a > 0.0 ? dw(m) : -dw(m);
        else
        {
            auto h = [rho](double y) {
                const double ay = std::abs(y);
                return ay <= rho ? y * y / (2.0 * rho) : ay - rho / 2.0;
            };
            total += h(b) - h(a);
        }
    }
    return s * total;
}

inline double gap_of(const DualState &st)
{
    return st.lambda.dot(st.gradient) - st.gradient.minCoeff();
}

/// Primal active-set method for min 0.5 x^T Q x + l^T x over the simplex,
/// started from the feasible point x. Q is positive semidefinite; a relative
/// ridge of 1e-13 keeps the reduced systems nonsingular.
inline Vec simplex_qp(const Mat &q, const Vec &l, Vec x)
{
    const Eigen::Index n = x.size();
    const double ridge = 1e-13 * std::max(q.diagonal().maxCoeff(), std::numeric_limits<double>::min());
    std::vector<char> active(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k)
    {
        active[static_cast<std::size_t>(k)] = x(k) <= 0.0;
        if (x(k) <= 0.0)
            x(k) = 0.0;
    }
    const int max_steps = 20 * static_cast<int>(n) + 50;
    for (int step = 0; step < max_steps; ++step)
    {
        std::vector<Eigen::Index> free;
        for (Eigen::Index k = 0; k < n; ++k)
            if (!active[static_cast<std::size_t>(k)])
                free.push_back(k);
        const auto nf = static_cast<Eigen::Index>(free.size());
        Mat kkt = Mat::Zero(nf + 1, nf + 1);
        Vec rhs(nf + 1);
        for (Eigen::Index i = 0; i < nf; ++i)
        {
            const Eigen::Index fi = free[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < nf; ++j)
                kkt(i, j) = q(fi, free[static_cast<std::size_t>(j)]);
            kkt(i, i) += ridge;
            rhs(i) = -l(fi);
        }
        kkt.topRightCorner(nf, 1).setOnes();
        kkt.bottomLeftCorner(1, nf).setOnes();
        rhs(nf) = 1.0;
        const Vec sol = kkt.partialPivLu().solve(rhs);
        if (!sol.allFinite())
            return {};

        Vec p(nf);
        for (Eigen::Index i = 0; i < nf; ++i)
            p(i) = sol(i) - x(free[static_cast<std::size_t>(i)]);

        double alpha = 1.0;
        Eigen::Index blocking = -1;
        for (Eigen::Index i = 0; i < nf; ++i)
        {
            const Eigen::Index fi = free[static_cast<std::size_t>(i)];
            if (p(i) < 0.0 && -x(fi) / p(i) < alpha)
            {
                alpha = -x(fi) / p(i);
                blocking = fi;
            }
        }
        for (Eigen::Index i = 0; i < nf; ++i)
            x(free[static_cast<std::size_t>(i)]) += alpha * p(i);
        if (blocking >= 0)
        {
            x(blocking) = 0.0;
            active[static_cast<std::size_t>(blocking)] = 1;
            continue;
        }

        // Minimizer of the current face: release the most violated bound, if any.
        const Vec g = q * x + l;
        double nu = 0.0;
        for (auto k : free)
            nu -= g(k);
        nu /= static_cast<double>(std::max<Eigen::Index>(nf, 1));
        Eigen::Index release = -1;
        double most_negative = -1e-13 * (g.cwiseAbs().maxCoeff() + std::numeric_limits<double>::min());
        for (Eigen::Index k = 0; k < n; ++k)
            if (active[static_cast<std::size_t>(k)] && g(k) + nu < most_negative)
            {
                most_negative = g(k) + nu;
                release = k;
            }
        if (release < 0)
            return x;
        active[static_cast<std::size_t>(release)] = 0;
    }
    return x;
}

/// Exact minimizer over the simplex of the quadratic model of f that keeps
/// the given Huber pieces: rows flagged in `quadratic` use w^2/(2 rho), the
/// others keep the sign of C lambda at `cur`.
inline Vec piecewise_model_point(const DualState &cur, const CoefficientMatrix &cm, double mu,
                                 const std::vector<char> &quadratic)
{
    const double s = cm.amplitude;
    const Eigen::Index n = cur.lambda.size();
    Mat q = Mat::Zero(n, n);
    Vec l = Vec::Zero(n);
    for (Eigen::Index m = 0; m < cur.w.size(); ++m)
    {
        if (quadratic[static_cast<std::size_t>(m)])
            q.noalias() += cm.columns.row(m).transpose() * cm.columns.row(m) / mu;
        else
            l += (cur.w(m) > 0.0 ? s : -s) * cm.columns.row(m).transpose();
    }
    Vec x = simplex_qp(q, l, cur.lambda);
    if (x.size() != n || !x.allFinite() || !(x.sum() > 0.0))
        return {};
    x = x.cwiseMax(0.0);
    return x / x.sum();
}

inline std::vector<char> current_pieces(const DualState &cur, double rho)
{
    std::vector<char> pieces(static_cast<std::size_t>(cur.w.size()));
    for (Eigen::Index m = 0; m < cur.w.size(); ++m)
        pieces[static_cast<std::size_t>(m)] = std::abs(cur.w(m)) <= rho;
    return pieces;
}

/// The pieces at lambda, and the same with the 2K-1 rows of smallest
/// |C lambda| forced quadratic.
inline std::vector<std::vector<char>> candidate_pieces(const DualState &cur, double rho)
{
    const std::vector<char> current = current_pieces(cur, rho);
    const auto rows = current.size();
    std::vector<std::size_t> order(rows);
    for (std::size_t m = 0; m < rows; ++m)
        order[m] = m;
    const std::size_t keep = std::min(rows, static_cast<std::size_t>(2 * cur.lambda.size() - 1));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return std::abs(cur.w(static_cast<Eigen::Index>(a))) <
                                 std::abs(cur.w(static_cast<Eigen::Index>(b)));
                      });
    std::vector<char> widened = current;
    for (std::size_t i = 0; i < keep; ++i)
        widened[order[i]] = 1;

    if (widened == current)
        return {current};
    return {current, widened};
}
} // namespace detail

/**
 * @brief Entropic mirror descent for min f_mu over the simplex.
 *
 * Update lambda+ ∝ lambda * exp(-eta grad f). The step is chosen by
 * backtracking on f(lambda+) <= f(lambda) + <grad, lambda+ - lambda> + KL(lambda+, lambda)/eta,
 * shrinking by `shrink` on failure and growing by `growth` on the next
 * iteration. Starts from the uniform point. Iterates never increase f.
 *
 * f is piecewise quadratic. Once the pieces settle, an exact solve of the
 * local model is tried periodically and kept only if it lowers both f and
 * the gap; this removes the slow tail that ill-conditioned pieces cause.
 */
inline MirrorDescentResult mirror_descent(const CoefficientMatrix &cm, double mu, const MirrorDescentOptions &opts = {},
                                          const Vec *warm_start = nullptr)
{
    if (!(mu > 0.0))
        throw std::invalid_argument("mirror_descent: mu must be positive");
    const Eigen::Index n = cm.columns.cols();
    if (n < 1)
        throw std::invalid_argument("mirror_descent: empty constraint set");
    const double s = cm.amplitude;
    const double rho = mu * s;

    MirrorDescentResult res;
    if (warm_start && (warm_start->size() != n || (warm_start->array() <= 0.0).any()))
        throw std::invalid_argument("mirror_descent: warm start must be a strictly positive simplex point");
    detail::DualState cur = detail::evaluate_dual(
        warm_start ? Vec(*warm_start / warm_start->sum()) : Vec::Constant(n, 1.0 / static_cast<double>(n)), cm, mu);

    // Curvature bound in the l1 geometry: |C^T C|_max / mu.
    const double curvature = (cm.columns.transpose() * cm.columns).cwiseAbs().maxCoeff() / mu;
    double eta = curvature > 0.0 ? 1.0 / curvature : 1.0;
    const double eta_start = eta;
    const double eta_floor = eta * 1e-30;

    res.status = SolverStatus::max_iterations;
    bool force_polish = false;
    int it = 0;
    for (; it < opts.max_iterations; ++it)
    {
        double gap = detail::gap_of(cur);
        const bool polish_now =
            force_polish || (opts.polish_interval > 0 && it > 0 && it % opts.polish_interval == 0);
        const int polished_before = res.polish_steps;
        if (polish_now && gap > opts.tolerance)
        {
            const detail::DualState base = cur;
            for (const auto &pieces : detail::candidate_pieces(base, rho))
            {
                if (gap <= opts.tolerance)
                    break;
                // Re-identify the pieces after each step.
                detail::DualState probe = base;
                std::vector<char> active_pieces = pieces;
                for (int round = 0; round < 8; ++round)
                {
                    const Vec target = detail::piecewise_model_point(probe, cm, mu, active_pieces);
                    if (target.size() != n)
                        break;
                    // Backtrack along the model step until f decreases.
                    const Vec dir = target - cur.lambda;
                    const Vec dw_full = cm.columns * dir;
                    double t = 1.0;
                    while (t > 1e-12 && !(detail::dual_change(cur.w, t * dw_full, s, rho) < 0.0))
                        t *= 0.5;
                    if (!(t > 1e-12))
                        break;
                    Vec polished = (cur.lambda + t * dir).cwiseMax(0.0);
                    polished /= polished.sum();
                    detail::DualState cand = detail::evaluate_dual(std::move(polished), cm, mu);
                    const double cand_gap = detail::gap_of(cand);
                    cur = cand;
                    gap = cand_gap;
                    ++res.polish_steps;
                    if (gap <= opts.tolerance)
                        break;
                    probe = std::move(cand);
                    active_pieces = detail::current_pieces(probe, rho);
                }
            }
        }
        if (opts.record_trace)
            res.trace.push_back({it, cur.value, eta, gap});
        if (!std::isfinite(cur.value) || !std::isfinite(gap))
        {
            res.status = SolverStatus::numerical_failure;
            break;
        }
        if (gap <= opts.tolerance)
        {
            res.status = SolverStatus::converged;
            break;
        }

        const Vec shifted = cur.gradient.array() - cur.gradient.minCoeff(); // >= 0
        const double lin = cur.lambda.dot(shifted);
        bool accepted = false;
        if (it > 0)
            eta *= opts.growth;
        while (eta >= eta_floor)
        {
            // Z = sum lambda_k exp(-eta g_k), kept as Z - 1 for precision.
            Vec em1(n);
            double zm1 = 0.0;
            for (Eigen::Index k = 0; k < n; ++k)
            {
                em1(k) = std::expm1(-eta * shifted(k));
                zm1 += cur.lambda(k) * em1(k);
            }
            // lambda+ - lambda = lambda (e_k - Z) / Z.
            const Vec step = cur.lambda.cwiseProduct((em1.array() - zm1).matrix()) / (1.0 + zm1);
            // Model decrease: -(<g, lambda+ - lambda> + KL/eta) = lin + log Z / eta.
            const double model_drop = lin + std::log1p(zm1) / eta;
            const double change = detail::dual_change(cur.w, cm.columns * step, s, rho);
            if (change <= 0.0 && change <= -model_drop + 1e-12 * std::abs(model_drop))
            {
                Vec next = cur.lambda + step;
                next = next.cwiseMax(0.0);
                next /= next.sum();
                cur = detail::evaluate_dual(std::move(next), cm, mu);
                accepted = true;
                break;
            }
            eta *= opts.shrink;
        }
        if (!accepted)
        {
            // No multiplicative step helps; give the exact model solve one
            // more chance before giving up.
            if (!force_polish || res.polish_steps > polished_before)
            {
                force_polish = true;
                eta = eta_start;
                continue;
            }
            res.status = SolverStatus::stalled;
            break;
        }
        force_polish = false;
    }
    if (it == opts.max_iterations && res.status == SolverStatus::max_iterations)
    {
        if (detail::gap_of(cur) <= opts.tolerance)
            res.status = SolverStatus::converged;
        if (opts.record_trace)
            res.trace.push_back({it, cur.value, eta, detail::gap_of(cur)});
    }

    res.gap = detail::gap_of(cur);
    res.value = cur.value;
    res.lambda = std::move(cur.lambda);
    res.iterations = it;
    return res;
}

// ---------------------------------------------------------------------------
// Rounding
// ---------------------------------------------------------------------------

/// Entries with |x_m| < s (1 - 1e-6) are treated as fractional.
inline constexpr double fractional_threshold = 1e-6;

inline std::vector<int> fractional_entries(const Vec &xbar, double amplitude)
{
    std::vector<int> out;
    const double limit = amplitude * (1.0 - fractional_threshold);
    for (Eigen::Index m = 0; m < xbar.size(); ++m)
        if (std::abs(xbar(m)) < limit)
            out.push_back(static_cast<int>(m));
    return out;
}

/// Elementwise s * sign(x), with sign(0) = +1.
inline Vec sign_round(const Vec &xbar, double amplitude)
{
    return xbar.unaryExpr([amplitude](double v) { return v < 0.0 ? -amplitude : amplitude; });
}

struct MbiResult
{
    Vec xbar;
    double objective = 0.0;
    std::vector<int> fractional;
    int restarts_run = 0;
    /// Best objective after each restart (non-increasing).
    std::vector<double> best_per_restart;
};

namespace detail
{
inline double flip_tolerance(double objective, const CoefficientMatrix &cm)
{
    const double scale = cm.columns.size() > 0 ? cm.columns.cwiseAbs().maxCoeff() * cm.amplitude : 0.0;
    return 1e-12 * (std::abs(objective) + scale);
}

/// Maximum block improvement over single flips restricted to `free_set`.
/// Each pass tests every free coordinate and applies only the best strict
/// improvement; lowest index wins ties.
inline double mbi_descend(Vec &x, const CoefficientMatrix &cm, const std::vector<int> &free_set)
{
    Vec scores = cm.columns.transpose() * x;
    double obj = scores.maxCoeff();
    for (;;)
    {
        double best_gain = flip_tolerance(obj, cm);
        int best_m = -1;
        for (int m : free_set)
        {
            const double cand = (scores - 2.0 * x(m) * cm.columns.row(m).transpose()).maxCoeff();
            const double gain = obj - cand;
            if (gain > best_gain)
            {
                best_gain = gain;
                best_m = m;
            }
        }
        if (best_m < 0)
            return obj;
        x(best_m) = -x(best_m);
        scores = cm.columns.transpose() * x;
        obj = scores.maxCoeff();
    }
}
} // namespace detail

/**
 * @brief Rounds a relaxed point to {-s, +s}^{2M}.
 *
 * Saturated entries keep their sign; the fractional set is searched by
 * maximum block improvement. The first restart starts from sign(x) and the
 * remaining ones from i.i.d. uniform signs on the fractional set. The best
 * point over all restarts is returned (earliest wins ties).
 */
inline MbiResult mbi_round(const Vec &relaxed, const CoefficientMatrix &cm, int restarts, Rng &rng)
{
    if (restarts < 1)
        throw std::invalid_argument("mbi_round: restarts must be >= 1");
    if (relaxed.size() != cm.columns.rows())
        throw std::invalid_argument("mbi_round: dimension mismatch");
    const double s = cm.amplitude;

    MbiResult res;
    res.fractional = fractional_entries(relaxed, s);
    const Vec base = sign_round(relaxed, s);
    std::bernoulli_distribution coin(0.5);

    double best = std::numeric_limits<double>::infinity();
    const int runs = res.fractional.empty() ? 1 : restarts;
    for (int r = 0; r < runs; ++r)
    {
        Vec x = base;
        if (r > 0)
            for (int m : res.fractional)
                x(m) = coin(rng) ? s : -s;
        const double obj = detail::mbi_descend(x, cm, res.fractional);
        if (obj < best)
        {
            best = obj;
            res.xbar = std::move(x);
        }
        res.best_per_restart.push_back(best);
    }
    res.restarts_run = runs;
    res.objective = best;
    return res;
}

/// Exhaustive search over all 2^{2M} sign patterns (Gray-code order).
inline std::pair<Vec, double> brute_force_onebit(const CoefficientMatrix &cm)
{
    const int n = cm.lifted_size();
    if (n > 24)
        throw std::invalid_argument("brute_force_onebit: 2M > 24 exceeds the enumeration guard");
    const double s = cm.amplitude;
    Vec x = Vec::Constant(n, -s);
    Vec scores = cm.columns.transpose() * x;
    double best = scores.maxCoeff();
    Vec best_x = x;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t i = 1; i < total; ++i)
    {
        const int m = std::countr_zero(i);
        x(m) = -x(m);
        scores += 2.0 * x(m) * cm.columns.row(m).transpose();
        const double v = scores.maxCoeff();
        if (v < best)
        {
            best = v;
            best_x = x;
        }
    }
    return {best_x, worst_objective(best_x, cm)};
}

// ---------------------------------------------------------------------------
// Per-slot pipeline
// ---------------------------------------------------------------------------

/**
 * @brief Mirror descent with mu-continuation.
 *
 * Solves at mu * ratio^stages first (from the uniform point), then at each
 * smaller mu down to the target, warm-starting from the previous solution.
 * Small mu makes f_mu nearly piecewise linear, which a smooth first-order
 * method crosses slowly from a cold start. stages = 0 is plain mirror descent.
 */
inline MirrorDescentResult solve_dual(const CoefficientMatrix &cm, double mu, const MirrorDescentOptions &md,
                                      int stages = 0, double ratio = std::sqrt(10.0))
{
    if (stages < 0 || !(ratio > 1.0))
        throw std::invalid_argument("solve_dual: invalid continuation schedule");
    MirrorDescentResult res = mirror_descent(cm, mu * std::pow(ratio, stages), md);
    int total_iterations = res.iterations;
    int total_polish = res.polish_steps;
    for (int j = stages - 1; j >= 0; --j)
    {
        const Vec warm = (res.lambda.array() + 1e-9).matrix();
        res = mirror_descent(cm, j == 0 ? mu : mu * std::pow(ratio, j), md, &warm);
        total_iterations += res.iterations;
        total_polish += res.polish_steps;
    }
    res.iterations = total_iterations;
    res.polish_steps = total_polish;
    return res;
}

struct PrecoderOptions
{
    double mu = 5e-4;
    MirrorDescentOptions md;
    int continuation_stages = 4;
    double continuation_ratio = std::sqrt(10.0);
    int mbi_restarts = 5;
};

struct RelaxedSolution
{
    Vec xbar;
    MirrorDescentResult md;
    /// -f_mu(lambda*): optimal value of the regularized box relaxation.
    double regularized_value = 0.0;
    /// -s ||C lambda*||_1: weak-duality lower bound for the unregularized box
    /// relaxation, hence for the one-bit problem.
    double lower_bound = 0.0;
};

/// Dual solve and primal recovery, without rounding.
inline RelaxedSolution solve_relaxed(const CoefficientMatrix &cm, const PrecoderOptions &opts)
{
    RelaxedSolution out;
    out.md = solve_dual(cm, opts.mu, opts.md, opts.continuation_stages, opts.continuation_ratio);
    out.xbar = recover_x(out.md.lambda, cm, opts.mu);
    out.regularized_value = -out.md.value;
    out.lower_bound = -cm.amplitude * (cm.columns * out.md.lambda).lpNorm<1>();
    return out;
}

struct SymbolSolution
{
    Vec xbar;
    double objective = 0.0;
    double regularized_value = 0.0;
    double lower_bound = 0.0;
    int fractional = 0;
    int md_iterations = 0;
    SolverStatus status = SolverStatus::converged;
};

/// Coefficient assembly, mirror descent, primal recovery and MBI rounding for one slot.
inline SymbolSolution solve_symbol(const CMat &h_eff, const CVec &symbols, const PskConstellation &c, double power,
                                   const PrecoderOptions &opts, Rng &rng)
{
    const CoefficientMatrix cm = build_coefficients(h_eff, symbols, c, power);
    const RelaxedSolution relaxed = solve_relaxed(cm, opts);
    MbiResult rounded = mbi_round(relaxed.xbar, cm, opts.mbi_restarts, rng);
    SymbolSolution out;
    out.xbar = std::move(rounded.xbar);
    out.objective = rounded.objective;
    out.regularized_value = relaxed.regularized_value;
    out.lower_bound = relaxed.lower_bound;
    out.fractional = static_cast<int>(rounded.fractional.size());
    out.md_iterations = relaxed.md.iterations;
    out.status = relaxed.md.status;
    return out;
}

} // namespace onebit
