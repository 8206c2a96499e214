#pragma once

//
// Self-check battery behind the `verify` CLI command: streams seeded random
// data through every sketch and audits the guarantees that are cheap enough
// to check against a dense oracle at desk scale.
//

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "cod/cooccurring.hpp"
#include "cod/evaluation.hpp"
#include "cod/frequent_directions.hpp"
#include "cod/sketch_length.hpp"

namespace cod::verify {

// Relative slack for asserting the deterministic bounds in floating point.
inline constexpr double kBoundSlack = 1e-9;

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Options {
    int trials = 20;
    std::uint64_t seed_base = 2024;
    std::string only;              // run a single named check; empty = all
    bool inject_delta_fault = false; // test hook: corrupt the delta log before auditing
};

namespace detail {

// Gaussian pair stream with per-column scale variation, so the Frobenius
// masses exercise the Cauchy-Schwarz step non-trivially.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> random_stream(std::uint64_t seed, Index mx,
                                                                 Index my, Index n) {
    Eigen::MatrixXd x = cod::detail::gaussian_matrix(rng::derive(seed, 101), rng::kTestStream,
                                                     mx, n);
    Eigen::MatrixXd y = cod::detail::gaussian_matrix(rng::derive(seed, 102), rng::kTestStream,
                                                     my, n);
    for (Index i = 0; i < n; ++i) {
        const double u = rng::uniform01(seed, rng::kTestStream, static_cast<std::uint64_t>(i),
                                        0xC0FFEE);
        const double scale = std::exp(2.0 * (u - 0.5));
        x.col(i) *= scale;
        y.col(i) *= scale * (i % 3 == 0 ? 0.25 : 1.0);
    }
    return {std::move(x), std::move(y)};
}

struct StreamShape {
    Index mx, my, n, ell;
};

inline StreamShape shape_for(std::uint64_t seed, int trial) {
    const std::uint64_t h = rng::mix(seed, rng::kTestStream, 0xD1CE, static_cast<std::uint64_t>(trial));
    StreamShape s;
    s.mx = 6 + static_cast<Index>(h % 45);          // 6..50
    s.my = 6 + static_cast<Index>((h >> 16) % 45);  // 6..50
    s.n = 20 + static_cast<Index>((h >> 32) % 481); // 20..500
    const Index ells[4] = {2, 4, 8, 16};
    s.ell = ells[trial % 4];
    while (s.ell > std::min(s.mx, s.my))
        s.ell /= 2;
    return s;
}

inline CoOccurringSketch sketch_columns(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                        Index ell) {
    CoOccurringSketch s({ell, x.rows(), y.rows()});
    for (Index i = 0; i < x.cols(); ++i)
        s.update(x.col(i), y.col(i));
    return s;
}

} // namespace detail

//
// Correlation sketch error stays under 2 ||X||_F ||Y||_F / ell.
//
inline CheckResult check_thm2(const Options& opt) {
    int ok = 0;
    double worst = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
        const auto shape = detail::shape_for(opt.seed_base, t);
        auto [x, y] = detail::random_stream(rng::derive(opt.seed_base, 1, t), shape.mx, shape.my,
                                            shape.n);
        auto sketch = detail::sketch_columns(x, y, shape.ell);
        const double err = amm_error(x, y, sketch.bx(), sketch.by());
        const double bound = sketch.error_bound();
        const double rel = bound > 0.0 ? err / bound : 0.0;
        worst = std::max(worst, rel);
        if (err <= bound * (1.0 + kBoundSlack))
            ++ok;
    }
    std::ostringstream out;
    out << ok << "/" << opt.trials << " streams within 2*||X||_F*||Y||_F/ell"
        << " (worst error/bound " << worst << ")";
    return {"thm2", ok == opt.trials, out.str()};
}

//
// Online certificate: error <= sum(delta_i) <= bound at every prefix.
// The fault-injection hook zeroes the recorded deltas, which any positive
// true error must then expose.
//
inline CheckResult check_delta_audit(const Options& opt) {
    const int trials = std::max(1, opt.trials / 4);
    int ok = 0;
    for (int t = 0; t < trials; ++t) {
        const Index mx = 10, my = 14, n = 80, ell = 4;
        auto [x, y] = detail::random_stream(rng::derive(opt.seed_base, 2, t), mx, my, n);
        CoOccurringSketch sketch({ell, mx, my});
        bool stream_ok = true;
        for (Index i = 0; i < n; ++i) {
            sketch.update(x.col(i), y.col(i));
            const Index seen = i + 1;
            double delta_sum = sketch.delta_sum();
            if (opt.inject_delta_fault)
                delta_sum = 0.0;
            const double err = amm_error(x.leftCols(seen), y.leftCols(seen), sketch.bx(),
                                         sketch.by());
            const double budget = sketch.error_bound();
            const double tol = kBoundSlack * std::max(1.0, budget);
            if (err > delta_sum + tol || delta_sum > budget + tol) {
                stream_ok = false;
                break;
            }
        }
        if (stream_ok)
            ++ok;
    }
    std::ostringstream out;
    out << ok << "/" << trials << " streams pass err <= sum(delta) <= bound at every prefix";
    if (opt.inject_delta_fault)
        out << " [delta fault injected]";
    return {"delta-audit", ok == trials, out.str()};
}

//
// Frequent directions covariance error stays under 2 ||X||_F^2 / ell.
//
inline CheckResult check_fd_bound(const Options& opt) {
    int ok = 0;
    for (int t = 0; t < opt.trials; ++t) {
        const auto shape = detail::shape_for(opt.seed_base, t);
        auto [x, y] = detail::random_stream(rng::derive(opt.seed_base, 3, t), shape.mx, shape.mx,
                                            shape.n);
        FrequentDirectionsSketch fd(shape.ell, shape.mx);
        for (Index i = 0; i < shape.n; ++i)
            fd.update(x.col(i));
        const double err = spectral_norm(x * x.transpose() - fd.covariance_estimate());
        if (err <= fd.error_bound() * (1.0 + kBoundSlack))
            ++ok;
    }
    std::ostringstream out;
    out << ok << "/" << opt.trials << " streams within 2*||X||_F^2/ell";
    return {"fd-bound", ok == opt.trials, out.str()};
}

//
// On an X = Y stream the correlation sketch reproduces the frequent
// directions covariance estimate.
//
inline CheckResult check_fd_reduction(const Options& opt) {
    const int trials = std::max(1, opt.trials / 2);
    int ok = 0;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Index m = 12 + static_cast<Index>(t % 7), n = 90, ell = 6;
        auto [x, unused] = detail::random_stream(rng::derive(opt.seed_base, 4, t), m, m, n);
        auto sketch = detail::sketch_columns(x, x, ell);
        FrequentDirectionsSketch fd(ell, m);
        for (Index i = 0; i < n; ++i)
            fd.update(x.col(i));
        const Eigen::MatrixXd lhs = sketch.product_estimate();
        const Eigen::MatrixXd rhs = fd.covariance_estimate();
        const double rel = (lhs - rhs).norm() / rhs.norm();
        worst = std::max(worst, rel);
        if (rel <= 1e-9)
            ++ok;
    }
    std::ostringstream out;
    out << ok << "/" << trials << " X=Y streams match frequent directions (worst rel " << worst
        << ")";
    return {"fd-reduction", ok == trials, out.str()};
}

//
// Chunked sketch-then-merge satisfies the same ceiling as a single pass,
// in either chunk order.
//
inline CheckResult check_merge(const Options& opt) {
    const int trials = std::max(1, opt.trials / 2);
    int ok = 0;
    for (int t = 0; t < trials; ++t) {
        const Index mx = 8, my = 10, n = 40, ell = 4;
        auto [x, y] = detail::random_stream(rng::derive(opt.seed_base, 5, t), mx, my, n);
        auto a = detail::sketch_columns(x.leftCols(n / 2), y.leftCols(n / 2), ell);
        auto b = detail::sketch_columns(x.rightCols(n - n / 2), y.rightCols(n - n / 2), ell);
        const auto ab = CoOccurringSketch::merge(a, b);
        const auto ba = CoOccurringSketch::merge(b, a);
        bool good = true;
        for (const auto* m : {&ab, &ba}) {
            const double err = amm_error(x, y, m->bx(), m->by());
            const double tol = kBoundSlack * std::max(1.0, m->error_bound());
            if (err > m->error_bound() * (1.0 + kBoundSlack) ||
                err > m->delta_sum() + tol ||
                m->delta_sum() > m->error_bound() + tol)
                good = false;
        }
        if (good)
            ++ok;
    }
    std::ostringstream out;
    out << ok << "/" << trials << " chunked merges within the single-pass ceiling (both orders)";
    return {"merge", ok == trials, out.str()};
}

//
// Monte-Carlo means of the randomized estimators agree with X Y^T entrywise
// within 3 standard errors.
//
inline CheckResult check_unbiasedness(const Options& opt) {
    const int seeds = std::max(100, opt.trials);
    const Index mx = 5, my = 6, n = 20, ell = 4;
    auto [x, y] = detail::random_stream(rng::derive(opt.seed_base, 6), mx, my, n);
    const Eigen::MatrixXd exact = x * y.transpose();

    std::ostringstream out;
    bool all_ok = true;
    for (AmmMethod method : {AmmMethod::Sampling, AmmMethod::Projection, AmmMethod::Hashing}) {
        Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(mx, my);
        Eigen::MatrixXd msq = Eigen::MatrixXd::Zero(mx, my);
        for (int s = 0; s < seeds; ++s) {
            const auto sk = run_amm(method, x, y, ell, rng::derive(opt.seed_base, 7, s));
            const Eigen::MatrixXd est = sk.bx * sk.by.transpose();
            mean += est;
            msq += est.cwiseProduct(est);
        }
        mean /= seeds;
        msq /= seeds;
        Index within = 0;
        for (Index i = 0; i < mx; ++i)
            for (Index j = 0; j < my; ++j) {
                const double var = std::max(0.0, msq(i, j) - mean(i, j) * mean(i, j));
                const double se = std::sqrt(var / seeds);
                if (std::abs(mean(i, j) - exact(i, j)) <= 3.0 * se + 1e-12)
                    ++within;
            }
        const double frac = static_cast<double>(within) / static_cast<double>(mx * my);
        if (frac < 0.99)
            all_ok = false;
        out << to_string(method) << " " << within << "/" << mx * my << " entries; ";
    }
    return {"unbiasedness", all_ok, out.str() + std::to_string(seeds) + " seeds"};
}

//
// Rank-k product approximation: whenever the required sketch length fits the
// dimensions, the projected product is within (1+eps) of optimal.
//
inline CheckResult check_thm3(const Options& opt) {
    const double eps = 0.5;
    int ran = 0, skipped = 0, ok = 0;

    struct Instance {
        Index mx, my, n, kx, ky, k;
        bool aligned;
    };
    // Aligned X = Y instances keep sigma_{k+1}(XY^T) comparable to
    // ||X|| ||Y||, so the length premise is actually attainable; generic
    // pairs need sketches longer than min(mx,my) and exercise the skip path.
    const Instance instances[] = {
        {120, 120, 150, 2, 2, 1, true},  {120, 120, 160, 2, 2, 1, true},
        {130, 130, 150, 2, 2, 1, true},  {40, 50, 60, 3, 3, 1, false},
        {40, 50, 60, 5, 4, 2, false},    {50, 40, 70, 6, 6, 4, false},
    };
    for (int t = 0; t < static_cast<int>(std::size(instances)); ++t) {
        const auto& inst = instances[t];
        LowRankModelSpec spec;
        spec.n = inst.n;
        spec.mx = inst.mx;
        spec.my = inst.aligned ? inst.mx : inst.my;
        spec.kx = inst.kx;
        spec.ky = inst.aligned ? inst.kx : inst.ky;
        spec.seed = rng::derive(opt.seed_base, 8, static_cast<std::uint64_t>(t));
        auto [x, y0] = gen_low_rank(spec);
        Eigen::MatrixXd y = inst.aligned ? x : y0;

        const auto bounds = theoretical_bounds(x, y, 2, inst.k, eps);
        const double threshold = bounds.thm3_threshold;
        const Index cap = std::min(x.rows(), y.rows());
        if (!(threshold <= static_cast<double>(cap))) {
            ++skipped;
            continue;
        }
        const Index ell = cod::detail::even_ceil(std::max(threshold, 2.0));
        auto sketch = detail::sketch_columns(x, y, std::min(ell, cap));
        const auto rep = low_rank_product_approx(sketch.bx(), sketch.by(), x, y, inst.k);
        ++ran;
        if (rep.ratio && *rep.ratio <= 1.0 + eps)
            ++ok;
    }
    std::ostringstream out;
    out << ok << "/" << ran << " premise-satisfying instances within (1+eps), " << skipped
        << " skipped (premise needs ell > min(mx,my))";
    return {"thm3", ran > 0 && ok == ran, out.str()};
}

inline std::vector<CheckResult> run_battery(const Options& opt) {
    std::vector<CheckResult> results;
    auto want = [&](const char* name) { return opt.only.empty() || opt.only == name; };
    if (want("thm2"))
        results.push_back(check_thm2(opt));
    if (want("delta-audit"))
        results.push_back(check_delta_audit(opt));
    if (want("fd-bound"))
        results.push_back(check_fd_bound(opt));
    if (want("fd-reduction"))
        results.push_back(check_fd_reduction(opt));
    if (want("merge"))
        results.push_back(check_merge(opt));
    if (want("unbiasedness"))
        results.push_back(check_unbiasedness(opt));
    if (want("thm3"))
        results.push_back(check_thm3(opt));
    return results;
}

inline bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass)
            return false;
    return !results.empty();
}

} // namespace cod::verify
