#pragma once

//
// Synthetic data generators, error metrics, and theoretical-bound
// calculators used by the benchmark harness and the verification battery.
//

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "cod/baselines.hpp"
#include "cod/cooccurring.hpp"
#include "cod/counter_rng.hpp"
#include "cod/sketch_types.hpp"

namespace cod {

// Densifying X Y^T - B_X B_Y^T is allowed up to this many entries; above it
// the error is measured through the implicit difference operator.
inline constexpr Index kDenseEntryCap = 4'000'000;

// Full SVD below this minimum dimension, power iteration above.
inline constexpr Index kSvdDimCap = 512;

namespace detail {

inline Eigen::MatrixXd gaussian_matrix(std::uint64_t seed, std::uint64_t stream, Index rows,
                                       Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = rng::gaussian(seed, stream, static_cast<std::uint64_t>(i),
                                    static_cast<std::uint64_t>(j));
    return m;
}

// Orthonormal columns from a seeded Gaussian matrix, made unique by forcing
// the R diagonal nonnegative.
inline Eigen::MatrixXd orthonormal_columns(std::uint64_t seed, std::uint64_t stream, Index rows,
                                           Index cols) {
    Eigen::MatrixXd g = gaussian_matrix(seed, stream, rows, cols);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
    const auto& r = qr.matrixQR();
    for (Index j = 0; j < cols; ++j)
        if (r(j, j) < 0.0)
            q.col(j) = -q.col(j);
    return q;
}

} // namespace detail

//
// Parameters of the synthetic low-rank model: X = V_x S_x U_x^T with
// (S_x)_jj = 1 - (j-1)/k_x, Gaussian U_x, orthonormal V_x, plus optional
// Gaussian noise N_x / zeta_x (same construction for Y).
//
struct LowRankModelSpec {
    Index n = 0;
    Index mx = 0;
    Index my = 0;
    Index kx = 0;
    Index ky = 0;
    std::optional<double> zeta_x;
    std::optional<double> zeta_y;
    std::uint64_t seed = 0;

    void validate() const {
        if (n <= 0 || mx <= 0 || my <= 0)
            throw InvalidConfig(InvalidConfig::Code::NonPositiveDim,
                                "n, mx, my must be positive");
        if (kx <= 0 || ky <= 0)
            throw InvalidConfig(InvalidConfig::Code::NonPositiveDim,
                                "target ranks must be positive");
        if (kx > std::min(mx, n) || ky > std::min(my, n))
            throw InvalidConfig(InvalidConfig::Code::BadStats,
                                "target rank exceeds min(dim, n)");
        if ((zeta_x && !(*zeta_x > 0.0)) || (zeta_y && !(*zeta_y > 0.0)))
            throw InvalidConfig(InvalidConfig::Code::BadStats,
                                "noise scale divisors must be positive");
    }
};

inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gen_low_rank(const LowRankModelSpec& spec) {
    spec.validate();

    auto factor = [&](Index m, Index k, std::uint64_t u_stream, std::uint64_t v_stream,
                      std::uint64_t n_stream, const std::optional<double>& zeta) {
        Eigen::MatrixXd u = detail::gaussian_matrix(spec.seed, u_stream, spec.n, k);
        Eigen::VectorXd s(k);
        for (Index j = 0; j < k; ++j)
            s(j) = 1.0 - static_cast<double>(j) / static_cast<double>(k);
        Eigen::MatrixXd v = detail::orthonormal_columns(spec.seed, v_stream, m, k);
        Eigen::MatrixXd out = v * (s.asDiagonal() * u.transpose());
        if (zeta)
            out += detail::gaussian_matrix(spec.seed, n_stream, m, spec.n) / *zeta;
        return out;
    };

    return {factor(spec.mx, spec.kx, rng::kGenUx, rng::kGenVx, rng::kGenNoiseX, spec.zeta_x),
            factor(spec.my, spec.ky, rng::kGenUy, rng::kGenVy, rng::kGenNoiseY, spec.zeta_y)};
}

//
// Matrix-free operator for norms of differences too large to densify.
//
struct LinearOperator {
    Index rows = 0;
    Index cols = 0;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;   // v |-> A v
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_t; // u |-> A^T u
};

//
// Largest singular value via power iteration on A^T A. Convergence is
// certified by Aitken extrapolation of the geometric tail: with ratio
// rho estimated from successive increments, the remaining gap is bounded by
// increment * rho / (1 - rho), and iteration stops once that falls under
// rel_tol. Plain successive-difference stopping under-certifies clustered
// spectra and would miss the advertised tolerance there.
//
inline double spectral_norm(const LinearOperator& op, double rel_tol = 1e-9,
                            Index max_iters = 200000) {
    if (op.rows == 0 || op.cols == 0)
        return 0.0;
    Eigen::VectorXd v(op.cols);
    for (Index i = 0; i < op.cols; ++i)
        v(i) = rng::gaussian(0x9d2c5680u, rng::kPowerStart, static_cast<std::uint64_t>(i));
    double vnorm = v.norm();
    if (vnorm == 0.0)
        v.setConstant(1.0), vnorm = v.norm();
    v /= vnorm;

    double sigma_prev2 = 0.0, sigma_prev = 0.0;
    for (Index it = 0; it < max_iters; ++it) {
        Eigen::VectorXd u = op.apply(v);
        const double sigma = u.norm(); // v is unit, so this is sqrt(v^T A^T A v)
        if (sigma == 0.0)
            return 0.0;
        Eigen::VectorXd w = op.apply_t(u);
        const double wnorm = w.norm();
        if (wnorm == 0.0)
            return sigma;
        v = w / wnorm;

        if (it >= 2) {
            const double d1 = sigma - sigma_prev;
            const double d0 = sigma_prev - sigma_prev2;
            if (d1 <= 0.0)
                return sigma; // stalled at the fixed point (or numerically flat)
            if (d0 > 0.0) {
                const double rho = d1 / d0;
                if (rho < 1.0 && d1 * rho / (1.0 - rho) <= rel_tol * sigma)
                    return sigma;
            }
        }
        sigma_prev2 = sigma_prev;
        sigma_prev = sigma;
    }
    throw ConvergenceError("power iteration did not certify the spectral norm within the cap");
}

inline double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    if (m.size() == 0)
        return 0.0;
    if (!m.allFinite())
        throw NonFiniteValue("spectral_norm input contains a non-finite entry");
    if (std::min(m.rows(), m.cols()) <= kSvdDimCap) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
        return svd.singularValues()(0);
    }
    LinearOperator op{m.rows(), m.cols(),
                      [&m](const Eigen::VectorXd& v) { return Eigen::VectorXd(m * v); },
                      [&m](const Eigen::VectorXd& u) {
                          return Eigen::VectorXd(m.transpose() * u);
                      }};
    return spectral_norm(op);
}

inline double nuclear_norm(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    if (m.size() == 0)
        return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues().sum();
}

// ||M||_F^2 / ||M||^2; 0 for the zero matrix.
inline double stable_rank(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    const double spec = spectral_norm(m);
    if (spec == 0.0)
        return 0.0;
    return m.squaredNorm() / (spec * spec);
}

namespace detail {

inline void check_amm_shapes(const Eigen::Ref<const Eigen::MatrixXd>& x,
                             const Eigen::Ref<const Eigen::MatrixXd>& y,
                             const Eigen::Ref<const Eigen::MatrixXd>& bx,
                             const Eigen::Ref<const Eigen::MatrixXd>& by) {
    if (x.cols() != y.cols())
        throw DimensionMismatch("X and Y must have the same number of columns");
    if (bx.cols() != by.cols())
        throw DimensionMismatch("B_X and B_Y must have the same number of columns");
    if (bx.rows() != x.rows() || by.rows() != y.rows())
        throw DimensionMismatch("sketch row dimensions do not match the data");
}

} // namespace detail

// Spectral norm of X Y^T - B_X B_Y^T. Densifies under the entry cap,
// otherwise runs power iteration with the difference applied implicitly,
// v |-> X (Y^T v) - B_X (B_Y^T v).
inline double amm_error(const Eigen::Ref<const Eigen::MatrixXd>& x,
                        const Eigen::Ref<const Eigen::MatrixXd>& y,
                        const Eigen::Ref<const Eigen::MatrixXd>& bx,
                        const Eigen::Ref<const Eigen::MatrixXd>& by) {
    detail::check_amm_shapes(x, y, bx, by);
    if (x.rows() * y.rows() <= kDenseEntryCap)
        return spectral_norm(x * y.transpose() - bx * by.transpose());
    LinearOperator op{x.rows(), y.rows(),
                      [&](const Eigen::VectorXd& v) {
                          return Eigen::VectorXd(x * (y.transpose() * v) -
                                                 bx * (by.transpose() * v));
                      },
                      [&](const Eigen::VectorXd& u) {
                          return Eigen::VectorXd(y * (x.transpose() * u) -
                                                 by * (bx.transpose() * u));
                      }};
    return spectral_norm(op);
}

// Frobenius companion metric (dense only; secondary reporting column).
inline double amm_error_frobenius(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                  const Eigen::Ref<const Eigen::MatrixXd>& y,
                                  const Eigen::Ref<const Eigen::MatrixXd>& bx,
                                  const Eigen::Ref<const Eigen::MatrixXd>& by) {
    detail::check_amm_shapes(x, y, bx, by);
    return (x * y.transpose() - bx * by.transpose()).norm();
}

//
// Error ceilings computed from exact SVDs of X, Y and Z = [X; Y]:
//   thm2_bound        2 ||X||_F ||Y||_F / ell        (correlation sketch)
//   fd_bound          2 ||X||_F^2 / ell              (covariance sketch)
//   fdamm_bound       (||X||_F^2 + ||Y||_F^2) / ell  (FD on the concatenation)
//   improved_fd_bound 2 ||Z - Z_k||_F^2 / (ell - 2k), present only for ell > 2k
//   thm3_threshold    8 sqrt(sr(X) sr(Y)) / eps * ||X|| ||Y|| / sigma_{k+1}(X Y^T)
//
struct BoundsReport {
    Index ell = 0;
    Index k = 0;
    double epsilon = 0.0;
    double thm2_bound = 0.0;
    double fd_bound = 0.0;
    double fdamm_bound = 0.0;
    std::optional<double> improved_fd_bound;
    double thm3_threshold = 0.0;
    double sr_x = 0.0;
    double sr_y = 0.0;
    double sigma_k1 = 0.0;
};

inline BoundsReport theoretical_bounds(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                       const Eigen::Ref<const Eigen::MatrixXd>& y, Index ell,
                                       Index k, double epsilon = 0.5) {
    if (ell < 1)
        throw InvalidConfig(InvalidConfig::Code::EllTooSmall, "ell must be at least 1");
    if (k < 0)
        throw InvalidConfig(InvalidConfig::Code::BadStats, "k must be nonnegative");
    if (x.cols() != y.cols())
        throw DimensionMismatch("X and Y must have the same number of columns");

    BoundsReport rep;
    rep.ell = ell;
    rep.k = k;
    rep.epsilon = epsilon;

    const double fx = x.norm();
    const double fy = y.norm();
    rep.thm2_bound = 2.0 * fx * fy / static_cast<double>(ell);
    rep.fd_bound = 2.0 * fx * fx / static_cast<double>(ell);
    rep.fdamm_bound = (fx * fx + fy * fy) / static_cast<double>(ell);

    Eigen::MatrixXd z(x.rows() + y.rows(), x.cols());
    z.topRows(x.rows()) = x;
    z.bottomRows(y.rows()) = y;
    Eigen::BDCSVD<Eigen::MatrixXd> zsvd(z);
    if (ell > 2 * k) {
        const auto& s = zsvd.singularValues();
        double tail = 0.0;
        for (Index j = k; j < s.size(); ++j)
            tail += s(j) * s(j);
        rep.improved_fd_bound = 2.0 * tail / static_cast<double>(ell - 2 * k);
    }

    rep.sr_x = stable_rank(x);
    rep.sr_y = stable_rank(y);

    Eigen::BDCSVD<Eigen::MatrixXd> psvd(x * y.transpose());
    const auto& ps = psvd.singularValues();
    rep.sigma_k1 = (k < ps.size()) ? ps(k) : 0.0;
    if (rep.sigma_k1 > 0.0 && rep.sr_x > 0.0 && rep.sr_y > 0.0) {
        rep.thm3_threshold = 8.0 * std::sqrt(rep.sr_x * rep.sr_y) / epsilon *
                             (spectral_norm(x) * spectral_norm(y)) / rep.sigma_k1;
    } else {
        rep.thm3_threshold = std::numeric_limits<double>::infinity();
    }
    return rep;
}

// Direct request for the rank-aware FD ceiling; unlike theoretical_bounds
// this rejects ell <= 2k instead of leaving the field empty.
inline double improved_fd_bound(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                const Eigen::Ref<const Eigen::MatrixXd>& y, Index ell, Index k) {
    if (ell <= 2 * k)
        throw InvalidConfig(InvalidConfig::Code::EllTooSmall,
                            "improved FD bound requires ell > 2k");
    return *theoretical_bounds(x, y, ell, k).improved_fd_bound;
}

//
// Rank-k product approximation through the sketch: project X and Y on the
// top-k left/right singular vectors of B_X B_Y^T and compare against the
// optimal rank-k error sigma_{k+1}(X Y^T).
//
struct LowRankApproxReport {
    double error = 0.0;
    double sigma_k1 = 0.0;
    std::optional<double> ratio;
};

inline LowRankApproxReport low_rank_product_approx(
    const Eigen::Ref<const Eigen::MatrixXd>& bx, const Eigen::Ref<const Eigen::MatrixXd>& by,
    const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::MatrixXd>& y,
    Index k) {
    detail::check_amm_shapes(x, y, bx, by);
    if (k < 1)
        throw InvalidConfig(InvalidConfig::Code::BadStats, "k must be at least 1");
    if (k > bx.cols())
        throw InvalidConfig(InvalidConfig::Code::BadStats, "k exceeds the sketch length");

    Eigen::BDCSVD<Eigen::MatrixXd> bsvd(bx * by.transpose(),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXd uk = bsvd.matrixU().leftCols(k);
    const Eigen::MatrixXd vk = bsvd.matrixV().leftCols(k);

    const Eigen::MatrixXd product = x * y.transpose();
    const Eigen::MatrixXd projected = (uk * (uk.transpose() * x)) *
                                      (vk * (vk.transpose() * y)).transpose();

    LowRankApproxReport rep;
    rep.error = spectral_norm(product - projected);
    Eigen::BDCSVD<Eigen::MatrixXd> psvd(product);
    rep.sigma_k1 = (k < psvd.singularValues().size()) ? psvd.singularValues()(k) : 0.0;
    if (rep.sigma_k1 > 0.0)
        rep.ratio = rep.error / rep.sigma_k1;
    return rep;
}

//
// One benchmark cell worth of reporting.
//
struct ErrorReport {
    std::string method;
    Index ell = 0;
    double spectral_error = 0.0;
    double bound_used = 0.0;
    double wall_time_s = 0.0;
    std::optional<std::uint64_t> seed;
    std::optional<double> frobenius_error;
};

//
// Run one AMM method over in-memory matrices, column by column.
//
inline AmmSketch run_amm(AmmMethod method, const Eigen::Ref<const Eigen::MatrixXd>& x,
                         const Eigen::Ref<const Eigen::MatrixXd>& y, Index ell,
                         std::uint64_t seed = 0) {
    if (x.cols() != y.cols())
        throw DimensionMismatch("X and Y must have the same number of columns");
    const Index n = x.cols();
    switch (method) {
    case AmmMethod::CoD: {
        CoOccurringSketch s({ell, x.rows(), y.rows()});
        for (Index i = 0; i < n; ++i)
            s.update(x.col(i), y.col(i));
        return {s.bx(), s.by()};
    }
    case AmmMethod::FdAmm: {
        FdAmm s(ell, x.rows(), y.rows());
        for (Index i = 0; i < n; ++i)
            s.update(x.col(i), y.col(i));
        return s.result();
    }
    case AmmMethod::Brute: {
        BruteForceAmm s(ell, x.rows(), y.rows());
        for (Index i = 0; i < n; ++i)
            s.update(x.col(i), y.col(i));
        return s.result();
    }
    case AmmMethod::Sampling: {
        SamplingAmm s(ell, x.rows(), y.rows(), seed);
        for (Index i = 0; i < n; ++i)
            s.update(x.col(i), y.col(i));
        return s.result();
    }
    case AmmMethod::Projection: {
        ProjectionAmm s(ell, x.rows(), y.rows(), seed);
        for (Index i = 0; i < n; ++i)
            s.update(x.col(i), y.col(i));
        return s.result();
    }
    case AmmMethod::Hashing: {
        HashingAmm s(ell, x.rows(), y.rows(), seed);
        for (Index i = 0; i < n; ++i)
            s.update(x.col(i), y.col(i));
        return s.result();
    }
    }
    throw Error("unknown AMM method");
}

} // namespace cod
