#pragma once

//
// Baseline approximate-matrix-multiplication methods. Each consumes the same
// column-pair stream as the co-occurring directions sketch and produces a
// pair (B_X, B_Y) with X Y^T ~= B_X B_Y^T:
//
//   brute force  -- running correlation C += X_i Y_i^T, ell-thin SVD at the end
//   sampling     -- ell independent weighted reservoirs, p_i ~ ||X_i|| ||Y_i||
//   projection   -- B_X = X Pi, B_Y = Y Pi with Pi_ij in {-1,+1}/sqrt(ell)
//   hashing      -- count-sketch update with shared bucket/sign hashes
//   fd-amm       -- frequent directions on the stacked column [X_i; Y_i]
//
// Randomized baselines are pure functions of (stream, ell, seed): all their
// randomness comes from the counter generator, so nothing is stored and
// replays are bitwise identical.
//

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cod/counter_rng.hpp"
#include "cod/frequent_directions.hpp"
#include "cod/sketch_types.hpp"

namespace cod {

struct AmmSketch {
    Eigen::MatrixXd bx;
    Eigen::MatrixXd by;
};

namespace detail {

inline void validate_ell_positive(Index ell) {
    if (ell < 1)
        throw InvalidConfig(InvalidConfig::Code::EllTooSmall, "ell must be at least 1");
}

inline void validate_dims_positive(Index mx, Index my) {
    if (mx <= 0 || my <= 0)
        throw InvalidConfig(InvalidConfig::Code::NonPositiveDim,
                            "matrix dimensions must be positive");
}

inline void check_pair(const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y, Index mx, Index my) {
    require_length(x, mx, "x column");
    require_length(y, my, "y column");
    require_finite(x, "x column");
    require_finite(y, "y column");
}

} // namespace detail

//
// Brute force: exact correlation, truncated at the end. The resulting error
// is exactly sigma_{ell+1}(X Y^T).
//
class BruteForceAmm {
public:
    BruteForceAmm(Index ell, Index mx, Index my) : ell_(ell), mx_(mx), my_(my) {
        detail::validate_dims_positive(mx, my);
        detail::validate_ell_positive(ell);
        if (ell > std::min(mx, my))
            throw InvalidConfig(InvalidConfig::Code::EllTooLarge, "ell exceeds min(mx,my)");
        c_ = Eigen::MatrixXd::Zero(mx, my);
    }

    void update(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
        detail::check_pair(x, y, mx_, my_);
        c_.noalias() += x * y.transpose();
    }

    AmmSketch result() const {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(c_, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd root =
            svd.singularValues().head(ell_).array().sqrt();
        AmmSketch out;
        out.bx = svd.matrixU().leftCols(ell_) * root.asDiagonal();
        out.by = svd.matrixV().leftCols(ell_) * root.asDiagonal();
        return out;
    }

    const Eigen::MatrixXd& correlation() const { return c_; }

private:
    Index ell_, mx_, my_;
    Eigen::MatrixXd c_;
};

//
// Column sampling with ell independent single-slot weighted reservoirs
// (exponential-key method): reservoir r keeps the column minimizing
// -log(u_{r,i}) / w_i, which selects index i with probability w_i / S.
// Selected columns are rescaled by 1/sqrt(ell * w_i / S) with S the
// end-of-stream weight total, making the estimator unbiased. The raw
// unscaled variant is available for comparison.
//
class SamplingAmm {
public:
    SamplingAmm(Index ell, Index mx, Index my, std::uint64_t seed, bool scale_columns = true)
        : ell_(ell), mx_(mx), my_(my), seed_(seed), scale_columns_(scale_columns) {
        detail::validate_dims_positive(mx, my);
        detail::validate_ell_positive(ell);
        slots_.resize(static_cast<std::size_t>(ell));
    }

    void update(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
        detail::check_pair(x, y, mx_, my_);
        const std::uint64_t i = static_cast<std::uint64_t>(columns_seen_++);
        const double w = x.norm() * y.norm();
        total_weight_ += w;
        if (w <= 0.0)
            return; // zero-weight columns are never sampled (and contribute nothing)
        for (std::size_t r = 0; r < slots_.size(); ++r) {
            const double key =
                -std::log(rng::uniform01(seed_, rng::kSamplingKey, r, i)) / w;
            if (key < slots_[r].key) {
                slots_[r].key = key;
                slots_[r].weight = w;
                slots_[r].x = x;
                slots_[r].y = y;
            }
        }
    }

    AmmSketch result() const {
        AmmSketch out;
        out.bx = Eigen::MatrixXd::Zero(mx_, ell_);
        out.by = Eigen::MatrixXd::Zero(my_, ell_);
        for (Index r = 0; r < ell_; ++r) {
            const Slot& s = slots_[static_cast<std::size_t>(r)];
            if (s.weight <= 0.0)
                continue;
            double scale = 1.0;
            if (scale_columns_) {
                const double p = s.weight / total_weight_;
                scale = 1.0 / std::sqrt(static_cast<double>(ell_) * p);
            }
            out.bx.col(r) = scale * s.x;
            out.by.col(r) = scale * s.y;
        }
        return out;
    }

    // True when every weight was zero; the result is then a zero sketch.
    bool all_zero() const { return total_weight_ <= 0.0; }
    double total_weight() const { return total_weight_; }

private:
    struct Slot {
        double key = std::numeric_limits<double>::infinity();
        double weight = 0.0;
        Eigen::VectorXd x, y;
    };

    Index ell_, mx_, my_;
    std::uint64_t seed_;
    bool scale_columns_;
    std::int64_t columns_seen_ = 0;
    double total_weight_ = 0.0;
    std::vector<Slot> slots_;
};

//
// Random sign projection: row i of Pi is recomputed from (seed, i) on the
// fly, so the projection is never materialized.
//
class ProjectionAmm {
public:
    ProjectionAmm(Index ell, Index mx, Index my, std::uint64_t seed)
        : ell_(ell), mx_(mx), my_(my), seed_(seed) {
        detail::validate_dims_positive(mx, my);
        detail::validate_ell_positive(ell);
        bx_ = Eigen::MatrixXd::Zero(mx, ell);
        by_ = Eigen::MatrixXd::Zero(my, ell);
        inv_root_ell_ = 1.0 / std::sqrt(static_cast<double>(ell));
    }

    void update(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
        detail::check_pair(x, y, mx_, my_);
        const std::uint64_t i = static_cast<std::uint64_t>(columns_seen_++);
        Eigen::RowVectorXd row(ell_);
        for (Index j = 0; j < ell_; ++j)
            row(j) = rng::sign(seed_, rng::kProjectionSign, i, static_cast<std::uint64_t>(j)) *
                     inv_root_ell_;
        bx_.noalias() += x * row;
        by_.noalias() += y * row;
    }

    AmmSketch result() const { return {bx_, by_}; }

private:
    Index ell_, mx_, my_;
    std::uint64_t seed_;
    double inv_root_ell_;
    std::int64_t columns_seen_ = 0;
    Eigen::MatrixXd bx_, by_;
};

//
// Count-sketch hashing with bucket hash h and sign hash s shared between the
// X and Y sides: B_{X,h(i)} += s(i) X_i, B_{Y,h(i)} += s(i) Y_i.
//
class HashingAmm {
public:
    HashingAmm(Index ell, Index mx, Index my, std::uint64_t seed)
        : ell_(ell), mx_(mx), my_(my), seed_(seed) {
        detail::validate_dims_positive(mx, my);
        detail::validate_ell_positive(ell);
        bx_ = Eigen::MatrixXd::Zero(mx, ell);
        by_ = Eigen::MatrixXd::Zero(my, ell);
    }

    void update(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
        detail::check_pair(x, y, mx_, my_);
        const std::uint64_t i = static_cast<std::uint64_t>(columns_seen_++);
        const auto j = static_cast<Index>(
            rng::bucket(seed_, rng::kHashBucket, i, static_cast<std::uint64_t>(ell_)));
        const double s = rng::sign(seed_, rng::kHashSign, i);
        bx_.col(j) += s * x;
        by_.col(j) += s * y;
    }

    AmmSketch result() const { return {bx_, by_}; }

    Index bucket_of(std::uint64_t i) const {
        return static_cast<Index>(
            rng::bucket(seed_, rng::kHashBucket, i, static_cast<std::uint64_t>(ell_)));
    }

private:
    Index ell_, mx_, my_;
    std::uint64_t seed_;
    std::int64_t columns_seen_ = 0;
    Eigen::MatrixXd bx_, by_;
};

//
// FD-AMM: frequent directions on the concatenation Z = [X; Y]; the final
// buffer D_Z = [B_X; B_Y] is split on the row dimension. Unlike the
// correlation sketch, ell may go up to mx + my.
//
class FdAmm {
public:
    FdAmm(Index ell, Index mx, Index my) : mx_(mx), my_(my), fd_(ell, mx + my) {
        detail::validate_dims_positive(mx, my);
    }

    std::optional<ShrinkReport> update(const Eigen::Ref<const Eigen::VectorXd>& x,
                                       const Eigen::Ref<const Eigen::VectorXd>& y) {
        detail::check_pair(x, y, mx_, my_);
        Eigen::VectorXd z(mx_ + my_);
        z.head(mx_) = x;
        z.tail(my_) = y;
        return fd_.update(z);
    }

    AmmSketch result() const {
        AmmSketch out;
        out.bx = fd_.buffer().topRows(mx_);
        out.by = fd_.buffer().bottomRows(my_);
        return out;
    }

    const FrequentDirectionsSketch& inner() const { return fd_; }

    // Eq-(3)-shape ceiling for FD-AMM: (||X||_F^2 + ||Y||_F^2) / ell.
    double error_bound() const { return fd_.frob_sq() / static_cast<double>(fd_.ell()); }

private:
    Index mx_, my_;
    FrequentDirectionsSketch fd_;
};

//
// Method dispatch used by the benchmark harness and CLI.
//
enum class AmmMethod { CoD, FdAmm, Brute, Sampling, Projection, Hashing };

inline const char* to_string(AmmMethod m) {
    switch (m) {
    case AmmMethod::CoD: return "cod";
    case AmmMethod::FdAmm: return "fd-amm";
    case AmmMethod::Brute: return "brute";
    case AmmMethod::Sampling: return "sampling";
    case AmmMethod::Projection: return "projection";
    case AmmMethod::Hashing: return "hashing";
    }
    return "?";
}

inline bool is_randomized(AmmMethod m) {
    return m == AmmMethod::Sampling || m == AmmMethod::Projection || m == AmmMethod::Hashing;
}

} // namespace cod
