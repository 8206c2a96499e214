#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "cod/errors.hpp"

namespace cod {

using Eigen::Index;

// Relative threshold below which a shrunk spectrum entry is flattened to an
// exact zero (and its buffer columns with it). The bound accounting assumes
// true zeros; floating-point dust would break the fill invariant.
inline constexpr double kSpectrumFloor = 1e-12;

//
// Parameters of a correlation sketch: sketch length ell and the two row
// dimensions. ell must be even and 2 <= ell <= min(mx, my).
//
struct SketchConfig {
    Index ell = 0;
    Index mx = 0;
    Index my = 0;

    void validate() const {
        if (mx <= 0 || my <= 0)
            throw InvalidConfig(InvalidConfig::Code::NonPositiveDim,
                                "matrix dimensions must be positive");
        if (ell < 2)
            throw InvalidConfig(InvalidConfig::Code::EllTooSmall, "ell must be at least 2");
        if (ell % 2 != 0)
            throw InvalidConfig(InvalidConfig::Code::OddEll, "ell must be even");
        if (ell > std::min(mx, my))
            throw InvalidConfig(InvalidConfig::Code::EllTooLarge, "ell exceeds min(mx,my)");
    }

    bool operator==(const SketchConfig&) const = default;
};

// One stream element: the paired columns (X_i, Y_i).
struct ColumnPair {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
};

//
// What one shrink did. `spectrum` is the full descending spectrum the shrink
// operated on: the singular values of R_x R_y^T for a correlation sketch, the
// squared singular values of the buffer for frequent directions. In both
// cases delta == spectrum[ell/2 - 1] (the median of an even-length spectrum)
// and the post-shrink spectrum is recoverable as max(spectrum - delta, 0).
//
struct ShrinkReport {
    double delta = 0.0;
    Eigen::VectorXd spectrum;
    Index retained = 0;
};

namespace detail {

inline void require_finite(const Eigen::Ref<const Eigen::VectorXd>& v, const char* what) {
    if (!v.allFinite())
        throw NonFiniteValue(std::string(what) + " contains a non-finite entry");
}

inline void require_length(const Eigen::Ref<const Eigen::VectorXd>& v, Index expect,
                           const char* what) {
    if (v.size() != expect)
        throw DimensionMismatch(std::string(what) + " has length " + std::to_string(v.size()) +
                                ", expected " + std::to_string(expect));
}

// Entrywise max(spectrum - delta, 0) with exact-zero flooring; returns the
// count of strictly positive survivors. Input must be sorted descending, so
// survivors occupy a prefix.
inline Index shrink_spectrum(const Eigen::VectorXd& spectrum, double delta,
                             Eigen::VectorXd& shrunk) {
    shrunk = (spectrum.array() - delta).max(0.0);
    const double floor = kSpectrumFloor * (shrunk.size() > 0 ? shrunk(0) : 0.0);
    Index retained = 0;
    for (Index j = 0; j < shrunk.size(); ++j) {
        if (shrunk(j) <= floor)
            shrunk(j) = 0.0;
        else
            ++retained;
    }
    return retained;
}

// Deterministic SVD sign convention: make the largest-magnitude entry of each
// column of `left` nonnegative, flipping the paired `right` column to keep
// the product unchanged.
inline void fix_signs(Eigen::MatrixXd& left, Eigen::MatrixXd& right) {
    for (Index j = 0; j < left.cols(); ++j) {
        Index at = 0;
        left.col(j).cwiseAbs().maxCoeff(&at);
        if (left(at, j) < 0.0) {
            left.col(j) = -left.col(j);
            right.col(j) = -right.col(j);
        }
    }
}

inline void fix_signs(Eigen::MatrixXd& left) {
    for (Index j = 0; j < left.cols(); ++j) {
        Index at = 0;
        left.col(j).cwiseAbs().maxCoeff(&at);
        if (left(at, j) < 0.0)
            left.col(j) = -left.col(j);
    }
}

// Thin (economy) QR: A = Q R with Q (m x k), R (k x k) upper triangular,
// k = A.cols(). Rank deficiency is fine; only R products are consumed.
inline void thin_qr(const Eigen::MatrixXd& a, Eigen::MatrixXd& q, Eigen::MatrixXd& r) {
    const Index k = a.cols();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), k);
    r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

} // namespace detail
} // namespace cod
