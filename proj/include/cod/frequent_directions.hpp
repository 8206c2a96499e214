#pragma once

//
// Frequent directions: deterministic streaming covariance sketch.
// Maintains D (m x ell) with XX^T ~= D D^T. When the buffer fills, the
// spectrum of D is shrunk by the median *squared* singular value and the
// freed columns take fresh samples. Guarantee:
//
//     ||X X^T - D D^T|| <= 2 ||X||_F^2 / ell.
//

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "cod/sketch_types.hpp"

namespace cod {

class FrequentDirectionsSketch {
public:
    FrequentDirectionsSketch(Index ell, Index m) : ell_(ell), m_(m) {
        SketchConfig{ell, m, m}.validate();
        dx_ = Eigen::MatrixXd::Zero(m, ell);
    }

    // Insert one column; shrinks (and reports) when the buffer fills.
    std::optional<ShrinkReport> update(const Eigen::Ref<const Eigen::VectorXd>& x) {
        detail::require_length(x, m_, "column");
        detail::require_finite(x, "column");
        dx_.col(fill_) = x;
        ++fill_;
        ++columns_seen_;
        frob_sq_ += x.squaredNorm();
        if (fill_ == ell_)
            return shrink();
        return std::nullopt;
    }

    // Shrink a full buffer: SVD(D) = U S V^T, delta = s_{ell/2}^2,
    // D <- U sqrt(max(S^2 - delta, 0)). Report spectrum is S^2.
    ShrinkReport shrink() {
        if (fill_ != ell_)
            throw ContractViolation("frequent directions shrink requires a full buffer");

        Eigen::BDCSVD<Eigen::MatrixXd> svd(dx_, Eigen::ComputeThinU);
        Eigen::VectorXd sq = svd.singularValues().array().square();

        ShrinkReport report;
        report.spectrum = sq;
        report.delta = sq(ell_ / 2 - 1);

        Eigen::VectorXd shrunk;
        report.retained = detail::shrink_spectrum(sq, report.delta, shrunk);

        Eigen::MatrixXd u = svd.matrixU();
        detail::fix_signs(u);

        dx_.setZero();
        for (Index j = 0; j < report.retained; ++j)
            dx_.col(j) = u.col(j) * std::sqrt(shrunk(j));
        fill_ = report.retained;
        return report;
    }

    const Eigen::MatrixXd& buffer() const { return dx_; }
    Eigen::MatrixXd covariance_estimate() const { return dx_ * dx_.transpose(); }

    Index ell() const { return ell_; }
    Index dim() const { return m_; }
    Index fill() const { return fill_; }
    std::int64_t columns_seen() const { return columns_seen_; }
    double frob_sq() const { return frob_sq_; }

    // 2 ||X||_F^2 / ell, the covariance error ceiling for the data seen so far.
    double error_bound() const { return 2.0 * frob_sq_ / static_cast<double>(ell_); }

private:
    Index ell_;
    Index m_;
    Eigen::MatrixXd dx_;
    Index fill_ = 0;
    std::int64_t columns_seen_ = 0;
    double frob_sq_ = 0.0;
};

} // namespace cod
