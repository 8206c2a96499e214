#pragma once

//
// Co-occurring directions: deterministic streaming correlation sketch.
//
// Maintains paired buffers (B_X, B_Y) with X Y^T ~= B_X B_Y^T. When both
// buffers fill, the cross spectrum is exposed through thin QR of each buffer
// and an SVD of the small R_x R_y^T, then shrunk by its median singular
// value, freeing at least ell/2 columns. Each shrink's delta is logged; the
// running sum certifies the error online:
//
//     ||X Y^T - B_X B_Y^T|| <= sum(delta_i) <= 2 ||X||_F ||Y||_F / ell.
//

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "cod/sketch_types.hpp"

namespace cod {

class CoOccurringSketch {
public:
    explicit CoOccurringSketch(SketchConfig config) : config_(config) {
        config_.validate();
        bx_ = Eigen::MatrixXd::Zero(config_.mx, config_.ell);
        by_ = Eigen::MatrixXd::Zero(config_.my, config_.ell);
    }

    // Insert one column pair; shrinks (and reports) when the buffers fill.
    std::optional<ShrinkReport> update(const Eigen::Ref<const Eigen::VectorXd>& x,
                                       const Eigen::Ref<const Eigen::VectorXd>& y) {
        detail::require_length(x, config_.mx, "x column");
        detail::require_length(y, config_.my, "y column");
        detail::require_finite(x, "x column");
        detail::require_finite(y, "y column");
        bx_.col(fill_) = x;
        by_.col(fill_) = y;
        ++fill_;
        ++columns_seen_;
        frob_x_sq_ += x.squaredNorm();
        frob_y_sq_ += y.squaredNorm();
        if (fill_ == config_.ell)
            return shrink();
        return std::nullopt;
    }

    std::optional<ShrinkReport> update(const ColumnPair& pair) { return update(pair.x, pair.y); }

    //
    // Shrink a full buffer pair:
    //   [Q_x, R_x] = QR(B_X), [Q_y, R_y] = QR(B_Y)
    //   [U, S, V]  = SVD(R_x R_y^T)
    //   delta      = s_{ell/2}
    //   B_X <- Q_x U sqrt(max(S - delta, 0)),  B_Y <- Q_y V sqrt(...)
    // Surviving columns come out in descending-spectrum order, so the zero
    // columns are the trailing ones and fill drops to the retained count.
    //
    ShrinkReport shrink() {
        if (fill_ != config_.ell)
            throw ContractViolation("co-occurring directions shrink requires a full buffer");
        const Index ell = config_.ell;

        Eigen::MatrixXd qx, rx, qy, ry;
        detail::thin_qr(bx_, qx, rx);
        detail::thin_qr(by_, qy, ry);

        Eigen::BDCSVD<Eigen::MatrixXd> svd(rx * ry.transpose(),
                                           Eigen::ComputeFullU | Eigen::ComputeFullV);

        ShrinkReport report;
        report.spectrum = svd.singularValues();
        report.delta = report.spectrum(ell / 2 - 1);

        Eigen::VectorXd shrunk;
        report.retained = detail::shrink_spectrum(report.spectrum, report.delta, shrunk);

        Eigen::MatrixXd wx = qx * svd.matrixU();
        Eigen::MatrixXd wy = qy * svd.matrixV();
        detail::fix_signs(wx, wy);

        bx_.setZero();
        by_.setZero();
        for (Index j = 0; j < report.retained; ++j) {
            const double scale = std::sqrt(shrunk(j));
            bx_.col(j) = wx.col(j) * scale;
            by_.col(j) = wy.col(j) * scale;
        }
        fill_ = report.retained;
        delta_log_.push_back(report.delta);
        return report;
    }

    // Current buffers, as-is. No final shrink is applied at end of stream, so
    // for n < ell the product B_X B_Y^T is exact.
    std::pair<const Eigen::MatrixXd&, const Eigen::MatrixXd&> result() const {
        return {bx_, by_};
    }
    const Eigen::MatrixXd& bx() const { return bx_; }
    const Eigen::MatrixXd& by() const { return by_; }

    // Dense B_X B_Y^T; desk scale only.
    Eigen::MatrixXd product_estimate() const { return bx_ * by_.transpose(); }

    const SketchConfig& config() const { return config_; }
    Index fill() const { return fill_; }
    std::int64_t columns_seen() const { return columns_seen_; }
    double frob_x_sq() const { return frob_x_sq_; }
    double frob_y_sq() const { return frob_y_sq_; }
    const std::vector<double>& delta_log() const { return delta_log_; }

    double delta_sum() const {
        double s = 0.0;
        for (double d : delta_log_) s += d;
        return s;
    }

    // The proof-chain ceiling 2 ||X||_F ||Y||_F / ell for the data seen so
    // far; both delta_sum() and the true error stay below it.
    double error_bound() const {
        return 2.0 * std::sqrt(frob_x_sq_) * std::sqrt(frob_y_sq_) /
               static_cast<double>(config_.ell);
    }

    //
    // Sketches of sketches: stream every occupied column pair of `a`, then of
    // `b`, into a fresh sketch. Accumulators are carried over from the inputs
    // so the delta audit keeps referring to the original data, and the
    // result's delta log is a's, then b's, then the merge pass's own --
    // the full chain still dominates the error against the combined stream.
    //
    static CoOccurringSketch merge(const CoOccurringSketch& a, const CoOccurringSketch& b) {
        if (a.config_ != b.config_)
            throw InvalidConfig(InvalidConfig::Code::ConfigMismatch,
                                "cannot merge sketches with different configs");
        CoOccurringSketch out(a.config_);
        for (Index j = 0; j < a.fill_; ++j)
            out.update(a.bx_.col(j), a.by_.col(j));
        for (Index j = 0; j < b.fill_; ++j)
            out.update(b.bx_.col(j), b.by_.col(j));

        std::vector<double> deltas = a.delta_log_;
        deltas.insert(deltas.end(), b.delta_log_.begin(), b.delta_log_.end());
        deltas.insert(deltas.end(), out.delta_log_.begin(), out.delta_log_.end());
        out.delta_log_ = std::move(deltas);
        out.columns_seen_ = a.columns_seen_ + b.columns_seen_;
        out.frob_x_sq_ = a.frob_x_sq_ + b.frob_x_sq_;
        out.frob_y_sq_ = a.frob_y_sq_ + b.frob_y_sq_;
        return out;
    }

    // Rebuild a sketch from persisted state. Trailing columns past `fill`
    // must be zero; occupied columns are taken verbatim.
    static CoOccurringSketch restore(SketchConfig config, Eigen::MatrixXd bx, Eigen::MatrixXd by,
                                     Index fill, std::int64_t columns_seen, double frob_x_sq,
                                     double frob_y_sq, std::vector<double> delta_log) {
        CoOccurringSketch out(config);
        if (bx.rows() != config.mx || bx.cols() != config.ell || by.rows() != config.my ||
            by.cols() != config.ell)
            throw DimensionMismatch("snapshot buffers do not match config");
        if (fill < 0 || fill > config.ell)
            throw ContractViolation("snapshot fill out of range");
        out.bx_ = std::move(bx);
        out.by_ = std::move(by);
        out.fill_ = fill;
        out.columns_seen_ = columns_seen;
        out.frob_x_sq_ = frob_x_sq;
        out.frob_y_sq_ = frob_y_sq;
        out.delta_log_ = std::move(delta_log);
        return out;
    }

private:
    SketchConfig config_;
    Eigen::MatrixXd bx_;
    Eigen::MatrixXd by_;
    Index fill_ = 0;
    std::int64_t columns_seen_ = 0;
    std::vector<double> delta_log_;
    double frob_x_sq_ = 0.0;
    double frob_y_sq_ = 0.0;
};

} // namespace cod
