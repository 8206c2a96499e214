#pragma once

//
// How long a sketch is needed for a target accuracy epsilon:
//
//   frobenius:  error <= 2 eps ||X||_F ||Y||_F        at ell = ceil(1/eps)
//   spectral:   error <=   eps ||X|| ||Y||            at ell = ceil(2 sqrt(sr(X) sr(Y)) / eps)
//   lowrank:    rank-k product approximation within (1+eps) of optimal at
//               ell = ceil(8 sqrt(sr(X) sr(Y)) / eps * ||X|| ||Y|| / sigma_{k+1}(X Y^T))
//
// Results are rounded up to the next even integer (and to at least 2).
//

#include <cmath>
#include <optional>

#include "cod/sketch_types.hpp"

namespace cod {

enum class LengthMode { Frobenius, Spectral, LowRank };

struct LengthStats {
    double sr_x = 0.0;
    double sr_y = 0.0;
    double norm_x = 0.0;
    double norm_y = 0.0;
    double sigma_k1 = 0.0;
};

namespace detail {

// ceil with a small backoff so exact reciprocals (1/0.25 = 4) don't round up
// off a one-ulp overshoot.
inline Index even_ceil(double v) {
    const double nudged = v - 1e-9 * std::max(1.0, std::abs(v));
    auto ell = static_cast<Index>(std::ceil(nudged));
    if (ell < 2)
        ell = 2;
    if (ell % 2 != 0)
        ++ell;
    return ell;
}

} // namespace detail

inline Index sketch_length_for(double epsilon, LengthMode mode,
                               const std::optional<LengthStats>& stats = std::nullopt) {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw InvalidConfig(InvalidConfig::Code::BadEpsilon, "epsilon must be in (0, 1]");

    if (mode == LengthMode::Frobenius)
        return detail::even_ceil(1.0 / epsilon);

    if (!stats)
        throw InvalidConfig(InvalidConfig::Code::MissingStats,
                            "spectral/lowrank sketch length needs matrix statistics");
    if (!(stats->sr_x > 0.0) || !(stats->sr_y > 0.0))
        throw InvalidConfig(InvalidConfig::Code::BadStats, "stable ranks must be positive");

    const double root_sr = std::sqrt(stats->sr_x * stats->sr_y);
    if (mode == LengthMode::Spectral)
        return detail::even_ceil(2.0 * root_sr / epsilon);

    if (!(stats->norm_x > 0.0) || !(stats->norm_y > 0.0))
        throw InvalidConfig(InvalidConfig::Code::BadStats, "spectral norms must be positive");
    if (!(stats->sigma_k1 > 0.0))
        throw InvalidConfig(InvalidConfig::Code::BadStats,
                            "sigma_{k+1}(XY^T) must be positive for the lowrank mode");
    return detail::even_ceil(8.0 * root_sr / epsilon * stats->norm_x * stats->norm_y /
                             stats->sigma_k1);
}

} // namespace cod
