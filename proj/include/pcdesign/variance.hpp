#pragma once

// Variance function V(d, ξ) = (f(i)-f(j))^T M(ξ)^{-1} (f(i)-f(j)) of an
// invariant design, which is constant on each depth orbit, and the
// Kiefer-Wolfowitz check V(d, ξ) <= p.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pcdesign/design_space.hpp"
#include "pcdesign/errors.hpp"
#include "pcdesign/info_matrix.hpp"

namespace pcd {

inline constexpr double kDefaultKwTolerance = 1e-6;
inline constexpr double kRouteAgreement = 1e-9;

namespace detail {

inline void require_nonsingular(const DesignConfig& config, const HVector& h) {
    for (int q = 1; q <= kMaxOrder; ++q) {
        if (config.param_dim(q) > 0 && !(h(q) > 0.0)) {
            throw SingularityError(q);
        }
    }
}

inline void require_depth(const DesignConfig& config, int d) {
    if (d < 1 || d > config.S) {
        throw DomainError("comparison depth d must satisfy 1 <= d <= S, got " + std::to_string(d));
    }
}

} // namespace detail

/// sum_q p_q h_q(d) / h_q(ξ), from the blockwise inverse of M(ξ).
inline double variance_by_ratio(const DesignConfig& config, const HVector& h_design, int d) {
    detail::require_depth(config, d);
    detail::require_nonsingular(config, h_design);
    const HVector hd = h_uniform(config, d);
    double V = 0.0;
    for (int q = 1; q <= kMaxOrder; ++q) {
        const auto pq = static_cast<double>(config.param_dim(q));
        if (pq > 0.0) {
            V += pq * hd(q) / h_design(q);
        }
    }
    return V;
}

/// Closed form built from the per-block quadratic forms of the coding:
/// d(v-1)/h_1 + d(v-1)^2 F_2/(4v h_2) + d(v-1)^3 F_3/(24v^2 h_3)
///   + d(v-1)^4 F_4/(192 v^3 h_4), with F_q = interaction_factor(q, S, d, v).
inline double variance_closed_form(const DesignConfig& config, const HVector& h_design, int d) {
    detail::require_depth(config, d);
    detail::require_nonsingular(config, h_design);
    const double v = config.v;
    const double n = v - 1.0;
    const double scale[kMaxOrder] = {1.0, 4.0 * v, 24.0 * v * v, 192.0 * v * v * v};
    double V = 0.0;
    for (int q = 1; q <= kMaxOrder; ++q) {
        if (config.param_dim(q) == 0) {
            continue;
        }
        const double F = static_cast<double>(interaction_factor(q, config.S, d, config.v));
        V += d * std::pow(n, q) * F / (scale[q - 1] * h_design(q));
    }
    return V;
}

/// V(d, ξ) for an invariant design. Both evaluation routes are computed and
/// must agree to 1e-9 relative to p.
inline double variance_at_depth(const InvariantDesign& design, int d) {
    const HVector h = h_mix(design);
    const double closed = variance_closed_form(design.config, h, d);
    const double ratio = variance_by_ratio(design.config, h, d);
    const auto p = static_cast<double>(design.config.param_dim());
    if (std::abs(closed - ratio) > kRouteAgreement * p) {
        throw NumericalError("variance routes disagree at d=" + std::to_string(d) + ": " +
                             std::to_string(closed) + " vs " + std::to_string(ratio));
    }
    return closed;
}

/// V(d, ξ_{d'}) for the uniform design on depth d':
/// (d/d') (p_1 + p_2 F_2(d)/F_2(d') + p_3 F_3(d)/F_3(d') + p_4 F_4(d)/F_4(d')).
inline double variance_uniform(const DesignConfig& config, int d_prime, int d) {
    config.validate();
    detail::require_depth(config, d_prime);
    detail::require_depth(config, d);
    double bracket = 0.0;
    for (int q = 1; q <= kMaxOrder; ++q) {
        const auto pq = static_cast<double>(config.param_dim(q));
        if (pq == 0.0) {
            continue;
        }
        const auto at_prime = interaction_factor(q, config.S, d_prime, config.v);
        if (at_prime <= 0) {
            throw SingularityError(q);
        }
        bracket += pq * static_cast<double>(interaction_factor(q, config.S, d, config.v)) /
                   static_cast<double>(at_prime);
    }
    return static_cast<double>(d) / d_prime * bracket;
}

struct KWReport {
    DesignConfig config;
    InvariantDesign design;
    std::vector<double> variance_by_depth;  ///< V(d, ξ)/p for d = 1..S
    double max_ratio = 0.0;
    bool is_optimal = false;
    double tolerance = kDefaultKwTolerance;

    double ratio_at(int d) const { return variance_by_depth.at(d - 1); }
};

/// Evaluates V(d, ξ)/p on d = 1..S (d = 0 carries no information) and
/// declares ξ D-optimal when the maximum is at most 1 + tolerance.
inline KWReport kw_certificate(const InvariantDesign& design,
                               double tolerance = kDefaultKwTolerance) {
    if (!(tolerance > 0.0)) {
        throw DomainError("KW tolerance must be positive");
    }
    design.validate();
    const DesignConfig& config = design.config;
    detail::require_nonsingular(config, h_mix(design));

    KWReport report{config, design, {}, 0.0, false, tolerance};
    const auto p = static_cast<double>(config.param_dim());
    report.variance_by_depth.reserve(config.S);
    for (int d = 1; d <= config.S; ++d) {
        report.variance_by_depth.push_back(variance_at_depth(design, d) / p);
    }
    report.max_ratio =
        *std::max_element(report.variance_by_depth.begin(), report.variance_by_depth.end());
    report.is_optimal = report.max_ratio <= 1.0 + tolerance;
    return report;
}

/// 3-decimal half-up rounding of a positive ratio, in thousandths.
inline long round_thousandths(double x) {
    return static_cast<long>(std::floor(x * 1000.0 + 0.5));
}

} // namespace pcd
