#pragma once

// Information coefficients h_q of invariant designs and the block-diagonal
// information matrix diag(h_q I_{C(K,q)} ⊗ M^{⊗q}). The dense brute-force
// accumulation over enumerated orbits is kept alongside as the oracle.

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pcdesign/design_space.hpp"
#include "pcdesign/effects_coding.hpp"
#include "pcdesign/errors.hpp"

namespace pcd {

/// Integer factor of h_q(d) counting how depth-d pairs spread over an
/// order-q block: 1 for q=1; (d-1)(v-2)+2(S-d)(v-1) for q=2; the cubic and
/// quartic level/attribute counts for q=3 and q=4.
inline std::int64_t interaction_factor(int q, int S, int d, int v) {
    const std::int64_t s = S - d;  // shown but equal
    const std::int64_t a = d;
    const std::int64_t w = v;
    switch (q) {
    case 1:
        return 1;
    case 2:
        return (a - 1) * (w - 2) + 2 * s * (w - 1);
    case 3:
        return (a - 1) * (a - 2) * (w * w - 3 * w + 3) + 3 * s * (a - 1) * (w - 1) * (w - 2) +
               3 * s * (s - 1) * (w - 1) * (w - 1);
    case 4:
        return (a - 1) * (a - 2) * (a - 3) * (w * w * w - 4 * w * w + 6 * w - 4) +
               4 * s * (a - 1) * (a - 2) * (w * w - 3 * w + 3) * (w - 1) +
               6 * s * (s - 1) * (a - 1) * (w - 1) * (w - 1) * (w - 2) +
               4 * s * (s - 1) * (s - 2) * (w - 1) * (w - 1) * (w - 1);
    default:
        throw DomainError("interaction order must be in 1..4, got " + std::to_string(q));
    }
}

struct HVector {
    std::array<double, kMaxOrder> h{};

    /// Coefficient of order q in 1..4.
    double operator()(int q) const { return h.at(q - 1); }
    double& operator()(int q) { return h.at(q - 1); }
};

/// Convex combination of depth-uniform designs; weights[d-1] is w_d.
struct InvariantDesign {
    DesignConfig config;
    std::vector<double> weights;

    static constexpr double kSumTolerance = 1e-12;

    void validate() const {
        config.validate();
        if (static_cast<int>(weights.size()) != config.S) {
            throw DomainError("design needs S=" + std::to_string(config.S) + " depth weights, got " +
                              std::to_string(weights.size()));
        }
        double sum = 0.0;
        for (double w : weights) {
            if (!std::isfinite(w) || w < 0.0) {
                throw DomainError("depth weights must be finite and nonnegative");
            }
            sum += w;
        }
        if (std::abs(sum - 1.0) > kSumTolerance) {
            throw DomainError("depth weights must sum to 1, got " + std::to_string(sum));
        }
    }

    double weight(int d) const { return weights.at(d - 1); }

    std::vector<int> support() const {
        std::vector<int> out;
        for (int d = 1; d <= static_cast<int>(weights.size()); ++d) {
            if (weights[d - 1] > 0.0) {
                out.push_back(d);
            }
        }
        return out;
    }

    static InvariantDesign point_mass(const DesignConfig& config, int d) {
        config.validate();
        if (d < 1 || d > config.S) {
            throw DomainError("comparison depth d must satisfy 1 <= d <= S, got " +
                              std::to_string(d));
        }
        InvariantDesign design{config, std::vector<double>(config.S, 0.0)};
        design.weights[d - 1] = 1.0;
        return design;
    }

    /// Scales nonnegative raw weights to sum to one.
    static InvariantDesign normalized(const DesignConfig& config, std::vector<double> raw) {
        config.validate();
        if (static_cast<int>(raw.size()) != config.S) {
            throw DomainError("design needs S=" + std::to_string(config.S) + " depth weights, got " +
                              std::to_string(raw.size()));
        }
        double sum = 0.0;
        for (double w : raw) {
            if (!std::isfinite(w) || w < 0.0) {
                throw DomainError("depth weights must be finite and nonnegative");
            }
            sum += w;
        }
        if (sum <= 0.0) {
            throw DomainError("depth weights are all zero");
        }
        for (double& w : raw) {
            w /= sum;
        }
        InvariantDesign design{config, std::move(raw)};
        design.validate();
        return design;
    }

    /// w_d proportional to N_d: uniform over every pair with d >= 1.
    static InvariantDesign all_comparisons(const DesignConfig& config) {
        std::vector<double> raw(config.S);
        for (int d = 1; d <= config.S; ++d) {
            raw[d - 1] = orbit_size_real(config, d);
        }
        return normalized(config, std::move(raw));
    }
};

/// h_q(d) of the uniform design on the depth-d orbit. Orders with K < q
/// have no parameters and report 0.
inline HVector h_uniform(const DesignConfig& config, int d) {
    config.validate();
    if (d < 1 || d > config.S) {
        throw DomainError("comparison depth d must satisfy 1 <= d <= S, got " + std::to_string(d));
    }
    HVector out;
    const int K = config.K;
    const double v = config.v;
    double denom = 1.0;  // 2^(q-1) v^(q-1) K (K-1) ... (K-q+1)
    for (int q = 1; q <= kMaxOrder; ++q) {
        denom *= (K - q + 1);
        if (q > 1) {
            denom *= 2.0 * v;
        }
        if (K < q) {
            out(q) = 0.0;
            continue;
        }
        const auto factor = d * interaction_factor(q, config.S, d, config.v);
        out(q) = static_cast<double>(factor) / denom;
    }
    return out;
}

inline HVector h_mix(const InvariantDesign& design) {
    design.validate();
    HVector out;
    for (int d = 1; d <= design.config.S; ++d) {
        const double w = design.weight(d);
        if (w == 0.0) {
            continue;
        }
        const HVector hd = h_uniform(design.config, d);
        for (int q = 1; q <= kMaxOrder; ++q) {
            out(q) += w * hd(q);
        }
    }
    return out;
}

/// Block-diagonal information matrix: C(K,q) copies of h_q M^{⊗q} per order.
/// Dense blocks are only formed on request.
struct BlockInfo {
    DesignConfig config;
    HVector h;
    OneWayInfo oneway;

    std::uint64_t block_multiplicity(int q) const { return config.block_count(q); }

    Matrix block_template(int q) const { return kron_power(oneway.M, q); }

    std::uint64_t dense_dim() const { return config.param_dim(); }

    /// log det M^{⊗q} = q (v-1)^(q-1) log det M.
    double template_log_det(int q) const {
        return q * std::pow(config.v - 1, q - 1) * oneway.log_det();
    }

    bool singular() const {
        for (int q = 1; q <= kMaxOrder; ++q) {
            if (config.param_dim(q) > 0 && !(h(q) > 0.0)) {
                return true;
            }
        }
        return false;
    }

    /// Dense p x p expansion; oracle scale only.
    Matrix to_dense() const {
        const auto p = static_cast<Eigen::Index>(dense_dim());
        Matrix dense = Matrix::Zero(p, p);
        Eigen::Index off = 0;
        for (int q = 1; q <= kMaxOrder; ++q) {
            const std::uint64_t copies = block_multiplicity(q);
            if (copies == 0) {
                continue;
            }
            const Matrix blk = h(q) * block_template(q);
            for (std::uint64_t c = 0; c < copies; ++c) {
                dense.block(off, off, blk.rows(), blk.cols()) = blk;
                off += blk.rows();
            }
        }
        return dense;
    }
};

inline BlockInfo block_info(const InvariantDesign& design) {
    return BlockInfo{design.config, h_mix(design), oneway_info(design.config.v)};
}

/// D-criterion part that depends on the design: sum_q p_q log h_q.
/// Throws SingularityError for the first order with h_q = 0.
inline double design_objective(const DesignConfig& config, const HVector& h) {
    double g = 0.0;
    for (int q = 1; q <= kMaxOrder; ++q) {
        const auto pq = static_cast<double>(config.param_dim(q));
        if (pq == 0.0) {
            continue;
        }
        if (!(h(q) > 0.0)) {
            throw SingularityError(q);
        }
        g += pq * std::log(h(q));
    }
    return g;
}

inline double log_det(const BlockInfo& block) {
    double value = design_objective(block.config, block.h);
    for (int q = 1; q <= kMaxOrder; ++q) {
        const auto copies = static_cast<double>(block.block_multiplicity(q));
        if (copies > 0.0) {
            value += copies * block.template_log_det(q);
        }
    }
    return value;
}

/// Dense information matrix by direct summation of
/// (f(i)-f(j))(f(i)-f(j))^T over every supported orbit, each weighted w_d/N_d.
inline Matrix brute_force_info(const InvariantDesign& design,
                               std::uint64_t cap = kDefaultPairCap) {
    design.validate();
    const DesignConfig& config = design.config;
    const auto p = static_cast<Eigen::Index>(config.param_dim());
    for (int d : design.support()) {
        const std::uint64_t n = orbit_size(config, d);
        if (n > cap) {
            throw SizeError(n, cap);
        }
    }

    constexpr Eigen::Index kChunk = 2048;
    Matrix info = Matrix::Zero(p, p);
    Matrix rows(kChunk, p);
    for (int d : design.support()) {
        const double scale = design.weight(d) / static_cast<double>(orbit_size(config, d));
        Matrix orbit_sum = Matrix::Zero(p, p);
        Eigen::Index filled = 0;
        auto flush = [&] {
            if (filled > 0) {
                orbit_sum.selfadjointView<Eigen::Lower>().rankUpdate(rows.topRows(filled).transpose());
                filled = 0;
            }
        };
        for_each_pair(config, d, [&](const ProfilePair& pair) {
            rows.row(filled++) =
                (regression_vector(pair.first, config) - regression_vector(pair.second, config))
                    .transpose();
            if (filled == kChunk) {
                flush();
            }
        });
        flush();
        info += scale * Matrix(orbit_sum.selfadjointView<Eigen::Lower>());
    }
    return info;
}

} // namespace pcd
