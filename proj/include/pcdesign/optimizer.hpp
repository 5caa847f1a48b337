#pragma once

// Optimal comparison depths per effect order, and D-optimal depth weights
// for the full parameter vector.
//
// The D-objective over invariant designs is g(w) = sum_q p_q log(sum_d w_d h_q(d)),
// concave on the depth simplex. The optimum is supported on at most four
// depths, so every support of size <= 4 is tried: g is maximized over the
// relative interior of that face by damped Newton, faces whose optimum lies on
// their boundary are discarded (a smaller face covers them), and the best
// candidate is certified by the equivalence theorem.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pcdesign/design_space.hpp"
#include "pcdesign/errors.hpp"
#include "pcdesign/info_matrix.hpp"
#include "pcdesign/variance.hpp"

namespace pcd {

struct OrderDepths {
    bool identifiable = false;
    std::vector<int> depths;  ///< full argmax set of h_q(d), ascending
    double h_max = 0.0;
};

struct BlockDepthResult {
    DesignConfig config;
    std::array<OrderDepths, kMaxOrder> orders;

    const OrderDepths& order(int q) const { return orders.at(q - 1); }
};

/// Exhaustive scan of h_q(d) over d = 1..S for each order. h_q(d) is
/// d * interaction_factor / (common denominator), so maximizers and ties are
/// found exactly on the integer numerators.
inline BlockDepthResult best_depth_per_block(const DesignConfig& config) {
    config.validate();
    BlockDepthResult result{config, {}};
    for (int q = 1; q <= kMaxOrder; ++q) {
        OrderDepths& entry = result.orders[q - 1];
        if (!config.identifiable(q)) {
            continue;
        }
        std::int64_t best = 0;
        for (int d = 1; d <= config.S; ++d) {
            const std::int64_t key = d * interaction_factor(q, config.S, d, config.v);
            if (key > best) {
                best = key;
                entry.depths.assign(1, d);
            } else if (key == best && best > 0) {
                entry.depths.push_back(d);
            }
        }
        if (best > 0) {
            entry.identifiable = true;
            entry.h_max = h_uniform(config, entry.depths.front())(q);
        } else {
            entry.depths.clear();
        }
    }
    return result;
}

struct OptimalDesignReport {
    DesignConfig config;
    InvariantDesign design;
    double objective = 0.0;  ///< sum_q p_q log h_q(ξ*)
    KWReport kw;
    std::vector<int> support;
    std::vector<double> support_weights;
};

/// Optimization converged but the equivalence-theorem check failed.
class CertificationError : public std::runtime_error {
public:
    explicit CertificationError(KWReport report)
        : std::runtime_error("optimized design failed the Kiefer-Wolfowitz check: max V/p = " +
                             std::to_string(report.max_ratio)),
          report_(std::move(report)) {}

    const KWReport& report() const noexcept { return report_; }

private:
    KWReport report_;
};

struct OptimizeOptions {
    double tol = 1e-20;                        ///< Newton decrement on g/p
    double kw_tolerance = kDefaultKwTolerance;
    double prune_below = 1e-9;
    std::optional<std::uint64_t> seed;         ///< random interior starts instead of barycentres
    int max_newton_iterations = 200;
};

/// sum_q p_q log h_q(ξ); throws SingularityError when some h_q vanishes.
inline double objective(const InvariantDesign& design) {
    return design_objective(design.config, h_mix(design));
}

namespace detail {

struct FaceOptimum {
    std::vector<int> support;
    std::vector<double> weights;
    double objective = -std::numeric_limits<double>::infinity();
};

class FaceSolver {
public:
    FaceSolver(const DesignConfig& config, const OptimizeOptions& options)
        : config_(config), options_(options) {
        // objective scaled by 1/p so tolerances do not depend on problem size
        const auto p = static_cast<double>(config.param_dim());
        for (int q = 1; q <= kMaxOrder; ++q) {
            p_[q - 1] = static_cast<double>(config.param_dim(q)) / p;
        }
        h_.resize(config.S);
        for (int d = 1; d <= config.S; ++d) {
            h_[d - 1] = h_uniform(config, d);
        }
        if (options.seed) {
            rng_.seed(*options.seed);
        }
    }

    std::optional<FaceOptimum> solve(const std::vector<int>& support) {
        if (!covers_all_orders(support)) {
            return std::nullopt;
        }
        const int m = static_cast<int>(support.size());
        std::vector<double> w = start(m);
        if (m == 1) {
            return FaceOptimum{support, w, value(support, w)};
        }

        bool converged = false;
        for (int it = 0; it < options_.max_newton_iterations; ++it) {
            Eigen::VectorXd grad(m);
            Eigen::MatrixXd hess(m, m);
            derivatives(support, w, grad, hess);

            // Coordinates x_i = w_i, i < m, with w_m = 1 - sum x.
            Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m, m - 1);
            for (int i = 0; i < m - 1; ++i) {
                basis(i, i) = 1.0;
                basis(m - 1, i) = -1.0;
            }
            const Eigen::VectorXd g_red = basis.transpose() * grad;
            const Eigen::MatrixXd h_red = -(basis.transpose() * hess * basis);

            Eigen::VectorXd step;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(h_red);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                ldlt.vectorD().minCoeff() > 1e-14 * ldlt.vectorD().maxCoeff()) {
                step = ldlt.solve(g_red);
            } else {
                step = g_red;  // flat direction: fall back to ascent
            }
            const double decrement = g_red.dot(step);
            const Eigen::VectorXd dw = basis * step;
            if (decrement <= options_.tol || dw.lpNorm<Eigen::Infinity>() < 1e-14) {
                converged = true;
                break;
            }

            double alpha = 1.0;
            for (int i = 0; i < m; ++i) {
                if (dw(i) < 0.0) {
                    alpha = std::min(alpha, -0.99 * w[i] / dw(i));
                }
            }
            const double g0 = value(support, w);
            std::vector<double> trial(m);
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                for (int i = 0; i < m; ++i) {
                    trial[i] = w[i] + alpha * dw(i);
                }
                const double g1 = value(support, trial);
                if (g1 >= g0 + 1e-4 * alpha * decrement) {
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) {
                converged = true;  // no further ascent representable
                break;
            }
            w = trial;
        }

        const double smallest = *std::min_element(w.begin(), w.end());
        if (!converged || smallest < options_.prune_below) {
            return std::nullopt;  // optimum on the face boundary
        }
        return FaceOptimum{support, w, value(support, w)};
    }

private:
    bool covers_all_orders(const std::vector<int>& support) const {
        for (int q = 1; q <= kMaxOrder; ++q) {
            if (p_[q - 1] == 0.0) {
                continue;
            }
            bool any = false;
            for (int d : support) {
                any = any || h_[d - 1](q) > 0.0;
            }
            if (!any) {
                return false;
            }
        }
        return true;
    }

    std::vector<double> start(int m) {
        std::vector<double> w(m, 1.0 / m);
        if (options_.seed && m > 1) {
            std::gamma_distribution<double> gamma(1.0, 1.0);
            double sum = 0.0;
            for (double& x : w) {
                x = gamma(rng_) + 1e-3;
                sum += x;
            }
            for (double& x : w) {
                x /= sum;
            }
        }
        return w;
    }

    HVector mix(const std::vector<int>& support, const std::vector<double>& w) const {
        HVector h;
        for (std::size_t i = 0; i < support.size(); ++i) {
            for (int q = 1; q <= kMaxOrder; ++q) {
                h(q) += w[i] * h_[support[i] - 1](q);
            }
        }
        return h;
    }

    double value(const std::vector<int>& support, const std::vector<double>& w) const {
        const HVector h = mix(support, w);
        double g = 0.0;
        for (int q = 1; q <= kMaxOrder; ++q) {
            if (p_[q - 1] == 0.0) {
                continue;
            }
            if (!(h(q) > 0.0)) {
                return -std::numeric_limits<double>::infinity();
            }
            g += p_[q - 1] * std::log(h(q));
        }
        return g;
    }

    void derivatives(const std::vector<int>& support, const std::vector<double>& w,
                     Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
        const HVector h = mix(support, w);
        const int m = static_cast<int>(support.size());
        grad.setZero();
        hess.setZero();
        for (int q = 1; q <= kMaxOrder; ++q) {
            if (p_[q - 1] == 0.0) {
                continue;
            }
            for (int a = 0; a < m; ++a) {
                const double ha = h_[support[a] - 1](q);
                grad(a) += p_[q - 1] * ha / h(q);
                for (int b = 0; b < m; ++b) {
                    hess(a, b) -= p_[q - 1] * ha * h_[support[b] - 1](q) / (h(q) * h(q));
                }
            }
        }
    }

    DesignConfig config_;
    OptimizeOptions options_;
    std::array<double, kMaxOrder> p_{};
    std::vector<HVector> h_;
    std::mt19937_64 rng_;
};

} // namespace detail

/// D-optimal invariant design for the full parameter vector. Requires all
/// four effect orders to be identifiable (K >= 4, S >= 4).
inline OptimalDesignReport optimize_weights(const DesignConfig& config,
                                            const OptimizeOptions& options = {}) {
    config.validate();
    if (!config.fully_identifiable()) {
        throw DomainError("third-order interactions need K >= 4 and S >= 4, got " +
                          to_string(config));
    }
    if (!(options.tol > 0.0) || !(options.kw_tolerance > 0.0)) {
        throw DomainError("optimizer tolerances must be positive");
    }

    detail::FaceSolver solver(config, options);
    std::optional<detail::FaceOptimum> best;
    const int max_support = std::min(config.S, kMaxOrder);
    // Smaller supports first, lexicographic within a size; a later face must
    // beat the incumbent by more than rounding noise to replace it.
    for (int m = 1; m <= max_support; ++m) {
        std::vector<int> subset(m);
        for (int i = 0; i < m; ++i) {
            subset[i] = i;
        }
        do {
            std::vector<int> support(m);
            for (int i = 0; i < m; ++i) {
                support[i] = subset[i] + 1;
            }
            auto candidate = solver.solve(support);
            if (!candidate) {
                continue;
            }
            const double slack = best ? 1e-12 * std::max(1.0, std::abs(best->objective)) : 0.0;
            if (!best || candidate->objective > best->objective + slack) {
                best = std::move(candidate);
            }
        } while (detail::next_combination(subset, config.S));
    }
    if (!best) {
        throw SingularityError(kMaxOrder);
    }

    std::vector<double> raw(config.S, 0.0);
    for (std::size_t i = 0; i < best->support.size(); ++i) {
        raw[best->support[i] - 1] = best->weights[i];
    }
    InvariantDesign design = InvariantDesign::normalized(config, raw);

    OptimalDesignReport report{config, design, objective(design), {}, {}, {}};
    report.support = design.support();
    for (int d : report.support) {
        report.support_weights.push_back(design.weight(d));
    }
    report.kw = kw_certificate(design, options.kw_tolerance);
    if (!report.kw.is_optimal) {
        throw CertificationError(report.kw);
    }
    return report;
}

/// (det M(design) / det M(reference))^(1/p).
inline double d_efficiency(const InvariantDesign& design, const InvariantDesign& reference) {
    if (!(design.config == reference.config)) {
        throw DomainError("d_efficiency needs designs over the same configuration");
    }
    const auto p = static_cast<double>(design.config.param_dim());
    return std::exp((objective(design) - objective(reference)) / p);
}

/// True iff the support has at most four depths that split into at most two
/// clusters, each a single depth or two adjacent depths.
inline bool support_structure_check(std::vector<int> support) {
    if (support.empty() || support.size() > static_cast<std::size_t>(kMaxOrder)) {
        return false;
    }
    std::sort(support.begin(), support.end());
    int clusters = 0;
    std::size_t i = 0;
    while (i < support.size()) {
        std::size_t run = 1;
        while (i + run < support.size() && support[i + run] == support[i + run - 1] + 1) {
            ++run;
        }
        clusters += static_cast<int>((run + 1) / 2);
        i += run;
    }
    return clusters <= 2;
}

inline bool support_structure_check(const OptimalDesignReport& report) {
    return support_structure_check(report.support);
}

} // namespace pcd
