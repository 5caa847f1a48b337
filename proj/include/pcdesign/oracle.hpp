#pragma once

// Brute-force verification harness: dense information matrices of the
// depth-uniform designs, accumulated pair by pair, against the closed-form
// block representation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pcdesign/design_space.hpp"
#include "pcdesign/info_matrix.hpp"

namespace pcd {

struct OracleBounds {
    int max_K = 5;
    int max_v = 3;
    std::vector<int> orders{1, 2, 3, 4};  ///< effect orders to compare
    double tolerance = 1e-10;
    std::uint64_t cap = kDefaultPairCap;
};

/// Test hook: scale the closed-form h_q of one order before comparing.
struct OracleFault {
    int order = 0;  ///< 0 disables the fault
    double factor = 1.0;
};

struct OracleEntry {
    DesignConfig config;
    int depth = 0;
    bool passed = true;
    double max_block_deviation = 0.0;     ///< over compared diagonal blocks
    double max_offdiagonal = 0.0;         ///< over entries outside diagonal blocks
    std::vector<int> failed_orders;
    std::vector<std::string> skipped;     ///< orders not compared, with reason
};

struct OracleReport {
    std::vector<OracleEntry> entries;

    bool passed() const {
        return std::all_of(entries.begin(), entries.end(),
                           [](const OracleEntry& e) { return e.passed; });
    }
};

/// Compares one (config, d) pair. Off-diagonal entries are checked against
/// zero; diagonal blocks of each requested, present order against h_q M^{⊗q}.
inline OracleEntry oracle_check(const DesignConfig& config, int d, const OracleBounds& bounds,
                                const OracleFault& fault = {}) {
    OracleEntry entry;
    entry.config = config;
    entry.depth = d;
    const InvariantDesign design = InvariantDesign::point_mass(config, d);
    const Matrix dense = brute_force_info(design, bounds.cap);

    BlockInfo closed = block_info(design);
    if (fault.order >= 1 && fault.order <= kMaxOrder) {
        closed.h(fault.order) *= fault.factor;
    }
    const Matrix expected = closed.to_dense();

    // block id of every coordinate, with its order
    std::vector<int> block_of;
    std::vector<int> order_of;
    int block_id = 0;
    for (int q = 1; q <= kMaxOrder; ++q) {
        for (std::uint64_t c = 0; c < config.block_count(q); ++c, ++block_id) {
            for (std::uint64_t s = 0; s < config.block_size(q); ++s) {
                block_of.push_back(block_id);
                order_of.push_back(q);
            }
        }
    }

    auto requested = [&](int q) {
        return std::find(bounds.orders.begin(), bounds.orders.end(), q) != bounds.orders.end();
    };
    std::array<double, kMaxOrder> order_dev{};
    const auto p = dense.rows();
    for (Eigen::Index r = 0; r < p; ++r) {
        for (Eigen::Index c = 0; c < p; ++c) {
            if (block_of[r] != block_of[c]) {
                entry.max_offdiagonal = std::max(entry.max_offdiagonal, std::abs(dense(r, c)));
            } else if (requested(order_of[r])) {
                double& dev = order_dev[order_of[r] - 1];
                dev = std::max(dev, std::abs(dense(r, c) - expected(r, c)));
            }
        }
    }

    for (int q = 1; q <= kMaxOrder; ++q) {
        if (!requested(q)) {
            continue;
        }
        if (config.K < q) {
            entry.skipped.push_back("order " + std::to_string(q) + " needs K >= " +
                                    std::to_string(q) + " (not identifiable)");
            continue;
        }
        entry.max_block_deviation = std::max(entry.max_block_deviation, order_dev[q - 1]);
        if (order_dev[q - 1] > bounds.tolerance) {
            entry.failed_orders.push_back(q);
        }
    }
    entry.passed = entry.failed_orders.empty() && entry.max_offdiagonal <= bounds.tolerance;
    return entry;
}

/// All configs with K <= max_K, S <= K, 2 <= v <= max_v and depths 1..S.
inline OracleReport run_oracle(const OracleBounds& bounds, const OracleFault& fault = {}) {
    OracleReport report;
    for (int K = 1; K <= bounds.max_K; ++K) {
        for (int S = 1; S <= K; ++S) {
            for (int v = 2; v <= bounds.max_v; ++v) {
                const DesignConfig config{K, S, v};
                for (int d = 1; d <= S; ++d) {
                    report.entries.push_back(oracle_check(config, d, bounds, fault));
                }
            }
        }
    }
    return report;
}

} // namespace pcd
