#pragma once

// Serialization of reports and tables: JSON via nlohmann/json, CSV by hand.

#include <array>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcdesign/design_space.hpp"
#include "pcdesign/optimizer.hpp"
#include "pcdesign/oracle.hpp"
#include "pcdesign/realize.hpp"
#include "pcdesign/variance.hpp"
#include "pcdesign/version.hpp"

namespace pcd {

/// Rounds to 6 significant digits so reports print stably.
inline double sig6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::stod(buf);
}

inline nlohmann::json config_json(const DesignConfig& c) {
    return {{"K", c.K}, {"S", c.S}, {"v", c.v}, {"p", c.param_dim()}};
}

namespace detail {

inline nlohmann::json rounded(const std::vector<double>& xs) {
    auto out = nlohmann::json::array();
    for (double x : xs) {
        out.push_back(sig6(x));
    }
    return out;
}

inline nlohmann::json thousandths(const std::vector<double>& xs) {
    auto out = nlohmann::json::array();
    for (double x : xs) {
        out.push_back(static_cast<double>(round_thousandths(x)) / 1000.0);
    }
    return out;
}

} // namespace detail

inline nlohmann::json kw_report_json(const KWReport& kw) {
    nlohmann::json j;
    j["config"] = config_json(kw.config);
    j["support"] = kw.design.support();
    j["weights"] = detail::rounded(kw.design.weights);
    j["objective"] = sig6(objective(kw.design));
    j["variance_profile"] = detail::rounded(kw.variance_by_depth);
    j["variance_profile_3dp"] = detail::thousandths(kw.variance_by_depth);
    j["max_ratio"] = sig6(kw.max_ratio);
    j["is_optimal"] = kw.is_optimal;
    j["tolerances"] = {{"kw", kw.tolerance}};
    j["version"] = kVersion;
    return j;
}

inline nlohmann::json optimal_report_json(const OptimalDesignReport& report,
                                          const OptimizeOptions& options) {
    nlohmann::json j = kw_report_json(report.kw);
    j["objective"] = sig6(report.objective);
    j["support_weights"] = detail::rounded(report.support_weights);
    j["support_structure_ok"] = support_structure_check(report);
    j["tolerances"] = {{"kw", options.kw_tolerance}, {"optimizer", options.tol}};
    return j;
}

/// One row of the depth table: headline depth per interaction order (smallest maximizer,
/// 0 when unidentifiable) plus the full tie sets.
struct DepthTableRow {
    int S = 0;
    int v = 0;
    std::array<int, 3> depth{};                 ///< first-, second-, third-order
    std::array<std::vector<int>, 3> ties;
};

inline DepthTableRow depth_table_row(int S, int v) {
    const BlockDepthResult r = best_depth_per_block(DesignConfig{S, S, v});
    DepthTableRow row{S, v, {}, {}};
    for (int q = 2; q <= kMaxOrder; ++q) {
        const OrderDepths& o = r.order(q);
        row.depth[q - 2] = o.identifiable ? o.depths.front() : 0;
        row.ties[q - 2] = o.depths;
    }
    return row;
}

namespace detail {

inline std::string join(const std::vector<int>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += (i ? " " : "") + std::to_string(xs[i]);
    }
    return out;
}

} // namespace detail

inline void write_depth_table_csv(std::ostream& out, const std::vector<DepthTableRow>& rows) {
    out << "S,v,first_order,second_order,third_order,first_order_ties,second_order_ties,"
           "third_order_ties\r\n";
    for (const auto& r : rows) {
        out << r.S << ',' << r.v << ',' << r.depth[0] << ',' << r.depth[1] << ',' << r.depth[2];
        for (const auto& t : r.ties) {
            out << ',' << (t.size() > 1 ? detail::join(t) : "");
        }
        out << "\r\n";
    }
}

inline nlohmann::json depth_table_json(const std::vector<DepthTableRow>& rows) {
    auto out = nlohmann::json::array();
    for (const auto& r : rows) {
        out.push_back({{"S", r.S},
                       {"v", r.v},
                       {"depths", r.depth},
                       {"ties", {r.ties[0], r.ties[1], r.ties[2]}}});
    }
    return {{"table", "optimal comparison depths, S=K"}, {"rows", out}, {"version", kVersion}};
}

inline void write_orbit_csv(std::ostream& out, const DesignConfig& config, const PairOrbit& orbit) {
    out << "pair_id,shown_set,levels_i,levels_j,depth\r\n";
    std::uint64_t id = 0;
    for (const auto& pair : orbit.pairs) {
        out << id++ << ',' << detail::format_shown_set(pair.first) << ','
            << detail::format_levels(pair.first) << ',' << detail::format_levels(pair.second)
            << ',' << orbit.depth << "\r\n";
    }
    (void)config;
}

inline nlohmann::json oracle_report_json(const OracleReport& report) {
    auto entries = nlohmann::json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"config", config_json(e.config)},
                           {"depth", e.depth},
                           {"passed", e.passed},
                           {"max_block_deviation", e.max_block_deviation},
                           {"max_offdiagonal", e.max_offdiagonal},
                           {"failed_orders", e.failed_orders},
                           {"skipped", e.skipped}});
    }
    return {{"passed", report.passed()}, {"entries", entries}, {"version", kVersion}};
}

} // namespace pcd
