#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "pcdesign/report_io.hpp"

using namespace pcd;

TEST(Apportion, LargestRemainder) {
    EXPECT_EQ(apportion({0.0, 0.665, 0.0, 0.335, 0.0}, 1000),
              (std::vector<std::uint64_t>{0, 665, 0, 335, 0}));
    EXPECT_EQ(apportion({0.5, 0.5}, 1), (std::vector<std::uint64_t>{1, 0}));
    EXPECT_EQ(apportion({2.0 / 3.0, 1.0 / 3.0}, 10), (std::vector<std::uint64_t>{7, 3}));
    EXPECT_EQ(apportion({0.0, 1.0, 0.0}, 7), (std::vector<std::uint64_t>{0, 7, 0}));
}

TEST(Realize, BinaryDepthFourEveryPairOnce) {
    const DesignConfig c{4, 4, 2};
    const ExactDesign exact = realize(InvariantDesign::point_mass(c, 4), 16);
    ASSERT_EQ(exact.entries.size(), 16u);
    for (const auto& e : exact.entries) {
        EXPECT_EQ(e.replication, 1u);
        EXPECT_EQ(e.depth, 4);
        EXPECT_EQ(e.pair.depth(), 4);
    }
    // ids continue after the depth 1..3 orbits
    EXPECT_EQ(exact.entries.front().pair_id,
              orbit_size(c, 1) + orbit_size(c, 2) + orbit_size(c, 3));
}

TEST(Realize, EvenSpreadWithinOrbit) {
    const DesignConfig c{5, 5, 2};
    const ExactDesign exact = realize(InvariantDesign{c, {0.0, 0.665, 0.0, 0.335, 0.0}}, 1000);
    EXPECT_EQ(exact.total, 1000u);
    std::uint64_t threes = 0;
    std::uint64_t twos = 0;
    std::uint64_t depth2 = 0;
    std::uint64_t sum = 0;
    for (const auto& e : exact.entries) {
        sum += e.replication;
        if (e.depth == 2) {
            ++depth2;
            (e.replication == 3 ? threes : twos) += 1;
        }
    }
    EXPECT_EQ(sum, 1000u);
    EXPECT_EQ(depth2, 320u);
    EXPECT_EQ(threes, 25u);
    EXPECT_EQ(twos, 295u);
    const auto freq = exact.orbit_frequencies();
    EXPECT_DOUBLE_EQ(freq[1], 0.665);
    EXPECT_DOUBLE_EQ(freq[3], 0.335);
}

TEST(Realize, SmallNOmitsUnusedPairs) {
    const ExactDesign exact = realize(InvariantDesign::point_mass({5, 5, 3}, 2), 7);
    ASSERT_EQ(exact.entries.size(), 7u);
    for (std::size_t i = 0; i < exact.entries.size(); ++i) {
        EXPECT_EQ(exact.entries[i].replication, 1u);
    }
    EXPECT_THROW(realize(InvariantDesign::point_mass({5, 5, 3}, 2), 0), DomainError);
}

TEST(Realize, CapOnOrbitSize) {
    try {
        realize(InvariantDesign::point_mass({5, 5, 3}, 2), 10, 1000);
        FAIL() << "expected SizeError";
    } catch (const SizeError& e) {
        EXPECT_EQ(e.requested(), 9720u);
    }
    // an orbit with zero weight is never enumerated
    EXPECT_NO_THROW(realize(InvariantDesign::point_mass({5, 5, 2}, 1), 10, 200));
}

TEST(ExactDesignCsv, RoundTripPreservesFrequencies) {
    const DesignConfig c{5, 4, 3};
    const InvariantDesign design = InvariantDesign::normalized(c, {0.2, 0.5, 0.0, 0.3});
    for (std::uint64_t n : {1ull, 37ull, 500ull}) {
        const ExactDesign exact = realize(design, n);
        std::stringstream buf;
        write_exact_design_csv(buf, exact);
        const ExactDesign back = read_exact_design_csv(buf, c);
        EXPECT_EQ(back.total, n);
        ASSERT_EQ(back.entries.size(), exact.entries.size());
        for (std::size_t i = 0; i < back.entries.size(); ++i) {
            EXPECT_EQ(back.entries[i].pair_id, exact.entries[i].pair_id);
            EXPECT_EQ(back.entries[i].pair, exact.entries[i].pair);
        }
        const auto freq = back.orbit_frequencies();
        for (int d = 1; d <= c.S; ++d) {
            EXPECT_LE(std::abs(freq[d - 1] - design.weight(d)), 1.0 / (2.0 * n) + 1e-15)
                << "n=" << n << " d=" << d;
        }
    }
}

TEST(ExactDesignCsv, FormatAndDeterminism) {
    const DesignConfig c{3, 2, 2};
    const ExactDesign exact = realize(InvariantDesign::point_mass(c, 1), 2);
    std::stringstream a;
    std::stringstream b;
    write_exact_design_csv(a, exact);
    write_exact_design_csv(b, realize(InvariantDesign::point_mass(c, 1), 2));
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str(),
              "pair_id,shown_set,levels_i,levels_j,depth,replication\r\n"
              "0,1 2,1 1 -,1 2 -,1,1\r\n"
              "1,1 2,1 1 -,2 1 -,1,1\r\n");
}

TEST(ExactDesignCsv, RejectsBadInput) {
    const DesignConfig c{3, 2, 2};
    auto read = [&](const std::string& text) {
        std::istringstream in(text);
        return read_exact_design_csv(in, c);
    };
    const std::string header = "pair_id,shown_set,levels_i,levels_j,depth,replication\r\n";
    EXPECT_THROW(read(""), DomainError);
    EXPECT_THROW(read("a,b\r\n"), DomainError);
    EXPECT_THROW(read(header), DomainError);
    EXPECT_THROW(read(header + "0,1 2,1 1 -,1 2 -,1\r\n"), DomainError);
    EXPECT_THROW(read(header + "0,1 2,1 1 -,1 2 -,2,1\r\n"), DomainError);
    EXPECT_THROW(read(header + "0,1 2,1 1,1 2,1,1\r\n"), DomainError);
    EXPECT_THROW(read(header + "0,1 2,1 3 -,1 2 -,1,1\r\n"), DomainError);
    EXPECT_THROW(read(header + "0,1 2,1 x -,1 2 -,1,1\r\n"), DomainError);
    EXPECT_NO_THROW(read(header + "0,\"1 2\",1 1 -,1 2 -,1,4\n"));
}

TEST(ReportJson, RequiredFields) {
    const OptimizeOptions options;
    const OptimalDesignReport r = optimize_weights({5, 5, 2}, options);
    const nlohmann::json j = optimal_report_json(r, options);
    for (const char* key : {"config", "support", "weights", "objective", "variance_profile",
                            "is_optimal", "tolerances", "version"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["support"], nlohmann::json::array({2, 4}));
    EXPECT_EQ(j["weights"][1].get<double>(), 0.666667);
    EXPECT_EQ(j["config"]["p"].get<int>(), 30);
    EXPECT_TRUE(j["is_optimal"].get<bool>());
    EXPECT_EQ(j["version"], kVersion);
    EXPECT_EQ(j.dump(), optimal_report_json(optimize_weights({5, 5, 2}, options), options).dump());
}

TEST(ReportJson, SixSignificantDigits) {
    EXPECT_EQ(sig6(2.0 / 3.0), 0.666667);
    EXPECT_EQ(sig6(123456789.0), 123457000.0);
    EXPECT_EQ(sig6(-0.000123456789), -0.000123457);
}

TEST(DepthTable, Rows) {
    const DepthTableRow two = depth_table_row(2, 4);
    EXPECT_EQ(two.depth, (std::array<int, 3>{1, 0, 0}));
    const DepthTableRow three = depth_table_row(3, 2);
    EXPECT_EQ(three.depth, (std::array<int, 3>{1, 1, 0}));
    EXPECT_EQ(three.ties[1], (std::vector<int>{1, 3}));
    EXPECT_EQ(depth_table_row(10, 20).depth, (std::array<int, 3>{9, 8, 7}));

    std::ostringstream out;
    write_depth_table_csv(out, {three});
    EXPECT_EQ(out.str(),
              "S,v,first_order,second_order,third_order,first_order_ties,second_order_ties,"
              "third_order_ties\r\n"
              "3,2,1,1,0,1 2,1 3,\r\n");
}

TEST(Oracle, SmallGridPasses) {
    OracleBounds bounds;
    bounds.max_K = 4;
    bounds.max_v = 3;
    const OracleReport report = run_oracle(bounds);
    EXPECT_TRUE(report.passed());
    EXPECT_EQ(report.entries.size(), 40u);
    for (const auto& e : report.entries) {
        EXPECT_LE(e.max_offdiagonal, 1e-10);
        if (e.config.K == 3) {
            ASSERT_EQ(e.skipped.size(), 1u);
            EXPECT_NE(e.skipped[0].find("order 4"), std::string::npos);
        }
    }
}

TEST(Oracle, FaultInjectionNamesOrder) {
    OracleBounds bounds;
    bounds.max_K = 3;
    bounds.max_v = 2;
    const OracleReport report = run_oracle(bounds, OracleFault{2, 1.01});
    EXPECT_FALSE(report.passed());
    std::set<int> failed;
    for (const auto& e : report.entries) {
        failed.insert(e.failed_orders.begin(), e.failed_orders.end());
    }
    EXPECT_EQ(failed, (std::set<int>{2}));
    const nlohmann::json j = oracle_report_json(report);
    EXPECT_FALSE(j["passed"].get<bool>());
}

TEST(Oracle, RestrictedOrders) {
    OracleBounds bounds;
    bounds.orders = {1};
    const OracleEntry e = oracle_check({4, 4, 2}, 2, bounds, OracleFault{3, 2.0});
    EXPECT_TRUE(e.passed);
}
