// pcdesign: optimal paired-comparison designs from the command line.
//
// Exit codes: 0 success, 2 usage error, 3 numerical or certification
// failure, 4 enumeration cap exceeded.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "pcdesign/pcdesign.hpp"

namespace {

using pcd::DesignConfig;
using pcd::DomainError;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCap = 4;

struct RunConfig {
    std::optional<int> k;
    std::optional<int> s;
    std::optional<int> v;
    std::optional<double> tol;
    std::uint64_t cap = pcd::kDefaultPairCap;
    std::string format;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<double> weights;
    std::optional<int> d;
    std::uint64_t n = 0;
    std::vector<int> s_values;
    std::vector<int> v_values;
    int max_k = 5;
    int max_v = 3;
    std::vector<int> orders{1, 2, 3, 4};
    int fault_order = 0;
    double fault_factor = 1.0;
    std::string config_path;
};

/// Thrown when the command ran but its verdict is negative; the artifact is
/// still written.
struct VerdictFailure {
    std::string message;
};

// JSON run-config: keys mirror the long flag names. Flags given on the
// command line take precedence.
void apply_config_file(RunConfig& rc, const CLI::App& cmd) {
    if (rc.config_path.empty()) {
        return;
    }
    std::ifstream in(rc.config_path);
    if (!in) {
        throw DomainError("cannot open run-config file " + rc.config_path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("run-config is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) {
        throw DomainError("run-config must be a JSON object");
    }
    auto unset = [&](const std::string& flag) {
        const CLI::Option* opt = cmd.get_option_no_throw("--" + flag);
        if (opt == nullptr) {
            throw DomainError("run-config key '" + flag + "' does not apply to " + cmd.get_name());
        }
        return opt->count() == 0;
    };
    try {
        for (const auto& [key, value] : j.items()) {
            if (!unset(key)) {
                continue;
            }
            if (key == "k") rc.k = value.get<int>();
            else if (key == "s") {
                if (value.is_array()) rc.s_values = value.get<std::vector<int>>();
                else rc.s = value.get<int>();
            } else if (key == "v") {
                if (value.is_array()) rc.v_values = value.get<std::vector<int>>();
                else rc.v = value.get<int>();
            }
            else if (key == "tol") rc.tol = value.get<double>();
            else if (key == "cap") rc.cap = value.get<std::uint64_t>();
            else if (key == "format") rc.format = value.get<std::string>();
            else if (key == "out") rc.out = value.get<std::string>();
            else if (key == "seed") rc.seed = value.get<std::uint64_t>();
            else if (key == "weights") rc.weights = value.get<std::vector<double>>();
            else if (key == "d") rc.d = value.get<int>();
            else if (key == "n") rc.n = value.get<std::uint64_t>();
            else if (key == "max-k") rc.max_k = value.get<int>();
            else if (key == "max-v") rc.max_v = value.get<int>();
            else if (key == "orders") rc.orders = value.get<std::vector<int>>();
            else throw DomainError("run-config key '" + key + "' is not supported");
        }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("run-config has a value of the wrong type: " + std::string(e.what()));
    }
}

DesignConfig design_config(const RunConfig& rc) {
    if (!rc.s || !rc.v) {
        throw DomainError("--s and --v are required");
    }
    DesignConfig c{rc.k.value_or(*rc.s), *rc.s, *rc.v};
    c.validate();
    return c;
}

// Weights from --weights (one per depth 1..S, summing to 1 within 1e-6) or a
// point mass from --d.
pcd::InvariantDesign user_design(const RunConfig& rc, const DesignConfig& c) {
    if (rc.d && !rc.weights.empty()) {
        throw DomainError("give either --weights or --d, not both");
    }
    if (rc.d) {
        return pcd::InvariantDesign::point_mass(c, *rc.d);
    }
    if (rc.weights.empty()) {
        throw DomainError("--weights or --d is required");
    }
    if (rc.weights.size() != static_cast<std::size_t>(c.S)) {
        throw DomainError("--weights needs S=" + std::to_string(c.S) + " entries");
    }
    double sum = 0.0;
    for (double w : rc.weights) {
        if (!(w >= 0.0)) {
            throw DomainError("weights must be nonnegative");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw DomainError("weights must sum to 1");
    }
    return pcd::InvariantDesign::normalized(c, rc.weights);
}

std::string resolved_format(const RunConfig& rc, const std::string& fallback,
                            std::initializer_list<const char*> allowed) {
    const std::string f = rc.format.empty() ? fallback : rc.format;
    for (const char* a : allowed) {
        if (f == a) {
            return f;
        }
    }
    throw DomainError("unsupported --format '" + f + "' for this command");
}

void emit(const RunConfig& rc, const std::string& text) {
    if (rc.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream file(rc.out, std::ios::binary);
    if (!file) {
        throw DomainError("cannot open output file " + rc.out);
    }
    file << text;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_profile_csv(std::ostream& out, const pcd::KWReport& kw) {
    out << "depth,weight,variance_ratio,variance_ratio_3dp\r\n";
    for (int d = 1; d <= kw.config.S; ++d) {
        out << d << ',' << pcd::sig6(kw.design.weight(d)) << ',' << pcd::sig6(kw.ratio_at(d))
            << ',' << static_cast<double>(pcd::round_thousandths(kw.ratio_at(d))) / 1000.0
            << "\r\n";
    }
}

std::string csv_text(const std::function<void(std::ostream&)>& write) {
    std::ostringstream out;
    out.precision(6);
    write(out);
    return out.str();
}

void run_table1(const RunConfig& rc) {
    std::vector<int> s_values = rc.s_values;
    if (rc.s) s_values = {*rc.s};
    if (s_values.empty()) s_values = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<int> v_values = rc.v_values;
    if (rc.v) v_values = {*rc.v};
    if (v_values.empty()) v_values = {2, 3, 4, 5, 6, 7, 8, 9, 10, 20};

    std::vector<pcd::DepthTableRow> rows;
    for (int s : s_values) {
        for (int v : v_values) {
            rows.push_back(pcd::depth_table_row(s, v));
        }
    }
    if (resolved_format(rc, "csv", {"csv", "json"}) == "json") {
        emit(rc, dump(pcd::depth_table_json(rows)));
    } else {
        emit(rc, csv_text([&](std::ostream& o) { pcd::write_depth_table_csv(o, rows); }));
    }
}

void run_optimize(const RunConfig& rc) {
    const DesignConfig c = design_config(rc);
    pcd::OptimizeOptions options;
    if (rc.tol) options.kw_tolerance = *rc.tol;
    options.seed = rc.seed;
    const std::string format = resolved_format(rc, "json", {"json", "csv"});
    const pcd::OptimalDesignReport report = pcd::optimize_weights(c, options);
    if (format == "json") {
        emit(rc, dump(pcd::optimal_report_json(report, options)));
    } else {
        emit(rc, csv_text([&](std::ostream& o) { write_profile_csv(o, report.kw); }));
    }
}

void run_certify(const RunConfig& rc) {
    const DesignConfig c = design_config(rc);
    const pcd::InvariantDesign design = user_design(rc, c);
    const std::string format = resolved_format(rc, "json", {"json", "csv"});
    const pcd::KWReport kw = pcd::kw_certificate(design, rc.tol.value_or(pcd::kDefaultKwTolerance));
    if (format == "json") {
        emit(rc, dump(pcd::kw_report_json(kw)));
    } else {
        emit(rc, csv_text([&](std::ostream& o) { write_profile_csv(o, kw); }));
    }
    if (!kw.is_optimal) {
        throw VerdictFailure{"design is not D-optimal: max V/p = " +
                             std::to_string(kw.max_ratio)};
    }
}

void run_realize(const RunConfig& rc) {
    const DesignConfig c = design_config(rc);
    const pcd::InvariantDesign design = user_design(rc, c);
    resolved_format(rc, "csv", {"csv"});
    if (rc.n < 1) {
        throw DomainError("--n must be >= 1");
    }
    const pcd::ExactDesign exact = pcd::realize(design, rc.n, rc.cap);
    emit(rc, csv_text([&](std::ostream& o) { pcd::write_exact_design_csv(o, exact); }));
}

void run_enumerate(const RunConfig& rc) {
    const DesignConfig c = design_config(rc);
    if (!rc.d) {
        throw DomainError("--d is required");
    }
    resolved_format(rc, "csv", {"csv"});
    const pcd::PairOrbit orbit = pcd::enumerate_pairs(c, *rc.d, rc.cap);
    emit(rc, csv_text([&](std::ostream& o) { pcd::write_orbit_csv(o, c, orbit); }));
}

void run_oracle(const RunConfig& rc) {
    pcd::OracleBounds bounds;
    bounds.max_K = rc.k.value_or(rc.max_k);
    bounds.max_v = rc.v.value_or(rc.max_v);
    bounds.orders = rc.orders;
    if (rc.tol) bounds.tolerance = *rc.tol;
    bounds.cap = rc.cap;
    if (bounds.max_K < 1 || bounds.max_v < 2) {
        throw DomainError("oracle bounds need K >= 1 and v >= 2");
    }
    for (int q : bounds.orders) {
        if (q < 1 || q > pcd::kMaxOrder) {
            throw DomainError("--orders entries must be in 1..4");
        }
    }
    const pcd::OracleFault fault{rc.fault_order, rc.fault_factor};
    const std::string format = resolved_format(rc, "json", {"json", "csv"});

    // --k, --s and --v pin a single value; otherwise the full grid up to the bounds.
    pcd::OracleReport report;
    for (int K = rc.k ? *rc.k : 1; K <= bounds.max_K; ++K) {
        for (int S = rc.s ? *rc.s : 1; S <= (rc.s ? *rc.s : K); ++S) {
            for (int v = rc.v ? *rc.v : 2; v <= bounds.max_v; ++v) {
                const DesignConfig c{K, S, v};
                c.validate();
                for (int d = 1; d <= S; ++d) {
                    report.entries.push_back(pcd::oracle_check(c, d, bounds, fault));
                }
            }
        }
    }

    if (format == "json") {
        emit(rc, dump(pcd::oracle_report_json(report)));
    } else {
        emit(rc, csv_text([&](std::ostream& o) {
            o << "K,S,v,d,passed,max_block_deviation,max_offdiagonal,failed_orders,skipped\r\n";
            for (const auto& e : report.entries) {
                std::string failed;
                for (int q : e.failed_orders) failed += (failed.empty() ? "" : " ") + std::to_string(q);
                std::string skipped;
                for (const auto& s : e.skipped) skipped += (skipped.empty() ? "" : "; ") + s;
                o << e.config.K << ',' << e.config.S << ',' << e.config.v << ',' << e.depth << ','
                  << (e.passed ? "true" : "false") << ',' << pcd::sig6(e.max_block_deviation)
                  << ',' << pcd::sig6(e.max_offdiagonal) << ',' << failed << ",\"" << skipped
                  << "\"\r\n";
            }
        }));
    }
    if (!report.passed()) {
        std::ostringstream msg;
        msg << "oracle mismatch:";
        for (const auto& e : report.entries) {
            if (e.passed) continue;
            msg << "\n  " << pcd::to_string(e.config) << " d=" << e.depth << " orders";
            for (int q : e.failed_orders) msg << " q=" << q;
            msg << " max block deviation " << e.max_block_deviation << " max off-diagonal "
                << e.max_offdiagonal;
        }
        throw VerdictFailure{msg.str()};
    }
}

void add_common(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--k", rc.k, "number of attributes K (defaults to S)");
    cmd->add_option("--tol", rc.tol, "tolerance (KW bound, or oracle entrywise)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--cap", rc.cap, "maximum orbit size to enumerate")->check(CLI::PositiveNumber);
    cmd->add_option("--format", rc.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", rc.out, "output file (default stdout)");
    cmd->add_option("--config", rc.config_path, "JSON run-config file")
        ->check(CLI::ExistingFile);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"D-optimal paired-comparison designs with interactions up to third order"};
    app.set_version_flag("--version", std::string(pcd::kVersion));
    app.require_subcommand(1);

    RunConfig rc;

    auto* table1 = app.add_subcommand("table1", "optimal comparison depth per effect order, S=K");
    add_common(table1, rc);
    table1->add_option("--s", rc.s_values, "profile strengths (default 2..10)")->delimiter(',');
    table1->add_option("--v", rc.v_values, "level counts (default 2..10,20)")->delimiter(',');

    auto* optimize = app.add_subcommand("optimize", "D-optimal depth weights with KW certificate");
    add_common(optimize, rc);
    optimize->add_option("--s", rc.s, "profile strength S");
    optimize->add_option("--v", rc.v, "levels per attribute v");
    optimize->add_option("--seed", rc.seed, "random interior starts");

    auto* certify = app.add_subcommand("certify", "KW check of user-supplied depth weights");
    add_common(certify, rc);
    certify->add_option("--s", rc.s, "profile strength S");
    certify->add_option("--v", rc.v, "levels per attribute v");
    certify->add_option("--weights", rc.weights, "weights for depths 1..S")->delimiter(',');
    certify->add_option("--d", rc.d, "point mass on depth d");

    auto* realize = app.add_subcommand("realize", "exact design of N pairs as CSV");
    add_common(realize, rc);
    realize->add_option("--s", rc.s, "profile strength S");
    realize->add_option("--v", rc.v, "levels per attribute v");
    realize->add_option("--weights", rc.weights, "weights for depths 1..S")->delimiter(',');
    realize->add_option("--d", rc.d, "point mass on depth d");
    realize->add_option("--n", rc.n, "number of pairs N");

    auto* enumerate = app.add_subcommand("enumerate", "all pairs at one comparison depth");
    add_common(enumerate, rc);
    enumerate->add_option("--s", rc.s, "profile strength S");
    enumerate->add_option("--v", rc.v, "levels per attribute v");
    enumerate->add_option("--d", rc.d, "comparison depth");

    auto* oracle = app.add_subcommand("oracle", "brute-force check of the block information form");
    add_common(oracle, rc);
    oracle->add_option("--s", rc.s, "only this profile strength");
    oracle->add_option("--v", rc.v, "only this level count");
    oracle->add_option("--max-k", rc.max_k, "largest K in the grid");
    oracle->add_option("--max-v", rc.max_v, "largest v in the grid");
    oracle->add_option("--orders", rc.orders, "effect orders to compare")->delimiter(',');
    oracle->add_option("--fault-order", rc.fault_order, "test hook: corrupt h_q of this order")
        ->group("");
    oracle->add_option("--fault-factor", rc.fault_factor, "test hook: corruption factor")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        apply_config_file(rc, *cmd);
        if (cmd == table1) run_table1(rc);
        else if (cmd == optimize) run_optimize(rc);
        else if (cmd == certify) run_certify(rc);
        else if (cmd == realize) run_realize(rc);
        else if (cmd == enumerate) run_enumerate(rc);
        else run_oracle(rc);
    } catch (const VerdictFailure& e) {
        std::cerr << "pcdesign: " << e.message << '\n';
        return kExitNumerical;
    } catch (const pcd::SizeError& e) {
        std::cerr << "pcdesign: " << e.what() << '\n';
        return kExitCap;
    } catch (const std::overflow_error& e) {
        std::cerr << "pcdesign: " << e.what() << '\n';
        return kExitCap;
    } catch (const DomainError& e) {
        std::cerr << "pcdesign: " << e.what() << '\n';
        return kExitUsage;
    } catch (const pcd::CertificationError& e) {
        std::cerr << "pcdesign: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "pcdesign: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
