#pragma once

// Realization of an invariant design as an exact design of N pairs, and the
// CSV form of exact designs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcdesign/design_space.hpp"
#include "pcdesign/errors.hpp"
#include "pcdesign/info_matrix.hpp"

namespace pcd {

struct ExactDesignEntry {
    std::uint64_t pair_id = 0;  ///< position in the depth-ordered enumeration of all pairs
    int depth = 0;
    ProfilePair pair;
    std::uint64_t replication = 0;
};

struct ExactDesign {
    DesignConfig config;
    std::vector<ExactDesignEntry> entries;
    std::uint64_t total = 0;

    /// Fraction of the N pairs falling in each depth orbit, indexed d-1.
    std::vector<double> orbit_frequencies() const {
        std::vector<double> freq(config.S, 0.0);
        for (const auto& e : entries) {
            freq.at(e.depth - 1) += static_cast<double>(e.replication);
        }
        for (double& f : freq) {
            f /= static_cast<double>(total);
        }
        return freq;
    }
};

/// Largest-remainder apportionment of n among weights; equal remainders go
/// to the lower index.
inline std::vector<std::uint64_t> apportion(const std::vector<double>& weights, std::uint64_t n) {
    std::vector<std::uint64_t> counts(weights.size(), 0);
    std::vector<double> remainder(weights.size(), 0.0);
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double quota = weights[i] * static_cast<double>(n);
        counts[i] = static_cast<std::uint64_t>(std::floor(quota));
        remainder[i] = quota - std::floor(quota);
        assigned += counts[i];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainder[a] > remainder[b];
    });
    for (std::size_t k = 0; assigned < n && k < order.size(); ++k) {
        if (weights[order[k]] > 0.0) {
            ++counts[order[k]];
            ++assigned;
        }
    }
    return counts;
}

/// Exact design of size n: N w_d apportioned over orbits by largest
/// remainder, then spread over each orbit's pairs as evenly as possible,
/// filling in enumeration order. Pairs with zero replication are omitted.
inline ExactDesign realize(const InvariantDesign& design, std::uint64_t n,
                           std::uint64_t cap = kDefaultPairCap) {
    design.validate();
    if (n < 1) {
        throw DomainError("exact design size N must be >= 1");
    }
    const DesignConfig& config = design.config;
    const std::vector<std::uint64_t> per_orbit = apportion(design.weights, n);

    ExactDesign exact{config, {}, n};
    std::uint64_t id_offset = 0;
    for (int d = 1; d <= config.S; ++d) {
        const std::uint64_t orbit_n = orbit_size(config, d);
        const std::uint64_t reps = per_orbit[d - 1];
        if (reps > 0) {
            if (orbit_n > cap) {
                throw SizeError(orbit_n, cap);
            }
            const std::uint64_t base = reps / orbit_n;
            const std::uint64_t extra = reps % orbit_n;
            std::uint64_t index = 0;
            for_each_pair(config, d, [&](ProfilePair&& pair) {
                const std::uint64_t r = base + (index < extra ? 1 : 0);
                if (r > 0) {
                    exact.entries.push_back({id_offset + index, d, std::move(pair), r});
                }
                ++index;
            });
        }
        id_offset += orbit_n;
    }
    return exact;
}

namespace detail {

inline std::string format_levels(const Profile& profile) {
    std::string out;
    for (std::size_t k = 0; k < profile.levels.size(); ++k) {
        if (k > 0) {
            out += ' ';
        }
        out += profile.levels[k].is_shown() ? std::to_string(profile.levels[k].index()) : "-";
    }
    return out;
}

inline std::string format_shown_set(const Profile& profile) {
    std::string out;
    for (int k : profile.shown_set()) {
        if (!out.empty()) {
            out += ' ';
        }
        out += std::to_string(k + 1);
    }
    return out;
}

inline Profile parse_levels(const std::string& field, int v) {
    Profile profile;
    std::istringstream in(field);
    std::string token;
    while (in >> token) {
        if (token == "-") {
            profile.levels.push_back(Level::not_shown());
            continue;
        }
        int level = 0;
        try {
            level = std::stoi(token);
        } catch (const std::exception&) {
            throw DomainError("bad level token '" + token + "'");
        }
        if (level > v) {
            throw DomainError("level " + token + " exceeds v=" + std::to_string(v));
        }
        profile.levels.push_back(Level::shown(level));
    }
    return profile;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

} // namespace detail

inline constexpr const char* kExactDesignHeader =
    "pair_id,shown_set,levels_i,levels_j,depth,replication";

/// Header row, then one row per replicated pair. Attributes in the shown set
/// are 1-based; not-shown levels are written as '-'.
inline void write_exact_design_csv(std::ostream& out, const ExactDesign& design) {
    out << kExactDesignHeader << "\r\n";
    for (const auto& e : design.entries) {
        out << e.pair_id << ',' << detail::format_shown_set(e.pair.first) << ','
            << detail::format_levels(e.pair.first) << ',' << detail::format_levels(e.pair.second)
            << ',' << e.depth << ',' << e.replication << "\r\n";
    }
}

inline ExactDesign read_exact_design_csv(std::istream& in, const DesignConfig& config) {
    config.validate();
    ExactDesign design{config, {}, 0};
    std::string line;
    if (!std::getline(in, line) || detail::split_csv_line(line) !=
                                       detail::split_csv_line(kExactDesignHeader)) {
        throw DomainError("exact design CSV is missing its header row");
    }
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 6) {
            throw DomainError("exact design CSV row needs 6 fields: " + line);
        }
        ExactDesignEntry e;
        try {
            e.pair_id = std::stoull(fields[0]);
            e.depth = std::stoi(fields[4]);
            e.replication = std::stoull(fields[5]);
        } catch (const std::logic_error&) {
            throw DomainError("exact design row has a non-numeric field: " + line);
        }
        e.pair.first = detail::parse_levels(fields[2], config.v);
        e.pair.second = detail::parse_levels(fields[3], config.v);
        if (e.pair.first.attribute_count() != config.K ||
            e.pair.second.attribute_count() != config.K) {
            throw DomainError("exact design row has the wrong attribute count: " + line);
        }
        if (e.depth < 1 || e.depth > config.S || e.pair.depth() != e.depth) {
            throw DomainError("exact design row has an inconsistent depth: " + line);
        }
        design.total += e.replication;
        design.entries.push_back(std::move(e));
    }
    if (design.total == 0) {
        throw DomainError("exact design CSV has no replicated pairs");
    }
    return design;
}

} // namespace pcd
