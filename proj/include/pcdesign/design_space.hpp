#pragma once

// Partial profiles, pair orbits X_d of fixed comparison depth, and the full
// regression vector of main effects plus interactions up to third order.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcdesign/effects_coding.hpp"
#include "pcdesign/errors.hpp"

namespace pcd {

inline constexpr int kMaxOrder = 4;
inline constexpr std::uint64_t kDefaultPairCap = 10'000'000;

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw std::overflow_error("integer overflow in combinatorial count");
    }
    return out;
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        // exact at every step: result * (n-k+i) is divisible by i
        result = checked_mul(result, static_cast<std::uint64_t>(n - k + i)) / i;
    }
    return result;
}

inline std::uint64_t ipow(std::uint64_t base, int exp) {
    std::uint64_t result = 1;
    for (int i = 0; i < exp; ++i) {
        result = checked_mul(result, base);
    }
    return result;
}

/// Problem instance: K attributes, profile strength S, v levels each.
struct DesignConfig {
    int K = 0;
    int S = 0;
    int v = 2;

    void validate() const {
        if (K < 1) {
            throw DomainError("attribute count K must be >= 1, got " + std::to_string(K));
        }
        if (S < 1 || S > K) {
            throw DomainError("profile strength S must satisfy 1 <= S <= K, got S=" +
                              std::to_string(S) + ", K=" + std::to_string(K));
        }
        if (v < 2) {
            throw DomainError("level count v must be >= 2, got " + std::to_string(v));
        }
    }

    /// Order-q effects (q=1 main, q=2 first-order, ...) need q shown attributes.
    bool identifiable(int q) const noexcept { return K >= q && S >= q; }

    bool fully_identifiable() const noexcept { return identifiable(kMaxOrder); }

    /// Number of order-q blocks, C(K,q).
    std::uint64_t block_count(int q) const { return binomial(K, q); }

    /// Side length (v-1)^q of one order-q block.
    std::uint64_t block_size(int q) const { return ipow(static_cast<std::uint64_t>(v - 1), q); }

    /// p_q = C(K,q) (v-1)^q.
    std::uint64_t param_dim(int q) const { return checked_mul(block_count(q), block_size(q)); }

    std::uint64_t param_dim() const {
        std::uint64_t p = 0;
        for (int q = 1; q <= kMaxOrder; ++q) {
            p += param_dim(q);
        }
        return p;
    }

    /// Offset of the first order-q entry in the regression vector.
    std::uint64_t block_offset(int q) const {
        std::uint64_t off = 0;
        for (int r = 1; r < q; ++r) {
            off += param_dim(r);
        }
        return off;
    }

    friend bool operator==(const DesignConfig&, const DesignConfig&) = default;
};

inline std::string to_string(const DesignConfig& c) {
    return "K=" + std::to_string(c.K) + " S=" + std::to_string(c.S) + " v=" + std::to_string(c.v);
}

/// One alternative: a level or the not-shown marker per attribute.
struct Profile {
    std::vector<Level> levels;

    std::vector<int> shown_set() const {
        std::vector<int> shown;
        for (int k = 0; k < static_cast<int>(levels.size()); ++k) {
            if (levels[k].is_shown()) {
                shown.push_back(k);
            }
        }
        return shown;
    }

    int attribute_count() const noexcept { return static_cast<int>(levels.size()); }

    friend bool operator==(const Profile&, const Profile&) = default;
    friend auto operator<=>(const Profile&, const Profile&) = default;
};

struct ProfilePair {
    Profile first;
    Profile second;

    /// Number of attributes in which the two alternatives differ.
    int depth() const {
        int d = 0;
        for (std::size_t k = 0; k < first.levels.size(); ++k) {
            d += first.levels[k] != second.levels[k] ? 1 : 0;
        }
        return d;
    }

    friend bool operator==(const ProfilePair&, const ProfilePair&) = default;
};

struct PairOrbit {
    int depth = 0;
    std::vector<ProfilePair> pairs;

    std::uint64_t size() const noexcept { return pairs.size(); }
};

/// N_d = C(K,S) C(S,d) v^S (v-1)^d ordered pairs of depth d.
inline std::uint64_t orbit_size(const DesignConfig& config, int d) {
    config.validate();
    if (d < 0 || d > config.S) {
        throw DomainError("comparison depth d must satisfy 0 <= d <= S, got " + std::to_string(d));
    }
    std::uint64_t n = checked_mul(binomial(config.K, config.S), binomial(config.S, d));
    n = checked_mul(n, ipow(config.v, config.S));
    return checked_mul(n, ipow(config.v - 1, d));
}

/// Floating-point N_d; used for weights where the exact count may overflow.
inline double orbit_size_real(const DesignConfig& config, int d) {
    config.validate();
    if (d < 0 || d > config.S) {
        throw DomainError("comparison depth d must satisfy 0 <= d <= S, got " + std::to_string(d));
    }
    return static_cast<double>(binomial(config.K, config.S)) *
           static_cast<double>(binomial(config.S, d)) * std::pow(config.v, config.S) *
           std::pow(config.v - 1, d);
}

namespace detail {

// Next k-subset of {0..n-1} in lexicographic order; false when exhausted.
inline bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (int j = i + 1; j < k; ++j) {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    return false;
}

// Next level tuple in 1..v^n, lexicographic; false when exhausted.
inline bool next_tuple(std::vector<int>& t, int v) {
    for (int i = static_cast<int>(t.size()) - 1; i >= 0; --i) {
        if (t[i] < v) {
            ++t[i];
            return true;
        }
        t[i] = 1;
    }
    return false;
}

// Visit all tuples j with exactly `diffs` positions differing from i, in
// lexicographic order of j.
template <typename Fn>
void visit_neighbours(const std::vector<int>& i, int v, int diffs, std::vector<int>& j, int pos,
                      Fn&& fn) {
    const int n = static_cast<int>(i.size());
    if (pos == n) {
        fn(j);
        return;
    }
    const int remaining = n - pos;
    for (int level = 1; level <= v; ++level) {
        const bool differs = level != i[pos];
        if (differs && diffs == 0) {
            continue;
        }
        if (!differs && diffs > remaining - 1) {
            continue;
        }
        j[pos] = level;
        visit_neighbours(i, v, differs ? diffs - 1 : diffs, j, pos + 1, fn);
    }
}

inline Profile make_profile(int K, const std::vector<int>& shown, const std::vector<int>& levels) {
    Profile p;
    p.levels.assign(K, Level::not_shown());
    for (std::size_t s = 0; s < shown.size(); ++s) {
        p.levels[shown[s]] = Level::shown(levels[s]);
    }
    return p;
}

} // namespace detail

/// Visit every ordered pair of depth d, ordered lexicographically by
/// (shown-set, first alternative, second alternative). No cap is applied.
template <typename Fn>
void for_each_pair(const DesignConfig& config, int d, Fn&& fn) {
    config.validate();
    if (d < 0 || d > config.S) {
        throw DomainError("comparison depth d must satisfy 0 <= d <= S, got " + std::to_string(d));
    }
    std::vector<int> shown(config.S);
    for (int s = 0; s < config.S; ++s) {
        shown[s] = s;
    }
    do {
        std::vector<int> first(config.S, 1);
        std::vector<int> second(config.S, 1);
        do {
            const Profile a = detail::make_profile(config.K, shown, first);
            detail::visit_neighbours(first, config.v, d, second, 0, [&](const std::vector<int>& j) {
                fn(ProfilePair{a, detail::make_profile(config.K, shown, j)});
            });
        } while (detail::next_tuple(first, config.v));
    } while (detail::next_combination(shown, config.K));
}

inline PairOrbit enumerate_pairs(const DesignConfig& config, int d,
                                 std::uint64_t cap = kDefaultPairCap) {
    if (d < 1 || d > config.S) {
        throw DomainError("comparison depth d must satisfy 1 <= d <= S, got " + std::to_string(d));
    }
    const std::uint64_t n = orbit_size(config, d);
    if (n > cap) {
        throw SizeError(n, cap);
    }
    PairOrbit orbit;
    orbit.depth = d;
    orbit.pairs.reserve(n);
    for_each_pair(config, d, [&](ProfilePair&& pair) { orbit.pairs.push_back(std::move(pair)); });
    return orbit;
}

/// f(i): main-effect blocks by attribute, then 2-, 3-, 4-subsets in
/// lexicographic order, each the Kronecker product of its attributes' codes
/// in increasing attribute index. Blocks touching a not-shown attribute are 0.
inline Vector regression_vector(const Profile& profile, const DesignConfig& config) {
    if (profile.attribute_count() != config.K) {
        throw DomainError("profile has " + std::to_string(profile.attribute_count()) +
                          " attributes, config expects K=" + std::to_string(config.K));
    }
    std::vector<Vector> codes;
    codes.reserve(config.K);
    for (const Level& level : profile.levels) {
        codes.push_back(code_level(level, config.v));
    }

    Vector f(static_cast<Eigen::Index>(config.param_dim()));
    Eigen::Index off = 0;
    for (int q = 1; q <= std::min(config.K, kMaxOrder); ++q) {
        const auto width = static_cast<Eigen::Index>(config.block_size(q));
        std::vector<int> subset(q);
        for (int s = 0; s < q; ++s) {
            subset[s] = s;
        }
        do {
            Vector block = codes[subset[0]];
            for (int s = 1; s < q; ++s) {
                block = kron(block, codes[subset[s]]);
            }
            f.segment(off, width) = block;
            off += width;
        } while (detail::next_combination(subset, config.K));
    }
    return f;
}

} // namespace pcd
