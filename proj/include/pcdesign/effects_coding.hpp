#pragma once

// Effects-type coding of attribute levels and the one-way layout matrices.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "pcdesign/errors.hpp"

namespace pcd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Level of one attribute in a profile: 1..v, or the "not shown" marker.
class Level {
public:
    static constexpr Level not_shown() noexcept { return Level(kNotShown); }

    static Level shown(int index) {
        if (index < 1) {
            throw DomainError("level index must be >= 1, got " + std::to_string(index));
        }
        return Level(index);
    }

    constexpr bool is_shown() const noexcept { return value_ != kNotShown; }

    int index() const {
        if (!is_shown()) {
            throw DomainError("level index requested for a not-shown attribute");
        }
        return value_;
    }

    friend constexpr bool operator==(Level, Level) noexcept = default;
    friend constexpr auto operator<=>(Level, Level) noexcept = default;

private:
    static constexpr int kNotShown = -1;
    constexpr explicit Level(int value) noexcept : value_(value) {}
    int value_;
};

/// Coding vector f(i) of length v-1: unit vector e_i for i < v, all -1 for
/// i = v, zero for a not-shown attribute. Levels sum to zero over 1..v.
inline Vector code_level(Level level, int v) {
    if (v < 2) {
        throw DomainError("level count v must be >= 2, got " + std::to_string(v));
    }
    Vector code = Vector::Zero(v - 1);
    if (!level.is_shown()) {
        return code;
    }
    const int i = level.index();
    if (i > v) {
        throw DomainError("level index " + std::to_string(i) + " out of range 1.." +
                          std::to_string(v));
    }
    if (i == v) {
        code.setConstant(-1.0);
    } else {
        code(i - 1) = 1.0;
    }
    return code;
}

struct OneWayInfo {
    int v = 2;
    Matrix M;      ///< 2/(v-1) (I + 11^T)
    Matrix M_inv;  ///< (v-1)/2 (I - 11^T / v)

    /// det M = (2/(v-1))^(v-1) * v, from the spectrum of I + 11^T.
    double log_det() const {
        const double n = v - 1;
        return n * std::log(2.0 / n) + std::log(static_cast<double>(v));
    }
};

inline OneWayInfo oneway_info(int v) {
    if (v < 2) {
        throw DomainError("level count v must be >= 2, got " + std::to_string(v));
    }
    const int n = v - 1;
    const Matrix ones = Matrix::Ones(n, n);
    const Matrix id = Matrix::Identity(n, n);
    OneWayInfo info;
    info.v = v;
    info.M = (2.0 / n) * (id + ones);
    info.M_inv = (n / 2.0) * (id - ones / static_cast<double>(v));
    return info;
}

/// q-fold Kronecker power A ⊗ ... ⊗ A, with the leftmost factor slowest.
inline Matrix kron_power(const Matrix& A, int q) {
    if (q < 1 || q > 4) {
        throw DomainError("Kronecker order must be in 1..4, got " + std::to_string(q));
    }
    Matrix result = A;
    for (int k = 1; k < q; ++k) {
        Matrix next(result.rows() * A.rows(), result.cols() * A.cols());
        for (Eigen::Index r = 0; r < result.rows(); ++r) {
            for (Eigen::Index c = 0; c < result.cols(); ++c) {
                next.block(r * A.rows(), c * A.cols(), A.rows(), A.cols()) = result(r, c) * A;
            }
        }
        result = std::move(next);
    }
    return result;
}

/// Kronecker product of two column vectors; same index convention as kron_power.
inline Vector kron(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

} // namespace pcd
