#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pcdesign/effects_coding.hpp"

using namespace pcd;

namespace {

Vector kron4(const Vector& a, const Vector& b, const Vector& c, const Vector& d) {
    return kron(kron(kron(a, b), c), d);
}

} // namespace

TEST(CodeLevel, BinaryCoding) {
    EXPECT_EQ(code_level(Level::shown(1), 2), (Vector(1) << 1.0).finished());
    EXPECT_EQ(code_level(Level::shown(2), 2), (Vector(1) << -1.0).finished());
}

TEST(CodeLevel, LastLevelIsAllMinusOne) {
    EXPECT_EQ(code_level(Level::shown(3), 3), (Vector(2) << -1.0, -1.0).finished());
    EXPECT_EQ(code_level(Level::shown(2), 3), (Vector(2) << 0.0, 1.0).finished());
}

TEST(CodeLevel, NotShownIsZero) {
    EXPECT_EQ(code_level(Level::not_shown(), 5), Vector::Zero(4));
}

TEST(CodeLevel, InvalidInputs) {
    EXPECT_THROW(code_level(Level::shown(4), 3), DomainError);
    EXPECT_THROW(code_level(Level::shown(1), 1), DomainError);
    EXPECT_THROW(Level::shown(0), DomainError);
    EXPECT_THROW(Level::not_shown().index(), DomainError);
    EXPECT_NE(Level::not_shown(), Level::shown(1));
}

TEST(CodeLevel, CodesSumToZero) {
    for (int v = 2; v <= 8; ++v) {
        Vector sum = Vector::Zero(v - 1);
        for (int i = 1; i <= v; ++i) {
            sum += code_level(Level::shown(i), v);
        }
        EXPECT_EQ(sum, Vector::Zero(v - 1)) << "v=" << v;
    }
}

TEST(OneWayInfo, SmallCases) {
    EXPECT_EQ(oneway_info(2).M, (Matrix(1, 1) << 4.0).finished());
    EXPECT_EQ(oneway_info(3).M, (Matrix(2, 2) << 2.0, 1.0, 1.0, 2.0).finished());
    EXPECT_NEAR(oneway_info(3).M.determinant(), 3.0, 1e-12);
    EXPECT_THROW(oneway_info(1), DomainError);
}

TEST(OneWayInfo, InverseAndDeterminant) {
    for (int v = 2; v <= 8; ++v) {
        const OneWayInfo info = oneway_info(v);
        EXPECT_LE((info.M * info.M_inv - Matrix::Identity(v - 1, v - 1)).cwiseAbs().maxCoeff(),
                  1e-12);
        EXPECT_NEAR(info.log_det(), std::log(info.M.determinant()), 1e-12) << "v=" << v;
    }
}

// Outer-product sums over levels reproduce the one-way information matrix.
TEST(OneWayInfo, LevelSumIdentities) {
    for (int v = 2; v <= 8; ++v) {
        const Matrix M = oneway_info(v).M;
        Matrix same = Matrix::Zero(v - 1, v - 1);
        Matrix cross = Matrix::Zero(v - 1, v - 1);
        for (int i = 1; i <= v; ++i) {
            const Vector fi = code_level(Level::shown(i), v);
            for (int j = 1; j <= v; ++j) {
                const Vector fj = code_level(Level::shown(j), v);
                (i == j ? same : cross) += fi * fj.transpose();
            }
        }
        EXPECT_LE((same - 0.5 * (v - 1) * M).cwiseAbs().maxCoeff(), 1e-12) << "v=" << v;
        EXPECT_LE((cross + 0.5 * (v - 1) * M).cwiseAbs().maxCoeff(), 1e-12) << "v=" << v;
    }
}

TEST(OneWayInfo, QuadraticForms) {
    for (int v = 2; v <= 8; ++v) {
        const Matrix Minv = oneway_info(v).M_inv;
        for (int i = 1; i <= v; ++i) {
            const Vector fi = code_level(Level::shown(i), v);
            for (int j = 1; j <= v; ++j) {
                const Vector fj = code_level(Level::shown(j), v);
                const double expected =
                    i == j ? (v - 1.0) * (v - 1.0) / (2.0 * v) : -(v - 1.0) / (2.0 * v);
                EXPECT_NEAR(fi.dot(Minv * fj), expected, 1e-12);
            }
        }
    }
}

TEST(KronPower, Examples) {
    const Matrix m2 = oneway_info(2).M;
    EXPECT_EQ(kron_power(m2, 3), (Matrix(1, 1) << 64.0).finished());

    const Matrix m3 = oneway_info(3).M;
    const Matrix k2 = kron_power(m3, 2);
    ASSERT_EQ(k2.rows(), 4);
    EXPECT_EQ(k2(0, 0), 4.0);
    EXPECT_EQ(k2(0, 1), 2.0);
    EXPECT_EQ(k2(1, 2), 1.0);
    EXPECT_EQ(k2(3, 3), 4.0);
    EXPECT_EQ(kron_power(m3, 1), m3);
    EXPECT_EQ(kron_power(m3, 4).rows(), 16);
    EXPECT_THROW(kron_power(m3, 0), DomainError);
    EXPECT_THROW(kron_power(m3, 5), DomainError);
}

TEST(KronPower, MixedProductWithVectors) {
    const Matrix A = oneway_info(4).M;
    const Vector a = code_level(Level::shown(2), 4);
    const Vector b = code_level(Level::shown(4), 4);
    EXPECT_NEAR(kron(a, b).dot(kron_power(A, 2) * kron(a, b)), a.dot(A * a) * b.dot(A * b),
                1e-12);
}

// Quadratic form of a four-attribute interaction difference under
// (M^{-1})^{⊗4}, by number of differing attributes, over random levels.
TEST(OneWayInfo, FourWayDifferenceCases) {
    std::mt19937 rng(20240917);
    for (int v = 2; v <= 5; ++v) {
        const Matrix Minv4 = kron_power(oneway_info(v).M_inv, 4);
        const double n = v - 1.0;
        const double v3 = 8.0 * v * v * v;
        const double expected[5] = {
            0.0,
            std::pow(n, 7) / v3,
            std::pow(n, 6) * (v - 2.0) / v3,
            std::pow(n, 5) * (v * v - 3.0 * v + 3.0) / v3,
            std::pow(n, 4) * (v * v * v - 4.0 * v * v + 6.0 * v - 4.0) / v3,
        };
        std::uniform_int_distribution<int> level(1, v);
        std::uniform_int_distribution<int> shift(1, v - 1);
        for (int differing = 1; differing <= 4; ++differing) {
            for (int trial = 0; trial < 25; ++trial) {
                int a[4];
                int b[4];
                for (int k = 0; k < 4; ++k) {
                    a[k] = level(rng);
                    b[k] = k < differing ? (a[k] - 1 + shift(rng)) % v + 1 : a[k];
                }
                auto f = [&](const int* l) {
                    return kron4(code_level(Level::shown(l[0]), v), code_level(Level::shown(l[1]), v),
                                 code_level(Level::shown(l[2]), v), code_level(Level::shown(l[3]), v));
                };
                const Vector diff = f(a) - f(b);
                EXPECT_NEAR(diff.dot(Minv4 * diff), expected[differing], 1e-9)
                    << "v=" << v << " differing=" << differing;
            }
        }
    }
}
