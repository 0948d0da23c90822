#include <algorithm>
#include <initializer_list>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "plseg/matrix.hpp"

using plseg::Matrix;

namespace {

Matrix make(std::size_t r, std::size_t c, std::initializer_list<double> vals) {
    Matrix m(r, c);
    std::copy(vals.begin(), vals.end(), m.data.begin());
    return m;
}

}  // namespace

TEST_CASE("matmul computes the ordinary product") {
    const Matrix a = make(2, 3, {1, 2, 3, 4, 5, 6});
    const Matrix b = make(3, 2, {7, 8, 9, 10, 11, 12});
    const Matrix c = plseg::matmul(a, b);
    REQUIRE(c.rows == 2);
    REQUIRE(c.cols == 2);
    CHECK(c(0, 0) == 58);
    CHECK(c(0, 1) == 64);
    CHECK(c(1, 0) == 139);
    CHECK(c(1, 1) == 154);
}

TEST_CASE("matmul_at_b equals transpose-then-multiply") {
    const Matrix a = make(3, 2, {1, 4, 2, 5, 3, 6});  // A^T is 2x3 {1,2,3;4,5,6}
    const Matrix b = make(3, 2, {7, 8, 9, 10, 11, 12});
    const Matrix c = plseg::matmul_at_b(a, b);
    REQUIRE(c.rows == 2);
    REQUIRE(c.cols == 2);
    CHECK(c(0, 0) == 1 * 7 + 2 * 9 + 3 * 11);
    CHECK(c(0, 1) == 1 * 8 + 2 * 10 + 3 * 12);
    CHECK(c(1, 0) == 4 * 7 + 5 * 9 + 6 * 11);
    CHECK(c(1, 1) == 4 * 8 + 5 * 10 + 6 * 12);
}

TEST_CASE("matmul_a_bt equals multiply-by-transpose") {
    const Matrix a = make(2, 3, {1, 2, 3, 4, 5, 6});
    const Matrix b = make(2, 3, {7, 9, 11, 8, 10, 12});  // B^T is 3x2 {7,8;9,10;11,12}
    const Matrix c = plseg::matmul_a_bt(a, b);
    REQUIRE(c.rows == 2);
    REQUIRE(c.cols == 2);
    CHECK(c(0, 0) == 58);
    CHECK(c(0, 1) == 64);
    CHECK(c(1, 0) == 139);
    CHECK(c(1, 1) == 154);
}

TEST_CASE("random product identities agree across the three kernels") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng() % 6, k = 1 + rng() % 6, m = 1 + rng() % 6;
        Matrix a(n, k), b(k, m);
        for (double& v : a.data) v = dist(rng);
        for (double& v : b.data) v = dist(rng);

        Matrix at(k, n), bt(m, k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < k; ++j) at(j, i) = a(i, j);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < m; ++j) bt(j, i) = b(i, j);

        const Matrix ref = plseg::matmul(a, b);
        const Matrix via_atb = plseg::matmul_at_b(at, b);
        const Matrix via_abt = plseg::matmul_a_bt(a, bt);
        REQUIRE(via_atb.same_shape(ref));
        REQUIRE(via_abt.same_shape(ref));
        for (std::size_t i = 0; i < ref.data.size(); ++i) {
            CHECK(via_atb.data[i] == Catch::Approx(ref.data[i]).margin(1e-12));
            CHECK(via_abt.data[i] == Catch::Approx(ref.data[i]).margin(1e-12));
        }
    }
}

TEST_CASE("dimension mismatches throw") {
    const Matrix a(2, 3), b(2, 3);
    CHECK_THROWS_AS(plseg::matmul(a, b), std::invalid_argument);
    CHECK_THROWS_AS(plseg::matmul_at_b(a, Matrix(3, 2)), std::invalid_argument);
    CHECK_THROWS_AS(plseg::matmul_a_bt(a, Matrix(2, 4)), std::invalid_argument);
}
