#include <doctest.h>

#include <cmath>
#include <limits>

#include "plucker/core.hpp"
#include "plucker/lmpc.hpp"
#include "test_support.hpp"

using namespace plucker;

TEST_CASE("RealVec rejects non-finite components and short vectors") {
    CHECK_THROWS_AS(RealVec({1.0, std::numeric_limits<double>::quiet_NaN(), 0.0}),
                    InvalidInputError);
    CHECK_THROWS_AS(RealVec({std::numeric_limits<double>::infinity(), 0.0}), InvalidInputError);
    CHECK_THROWS_AS(RealVec({1.0}), DimensionError);
    CHECK_NOTHROW(RealVec({1.0, 2.0}));
    CHECK(RealVec::zeros(4).dim() == 4);
}

TEST_CASE("VecPair requires equal dimensions") {
    CHECK_THROWS_AS(VecPair(RealVec{1, 0, 0}, RealVec{1, 0}), DimensionError);
    CHECK(VecPair(RealVec{1, 0, 0}, RealVec{0, 1, 0}).dim() == 3);
}

TEST_CASE("klein_residual") {
    CHECK(klein_residual(RealVec{1, 0, 0}, RealVec{0, 1, 0}) == 0.0);
    CHECK(klein_residual(RealVec{1, 1, 1}, RealVec{1, 1, 1}) == 3.0);
    // Rounded LMPC output for a = (1,0,0), b = (1,1,0).
    CHECK(std::abs(klein_residual(RealVec{0.72361, -0.44721, 0}, RealVec{0.72361, 1.17082, 0})) <
          1e-5);
    CHECK_THROWS_AS(klein_residual(RealVec{1, 0, 0}, RealVec{1, 0}), DimensionError);
}

TEST_CASE("objective") {
    const VecPair in{RealVec{1, 0, 0}, RealVec{0, 1, 0}};
    CHECK(objective(in, in.a(), in.b()) == 0.0);
    CHECK(objective(in, RealVec::zeros(3), RealVec::zeros(3)) == 2.0);
    const VecPair in2{RealVec{1, 0, 0}, RealVec{1, 1, 0}};
    CHECK(objective(in2, RealVec::zeros(3), RealVec::zeros(3)) == 3.0);
    CHECK_THROWS_AS(objective(in, RealVec{1, 0}, RealVec{0, 1}), DimensionError);
}

TEST_CASE("klein_residual is bilinear and objective(0, 0) equals q") {
    Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const VecPair in = test::uniform_pair(rng, 2 + static_cast<std::size_t>(i % 6));
        const double c = 10.0 * rng.normal();
        const double base = klein_residual(in.a(), in.b());
        const double scaled = klein_residual(in.a().scaled(c), in.b());
        CHECK(std::abs(scaled - c * base) <=
              1e-12 * std::max(1.0, std::abs(c) * in.a().norm() * in.b().norm()));

        const double q = in.a().squared_norm() + in.b().squared_norm();
        const auto zero = RealVec::zeros(in.dim());
        CHECK(objective(in, zero, zero) == doctest::Approx(q).epsilon(1e-15));
        CHECK(objective(in, in.b(), in.a()) >= 0.0);
    }
}

TEST_CASE("PluckerLine validates the relative Klein residual") {
    CHECK_NOTHROW(PluckerLine(RealVec{1, 0, 0}, RealVec{0, 2, 3}));
    CHECK_THROWS_AS(PluckerLine(RealVec{1, 0, 0}, RealVec{1e-3, 2, 3}), InvalidInputError);
    // Relative bound: 1e-9 * (1 + |u||v|) allows a larger absolute residual for long vectors.
    CHECK_NOTHROW(PluckerLine(RealVec{1e3, 0, 0}, RealVec{1e-9, 1e3, 0}));
    CHECK_THROWS_AS(PluckerLine(RealVec{1, 0, 0, 0}, RealVec{0, 1, 0, 0}), DimensionError);
    CHECK_THROWS_AS(PluckerLine(RealVec{1, 0, 0}, RealVec{0, 1, 0}, -1.0), InvalidInputError);

    const VecPair in{RealVec{0.3, -1.2, 0.7}, RealVec{2.0, 0.1, 0.4}};
    const PluckerLine line = PluckerLine::from_correction(correct_lmpc(in));
    CHECK(std::abs(klein_residual(line.direction(), line.moment())) < 1e-12);
}

TEST_CASE("Matrix basics") {
    const Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
    const Matrix at = a.transposed();
    CHECK(at.rows() == 3);
    CHECK(at(2, 1) == 6);
    const Matrix g = a * at;
    CHECK(g(0, 0) == 14);
    CHECK(g(0, 1) == 32);
    CHECK(g(1, 1) == 77);
    CHECK((a - a).frobenius_norm() == 0.0);
    CHECK(Matrix(2, 2, {3, 0, 0, 4}).frobenius_norm() == 5.0);
    CHECK_THROWS_AS(a * a, DimensionError);
    CHECK_THROWS_AS(Matrix(2, 2, {1, 2, 3}), DimensionError);
}

TEST_CASE("method names round-trip") {
    for (Method m : {Method::LMPC, Method::BS, Method::BS_LSVD, Method::BS_ITER}) {
        CHECK(parse_method(to_string(m)) == m);
    }
    CHECK(parse_method("BS_LSVD") == Method::BS_LSVD);
    CHECK_FALSE(parse_method("svd").has_value());
}
