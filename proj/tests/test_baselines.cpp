#include <cmath>
#include <vector>

#include "bss/baselines.hpp"
#include "bss/error.hpp"
#include "doctest.h"

using namespace bss;

namespace {

Matrix random_nonnegative(Index r, Index c, RngStream& rng) {
    Matrix m(r, c);
    for (Index k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform();
    return m;
}

}  // namespace

TEST_CASE("nmf: exact rank-one factorization") {
    RngStream rng(1, 0);
    const Matrix c = random_nonnegative(8, 1, rng);
    const Matrix s = random_nonnegative(1, 30, rng);
    const Matrix Y = c * s;
    const NmfResult r = nmf_factorize(Y, 1, 500, rng, 1);
    CHECK(std::sqrt(r.objective) / Y.norm() < 1e-6);
    CHECK(r.C.minCoeff() >= 0.0);
    CHECK(r.S.minCoeff() >= 0.0);
    CHECK(r.clamped_entries == 0);
}

TEST_CASE("nmf: objective never increases") {
    RngStream rng(2, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix Y = random_nonnegative(10, 20, rng);
        Matrix C = random_nonnegative(10, 3, rng);
        Matrix S = random_nonnegative(3, 20, rng);
        std::vector<double> history;
        nmf_update(Y, C, S, 200, &history);
        REQUIRE(history.size() == 401);
        for (std::size_t k = 1; k < history.size(); ++k) REQUIRE(history[k] <= history[k - 1] + 1e-10);
        CHECK(C.minCoeff() >= 0.0);
        CHECK(S.minCoeff() >= 0.0);
        CHECK(history.back() == doctest::Approx(nmf_objective(Y, C, S)));
    }
}

TEST_CASE("nmf: restarts keep the best objective, negatives are clamped") {
    RngStream rng(3, 0);
    Matrix Y = random_nonnegative(6, 15, rng);
    Y(0, 0) = -0.5;
    Y(2, 3) = -0.1;
    RngStream a(4, 0), b(4, 0);
    const NmfResult one = nmf_factorize(Y, 2, 100, a, 1);
    const NmfResult many = nmf_factorize(Y, 2, 100, b, 5);
    CHECK(many.objective <= one.objective);
    CHECK(many.clamped_entries == 2);
    CHECK(many.best_restart < 5);
    CHECK_THROWS_AS(nmf_factorize(Y, 2, 0, a), InvalidArgument);
    Matrix C = many.C, S = many.S;
    CHECK_THROWS_AS(nmf_update(Y, C, S, 0), InvalidArgument);
    CHECK_THROWS_AS(nmf_factorize(Y, 0, 10, a), InvalidArgument);
}

TEST_CASE("nmf: deterministic for a given stream") {
    RngStream rng(5, 0);
    const Matrix Y = random_nonnegative(5, 12, rng);
    RngStream a(6, 2), b(6, 2);
    const NmfResult x = nmf_factorize(Y, 2, 50, a, 3);
    const NmfResult y = nmf_factorize(Y, 2, 50, b, 3);
    CHECK(x.C == y.C);
    CHECK(x.S == y.S);
}

TEST_CASE("rescale_full_additivity") {
    Matrix C(3, 2);
    C << 0.25, 0.75,
         2.0, 2.0,
         0.0, 3.0;
    const Matrix S = Matrix::Ones(2, 4);
    const Rescaled r = rescale_full_additivity(C, S);
    CHECK(r.C(0, 0) == 0.25);
    CHECK(r.C(0, 1) == 0.75);
    CHECK(r.C(1, 0) == 0.5);
    CHECK(r.C(1, 1) == 0.5);
    CHECK(r.C(2, 1) == 1.0);
    CHECK(r.S == S);
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(r.C.row(i).sum() - 1.0) <= 1e-12);

    RngStream rng(7, 0);
    const Matrix R = random_nonnegative(50, 5, rng);
    const Rescaled rr = rescale_full_additivity(R, S);
    for (Index i = 0; i < 50; ++i) CHECK(std::abs(rr.C.row(i).sum() - 1.0) <= 1e-12);

    C.row(1).setZero();
    CHECK_THROWS_AS(rescale_full_additivity(C, S), InvalidArgument);
}
