#include <cmath>
#include <numeric>
#include <vector>

#include "bss/error.hpp"
#include "bss/eval.hpp"
#include "bss/rng.hpp"
#include "doctest.h"

using namespace bss;

namespace {

Matrix random_sources(Index M, Index L, std::uint64_t seed) {
    RngStream rng(seed, 0);
    Matrix S(M, L);
    for (Index k = 0; k < S.size(); ++k) S.data()[k] = rng.uniform();
    return S;
}

Matrix swap_rows(const Matrix& S, Index a, Index b) {
    Matrix out = S;
    out.row(a) = S.row(b);
    out.row(b) = S.row(a);
    return out;
}

ChainTrace constant_trace(const Matrix& C, const Matrix& S, std::size_t n) {
    ChainTrace t;
    t.N = C.rows();
    t.M = C.cols();
    t.L = S.cols();
    SamplerState st;
    st.C = C;
    st.S = S;
    st.sigma2_e = Vector::Ones(C.rows());
    t.states.assign(n, st);
    return t;
}

}  // namespace

TEST_CASE("align_sources examples") {
    const Matrix S = random_sources(3, 40, 1);
    const AlignmentMap id = align_sources(S, S);
    CHECK(id.permutation == std::vector<int>{0, 1, 2});
    CHECK(id.scales == std::vector<double>{1.0, 1.0, 1.0});

    const AlignmentMap sw = align_sources(swap_rows(S, 0, 2), S);
    CHECK(sw.permutation == std::vector<int>{2, 1, 0});

    const AlignmentMap scaled = align_sources(2.0 * swap_rows(S, 0, 1), S, true);
    CHECK(scaled.permutation == std::vector<int>{1, 0, 2});
    for (double s : scaled.scales) CHECK(s == doctest::Approx(0.5).epsilon(1e-12));
    CHECK((apply_to_sources(2.0 * swap_rows(S, 0, 1), scaled) - S).cwiseAbs().maxCoeff() < 1e-12);

    const Matrix big = random_sources(9, 30, 2);
    CHECK_THROWS_AS(align_sources(big, big), InvalidArgument);
    CHECK(align_sources(big, big, false, true).permutation == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8});
    CHECK_THROWS_AS(align_sources(S, random_sources(2, 40, 3)), DimensionError);
}

TEST_CASE("align_sources: assignment with cross-correlated rows") {
    // every estimated row correlates with every reference row; only the joint
    // assignment is optimal
    const Matrix T = random_sources(4, 200, 4);
    Matrix E(4, 200);
    E.row(0) = T.row(1) + 0.3 * T.row(0);
    E.row(1) = T.row(2) + 0.1 * T.row(3);
    E.row(2) = T.row(0);
    E.row(3) = T.row(3) + 0.5 * T.row(1);
    const AlignmentMap m = align_sources(E, T);
    std::vector<int> sorted = m.permutation;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3});
    CHECK(m.permutation == std::vector<int>{2, 0, 1, 3});
}

TEST_CASE("apply_to_concentrations reorders columns") {
    Matrix C(2, 3);
    C << 0.1, 0.2, 0.7,
         0.5, 0.3, 0.2;
    AlignmentMap map{{2, 0, 1}, {3.0, 3.0, 3.0}};
    Matrix expected(2, 3);
    expected << 0.7, 0.1, 0.2,
                0.2, 0.5, 0.3;
    CHECK(apply_to_concentrations(C, map) == expected);
}

TEST_CASE("nmse") {
    const Matrix S = random_sources(3, 20, 5);
    CHECK(nmse(S, S) == 0.0);
    CHECK(nmse(Matrix::Zero(3, 20), S) == doctest::Approx(3.0));
    Matrix E = S;
    E(1, 3) += 0.1;
    const double expected = 0.01 / S.row(1).squaredNorm();
    CHECK(nmse(E, S) == doctest::Approx(expected).epsilon(1e-12));
    Matrix Z = S;
    Z.row(0).setZero();
    CHECK_THROWS_AS(nmse(S, Z), InvalidArgument);
}

TEST_CASE("dissimilarity") {
    const Matrix S = random_sources(2, 50, 6);
    const Vector s = S.row(0).transpose();
    const Vector affine = (-2.5 * s).array() + 4.0;
    CHECK(dissimilarity(as_span(affine), as_span(s)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
    const std::vector<double> a{1, -1, 1, -1};
    const std::vector<double> b{1, 1, -1, -1};
    CHECK(dissimilarity(a, b) == doctest::Approx(1.0));
    const std::vector<double> flat{2, 2, 2, 2};
    CHECK_THROWS_AS(dissimilarity(flat, b), InvalidArgument);
    CHECK(mean_dissimilarity(S, S) == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
}

TEST_CASE("metrics are invariant under the alignment permutation") {
    const Matrix T = random_sources(4, 60, 7);
    Matrix E = T + 0.05 * random_sources(4, 60, 8);
    const std::vector<int> perm{3, 1, 0, 2};
    Matrix Ep(4, 60);
    for (int m = 0; m < 4; ++m) Ep.row(perm[m]) = E.row(m);
    const AlignmentMap map = align_sources(Ep, T);
    const Matrix aligned = apply_to_sources(Ep, map);
    CHECK(aligned == E);
    CHECK(nmse(aligned, T) == nmse(E, T));
    CHECK(mean_dissimilarity(aligned, T) == mean_dissimilarity(E, T));
    const double d = mean_dissimilarity(aligned, T);
    CHECK((d >= 0.0 && d <= 1.0));
}

TEST_CASE("psrf") {
    std::vector<double> base(500);
    RngStream rng(9, 0);
    for (double& v : base) v = rng.normal();
    const std::vector<std::vector<double>> same(10, base);
    CHECK(psrf(same) == doctest::Approx(std::sqrt(1.0 - 1.0 / 500.0)).epsilon(1e-12));
    CHECK(psrf(same) < 1.0);

    std::vector<std::vector<double>> split(2, std::vector<double>(500));
    for (double& v : split[0]) v = rng.normal();
    for (double& v : split[1]) v = 10.0 + rng.normal();
    CHECK(psrf(split) > 1.2);
    CHECK(psrf(split, PsrfForm::Canonical) > 1.2);

    std::vector<std::vector<double>> iid(10, std::vector<double>(800));
    for (auto& c : iid) {
        for (double& v : c) v = rng.normal();
    }
    CHECK(psrf(iid) < 1.2);
    CHECK(psrf(iid, PsrfForm::Canonical) < 1.2);

    // hand example: chain means 0 and 2, unit within-chain variance, n = 3
    const std::vector<std::vector<double>> hand{{-1.0, 0.0, 1.0}, {1.0, 2.0, 3.0}};
    // B = 3 * 2 = 6, W = 1
    CHECK(psrf(hand) == doctest::Approx(std::sqrt((2.0 / 3.0) * (1.0 + 6.0 / 2.0))));
    CHECK(psrf(hand, PsrfForm::Canonical) == doctest::Approx(std::sqrt(2.0 / 3.0 + 3.0 / 6.0 * 6.0)));

    CHECK_THROWS_AS(psrf({base}), InvalidArgument);
    CHECK_THROWS_AS(psrf({base, std::vector<double>(10)}), InvalidArgument);
}

TEST_CASE("reconstruction error") {
    const Matrix S = random_sources(2, 30, 10);
    Matrix C(3, 2);
    C << 0.2, 0.8,
         0.5, 0.5,
         1.0, 0.0;
    const Matrix Y = C * S;
    const ChainTrace t = constant_trace(C, S, 10);
    CHECK(reconstruction_error(t, 3, Y, 2) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    const auto curve = reconstruction_error_curve(t, Y, 2);
    CHECK(curve.size() == 8);
    CHECK_THROWS_AS(reconstruction_error(t, 0, Y, 2), InvalidArgument);
    CHECK_THROWS_AS(reconstruction_error(t, 9, Y, 2), InvalidArgument);

    // at the truth with noise the error is the noise power
    RngStream rng(11, 0);
    const Matrix Sb = random_sources(2, 20000, 12);
    Matrix Yn = C * Sb;
    const double sigma = 0.1;
    for (Index k = 0; k < Yn.size(); ++k) Yn.data()[k] += sigma * rng.normal();
    const ChainTrace tn = constant_trace(C, Sb, 3);
    CHECK(reconstruction_error(tn, 1, Yn, 0) == doctest::Approx(sigma * sigma).epsilon(0.02));
}

TEST_CASE("histogram") {
    std::vector<double> v(1000);
    RngStream rng(13, 0);
    for (double& x : v) x = rng.normal();
    const Histogram h = histogram(v, 25);
    CHECK(h.counts.size() == 25);
    CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}) == 1000);
    CHECK(h.counts.back() >= 1);
    CHECK(h.counts.front() >= 1);
    const std::vector<double> flat(5, 2.0);
    CHECK(histogram(flat, 3).counts[0] == 5);
    CHECK_THROWS_AS(histogram(v, 0), InvalidArgument);
}
