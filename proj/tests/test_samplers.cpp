#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "bss/error.hpp"
#include "bss/samplers.hpp"
#include "bss/trunc_normal_constants.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bss;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMillion = 1000000;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

template <typename Draw>
std::vector<double> draws(int n, Draw draw) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (double& x : out) x = draw();
    return out;
}

test::CdfTable trunc_normal_table(double mu, double sigma, double lo, double hi) {
    const double a = std::isinf(lo) ? mu - 12.0 * sigma : lo;
    double b = std::isinf(hi) ? std::max(a, mu) + 12.0 * sigma : hi;
    // far in the upper tail the density decays on the scale sigma^2 / (a - mu)
    if (std::isinf(hi) && a > mu) b = std::min(b, a + 30.0 * sigma * sigma / (a - mu));
    const double peak = std::clamp(mu, a, b);
    auto log_f = [=](double x) { return -0.5 * (x - mu) * (x - mu) / (sigma * sigma); };
    return test::CdfTable([=](double x) { return std::exp(log_f(x) - log_f(peak)); }, a, b, 2000);
}

}  // namespace

TEST_CASE("sample_gamma") {
    RngStream rng(1, 0);
    const auto e = draws(kMillion, [&] { return sample_gamma(1.0, 1.0, rng); });
    CHECK(mean_of(e) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(variance_of(e) == doctest::Approx(1.0).epsilon(0.02));

    const auto wide = draws(kMillion, [&] { return sample_gamma(2.0, 1e-2, rng); });
    CHECK(mean_of(wide) == doctest::Approx(200.0).epsilon(0.01));

    const auto g = draws(kMillion, [&] { return sample_gamma(3.7, 2.2, rng); });
    const test::CdfTable cdf([](double x) { return std::pow(x, 2.7) * std::exp(-2.2 * x); }, 0.0, 25.0);
    CHECK(test::ks_distance(g, cdf) < 0.002);

    CHECK_THROWS_AS(sample_gamma(0.0, 1.0, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_gamma(1.0, -1.0, rng), InvalidArgument);
}

TEST_CASE("sample_inv_gamma") {
    RngStream rng(2, 0);
    const auto x = draws(kMillion, [&] { return sample_inv_gamma(3.0, 3.0, rng); });
    CHECK(mean_of(x) == doctest::Approx(1.5).epsilon(0.01));
    // shape 2 has infinite variance; its mean converges slowly but is checked with a wider band
    const auto heavy = draws(kMillion, [&] { return sample_inv_gamma(2.0, 3.0, rng); });
    CHECK(mean_of(heavy) == doctest::Approx(3.0).epsilon(0.03));
    const auto noise = draws(kMillion, [&] { return sample_inv_gamma((2.0 + 1000.0) / 2.0, 1.0, rng); });
    CHECK(mean_of(noise) == doctest::Approx(1.0 / 500.0).epsilon(0.01));

    RngStream a(5, 1), b(5, 1);
    for (int k = 0; k < 1000; ++k) REQUIRE(sample_inv_gamma(2.5, 0.7, a) == 1.0 / sample_gamma(2.5, 0.7, b));
    CHECK_THROWS_AS(sample_inv_gamma(1.0, 0.0, rng), InvalidArgument);
}

TEST_CASE("sample_dirichlet") {
    RngStream rng(3, 0);
    const std::vector<double> flat{1, 1, 1};
    std::vector<double> sum(3, 0.0);
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const auto c = sample_dirichlet(flat, rng);
        double total = 0.0;
        for (int m = 0; m < 3; ++m) {
            REQUIRE(c[m] >= 0.0);
            sum[m] += c[m];
            total += c[m];
        }
        REQUIRE(std::abs(total - 1.0) <= 1e-12);
    }
    for (double s : sum) CHECK(s / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));

    const std::vector<double> one{1.0};
    CHECK(sample_dirichlet(one, rng) == std::vector<double>{1.0});

    const std::vector<double> two{2, 5};
    double first = 0.0;
    for (int k = 0; k < n; ++k) first += sample_dirichlet(two, rng)[0];
    CHECK(first / n == doctest::Approx(2.0 / 7.0).epsilon(0.01));

    const std::vector<double> bad{1.0, 0.0};
    CHECK_THROWS_AS(sample_dirichlet(bad, rng), InvalidArgument);
}

TEST_CASE("sample_trunc_normal: reference cases") {
    RngStream rng(4, 0);
    const auto half = draws(kMillion, [&] { return sample_trunc_normal(0.0, 1.0, 0.0, kInf, rng); });
    for (double x : half) REQUIRE(x >= 0.0);
    CHECK(mean_of(half) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(0.01));

    const auto plain = draws(kMillion, [&] { return sample_trunc_normal(0.0, 1.0, -kInf, kInf, rng); });
    CHECK(test::ks_distance(plain, normal_cdf) < 0.002);

    const auto tail = draws(kMillion, [&] { return sample_trunc_normal(-10.0, 1.0, 0.0, kInf, rng); });
    for (double x : tail) REQUIRE(x >= 0.0);
    const auto table = trunc_normal_table(-10.0, 1.0, 0.0, 3.0);
    CHECK(mean_of(tail) == doctest::Approx(table.mean()).epsilon(0.01));
}

TEST_CASE("sample_trunc_normal: moments match quadrature in every regime") {
    struct Case { double mu, sigma, lo, hi; };
    const std::vector<Case> cases{
        {0.0, 1.0, -0.3, 0.2},     // narrow, central
        {0.0, 2.0, -1.0, 5.0},     // central
        {0.0, 1.0, 0.5, 1.0},      // tail, uniform proposal
        {0.0, 1.0, 2.0, 6.0},      // tail, exponential proposal
        {1.0, 0.5, -kInf, -1.0},   // mirrored tail
        {3.0, 1.0, 40.0 + 3.0, kInf},
        {-2.0, 0.1, -1.0, -0.5},
    };
    RngStream rng(5, 0);
    for (const Case& c : cases) {
        CAPTURE(c.mu);
        CAPTURE(c.lo);
        CAPTURE(c.hi);
        const auto x = draws(kMillion, [&] { return sample_trunc_normal(c.mu, c.sigma, c.lo, c.hi, rng); });
        for (double v : x) REQUIRE((v >= c.lo && v <= c.hi));
        const auto table = trunc_normal_table(c.mu, c.sigma, c.lo, c.hi);
        const double sd = std::sqrt(table.variance());
        CHECK(std::abs(mean_of(x) - table.mean()) <= 0.01 * std::max(std::abs(table.mean()), sd));
        CHECK(variance_of(x) == doctest::Approx(table.variance()).epsilon(0.01));
        CHECK(test::ks_distance(x, table) < 0.005);
    }
}

TEST_CASE("sample_trunc_normal: support on random intervals and invalid input") {
    RngStream rng(6, 0);
    for (int rep = 0; rep < 20000; ++rep) {
        const double mu = 20.0 * rng.uniform() - 10.0;
        const double sigma = 0.01 + 3.0 * rng.uniform();
        double lo = 20.0 * rng.uniform() - 10.0;
        double hi = lo + 1e-3 + 5.0 * rng.uniform();
        if (rep % 7 == 0) lo = -kInf;
        if (rep % 11 == 0) hi = kInf;
        const double x = sample_trunc_normal(mu, sigma, lo, hi, rng);
        REQUIRE(x >= lo);
        REQUIRE(x <= hi);
    }
    CHECK_THROWS_AS(sample_trunc_normal(0.0, 1.0, 1.0, 1.0, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_trunc_normal(0.0, 0.0, 0.0, 1.0, rng), InvalidArgument);
    CHECK(trunc_normal::kTailStart > 0.0);
}

TEST_CASE("sample_truncated_gamma") {
    RngStream rng(7, 0);
    struct Case { double shape, rate, lo, hi; };
    // the last three put the interval so far into a tail that the CDF underflows
    for (const Case& c : {Case{2.0, 1.0, 0.5, 3.0}, Case{30.0, 0.1, 1e-8, 1.0}, Case{1.5, 1e4, 0.5, 2.0},
                          Case{200.0, 1.0, 0.5, 2.0}, Case{0.5, 1e3, 2.0, kInf}}) {
        const auto x = draws(200000, [&] { return sample_truncated_gamma(c.shape, c.rate, c.lo, c.hi, rng); });
        for (double v : x) REQUIRE((v >= c.lo && v <= c.hi));
        const double mode = std::max(c.shape - 1.0, 0.0) / c.rate;
        const double b = std::min(c.hi, std::max(c.lo, mode) + 30.0 * (std::sqrt(c.shape) + 1.0) / c.rate);
        const double peak = std::clamp(mode, c.lo, b);
        auto log_f = [&](double s) { return (c.shape - 1.0) * std::log(s) - c.rate * s; };
        const test::CdfTable table([&](double s) { return std::exp(log_f(s) - log_f(peak)); }, c.lo, b);
        CAPTURE(c.shape);
        CAPTURE(c.rate);
        CHECK(test::ks_distance(x, table) < 0.005);
    }
    CHECK_THROWS_AS(sample_truncated_gamma(1.0, 1.0, 2.0, 1.0, rng), InvalidArgument);
}

TEST_CASE("sample_exponential") {
    RngStream rng(8, 0);
    const auto x = draws(kMillion, [&] { return sample_exponential(4.0, rng); });
    CHECK(mean_of(x) == doctest::Approx(0.25).epsilon(0.01));
    CHECK(test::ks_distance(x, [](double v) { return 1.0 - std::exp(-4.0 * v); }) < 0.002);
}

TEST_CASE("auto_simplex_strategy") {
    CHECK(auto_simplex_strategy(2) == SimplexStrategy::JointMH);
    CHECK(auto_simplex_strategy(4) == SimplexStrategy::JointMH);
    CHECK(auto_simplex_strategy(5) == SimplexStrategy::CoordinateGibbs);
    CHECK(auto_simplex_strategy(3, 2) == SimplexStrategy::CoordinateGibbs);
    CHECK_THROWS_AS(auto_simplex_strategy(3, 1), InvalidArgument);
}

TEST_CASE("simplex Gaussian: scalar case matches quadrature") {
    for (const double mu : {0.5, 0.05, 0.97}) {
        const test::CdfTable table(
            [=](double a) { return std::exp(-0.5 * (a - mu) * (a - mu) / 0.01); }, 0.0, 1.0);
        for (auto strategy : {SimplexStrategy::JointMH, SimplexStrategy::CoordinateGibbs}) {
            RngStream rng(9, static_cast<std::uint64_t>(strategy));
            const auto g = SimplexGaussian::from_covariance(Vector::Constant(1, mu),
                                                            Eigen::MatrixXd::Constant(1, 1, 0.01));
            Vector a = Vector::Constant(1, 0.5);
            std::vector<double> x;
            for (int k = 0; k < 400000; ++k) {
                a = g.sample(a, strategy, rng).value;
                REQUIRE(a[0] >= 0.0);
                REQUIRE(a[0] <= 1.0);
                x.push_back(a[0]);
            }
            CAPTURE(mu);
            CHECK(mean_of(x) == doctest::Approx(table.mean()).epsilon(0.01));
        }
    }
}

TEST_CASE("simplex Gaussian: joint proposals deep inside are always accepted") {
    RngStream rng(10, 0);
    Vector mean(2);
    mean << 0.3, 0.3;
    const auto g = SimplexGaussian::from_covariance(mean, 1e-6 * Eigen::MatrixXd::Identity(2, 2));
    Vector a = mean;
    int accepted = 0;
    for (int k = 0; k < 10000; ++k) {
        const auto d = g.sample(a, SimplexStrategy::JointMH, rng);
        accepted += d.accepted;
        a = d.value;
    }
    CHECK(accepted == 10000);
}

TEST_CASE("simplex Gaussian: strategies agree on random targets") {
    RngStream setup(11, 0);
    for (int rep = 0; rep < 4; ++rep) {
        Vector mean(2);
        mean << 0.6 * setup.uniform(), 0.6 * setup.uniform();
        Eigen::MatrixXd B(2, 2);
        B << setup.normal(), setup.normal(), setup.normal(), setup.normal();
        const Eigen::MatrixXd cov = 0.05 * (B * B.transpose() + 0.2 * Eigen::MatrixXd::Identity(2, 2));
        const auto g = SimplexGaussian::from_covariance(mean, cov);
        std::vector<test::BatchMean> means[2];
        for (auto strategy : {SimplexStrategy::JointMH, SimplexStrategy::CoordinateGibbs}) {
            RngStream rng(12 + rep, static_cast<std::uint64_t>(strategy));
            Vector a = Vector::Constant(2, 1.0 / 3.0);
            std::vector<double> c0, c1;
            for (int k = 0; k < 300000; ++k) {
                a = g.sample(a, strategy, rng).value;
                REQUIRE(a.minCoeff() >= 0.0);
                REQUIRE(a.sum() <= 1.0);
                c0.push_back(a[0]);
                c1.push_back(a[1]);
            }
            means[static_cast<int>(strategy)] = {test::batch_mean(c0), test::batch_mean(c1)};
        }
        for (int m = 0; m < 2; ++m) {
            const auto& j = means[0][m];
            const auto& c = means[1][m];
            CAPTURE(rep);
            CAPTURE(m);
            CHECK(std::abs(j.mean - c.mean) < 3.0 * std::hypot(j.se, c.se));
        }
    }
}

TEST_CASE("simplex Gaussian: one coordinate sweep preserves exact draws") {
    RngStream rng(13, 0);
    Vector mean(2);
    mean << 0.2, 0.5;
    Eigen::MatrixXd cov(2, 2);
    cov << 0.04, -0.01, -0.01, 0.03;
    const auto g = SimplexGaussian::from_covariance(mean, cov);
    const Eigen::MatrixXd chol = cov.llt().matrixL();
    const int n = 200000;
    double before[2] = {0, 0}, after[2] = {0, 0}, sq[2] = {0, 0};
    for (int k = 0; k < n; ++k) {
        Vector a(2);
        do {
            Vector z(2);
            z << rng.normal(), rng.normal();
            a = mean + chol * z;
        } while (a.minCoeff() < 0.0 || a.sum() > 1.0);
        const Vector b = g.sample(a, SimplexStrategy::CoordinateGibbs, rng).value;
        for (int m = 0; m < 2; ++m) {
            before[m] += a[m];
            after[m] += b[m];
            sq[m] += a[m] * a[m];
        }
    }
    for (int m = 0; m < 2; ++m) {
        const double mb = before[m] / n, ma = after[m] / n;
        const double se = std::sqrt((sq[m] / n - mb * mb) / n);
        CHECK(std::abs(ma - mb) < 4.0 * std::sqrt(2.0) * se);
    }
}

TEST_CASE("simplex Gaussian: errors") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(SimplexGaussian::from_covariance(Vector::Zero(2), bad), NumericalError);
    CHECK_THROWS_AS(SimplexGaussian::from_covariance(Vector::Zero(3), Eigen::MatrixXd::Identity(2, 2)),
                    DimensionError);
}

TEST_CASE("tilted Gaussian: alpha = 1 reduces to the truncated normal") {
    RngStream a(14, 0), b(14, 0);
    for (int k = 0; k < 10000; ++k) {
        const TiltedDraw d = sample_gamma_tilted_gaussian(1.0, 2.0, 0.5, 0.3, 1.0, a);
        REQUIRE(d.accepted);
        REQUIRE(d.value == sample_trunc_normal(0.5 - 2.0 * 0.3, std::sqrt(0.3), 0.0, kInf, b));
        REQUIRE(refine_gamma_tilted_gaussian(1.0, 2.0, 0.5, 0.3, d.value, a).value == d.value);
    }
}

namespace {

struct TiltCase { double alpha, beta, mu, delta2, tolerance; };

test::CdfTable tilt_table(const TiltCase& c) {
    const double centre = c.mu - c.beta * c.delta2;
    const double hi = std::max(centre, 0.0) + 15.0 * std::sqrt(c.delta2) + 10.0 * c.alpha * c.delta2;
    auto log_f = [=](double s) {
        return (c.alpha - 1.0) * std::log(s) - 0.5 * (s - centre) * (s - centre) / c.delta2;
    };
    double offset = 0.0;
    if (c.alpha > 1.0) {
        offset = log_f(0.5 * (centre + std::sqrt(centre * centre + 4.0 * (c.alpha - 1.0) * c.delta2)));
    }
    auto f = [=](double s) { return s > 0.0 ? std::exp(log_f(s) - offset) : 0.0; };
    return test::CdfTable(f, 0.0, hi, 3000, c.alpha < 1.0);
}

std::vector<double> tilt_chain(const TiltCase& c, bool refine, int n, RngStream& rng) {
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(n));
    double s = sample_gamma_tilted_gaussian(c.alpha, c.beta, c.mu, c.delta2, 0.0, rng).value;
    for (int k = 0; k < n; ++k) {
        s = sample_gamma_tilted_gaussian(c.alpha, c.beta, c.mu, c.delta2, s, rng).value;
        if (refine) s = refine_gamma_tilted_gaussian(c.alpha, c.beta, c.mu, c.delta2, s, rng).value;
        x.push_back(s);
    }
    return x;
}

}  // namespace

TEST_CASE("tilted Gaussian: long-run means match quadrature") {
    RngStream rng(15, 0);
    for (const TiltCase& c : {TiltCase{2.0, 1.0, 1.0, 0.25, 0.01}, TiltCase{0.5, 5.0, -1.0, 1.0, 0.02}}) {
        const auto table = tilt_table(c);
        for (bool refine : {false, true}) {
            const auto x = tilt_chain(c, refine, kMillion, rng);
            for (double v : x) REQUIRE(v > 0.0);
            CAPTURE(c.alpha);
            CAPTURE(refine);
            CHECK(mean_of(x) == doctest::Approx(table.mean()).epsilon(c.tolerance));
        }
    }
}

TEST_CASE("tilted Gaussian: the combined update matches quadrature over a wide range of shapes") {
    RngStream rng(16, 0);
    for (const TiltCase& c : {TiltCase{0.05, 1.0, 0.5, 0.1, 0.0}, TiltCase{0.3, 0.5, 2.0, 0.5, 0.0},
                              TiltCase{3.0, 0.2, 1.0, 0.5, 0.0}, TiltCase{100.0, 1.0, 0.2, 0.01, 0.0},
                              TiltCase{8.0, 30.0, -0.5, 0.2, 0.0}}) {
        const auto table = tilt_table(c);
        const auto x = tilt_chain(c, true, kMillion, rng);
        CAPTURE(c.alpha);
        CHECK(test::ks_distance(x, table) < 0.005);
    }
}

TEST_CASE("tilted Gaussian: invalid parameters") {
    RngStream rng(17, 0);
    CHECK_THROWS_AS(sample_gamma_tilted_gaussian(0.0, 1.0, 0.0, 1.0, 1.0, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_gamma_tilted_gaussian(1.0, 0.0, 0.0, 1.0, 1.0, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_gamma_tilted_gaussian(1.0, 1.0, 0.0, 0.0, 1.0, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_gamma_tilted_gaussian(1.0, 1.0, kInf, 1.0, 1.0, rng), InvalidArgument);
    CHECK_THROWS_AS(refine_gamma_tilted_gaussian(2.0, 1.0, 0.0, 1.0, 0.0, rng), InvalidArgument);
}
