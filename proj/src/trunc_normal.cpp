#include <cmath>
#include <limits>

#include "bss/error.hpp"
#include "bss/samplers.hpp"
#include "bss/trunc_normal_constants.hpp"

namespace bss {

namespace {

using namespace trunc_normal;

constexpr double kRejected = std::numeric_limits<double>::quiet_NaN();

// Uniform proposal on [lower, upper] in the original units, accepted with
// the Gaussian density ratio to its maximum over the interval.
double uniform_attempt(double mu, double sigma, double lower, double upper, RngStream& rng) {
    const double x = lower + (upper - lower) * rng.uniform();
    if (x < lower || x > upper) return kRejected;
    const double mode = std::clamp(mu, lower, upper);
    const double dm = (mode - mu) / sigma;
    const double dx = (x - mu) / sigma;
    const double log_ratio = 0.5 * (dm * dm - dx * dx);
    return std::log(rng.uniform_open()) <= log_ratio ? x : kRejected;
}

// Excess z - a of a standard normal conditioned on z >= a (a >= kTailStart),
// proposed from the translated exponential with the optimal rate.
double tail_excess_attempt(double a, double width, RngStream& rng) {
    const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
    const double excess = -std::log(rng.uniform_open()) / rate;
    if (excess > width) return kRejected;
    const double d = a + excess - rate;
    return std::log(rng.uniform_open()) <= -0.5 * d * d ? excess : kRejected;
}

}  // namespace

double sample_trunc_normal(double mu, double sigma, double lower, double upper, RngStream& rng) {
    if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("sample_trunc_normal: mu must be finite and sigma positive");
    }
    if (std::isnan(lower) || std::isnan(upper) || !(lower < upper)) {
        throw InvalidArgument("sample_trunc_normal: invalid interval [" + std::to_string(lower) +
                              ", " + std::to_string(upper) + "]");
    }
    if (std::isinf(lower) && std::isinf(upper)) return mu + sigma * rng.normal();

    const double a = (lower - mu) / sigma;
    const double b = (upper - mu) / sigma;
    if (!(a < b)) {
        // interval narrower than the resolution of the standardized scale
        return std::clamp(lower + (upper - lower) * rng.uniform(), lower, upper);
    }

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        double x;
        if (a < kTailStart && b > -kTailStart) {
            if (b - a >= kMinNormalWidth) {
                x = mu + sigma * rng.normal();
            } else {
                x = uniform_attempt(mu, sigma, lower, upper, rng);
            }
        } else if (a >= kTailStart) {
            if (0.5 * (b * b - a * a) <= kTailUniformLogRatio) {
                x = uniform_attempt(mu, sigma, lower, upper, rng);
            } else {
                x = lower + sigma * tail_excess_attempt(a, b - a, rng);
            }
        } else {
            if (0.5 * (a * a - b * b) <= kTailUniformLogRatio) {
                x = uniform_attempt(mu, sigma, lower, upper, rng);
            } else {
                x = upper - sigma * tail_excess_attempt(-b, b - a, rng);
            }
        }
        if (x >= lower && x <= upper) return x;  // NaN (rejected) fails both
    }
    throw NumericalError("sample_trunc_normal: attempt limit exceeded");
}

}  // namespace bss
