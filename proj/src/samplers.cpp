#include "bss/samplers.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "bss/error.hpp"
#include "bss/model.hpp"

namespace bss {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidArgument(std::string(what) + " must be positive and finite");
    }
}

// Draw from s^(shape-1) exp(-rate s) on [lo, hi] when the interval lies on one
// side of the mode, by rejection from an exponential tangent to the log-density
// at the endpoint nearest the mode.
double truncated_gamma_tail(double shape, double rate, double lo, double hi, RngStream& rng) {
    const double k1 = shape - 1.0;
    const double width = hi - lo;
    const bool right = !(k1 > 0.0) || lo * rate >= k1;
    const double end = right ? lo : hi;
    const double lambda = right ? rate - std::max(k1, 0.0) / lo : k1 / hi - rate;
    for (;;) {
        const double u = rng.uniform_open();
        const double d = std::isinf(width) ? -std::log(u) / lambda
                                           : -std::log1p(u * std::expm1(-lambda * width)) / lambda;
        const double x = right ? lo + d : hi - d;
        if (!(x >= lo && x <= hi)) continue;
        // log f(x) - log f(end) minus the tangent's change; never positive
        const double log_ratio = k1 * std::log(x / end) - rate * (x - end) + lambda * d;
        if (std::log(rng.uniform_open()) < std::min(log_ratio, 0.0)) return x;
    }
}

}  // namespace

double sample_gamma(double shape, double rate, RngStream& rng) {
    require_positive(shape, "sample_gamma: shape");
    require_positive(rate, "sample_gamma: rate");
    std::gamma_distribution<double> dist(shape, 1.0 / rate);
    return dist(rng.engine());
}

double sample_inv_gamma(double shape, double scale, RngStream& rng) {
    require_positive(shape, "sample_inv_gamma: shape");
    require_positive(scale, "sample_inv_gamma: scale");
    return 1.0 / sample_gamma(shape, scale, rng);
}

double sample_truncated_gamma(double shape, double rate, double lo, double hi, RngStream& rng) {
    require_positive(shape, "sample_truncated_gamma: shape");
    require_positive(rate, "sample_truncated_gamma: rate");
    if (!(lo >= 0.0) || !(lo < hi)) throw InvalidArgument("sample_truncated_gamma: invalid range");

    for (int attempt = 0; attempt < 32; ++attempt) {
        const double x = sample_gamma(shape, rate, rng);
        if (x >= lo && x <= hi) return x;
    }
    // Most of the mass lies outside [lo, hi]: invert the CDF restricted to it.
    namespace bm = boost::math;
    const double x_lo = lo * rate;
    const double x_hi = std::isinf(hi) ? hi : hi * rate;
    double x;
    if (x_lo >= shape) {
        const double q_lo = bm::gamma_q(shape, x_lo);
        const double q_hi = std::isinf(x_hi) ? 0.0 : bm::gamma_q(shape, x_hi);
        if (!(q_lo > 1e-280) || !(q_lo - q_hi > 1e-8 * q_lo)) {
            return truncated_gamma_tail(shape, rate, lo, hi, rng);
        }
        const double q = q_hi + (q_lo - q_hi) * rng.uniform_open();
        x = bm::gamma_q_inv(shape, q) / rate;
    } else {
        const double p_lo = bm::gamma_p(shape, x_lo);
        const double p_hi = std::isinf(x_hi) ? 1.0 : bm::gamma_p(shape, x_hi);
        const bool below_mode = shape > 1.0 && x_hi <= shape - 1.0;
        if (below_mode && (!(p_hi > 1e-280) || !(p_hi - p_lo > 1e-8 * p_hi))) {
            return truncated_gamma_tail(shape, rate, lo, hi, rng);
        }
        if (!(p_hi > p_lo)) return hi;
        const double p = p_lo + (p_hi - p_lo) * rng.uniform_open();
        x = bm::gamma_p_inv(shape, p) / rate;
    }
    return std::clamp(x, lo, hi);
}

double sample_exponential(double rate, RngStream& rng) {
    require_positive(rate, "sample_exponential: rate");
    return -std::log(rng.uniform_open()) / rate;
}

std::vector<double> sample_dirichlet(std::span<const double> deltas, RngStream& rng) {
    if (deltas.empty()) throw InvalidArgument("sample_dirichlet: empty parameter vector");
    for (double d : deltas) require_positive(d, "sample_dirichlet: parameter");
    std::vector<double> out(deltas.size());
    for (;;) {
        double total = 0.0;
        for (std::size_t m = 0; m < deltas.size(); ++m) {
            out[m] = sample_gamma(deltas[m], 1.0, rng);
            total += out[m];
        }
        if (total > 0.0) {
            for (double& v : out) v /= total;
            return out;
        }
    }
}

SimplexStrategy auto_simplex_strategy(int M, int threshold) {
    if (threshold < 2) throw InvalidArgument("simplex strategy threshold must be >= 2");
    return M <= threshold ? SimplexStrategy::JointMH : SimplexStrategy::CoordinateGibbs;
}

SimplexGaussian::SimplexGaussian(Vector mean, Eigen::MatrixXd covariance,
                                 Eigen::MatrixXd precision)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), precision_(std::move(precision)) {
    Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("simplex Gaussian: covariance is not positive definite");
    }
    chol_ = llt.matrixL();
}

namespace {

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& spd, const char* what) {
    if (spd.rows() != spd.cols()) throw DimensionError(std::string(what) + " must be square");
    if (!spd.isApprox(spd.transpose(), 1e-10)) {
        throw NumericalError(std::string(what) + " is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(spd);
    if (llt.info() != Eigen::Success) {
        throw NumericalError(std::string(what) + " is not positive definite");
    }
    const Eigen::VectorXd diag = Eigen::MatrixXd(llt.matrixL()).diagonal();
    if (diag.size() > 0 && diag.minCoeff() <= 1e-9 * diag.maxCoeff()) {
        throw NumericalError(std::string(what) + " is numerically singular");
    }
    return llt.solve(Eigen::MatrixXd::Identity(spd.rows(), spd.cols()));
}

}  // namespace

SimplexGaussian SimplexGaussian::from_covariance(Vector mean, const Eigen::MatrixXd& covariance) {
    if (covariance.rows() != mean.size()) throw DimensionError("simplex Gaussian: shape mismatch");
    Eigen::MatrixXd precision = checked_inverse(covariance, "covariance");
    return SimplexGaussian(std::move(mean), covariance, std::move(precision));
}

SimplexGaussian SimplexGaussian::from_precision(Vector mean, const Eigen::MatrixXd& precision) {
    if (precision.rows() != mean.size()) throw DimensionError("simplex Gaussian: shape mismatch");
    Eigen::MatrixXd covariance = checked_inverse(precision, "precision");
    covariance = 0.5 * (covariance + covariance.transpose());
    return SimplexGaussian(std::move(mean), std::move(covariance), precision);
}

SimplexDraw SimplexGaussian::sample(const Vector& current, SimplexStrategy strategy,
                                    RngStream& rng) const {
    const Index K = mean_.size();
    if (current.size() != K) throw DimensionError("simplex Gaussian: current point has wrong size");
    SimplexDraw draw;
    if (K == 0) {
        draw.value = current;
        return draw;
    }

    if (strategy == SimplexStrategy::JointMH) {
        Vector z(K);
        for (Index k = 0; k < K; ++k) z[k] = rng.normal();
        Vector proposal = mean_ + chol_ * z;
        if (in_simplex({proposal.data(), static_cast<std::size_t>(K)})) {
            draw.value = std::move(proposal);
            draw.accepted = true;
        } else {
            draw.value = current;
            draw.accepted = false;
        }
        return draw;
    }

    Vector a = current;
    if (!in_simplex({a.data(), static_cast<std::size_t>(K)})) {
        throw InvalidArgument("simplex Gaussian: coordinate sweep must start inside the simplex");
    }
    for (Index k = 0; k < K; ++k) {
        double rest = 0.0;
        double shift = 0.0;
        for (Index l = 0; l < K; ++l) {
            if (l == k) continue;
            rest += a[l];
            shift += precision_(k, l) * (a[l] - mean_[l]);
        }
        const double upper = 1.0 - rest;
        if (!(upper > 0.0)) {
            a[k] = 0.0;
            continue;
        }
        const double pkk = precision_(k, k);
        a[k] = sample_trunc_normal(mean_[k] - shift / pkk, 1.0 / std::sqrt(pkk), 0.0, upper, rng);
        // rounding guard: the recomputed total must not exceed one
        while (partial_sum({a.data(), static_cast<std::size_t>(K)}) > 1.0 && a[k] > 0.0) {
            a[k] = std::nextafter(a[k], 0.0);
        }
    }
    draw.value = std::move(a);
    draw.accepted = true;
    return draw;
}

SimplexDraw sample_simplex_gaussian(const Vector& mean, const Eigen::MatrixXd& covariance,
                                    const Vector& current, SimplexStrategy strategy,
                                    RngStream& rng) {
    return SimplexGaussian::from_covariance(mean, covariance).sample(current, strategy, rng);
}

TiltedDraw sample_gamma_tilted_gaussian(double alpha, double beta, double mu, double delta2,
                                        double current, RngStream& rng) {
    require_positive(alpha, "tilted Gaussian: alpha");
    require_positive(beta, "tilted Gaussian: beta");
    require_positive(delta2, "tilted Gaussian: delta2");
    if (!std::isfinite(mu)) throw InvalidArgument("tilted Gaussian: mu must be finite");

    const double sd = std::sqrt(delta2);
    const double centre = mu - beta * delta2;
    double proposal;
    do {
        proposal = sample_trunc_normal(centre, sd, 0.0, std::numeric_limits<double>::infinity(), rng);
    } while (!(proposal > 0.0));

    TiltedDraw draw;
    if (alpha == 1.0 || !(current > 0.0)) {
        draw.value = proposal;
        return draw;
    }
    const double log_ratio = (alpha - 1.0) * (std::log(proposal) - std::log(current));
    if (log_ratio >= 0.0 || std::log(rng.uniform_open()) < log_ratio) {
        draw.value = proposal;
        draw.accepted = true;
    } else {
        draw.value = current;
        draw.accepted = false;
    }
    return draw;
}

TiltedDraw refine_gamma_tilted_gaussian(double alpha, double beta, double mu, double delta2,
                                        double current, RngStream& rng) {
    require_positive(alpha, "tilted Gaussian: alpha");
    require_positive(beta, "tilted Gaussian: beta");
    require_positive(delta2, "tilted Gaussian: delta2");
    require_positive(current, "tilted Gaussian: current value");
    if (!std::isfinite(mu)) throw InvalidArgument("tilted Gaussian: mu must be finite");

    TiltedDraw draw{current, false};
    if (alpha == 1.0) return draw;

    const double sd = std::sqrt(delta2);
    const double centre = mu - beta * delta2;
    // log target minus log proposal, both up to constants
    std::function<double(double)> log_weight;
    double proposal;
    if (alpha > 1.0) {
        const double mode =
            0.5 * (centre + std::sqrt(centre * centre + 4.0 * (alpha - 1.0) * delta2));
        const double var = 2.0 / ((alpha - 1.0) / (mode * mode) + 1.0 / delta2);
        do {
            proposal = sample_trunc_normal(mode, std::sqrt(var), 0.0,
                                           std::numeric_limits<double>::infinity(), rng);
        } while (!(proposal > 0.0));
        log_weight = [=](double s) {
            return (alpha - 1.0) * std::log(s) - 0.5 * (s - centre) * (s - centre) / delta2 +
                   0.5 * (s - mode) * (s - mode) / var;
        };
    } else {
        const double scale = centre > sd ? centre : delta2 / (sd + std::max(0.0, -centre));
        const double rate = alpha / scale;
        proposal = sample_gamma(alpha, rate, rng);
        if (!(proposal > 0.0)) return draw;  // underflow: a zero is outside the support
        log_weight = [=](double s) {
            return -0.5 * (s - centre) * (s - centre) / delta2 + rate * s;
        };
    }
    const double log_ratio = log_weight(proposal) - log_weight(current);
    if (log_ratio >= 0.0 || std::log(rng.uniform_open()) < log_ratio) {
        draw.value = proposal;
        draw.accepted = true;
    }
    return draw;
}

}  // namespace bss
