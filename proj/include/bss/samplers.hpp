#pragma once

// Random-variate generators for every distribution the Gibbs sampler draws from.

#include <span>
#include <vector>

#include "bss/matrix.hpp"
#include "bss/rng.hpp"

namespace bss {

/// Gamma(shape, rate): density proportional to x^(shape-1) exp(-rate x).
double sample_gamma(double shape, double rate, RngStream& rng);

/// Inverse gamma: X such that 1/X ~ Gamma(shape, rate = scale).
double sample_inv_gamma(double shape, double scale, RngStream& rng);

/// Gamma(shape, rate) restricted to [lo, hi].
double sample_truncated_gamma(double shape, double rate, double lo, double hi, RngStream& rng);

double sample_exponential(double rate, RngStream& rng);

/// Dirichlet(deltas); entries are >= 0 and sum to 1.
std::vector<double> sample_dirichlet(std::span<const double> deltas, RngStream& rng);

/// N(mu, sigma^2) truncated to [lower, upper]; either bound may be infinite.
double sample_trunc_normal(double mu, double sigma, double lower, double upper, RngStream& rng);

enum class SimplexStrategy { JointMH, CoordinateGibbs };

/// JointMH for M <= threshold, CoordinateGibbs above.
SimplexStrategy auto_simplex_strategy(int M, int threshold = 4);

struct SimplexDraw {
    Vector value;
    bool accepted = true;
};

/// Gaussian N(mean, covariance) restricted to the simplex
/// {a : a_k >= 0, sum_k a_k <= 1}.
class SimplexGaussian {
public:
    static SimplexGaussian from_covariance(Vector mean, const Eigen::MatrixXd& covariance);
    static SimplexGaussian from_precision(Vector mean, const Eigen::MatrixXd& precision);

    /// JointMH: one independence proposal from the untruncated Gaussian,
    /// accepted iff it lands in the simplex; `current` is kept otherwise.
    /// CoordinateGibbs: one sweep of exact 1-D truncated conditionals starting
    /// from `current`.
    SimplexDraw sample(const Vector& current, SimplexStrategy strategy, RngStream& rng) const;

    const Vector& mean() const { return mean_; }
    const Eigen::MatrixXd& covariance() const { return covariance_; }
    const Eigen::MatrixXd& precision() const { return precision_; }

private:
    SimplexGaussian(Vector mean, Eigen::MatrixXd covariance, Eigen::MatrixXd precision);

    Vector mean_;
    Eigen::MatrixXd covariance_;
    Eigen::MatrixXd precision_;
    Eigen::MatrixXd chol_;  // lower factor of the covariance
};

SimplexDraw sample_simplex_gaussian(const Vector& mean, const Eigen::MatrixXd& covariance,
                                    const Vector& current, SimplexStrategy strategy,
                                    RngStream& rng);

struct TiltedDraw {
    double value = 0.0;
    bool accepted = true;
};

/// One Metropolis-Hastings update targeting
///   p(s) ~ s^(alpha-1) exp(-(s - mu)^2 / (2 delta2) - beta s),  s > 0,
/// with the independence proposal N+(mu - beta delta2, delta2). The proposal
/// is exact for alpha = 1. `current` is returned when the proposal is
/// rejected; pass a non-positive `current` to force acceptance (first draw).
TiltedDraw sample_gamma_tilted_gaussian(double alpha, double beta, double mu, double delta2,
                                        double current, RngStream& rng);

/// A second Metropolis-Hastings update on the same target, with a proposal
/// that follows its shape: for alpha > 1 a truncated normal at the mode with
/// twice the curvature variance; for alpha < 1 a Gamma(alpha, r) draw that
/// carries the s^(alpha-1) singularity at zero. No-op for alpha = 1.
/// Requires current > 0.
TiltedDraw refine_gamma_tilted_gaussian(double alpha, double beta, double mu, double delta2,
                                        double current, RngStream& rng);

}  // namespace bss
