#pragma once

// Metrics, permutation alignment and convergence diagnostics.

#include <cstddef>
#include <span>
#include <vector>

#include "bss/gibbs.hpp"
#include "bss/matrix.hpp"

namespace bss {

/// Estimated row permutation[m] is matched to reference row m; scales[m]
/// multiplies that estimated row (all 1 unless a scale fit was requested).
struct AlignmentMap {
    std::vector<int> permutation;
    std::vector<double> scales;
};

double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Permutation of the estimated rows maximizing the total absolute
/// correlation with the reference rows. Exhaustive for M <= 8; larger M
/// needs `approximate`, which matches greedily by decreasing |correlation|.
/// With `fit_scale`, each matched row also gets the least-squares factor
/// <s, s_hat> / <s_hat, s_hat>.
AlignmentMap align_sources(const Matrix& S_est, const Matrix& S_true, bool fit_scale = false,
                           bool approximate = false);

/// Rows of S_est reordered (and scaled) into reference order.
Matrix apply_to_sources(const Matrix& S_est, const AlignmentMap& map);
/// Columns of C_est reordered into reference order; scales are not applied.
Matrix apply_to_concentrations(const Matrix& C_est, const AlignmentMap& map);

/// Sum over rows of ||x - x_hat||^2 / ||x||^2. Used for both S (rows are
/// sources) and C (rows are observations).
double nmse(const Matrix& est, const Matrix& truth);

/// sqrt(1 - corr^2).
double dissimilarity(std::span<const double> s_est, std::span<const double> s_true);
/// Average dissimilarity over aligned rows.
double mean_dissimilarity(const Matrix& S_est, const Matrix& S_true);

enum class PsrfForm {
    Printed,   ///< (1 - 1/n) [1 + B / ((n - 1) W)]
    Canonical  ///< (n - 1)/n + (m + 1)/(m n) B / W
};

const char* to_string(PsrfForm form);

/// Square root of the potential scale reduction factor of one scalar
/// monitored in every chain. B is n times the variance of the chain means,
/// W the mean within-chain variance.
double psrf(const std::vector<std::vector<double>>& chains, PsrfForm form = PsrfForm::Printed);

/// Mean squared reconstruction error (1/(N L)) sum_i ||y_i - S_hat^T c_hat_i||^2
/// with C_hat and S_hat averaged over the first p post-burn-in states.
double reconstruction_error(const ChainTrace& trace, std::size_t p, const Matrix& Y,
                            std::size_t n_burn_in);

/// reconstruction_error for p = 1 .. (trace length - burn-in).
std::vector<double> reconstruction_error_curve(const ChainTrace& trace, const Matrix& Y,
                                               std::size_t n_burn_in);

struct Histogram {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<std::size_t> counts;

    double bin_width() const { return (upper - lower) / static_cast<double>(counts.size()); }
};

/// Equal-width bins spanning [min, max] of the values; the maximum falls in the last bin.
Histogram histogram(std::span<const double> values, std::size_t bins);

}  // namespace bss
