#pragma once

// Data model of the constrained mixing problem Y = C S + E:
// likelihood, priors and the hyperparameter-marginalized log-posterior.

#include <span>
#include <string>
#include <vector>

#include "bss/matrix.hpp"

namespace bss {

enum class PriorKind { Gamma, Exponential, TruncatedGaussian };

std::string to_string(PriorKind kind);
/// Accepts "gamma", "exp"/"exponential", "tgauss"/"truncated-gaussian".
PriorKind parse_prior_kind(const std::string& name);

/// Fixed (non-sampled) hyperparameters of the hierarchy.
struct FixedHyperParams {
    double rho_e = 2.0;          ///< shape numerator of the noise-variance IG prior
    double lambda_alpha = 1e-2;  ///< rate of the exponential prior on each Gamma shape
    double alpha_beta = 2.0;     ///< shape of the Gamma prior on each Gamma rate
    double beta_beta = 1e-2;     ///< rate of the Gamma prior on each Gamma rate
    double rho_s = 2.0;          ///< exponential / truncated-Gaussian priors only
    double psi_s = 1e-2;         ///< exponential / truncated-Gaussian priors only

    /// Support of the (log-uniform) Jeffreys prior on the noise hyperparameter psi_e.
    /// Restricting it keeps the hierarchy proper; with the default range the
    /// restriction has no practical effect on the posterior.
    double psi_e_min = 1e-8;
    double psi_e_max = 1e8;

    /// Add 1 to the shape of the conditional (and marginal) of each Gamma rate,
    /// reproducing the printed form of the original derivation. The default
    /// (false) is the form that follows from conjugacy with the Gamma prior.
    bool beta_shape_plus_one = false;

    void validate() const;
};

/// Reparametrized concentration vector: M-1 free coefficients plus the index
/// of the component expressed as one minus their sum.
struct ConcentrationState {
    std::vector<double> partial;
    int discard_index = 0;  ///< 0-based, in [0, M)

    int components() const { return static_cast<int>(partial.size()) + 1; }
};

/// Sum of partial coefficients in index order. Membership tests and
/// completion both use this so they agree to the last bit.
double partial_sum(std::span<const double> partial);

/// True iff every entry is >= 0 and the entries sum to at most 1.
bool in_simplex(std::span<const double> partial);

/// Full M-vector: partial entries at their component indices and
/// 1 - sum(partial) at the discarded index. Throws InvalidArgument outside the simplex.
std::vector<double> complete_concentration(const ConcentrationState& state);

/// Inverse of complete_concentration for a chosen discarded component.
ConcentrationState split_concentration(std::span<const double> full, int discard_index);

/// Squared residual norm ||y_i - S^T c_i||^2 for every observation.
Vector residual_squared_norms(const Matrix& Y, const Matrix& C, const Matrix& S);

/// Gaussian log-likelihood without the -(N L / 2) log(2 pi) constant:
/// sum_i [ -L log sigma_i - ||y_i - S^T c_i||^2 / (2 sigma_i^2) ].
double log_likelihood(const Matrix& Y, const Matrix& C, const Matrix& S, const Vector& sigma2);

/// Log of the posterior of (A, S, sigma2_e, alpha) under the Gamma source
/// prior, with psi_e and beta integrated out, up to a constant that depends
/// only on (N, M, L) and the fixed hyperparameters.
///
/// `A` holds the M-1 free coefficients of each observation (row), the last
/// component being the completed one. Indicator violations (a row outside
/// the simplex, a negative source value, a non-positive variance or shape)
/// give -infinity.
double log_posterior(const Matrix& Y, const Matrix& A, const Matrix& S, const Vector& sigma2,
                     const Vector& alpha, const FixedHyperParams& fixed);

/// Same density evaluated from completed concentration rows. Rows must be
/// non-negative and sum to one within 1e-12.
double log_posterior_completed(const Matrix& Y, const Matrix& C, const Matrix& S,
                               const Vector& sigma2, const Vector& alpha,
                               const FixedHyperParams& fixed);

/// Marginalized log-posterior of (A, S, sigma2_e) for the exponential and
/// truncated-Gaussian source priors (per-source scale integrated out).
double log_posterior_alt(const Matrix& Y, const Matrix& C, const Matrix& S, const Vector& sigma2,
                         PriorKind prior, const FixedHyperParams& fixed);

/// Log of the psi_e integral: log int_lo^hi psi^{k-1} exp(-rate psi) dpsi.
double log_truncated_gamma_integral(double k, double rate, double lo, double hi);

}  // namespace bss
