#pragma once

// Point estimates and credible intervals from recorded chains.

#include <string>
#include <vector>

#include "bss/eval.hpp"
#include "bss/gibbs.hpp"

namespace bss {

struct MatrixSummary {
    Matrix point, lower, upper;
};

struct VectorSummary {
    Vector point, lower, upper;
};

struct ScalarSummary {
    double point = 0.0, lower = 0.0, upper = 0.0;
};

struct FitReport {
    std::string estimator;  ///< "mmse" or "map"
    PriorKind prior = PriorKind::Gamma;
    std::size_t n_samples = 0;
    MatrixSummary C;  ///< rows sum to one
    MatrixSummary S;
    VectorSummary sigma2_e;
    VectorSummary alpha;     ///< Gamma prior only
    VectorSummary beta;      ///< Gamma prior only
    VectorSummary sigma2_s;  ///< alternate priors only
    ScalarSummary psi_e;
    /// MAP only: index of the selected state and its log-posterior.
    std::size_t map_index = 0;
    double log_posterior = 0.0;
};

/// Empirical quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> values, double q);

/// Posterior means over the post-burn-in states, with 2.5% / 97.5%
/// empirical quantiles as interval bounds. Concentrations are averaged as
/// completed vectors.
FitReport mmse_estimate(const ChainTrace& trace, std::size_t n_burn_in);

/// Pools the post-burn-in states of several chains. Chains must share
/// dimensions and prior; relabeling is the caller's job (see align_chains).
FitReport mmse_estimate(const std::vector<ChainTrace>& traces, std::size_t n_burn_in);

/// The recorded state with the largest log-posterior; ties go to the
/// earliest state. Interval bounds equal the point.
FitReport map_estimate(const ChainTrace& trace, const Matrix& Y, const FixedHyperParams& fixed);

/// Relabels the sources of every state: new source m is old source permutation[m].
void permute_sources(ChainTrace& trace, const std::vector<int>& permutation);

/// Relabels chains 1.. so their MMSE sources match chain 0's labeling.
void align_chains(std::vector<ChainTrace>& traces, std::size_t n_burn_in);

}  // namespace bss
