#pragma once

// Gibbs sampler for the constrained mixing model and its three source priors.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bss/matrix.hpp"
#include "bss/model.hpp"
#include "bss/rng.hpp"
#include "bss/samplers.hpp"

namespace bss {

/// How the chain's starting point is chosen.
///
/// Prior draws every parameter from the hierarchy itself. With the default
/// flat hyperpriors this puts the Gamma shapes around 1/lambda_alpha = 100,
/// far from any spectral data, and the source update then needs thousands of
/// sweeps to move. DataScaled starts the source shapes at 1 and every scale
/// parameter at the magnitude of Y, with sources drawn from that rescaled
/// prior. Extremes is DataScaled with the sources started at the M
/// observations picked by successive orthogonal projections (the most
/// extreme points of the data cloud); it needs M <= N and falls back to
/// DataScaled otherwise. Concentrations always start uniform on the simplex.
enum class InitPolicy { Prior, DataScaled, Extremes };

struct SamplerConfig {
    int M = 0;
    std::size_t n_iterations = 1000;
    std::size_t n_burn_in = 200;
    PriorKind prior = PriorKind::Gamma;
    FixedHyperParams fixed;
    /// Unset: JointMH for M <= strategy_threshold, CoordinateGibbs above. The
    /// default is CoordinateGibbs for every M: joint proposals stall whenever
    /// an abundance sits at zero.
    std::optional<SimplexStrategy> strategy = SimplexStrategy::CoordinateGibbs;
    int strategy_threshold = 4;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    InitPolicy init = InitPolicy::Extremes;
    /// Initial standard deviation of the log-scale random walk on each Gamma shape.
    double alpha_step_init = 0.1;
    /// Burn-in iterations between two step-size adjustments.
    std::size_t adapt_interval = 50;

    void validate() const;
    SimplexStrategy simplex_strategy() const;
};

struct SamplerState {
    Matrix C;                  ///< N x M completed concentrations; rows in the simplex
    std::vector<int> discard;  ///< per observation, 0-based component held as the complement
    Matrix S;                  ///< M x L, entries >= 0
    Vector sigma2_e;           ///< N
    double psi_e = 1.0;
    Vector alpha;              ///< M (Gamma prior only, empty otherwise)
    Vector beta;               ///< M (Gamma prior only, empty otherwise)
    Vector sigma2_s;           ///< M (alternate priors only, empty otherwise)
    Vector alpha_step;         ///< random-walk scale per shape; frozen after burn-in
    std::size_t iteration = 0;

    Index N() const { return C.rows(); }
    Index M() const { return C.cols(); }
    Index L() const { return S.cols(); }

    ConcentrationState concentration(Index i) const;
};

/// Acceptance record of one sweep.
struct StepFlags {
    std::vector<int> simplex;  ///< per observation: 1 if the simplex draw moved
    std::vector<int> alpha;    ///< per source: 1 if the shape proposal was accepted
    std::vector<int> sources;  ///< per source: number of accepted band updates (out of L)
};

struct ChainTrace {
    Index N = 0, M = 0, L = 0;
    PriorKind prior = PriorKind::Gamma;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::size_t n_burn_in = 0;
    std::vector<SamplerState> states;  ///< one snapshot per iteration
    std::vector<StepFlags> flags;

    std::size_t size() const { return states.size(); }
};

/// Indices of M rows of Y chosen by successive projections: repeatedly take
/// the row with the largest residual norm and project it out of the rest.
std::vector<Index> extreme_rows(const Matrix& Y, Index M);

SamplerState init_state(const SamplerConfig& config, const Matrix& Y, RngStream& rng);

/// Gaussian conditional of the free coefficients of observation i when
/// component `discard` is held as the complement.
struct ConcentrationConditional {
    Vector mean;               ///< M-1 entries, component order with `discard` removed
    Eigen::MatrixXd precision;
};

ConcentrationConditional concentration_conditional(const Matrix& S, std::span<const double> y,
                                                   double sigma2, int discard);

/// Gaussian factor of the likelihood in row m of S, all other rows held fixed:
/// mean mu (length L) and common variance delta2.
struct SourceConditional {
    Vector mu;
    double delta2 = 0.0;
};

SourceConditional source_conditional(const Matrix& Y, const Matrix& C, const Matrix& S,
                                     const Vector& sigma2, Index m);

void step_concentrations(SamplerState& state, const Matrix& Y, const SamplerConfig& config,
                         RngStream& rng, StepFlags* flags = nullptr);
void step_psi_e(SamplerState& state, const SamplerConfig& config, RngStream& rng);
void step_noise_variances(SamplerState& state, const Matrix& Y, const SamplerConfig& config,
                          RngStream& rng);
void step_alpha(SamplerState& state, const SamplerConfig& config, RngStream& rng,
                StepFlags* flags = nullptr);
void step_beta(SamplerState& state, const SamplerConfig& config, RngStream& rng);
void step_sources(SamplerState& state, const Matrix& Y, const SamplerConfig& config,
                  RngStream& rng, StepFlags* flags = nullptr);
void step_source_variance_alt(SamplerState& state, const SamplerConfig& config, RngStream& rng);
void step_sources_alt(SamplerState& state, const Matrix& Y, const SamplerConfig& config,
                      RngStream& rng);

/// Log of the unnormalized conditional density of one Gamma shape.
double log_alpha_target(double alpha, double beta, double sum_log_s, Index L,
                        const FixedHyperParams& fixed);

/// One full sweep in the fixed step order. Returns the acceptance record.
StepFlags gibbs_sweep(SamplerState& state, const Matrix& Y, const SamplerConfig& config,
                      RngStream& rng);

using ChainVisitor = std::function<void(const SamplerState&, const StepFlags&)>;

/// Runs initialization and config.n_iterations sweeps, calling `visit` after
/// each sweep. The shape step sizes adapt during burn-in only. Step errors are
/// rethrown as ChainError carrying the stream id and iteration.
void run_chain(const SamplerConfig& config, const Matrix& Y, const ChainVisitor& visit);

ChainTrace run_chain(const SamplerConfig& config, const Matrix& Y);

/// Runs chains with streams config.stream, config.stream + 1, ... on up to
/// `threads` worker threads. The result is in stream order regardless of
/// scheduling.
std::vector<ChainTrace> run_chains(const SamplerConfig& config, const Matrix& Y,
                                   std::size_t n_chains, std::size_t threads);

}  // namespace bss
