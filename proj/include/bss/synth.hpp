#pragma once

// Synthetic mixtures: peak-superposition spectra, kinetic abundance
// profiles and white noise at a target SNR.

#include <cstdint>
#include <vector>

#include "bss/matrix.hpp"
#include "bss/rng.hpp"

namespace bss {

enum class PeakKind { Gaussian, Lorentzian };

struct PeakSpec {
    PeakKind kind = PeakKind::Gaussian;
    double location = 0.0;   ///< band index units
    double amplitude = 1.0;
    double width = 1.0;      ///< band units
};

/// Gaussian: A exp(-(j - loc)^2 / (2 w^2)); Lorentzian: A w^2 / ((j - loc)^2 + w^2).
double peak_value(const PeakSpec& peak, double band);

struct ScenarioConfig {
    int M = 3;
    int N = 10;
    int L = 1000;
    /// Signal-to-noise ratio in dB; +infinity for noiseless data.
    double snr_db = 20.0;
    int min_peaks = 5;
    int max_peaks = 10;
    double location_min = 0.05;  ///< fraction of L
    double location_max = 0.95;
    double width_min = 0.005;    ///< fraction of L (L/200)
    double width_max = 0.025;    ///< fraction of L (L/40)
    double amplitude_min = 0.3;
    double amplitude_max = 1.0;
    /// Probability that a peak is Lorentzian rather than Gaussian.
    double lorentzian_fraction = 0.1;
    /// First-order rates of the cascade 1 -> 2 -> ... -> M (M - 1 distinct
    /// values). Empty selects rates falling geometrically from 2 to 0.2
    /// (a single rate of 0.5 when M = 2).
    std::vector<double> rates;
    /// Observations are taken at t_i = i t_max / (N - 1).
    double t_max = 15.0;
    std::uint64_t seed = 1;

    void validate() const;
    std::vector<double> effective_rates() const;
};

struct GeneratedSources {
    Matrix S;                                 ///< M x L
    std::vector<std::vector<PeakSpec>> peaks; ///< per source
};

GeneratedSources gen_sources(const ScenarioConfig& config, RngStream& rng);

/// Sampling times of the kinetic profiles.
std::vector<double> observation_times(const ScenarioConfig& config);

/// Concentrations of a first-order cascade started from pure species 1,
/// one row per time. The last species is one minus the others.
Matrix kinetic_concentrations(const std::vector<double>& rates, const std::vector<double>& times);

/// N x M kinetic profiles for the configured rates and times.
Matrix gen_kinetic_abundances(const ScenarioConfig& config);

struct NoisyObservations {
    Matrix Y;
    double sigma2 = 0.0;
};

/// Adds i.i.d. N(0, sigma2) noise with sigma2 = ||Y0||_F^2 / (N L) / 10^(snr_db / 10).
NoisyObservations add_noise(const Matrix& Y0, double snr_db, RngStream& rng);

struct Scenario {
    ScenarioConfig config;
    Matrix Y, C, S;
    double sigma2 = 0.0;
    std::vector<std::vector<PeakSpec>> peaks;
};

/// Sources use stream (seed, 0), noise stream (seed, 1); abundances are deterministic.
Scenario generate_scenario(const ScenarioConfig& config);

}  // namespace bss
