#include "bss/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bss/error.hpp"
#include "bss/kernels.hpp"

namespace bss {

double peak_value(const PeakSpec& peak, double band) {
    const double d = band - peak.location;
    if (peak.kind == PeakKind::Gaussian) {
        return peak.amplitude * std::exp(-d * d / (2.0 * peak.width * peak.width));
    }
    const double w2 = peak.width * peak.width;
    return peak.amplitude * w2 / (d * d + w2);
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw InvalidArgument("scenario field '" + field + "': " + why);
    };
    if (M < 1) fail("M", "must be at least 1");
    if (N < 1) fail("N", "must be at least 1");
    if (L < 1) fail("L", "must be at least 1");
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
        fail("snr_db", "must be a number or +inf");
    }
    if (min_peaks < 1) fail("min_peaks", "must be at least 1");
    if (max_peaks < min_peaks) fail("max_peaks", "must be at least min_peaks");
    if (!(location_min >= 0.0 && location_min <= location_max && location_max <= 1.0)) {
        fail("location_range", "must satisfy 0 <= min <= max <= 1");
    }
    if (!(width_min > 0.0 && width_min <= width_max)) fail("width_range", "must satisfy 0 < min <= max");
    if (!(amplitude_min > 0.0 && amplitude_min <= amplitude_max)) {
        fail("amplitude_range", "must satisfy 0 < min <= max");
    }
    if (!(lorentzian_fraction >= 0.0 && lorentzian_fraction <= 1.0)) {
        fail("lorentzian_fraction", "must lie in [0, 1]");
    }
    if (!(t_max > 0.0) || !std::isfinite(t_max)) fail("t_max", "must be positive");
    if (!rates.empty() && static_cast<int>(rates.size()) != M - 1) {
        fail("rates", "needs M - 1 = " + std::to_string(M - 1) + " entries");
    }
    for (double k : rates) {
        if (!(k > 0.0) || !std::isfinite(k)) fail("rates", "entries must be positive");
    }
}

std::vector<double> ScenarioConfig::effective_rates() const {
    if (!rates.empty()) return rates;
    if (M == 2) return {0.5};
    std::vector<double> out;
    for (int m = 0; m + 1 < M; ++m) {
        out.push_back(2.0 * std::pow(0.1, static_cast<double>(m) / static_cast<double>(M - 2)));
    }
    return out;
}

GeneratedSources gen_sources(const ScenarioConfig& config, RngStream& rng) {
    config.validate();
    const double L = static_cast<double>(config.L);
    GeneratedSources out;
    out.S = Matrix::Zero(config.M, config.L);
    out.peaks.resize(static_cast<std::size_t>(config.M));
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
    for (int m = 0; m < config.M; ++m) {
        const auto span = static_cast<std::uint64_t>(config.max_peaks - config.min_peaks + 1);
        const int count = config.min_peaks + static_cast<int>(rng.below(span));
        for (int p = 0; p < count; ++p) {
            PeakSpec peak;
            peak.kind = rng.uniform() < config.lorentzian_fraction ? PeakKind::Lorentzian
                                                                   : PeakKind::Gaussian;
            peak.location = uniform(config.location_min * L, config.location_max * L);
            peak.width = uniform(config.width_min * L, config.width_max * L);
            peak.amplitude = uniform(config.amplitude_min, config.amplitude_max);
            for (int j = 0; j < config.L; ++j) out.S(m, j) += peak_value(peak, j);
            out.peaks[static_cast<std::size_t>(m)].push_back(peak);
        }
    }
    return out;
}

std::vector<double> observation_times(const ScenarioConfig& config) {
    std::vector<double> t(static_cast<std::size_t>(config.N), 0.0);
    for (int i = 1; i < config.N; ++i) {
        t[static_cast<std::size_t>(i)] =
            static_cast<double>(i) * config.t_max / static_cast<double>(config.N - 1);
    }
    return t;
}

Matrix kinetic_concentrations(const std::vector<double>& rates, const std::vector<double>& times) {
    const std::size_t M = rates.size() + 1;
    for (std::size_t a = 0; a < rates.size(); ++a) {
        if (!(rates[a] > 0.0)) throw InvalidArgument("kinetic rates must be positive");
        for (std::size_t b = 0; b < a; ++b) {
            if (std::abs(rates[a] - rates[b]) <= 1e-9 * std::max(rates[a], rates[b])) {
                throw InvalidArgument("kinetic rates must be pairwise distinct");
            }
        }
    }
    Matrix C = Matrix::Zero(static_cast<Index>(times.size()), static_cast<Index>(M));
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (!(t >= 0.0)) throw InvalidArgument("observation times must be non-negative");
        const auto r = static_cast<Index>(i);
        if (t == 0.0) {
            C(r, 0) = 1.0;
            continue;
        }
        double others = 0.0;
        // Bateman solution for species n < M of the cascade
        for (std::size_t n = 0; n + 1 < M; ++n) {
            double prefactor = 1.0;
            for (std::size_t k = 0; k < n; ++k) prefactor *= rates[k];
            double total = 0.0;
            for (std::size_t k = 0; k <= n; ++k) {
                double den = 1.0;
                for (std::size_t l = 0; l <= n; ++l) {
                    if (l != k) den *= rates[l] - rates[k];
                }
                total += std::exp(-rates[k] * t) / den;
            }
            const double value = std::clamp(prefactor * total, 0.0, 1.0);
            C(r, static_cast<Index>(n)) = value;
            others += value;
        }
        C(r, static_cast<Index>(M - 1)) = std::max(0.0, 1.0 - others);
    }
    return C;
}

Matrix gen_kinetic_abundances(const ScenarioConfig& config) {
    config.validate();
    return kinetic_concentrations(config.effective_rates(), observation_times(config));
}

NoisyObservations add_noise(const Matrix& Y0, double snr_db, RngStream& rng) {
    if (!all_finite(Y0)) throw DataError("add_noise: signal has non-finite entries");
    if (std::isnan(snr_db)) throw InvalidArgument("add_noise: snr_db is NaN");
    double power = 0.0;
    for (Index r = 0; r < Y0.rows(); ++r) power += kernels::squared_norm(row_span(Y0, r));
    if (!(power > 0.0)) throw DataError("add_noise: signal is identically zero");
    NoisyObservations out;
    out.Y = Y0;
    if (snr_db == std::numeric_limits<double>::infinity()) return out;
    out.sigma2 = power / static_cast<double>(Y0.size()) / std::pow(10.0, snr_db / 10.0);
    const double sd = std::sqrt(out.sigma2);
    for (Index k = 0; k < out.Y.size(); ++k) out.Y.data()[k] += sd * rng.normal();
    return out;
}

Scenario generate_scenario(const ScenarioConfig& config) {
    config.validate();
    Scenario sc;
    sc.config = config;
    RngStream source_rng(config.seed, 0);
    GeneratedSources g = gen_sources(config, source_rng);
    sc.S = std::move(g.S);
    sc.peaks = std::move(g.peaks);
    sc.C = gen_kinetic_abundances(config);
    RngStream noise_rng(config.seed, 1);
    NoisyObservations noisy = add_noise(sc.C * sc.S, config.snr_db, noise_rng);
    sc.Y = std::move(noisy.Y);
    sc.sigma2 = noisy.sigma2;
    return sc;
}

}  // namespace bss
