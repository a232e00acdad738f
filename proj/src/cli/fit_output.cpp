#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "bss/cli.hpp"
#include "bss/error.hpp"

namespace bss::cli {

namespace fs = std::filesystem;

fs::path output_root() {
    const char* root = std::getenv("BSS_OUTPUT_ROOT");
    if (root && *root) return fs::path(root);
    return fs::path("bss_output");
}

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
    return out;
}

namespace {

Json summary_json(const MatrixSummary& s) {
    return {{"point", to_json(s.point)}, {"lower", to_json(s.lower)}, {"upper", to_json(s.upper)}};
}

Json summary_json(const VectorSummary& s) {
    return {{"point", to_json(s.point)}, {"lower", to_json(s.lower)}, {"upper", to_json(s.upper)}};
}

std::string chain_series_name(std::size_t k, const std::string& what) {
    return "chain" + std::to_string(k) + "_" + what + ".csv";
}

// One CSV with an iteration column followed by the given per-iteration values.
template <typename Get>
void write_series(const fs::path& path, const ChainTrace& trace, const std::vector<std::string>& labels,
                  Get get) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << "iteration";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (std::size_t t = 0; t < trace.size(); ++t) {
        out << (t + 1);
        const std::vector<double> values = get(trace.states[t]);
        for (double v : values) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

std::vector<std::string> numbered(const std::string& prefix, Index n) {
    std::vector<std::string> labels;
    for (Index k = 1; k <= n; ++k) labels.push_back(prefix + std::to_string(k));
    return labels;
}

std::vector<double> as_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

struct HistogramWriter {
    std::ofstream out;
    std::size_t bins;

    HistogramWriter(const fs::path& path, std::size_t b) : out(path, std::ios::binary), bins(b) {
        if (!out) throw DataError("cannot write " + path.string());
        out << "parameter,bin,lower,upper,count\n";
    }

    void add(const std::string& name, const std::vector<double>& values) {
        const Histogram h = histogram(values, bins);
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            const double lo = h.lower + h.bin_width() * static_cast<double>(b);
            const double hi = b + 1 == h.counts.size() ? h.upper : lo + h.bin_width();
            out << name << ',' << (b + 1) << ',' << format_double(lo) << ',' << format_double(hi)
                << ',' << h.counts[b] << '\n';
        }
    }
};

template <typename Get>
std::vector<double> pooled(const std::vector<ChainTrace>& traces, std::size_t n_burn_in, Get get) {
    std::vector<double> values;
    for (const auto& trace : traces) {
        for (std::size_t t = n_burn_in; t < trace.size(); ++t) values.push_back(get(trace.states[t]));
    }
    return values;
}

}  // namespace

Json to_json(const FitReport& r) {
    Json j;
    j["estimator"] = r.estimator;
    j["prior"] = to_string(r.prior);
    j["n_samples"] = r.n_samples;
    j["C"] = summary_json(r.C);
    j["S"] = summary_json(r.S);
    j["sigma2_e"] = summary_json(r.sigma2_e);
    j["psi_e"] = {{"point", r.psi_e.point}, {"lower", r.psi_e.lower}, {"upper", r.psi_e.upper}};
    if (r.prior == PriorKind::Gamma) {
        j["alpha"] = summary_json(r.alpha);
        j["beta"] = summary_json(r.beta);
    } else {
        j["sigma2_s"] = summary_json(r.sigma2_s);
    }
    if (r.estimator == "map") {
        j["map_index"] = r.map_index;
        j["log_posterior"] = r.log_posterior;
    }
    return j;
}

std::vector<double> noise_psrf(const std::vector<ChainTrace>& traces, std::size_t n_burn_in,
                               PsrfForm form) {
    if (traces.size() < 2) throw InvalidArgument("PSRF needs at least two chains");
    const Index N = traces.front().N;
    std::vector<double> out;
    for (Index i = 0; i < N; ++i) {
        std::vector<std::vector<double>> chains;
        for (const auto& trace : traces) {
            if (n_burn_in >= trace.size()) {
                throw InvalidArgument("burn-in leaves no samples for the PSRF");
            }
            std::vector<double> series;
            for (std::size_t t = n_burn_in; t < trace.size(); ++t) {
                series.push_back(trace.states[t].sigma2_e[i]);
            }
            chains.push_back(std::move(series));
        }
        out.push_back(psrf(chains, form));
    }
    return out;
}

Json write_diagnostics(const fs::path& dir, const std::vector<ChainTrace>& traces,
                       const DiagnosticsOptions& options, const Matrix* Y) {
    if (traces.empty()) throw InvalidArgument("diagnostics need at least one trace");
    const ChainTrace& first = traces.front();
    for (const auto& t : traces) {
        if (t.N != first.N || t.M != first.M || t.L != first.L || t.prior != first.prior) {
            throw DataError("traces disagree in dimensions or prior");
        }
        if (t.size() != first.size()) throw DataError("traces have different lengths");
    }
    if (options.n_burn_in >= first.size()) {
        throw InvalidArgument("burn-in (" + std::to_string(options.n_burn_in) +
                              ") must be smaller than the trace length (" +
                              std::to_string(first.size()) + ")");
    }
    if (options.require_psrf && traces.size() < 2) {
        throw InvalidArgument("PSRF requested but only one chain was given; "
                              "the statistic compares at least two chains");
    }

    fs::create_directories(dir / "series");
    fs::create_directories(dir / "histograms");
    Json summary;
    summary["chains"] = traces.size();
    summary["iterations"] = first.size();
    summary["burn_in"] = options.n_burn_in;

    if (traces.size() >= 2) {
        const std::vector<double> values = noise_psrf(traces, options.n_burn_in, options.psrf_form);
        std::ofstream out(dir / "psrf.csv", std::ios::binary);
        if (!out) throw DataError("cannot write " + (dir / "psrf.csv").string());
        out << "observation,psrf\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << (i + 1) << ',' << format_double(values[i]) << '\n';
        }
        summary["psrf_form"] = to_string(options.psrf_form);
        summary["psrf"] = values;
    }

    const bool gamma = first.prior == PriorKind::Gamma;
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const ChainTrace& trace = traces[k];
        write_series(dir / "series" / chain_series_name(k, "sigma2_e"), trace,
                     numbered("sigma2_e", trace.N),
                     [](const SamplerState& s) { return as_std(s.sigma2_e); });
        write_series(dir / "series" / chain_series_name(k, "psi_e"), trace, {"psi_e"},
                     [](const SamplerState& s) { return std::vector<double>{s.psi_e}; });
        if (gamma) {
            write_series(dir / "series" / chain_series_name(k, "alpha"), trace,
                         numbered("alpha", trace.M),
                         [](const SamplerState& s) { return as_std(s.alpha); });
            write_series(dir / "series" / chain_series_name(k, "beta"), trace,
                         numbered("beta", trace.M),
                         [](const SamplerState& s) { return as_std(s.beta); });
        } else {
            write_series(dir / "series" / chain_series_name(k, "sigma2_s"), trace,
                         numbered("sigma2_s", trace.M),
                         [](const SamplerState& s) { return as_std(s.sigma2_s); });
        }
    }

    const std::size_t nb = options.n_burn_in;
    {
        HistogramWriter h(dir / "histograms" / "concentrations.csv", options.bins);
        for (Index i = 0; i < first.N; ++i) {
            for (Index m = 0; m < first.M; ++m) {
                h.add("c" + std::to_string(i + 1) + "_" + std::to_string(m + 1),
                      pooled(traces, nb, [&](const SamplerState& s) { return s.C(i, m); }));
            }
        }
    }
    {
        HistogramWriter h(dir / "histograms" / "sigma2_e.csv", options.bins);
        for (Index i = 0; i < first.N; ++i) {
            h.add("sigma2_e" + std::to_string(i + 1),
                  pooled(traces, nb, [&](const SamplerState& s) { return s.sigma2_e[i]; }));
        }
    }
    {
        HistogramWriter h(dir / "histograms" / "source_hyperparameters.csv", options.bins);
        for (Index m = 0; m < first.M; ++m) {
            const std::string idx = std::to_string(m + 1);
            if (gamma) {
                h.add("alpha" + idx, pooled(traces, nb, [&](const SamplerState& s) { return s.alpha[m]; }));
                h.add("beta" + idx, pooled(traces, nb, [&](const SamplerState& s) { return s.beta[m]; }));
            } else {
                h.add("sigma2_s" + idx,
                      pooled(traces, nb, [&](const SamplerState& s) { return s.sigma2_s[m]; }));
            }
        }
    }

    if (Y) {
        const std::vector<double> curve = reconstruction_error_curve(first, *Y, nb);
        write_series_csv(dir / "reconstruction_error.csv", "p", "error", curve);
        summary["reconstruction_error_final"] = curve.back();
    }
    return summary;
}

}  // namespace bss::cli
