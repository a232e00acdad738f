#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bss/baselines.hpp"
#include "bss/cli.hpp"
#include "bss/error.hpp"
#include "bss/trace_io.hpp"

namespace bss::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

SimplexStrategy parse_strategy(const std::string& name) {
    const std::string n = lower(name);
    if (n == "joint" || n == "joint-mh") return SimplexStrategy::JointMH;
    if (n == "coordinate" || n == "gibbs") return SimplexStrategy::CoordinateGibbs;
    throw InvalidArgument("unknown simplex strategy '" + name + "' (auto, joint, coordinate)");
}

InitPolicy parse_init(const std::string& name) {
    const std::string n = lower(name);
    if (n == "prior") return InitPolicy::Prior;
    if (n == "data") return InitPolicy::DataScaled;
    if (n == "extremes") return InitPolicy::Extremes;
    throw InvalidArgument("unknown init policy '" + name + "' (prior, data, extremes)");
}

PsrfForm parse_psrf_form(const std::string& name) {
    const std::string n = lower(name);
    if (n == "printed") return PsrfForm::Printed;
    if (n == "canonical") return PsrfForm::Canonical;
    throw InvalidArgument("unknown PSRF form '" + name + "' (printed, canonical)");
}

const char* init_name(InitPolicy p) {
    switch (p) {
        case InitPolicy::Prior: return "prior";
        case InitPolicy::DataScaled: return "data";
        case InitPolicy::Extremes: return "extremes";
    }
    return "?";
}

const char* strategy_name(SimplexStrategy s) {
    return s == SimplexStrategy::JointMH ? "joint" : "coordinate";
}

Json hyper_json(const FixedHyperParams& f) {
    return {{"rho_e", f.rho_e},
            {"lambda_alpha", f.lambda_alpha},
            {"alpha_beta", f.alpha_beta},
            {"beta_beta", f.beta_beta},
            {"rho_s", f.rho_s},
            {"psi_s", f.psi_s},
            {"psi_e_min", f.psi_e_min},
            {"psi_e_max", f.psi_e_max},
            {"beta_shape_plus_one", f.beta_shape_plus_one}};
}

void write_timings(const fs::path& path, const Json& timings) {
    write_json(path, timings);
}

// Metrics of one estimate against the truth, after correlation alignment.
Json score(const Matrix& C_hat, const Matrix& S_hat, const Matrix& C_true, const Matrix& S_true,
           bool fit_scale) {
    if (C_hat.rows() != C_true.rows() || C_hat.cols() != C_true.cols()) {
        throw DataError("estimated C is " + std::to_string(C_hat.rows()) + "x" +
                        std::to_string(C_hat.cols()) + ", expected " +
                        std::to_string(C_true.rows()) + "x" + std::to_string(C_true.cols()));
    }
    if (S_hat.rows() != S_true.rows() || S_hat.cols() != S_true.cols()) {
        throw DataError("estimated S is " + std::to_string(S_hat.rows()) + "x" +
                        std::to_string(S_hat.cols()) + ", expected " +
                        std::to_string(S_true.rows()) + "x" + std::to_string(S_true.cols()));
    }
    const bool approximate = S_true.rows() > 8;
    const AlignmentMap map = align_sources(S_hat, S_true, fit_scale, approximate);
    const Matrix S = apply_to_sources(S_hat, map);
    const Matrix C = apply_to_concentrations(C_hat, map);
    Json j;
    j["nmse_S"] = nmse(S, S_true);
    j["nmse_C"] = nmse(C, C_true);
    j["mean_dissimilarity_percent"] = 100.0 * mean_dissimilarity(S, S_true);
    j["permutation"] = map.permutation;
    j["scale_fit"] = fit_scale;
    if (fit_scale) j["scales"] = map.scales;
    return j;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    ScenarioConfig config = scenario_config_from_json(read_json(a.config));
    if (a.seed) config.seed = *a.seed;
    const fs::path dir = a.out.empty() ? output_root() / "scenario" : fs::path(a.out);
    const Scenario scenario = generate_scenario(config);
    write_scenario(dir, scenario);
    out << "scenario written to " << dir.string() << " (M=" << config.M << ", N=" << config.N
        << ", L=" << config.L << ", noise variance " << format_double(scenario.sigma2) << ")\n";
    return kOk;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    std::string scenario;
    std::string out;
    std::size_t iters = 1000;
    std::size_t burn_in = 200;
    std::string prior = "gamma";
    std::size_t chains = 1;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    int M = 0;
    std::string estimator = "mmse";
    std::string simplex = "coordinate";
    std::string init = "extremes";
    std::string psrf_form = "printed";
    std::size_t bins = 50;
    FixedHyperParams fixed;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
    const auto start = Clock::now();
    if (a.burn_in >= a.iters) {
        throw InvalidArgument("--burn-in (" + std::to_string(a.burn_in) +
                              ") must be smaller than --iters (" + std::to_string(a.iters) + ")");
    }
    if (a.chains == 0) throw InvalidArgument("--chains must be at least 1");
    const std::string estimator = lower(a.estimator);
    if (estimator != "mmse" && estimator != "map") {
        throw InvalidArgument("--estimator must be mmse or map");
    }
    const PsrfForm psrf_form = parse_psrf_form(a.psrf_form);

    const ScenarioData data = read_scenario(a.scenario);
    int M = a.M;
    if (M == 0) {
        if (!data.M) throw InvalidArgument("--M is required when the scenario has no manifest");
        M = *data.M;
    }

    SamplerConfig config;
    config.M = M;
    config.n_iterations = a.iters;
    config.n_burn_in = a.burn_in;
    config.prior = parse_prior_kind(a.prior);
    config.fixed = a.fixed;
    config.seed = a.seed;
    config.init = parse_init(a.init);
    if (lower(a.simplex) == "auto") {
        config.strategy.reset();
    } else {
        config.strategy = parse_strategy(a.simplex);
    }
    config.validate();

    std::size_t threads = a.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

    const fs::path dir = a.out.empty() ? output_root() / "fit" : fs::path(a.out);
    fs::create_directories(dir);

    const auto sampling_start = Clock::now();
    std::vector<ChainTrace> traces = run_chains(config, data.Y, a.chains, threads);
    const double sampling_seconds = seconds_since(sampling_start);

    for (std::size_t k = 0; k < traces.size(); ++k) {
        write_trace(dir / ("trace_chain" + std::to_string(k) + ".jsonl"), traces[k]);
    }

    DiagnosticsOptions dopt;
    dopt.n_burn_in = a.burn_in;
    dopt.bins = a.bins;
    dopt.psrf_form = psrf_form;
    const Json diagnostics = write_diagnostics(dir / "diagnostics", traces, dopt, &data.Y);

    FitReport report;
    if (estimator == "mmse") {
        align_chains(traces, a.burn_in);
        report = mmse_estimate(traces, a.burn_in);
    } else {
        // best state over all chains; the earliest chain wins ties
        for (std::size_t k = 0; k < traces.size(); ++k) {
            FitReport r = map_estimate(traces[k], data.Y, config.fixed);
            if (k == 0 || r.log_posterior > report.log_posterior) report = std::move(r);
        }
    }

    write_csv(dir / "C_hat.csv", report.C.point, "c");
    write_csv(dir / "S_hat.csv", report.S.point, "b");

    Json j;
    j["schema"] = "bss.fit_report";
    j["version"] = kManifestVersion;
    j["settings"] = {{"M", M},
                     {"iters", a.iters},
                     {"burn_in", a.burn_in},
                     {"chains", a.chains},
                     {"seed", a.seed},
                     {"prior", to_string(config.prior)},
                     {"simplex", config.strategy ? strategy_name(*config.strategy) : "auto"},
                     {"init", init_name(config.init)},
                     {"estimator", estimator},
                     {"hyperparameters", hyper_json(config.fixed)}};
    if (!data.manifest.is_null()) j["scenario"] = data.manifest;
    j["estimate"] = to_json(report);
    j["diagnostics"] = diagnostics;

    // post-burn-in acceptance rates pooled over chains
    double simplex_acc = 0.0, alpha_acc = 0.0, source_acc = 0.0;
    double n_simplex = 0.0, n_alpha = 0.0, n_source = 0.0;
    for (const auto& trace : traces) {
        for (std::size_t t = a.burn_in; t < trace.flags.size(); ++t) {
            const StepFlags& f = trace.flags[t];
            for (int v : f.simplex) simplex_acc += v;
            n_simplex += static_cast<double>(f.simplex.size());
            for (int v : f.alpha) alpha_acc += v;
            n_alpha += static_cast<double>(f.alpha.size());
            for (int v : f.sources) source_acc += v;
            n_source += static_cast<double>(f.sources.size()) * static_cast<double>(trace.L);
        }
    }
    Json acc;
    acc["simplex"] = n_simplex > 0 ? simplex_acc / n_simplex : 0.0;
    if (config.prior == PriorKind::Gamma) {
        acc["alpha"] = n_alpha > 0 ? alpha_acc / n_alpha : 0.0;
        acc["sources"] = n_source > 0 ? source_acc / n_source : 0.0;
    }
    j["acceptance"] = acc;

    if (data.C_true && data.S_true) {
        j["metrics"] = score(report.C.point, report.S.point, *data.C_true, *data.S_true, false);
    }
    write_json(dir / "report.json", j);

    const double total = seconds_since(start);
    write_timings(dir / "timings.json",
                  {{"wall_seconds", total}, {"sampling_seconds", sampling_seconds}});

    out << "fit: " << a.chains << " chain(s) x " << a.iters << " iterations, prior "
        << to_string(config.prior) << ", " << estimator << " estimate -> " << dir.string() << "\n";
    if (j.contains("metrics")) {
        const Json& m = j["metrics"];
        out << "  NMSE(S) " << format_double(m["nmse_S"].get<double>()) << "  NMSE(C) "
            << format_double(m["nmse_C"].get<double>()) << "  dissimilarity "
            << format_double(m["mean_dissimilarity_percent"].get<double>()) << " %\n";
    }
    if (diagnostics.contains("psrf")) {
        double worst = 0.0;
        for (double v : diagnostics["psrf"].get<std::vector<double>>()) worst = std::max(worst, v);
        out << "  max sqrt(PSRF) over sigma2_e: " << format_double(worst) << " ("
            << to_string(psrf_form) << " form)\n";
    }
    out << "  wall time " << std::fixed << std::setprecision(2) << total << " s\n";
    out.unsetf(std::ios::fixed);
    return kOk;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
    std::string scenario;
    std::string out;
    std::vector<std::string> methods;
    std::vector<std::string> scaled_methods;
    bool nmf = false;
    std::size_t nmf_iters = 2000;
    std::size_t nmf_restarts = 10;
    std::uint64_t seed = 0;
};

struct MethodResult {
    std::string name;
    Json metrics;
    std::optional<double> wall_seconds;
};

std::pair<std::string, fs::path> split_method(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
        throw InvalidArgument("method '" + spec + "' must be given as NAME=DIRECTORY");
    }
    return {spec.substr(0, eq), fs::path(spec.substr(eq + 1))};
}

MethodResult score_directory(const std::string& spec, bool fit_scale, const ScenarioData& data) {
    const auto [name, dir] = split_method(spec);
    MethodResult r;
    r.name = name;
    if (!fs::is_directory(dir)) throw DataError("method '" + name + "': no directory " + dir.string());
    const Matrix C = read_csv(dir / "C_hat.csv");
    const Matrix S = read_csv(dir / "S_hat.csv");
    try {
        r.metrics = score(C, S, *data.C_true, *data.S_true, fit_scale);
    } catch (const Error& e) {
        throw DataError("method '" + name + "': " + e.what());
    }
    if (fs::exists(dir / "timings.json")) {
        const Json t = read_json(dir / "timings.json");
        if (t.contains("wall_seconds") && t["wall_seconds"].is_number()) {
            r.wall_seconds = t["wall_seconds"].get<double>();
        }
    }
    return r;
}

std::string table(const std::vector<MethodResult>& rows, bool with_times) {
    std::ostringstream s;
    std::size_t width = 6;
    for (const auto& r : rows) width = std::max(width, r.name.size());
    s << std::left << std::setw(static_cast<int>(width)) << "method" << "  " << std::right
      << std::setw(10) << "NMSE(S)" << "  " << std::setw(10) << "NMSE(C)" << "  "
      << std::setw(12) << "Diss(S) [%]";
    if (with_times) s << "  " << std::setw(10) << "time [s]";
    s << '\n';
    for (const auto& r : rows) {
        s << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << std::right
          << std::fixed << std::setprecision(4) << std::setw(10)
          << r.metrics["nmse_S"].get<double>() << "  " << std::setw(10)
          << r.metrics["nmse_C"].get<double>() << "  " << std::setprecision(2) << std::setw(12)
          << r.metrics["mean_dissimilarity_percent"].get<double>();
        if (with_times) {
            s << "  " << std::setw(10);
            if (r.wall_seconds) {
                s << std::setprecision(2) << *r.wall_seconds;
            } else {
                s << "-";
            }
        }
        s << '\n';
    }
    return s.str();
}

int cmd_compare(const CompareArgs& a, std::ostream& out) {
    const ScenarioData data = read_scenario(a.scenario);
    if (!data.C_true || !data.S_true) {
        throw DataError(a.scenario + ": comparison needs C_true.csv and S_true.csv");
    }
    if (a.methods.empty() && a.scaled_methods.empty() && !a.nmf) {
        throw InvalidArgument("nothing to compare: give --method, --scaled-method or --nmf");
    }
    const int M = static_cast<int>(data.S_true->rows());

    std::vector<MethodResult> rows;
    for (const auto& m : a.methods) rows.push_back(score_directory(m, false, data));
    for (const auto& m : a.scaled_methods) rows.push_back(score_directory(m, true, data));

    const fs::path dir = a.out.empty() ? output_root() / "compare" : fs::path(a.out);
    fs::create_directories(dir);

    if (a.nmf) {
        RngStream rng(a.seed, 0);
        const auto start = Clock::now();
        const NmfResult nmf = nmf_factorize(data.Y, M, a.nmf_iters, rng, a.nmf_restarts);
        const double nmf_seconds = seconds_since(start);
        const auto rescale_start = Clock::now();
        const Rescaled rescaled = rescale_full_additivity(nmf.C, nmf.S);
        const double rescale_seconds = nmf_seconds + seconds_since(rescale_start);

        fs::create_directories(dir / "nmf");
        fs::create_directories(dir / "nmf_rescaled");
        write_csv(dir / "nmf" / "C_hat.csv", nmf.C, "c");
        write_csv(dir / "nmf" / "S_hat.csv", nmf.S, "b");
        write_csv(dir / "nmf_rescaled" / "C_hat.csv", rescaled.C, "c");
        write_csv(dir / "nmf_rescaled" / "S_hat.csv", rescaled.S, "b");

        rows.push_back({"NMF", score(nmf.C, nmf.S, *data.C_true, *data.S_true, false), nmf_seconds});
        rows.push_back({"NMF (re-scaled)",
                        score(rescaled.C, rescaled.S, *data.C_true, *data.S_true, true),
                        rescale_seconds});
    }

    Json j;
    j["schema"] = "bss.comparison";
    j["version"] = kManifestVersion;
    if (!data.manifest.is_null()) j["scenario"] = data.manifest;
    j["alignment"] = "correlation-maximizing permutation";
    if (a.nmf) {
        j["nmf"] = {{"iterations", a.nmf_iters}, {"restarts", a.nmf_restarts}, {"seed", a.seed}};
    }
    Json methods = Json::array();
    Json timings = Json::object();
    for (const auto& r : rows) {
        Json m = r.metrics;
        m["name"] = r.name;
        methods.push_back(m);
        if (r.wall_seconds) timings[r.name] = *r.wall_seconds;
    }
    j["methods"] = methods;
    write_json(dir / "comparison.json", j);
    write_text(dir / "comparison.txt", table(rows, false));
    write_timings(dir / "timings.json", timings);
    out << table(rows, true);
    return kOk;
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseArgs {
    std::vector<std::string> traces;
    std::string out;
    std::optional<std::size_t> burn_in;
    std::size_t bins = 50;
    std::string psrf_form = "printed";
    bool require_psrf = false;
    std::string data;
};

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out) {
    std::vector<ChainTrace> traces;
    for (const auto& p : a.traces) traces.push_back(read_trace(fs::path(p)));
    DiagnosticsOptions opt;
    opt.n_burn_in = a.burn_in ? *a.burn_in : traces.front().n_burn_in;
    opt.bins = a.bins;
    opt.psrf_form = parse_psrf_form(a.psrf_form);
    opt.require_psrf = a.require_psrf;

    std::optional<Matrix> Y;
    if (!a.data.empty()) {
        Y = read_scenario(a.data).Y;
        if (Y->rows() != traces.front().N || Y->cols() != traces.front().L) {
            throw DataError("observations in " + a.data + " do not match the trace dimensions");
        }
    }
    const fs::path dir = a.out.empty() ? output_root() / "diagnostics" : fs::path(a.out);
    const Json summary = write_diagnostics(dir, traces, opt, Y ? &*Y : nullptr);
    write_json(dir / "summary.json", summary);

    out << "diagnostics for " << traces.size() << " chain(s) written to " << dir.string() << "\n";
    if (summary.contains("psrf")) {
        const auto values = summary["psrf"].get<std::vector<double>>();
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << "  sigma2_e" << (i + 1) << "  sqrt(PSRF) " << format_double(values[i]) << "\n";
        }
    } else {
        out << "  single chain: PSRF table skipped\n";
    }
    return kOk;
}

void add_hyper_options(CLI::App* app, FixedHyperParams& f) {
    app->add_option("--rho-e", f.rho_e, "noise-variance prior shape numerator")->capture_default_str();
    app->add_option("--lambda-alpha", f.lambda_alpha, "rate of the exponential prior on Gamma shapes")
        ->capture_default_str();
    app->add_option("--alpha-beta", f.alpha_beta, "shape of the Gamma prior on Gamma rates")
        ->capture_default_str();
    app->add_option("--beta-beta", f.beta_beta, "rate of the Gamma prior on Gamma rates")
        ->capture_default_str();
    app->add_option("--rho-s", f.rho_s, "alternate priors: source-scale prior shape")->capture_default_str();
    app->add_option("--psi-s", f.psi_s, "alternate priors: source-scale prior scale")->capture_default_str();
    app->add_option("--psi-e-min", f.psi_e_min, "lower end of the psi_e support")->capture_default_str();
    app->add_option("--psi-e-max", f.psi_e_max, "upper end of the psi_e support")->capture_default_str();
    app->add_flag("--beta-shape-plus-one", f.beta_shape_plus_one,
                  "use the printed +1 shape in the Gamma-rate conditional");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian separation of non-negative mixtures with sum-to-one abundances"};
    app.name("bss");
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "generate a synthetic scenario from a JSON config");
    s->add_option("config", synth.config, "scenario config (JSON)")->required();
    s->add_option("--out", synth.out, "output directory (default $BSS_OUTPUT_ROOT/scenario)");
    s->add_option("--seed", synth.seed, "override the config seed");

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "run the Gibbs sampler on a scenario directory");
    f->add_option("scenario", fit.scenario, "directory holding Y.csv")->required();
    f->add_option("--out", fit.out, "output directory (default $BSS_OUTPUT_ROOT/fit)");
    f->add_option("--iters", fit.iters, "iterations per chain")->capture_default_str();
    f->add_option("--burn-in", fit.burn_in, "burn-in iterations")->capture_default_str();
    f->add_option("--prior", fit.prior, "source prior: gamma, exp or tgauss")->capture_default_str();
    f->add_option("--chains", fit.chains, "number of chains")->capture_default_str();
    f->add_option("--seed", fit.seed, "seed; chain k uses stream k")->capture_default_str();
    f->add_option("--threads", fit.threads, "worker threads (0: all cores)")->capture_default_str();
    f->add_option("--M", fit.M, "number of sources (default: from the manifest)");
    f->add_option("--estimator", fit.estimator, "mmse or map")->capture_default_str();
    f->add_option("--simplex", fit.simplex, "concentration update: coordinate, joint or auto")
        ->capture_default_str();
    f->add_option("--init", fit.init, "starting point: extremes, data or prior")->capture_default_str();
    f->add_option("--psrf-form", fit.psrf_form, "printed or canonical")->capture_default_str();
    f->add_option("--bins", fit.bins, "histogram bins")->capture_default_str();
    add_hyper_options(f, fit.fixed);

    CompareArgs cmp;
    auto* c = app.add_subcommand("compare", "score estimates against a scenario's ground truth");
    c->add_option("scenario", cmp.scenario, "scenario directory with C_true.csv and S_true.csv")
        ->required();
    c->add_option("--method", cmp.methods, "NAME=DIR with C_hat.csv and S_hat.csv (no scale fit)");
    c->add_option("--scaled-method", cmp.scaled_methods,
                  "NAME=DIR scored with a least-squares scale per source");
    c->add_flag("--nmf", cmp.nmf, "also run NMF and re-scaled NMF");
    c->add_option("--nmf-iters", cmp.nmf_iters, "NMF multiplicative updates")->capture_default_str();
    c->add_option("--nmf-restarts", cmp.nmf_restarts, "NMF restarts")->capture_default_str();
    c->add_option("--seed", cmp.seed, "NMF seed")->capture_default_str();
    c->add_option("--out", cmp.out, "output directory (default $BSS_OUTPUT_ROOT/compare)");

    DiagnoseArgs diag;
    auto* d = app.add_subcommand("diagnose", "PSRF, trace series and histograms from trace files");
    d->add_option("traces", diag.traces, "trace files (.jsonl)")->required()->check(CLI::ExistingFile);
    d->add_option("--out", diag.out, "output directory (default $BSS_OUTPUT_ROOT/diagnostics)");
    d->add_option("--burn-in", diag.burn_in, "burn-in (default: from the trace header)");
    d->add_option("--bins", diag.bins, "histogram bins")->capture_default_str();
    d->add_option("--psrf-form", diag.psrf_form, "printed or canonical")->capture_default_str();
    d->add_flag("--psrf", diag.require_psrf, "fail unless a PSRF table can be computed");
    d->add_option("--data", diag.data, "scenario directory; adds the reconstruction-error curve");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kArgumentError;
    }

    try {
        if (*s) return cmd_synth(synth, out);
        if (*f) return cmd_fit(fit, out);
        if (*c) return cmd_compare(cmp, out);
        if (*d) return cmd_diagnose(diag, out);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kArgumentError;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << "\n";
        return kArgumentError;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const fs::filesystem_error& e) {
        err << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumericalError;
    }
    return kArgumentError;
}

}  // namespace bss::cli
