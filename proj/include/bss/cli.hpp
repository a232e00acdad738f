#pragma once

// The `bss` command-line tool: synth, fit, compare and diagnose.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bss/estimators.hpp"
#include "bss/eval.hpp"
#include "bss/io.hpp"

namespace bss::cli {

enum ExitCode : int { kOk = 0, kArgumentError = 2, kDataError = 3, kNumericalError = 4 };

/// Parses argv, runs one subcommand and maps library errors to exit codes.
/// Messages go to `err`; summaries (including wall times) go to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// $BSS_OUTPUT_ROOT, or "bss_output" when unset or empty.
std::filesystem::path output_root();

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const FitReport& report);

/// Square-root PSRF of each sigma2_e[i] over the post-burn-in states of all chains.
std::vector<double> noise_psrf(const std::vector<ChainTrace>& traces, std::size_t n_burn_in,
                               PsrfForm form);

struct DiagnosticsOptions {
    std::size_t n_burn_in = 0;
    std::size_t bins = 50;
    PsrfForm psrf_form = PsrfForm::Printed;
    /// Fail instead of skipping the PSRF table when there is a single chain.
    bool require_psrf = false;
};

/// Writes the diagnostics bundle into `dir`:
///   psrf.csv                      observation, psrf (two or more chains)
///   series/chain{k}_{name}.csv    per-iteration traces of sigma2_e, psi_e and
///                                 alpha/beta or sigma2_s
///   histograms/{name}.csv         binned post-burn-in posteriors of every
///                                 c_{i,m}, sigma2_e[i] and the source hyperparameters
///   reconstruction_error.csv      p, error for chain 0 (only when Y is given)
/// Returns a JSON summary of what was written.
Json write_diagnostics(const std::filesystem::path& dir, const std::vector<ChainTrace>& traces,
                       const DiagnosticsOptions& options, const Matrix* Y);

}  // namespace bss::cli
