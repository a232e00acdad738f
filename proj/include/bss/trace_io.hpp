#pragma once

// Line-delimited chain trace files.
//
// Line 1 is a header object:
//   {"schema":"bss.trace","version":1,"N":..,"M":..,"L":..,"prior":"gamma",
//    "seed":..,"stream":..,"n_burn_in":..,"n_iterations":..}
// followed by one object per iteration:
//   {"t":1,"psi_e":..,"sigma2_e":[N],"C":[[M] x N],"discard":[N],"S":[[L] x M],
//    "alpha":[M],"beta":[M],"sigma2_s":[M],"alpha_step":[M],
//    "accept":{"simplex":[N],"alpha":[M],"sources":[M]}}
// Vectors that do not apply to the prior are written as empty arrays.
// Concentration indices in "discard" are 0-based.

#include <filesystem>
#include <iosfwd>

#include "bss/gibbs.hpp"

namespace bss {

inline constexpr int kTraceVersion = 1;

void write_trace(std::ostream& out, const ChainTrace& trace);
void write_trace(const std::filesystem::path& path, const ChainTrace& trace);

/// Throws DataError on a malformed or unsupported file.
ChainTrace read_trace(std::istream& in);
ChainTrace read_trace(const std::filesystem::path& path);

}  // namespace bss
