#pragma once

// Multiplicative-update NMF and the sum-to-one rescaling used for comparison.

#include <cstddef>
#include <vector>

#include "bss/matrix.hpp"
#include "bss/rng.hpp"

namespace bss {

/// ||Y - C S||_F^2
double nmf_objective(const Matrix& Y, const Matrix& C, const Matrix& S);

/// Runs n_iters Lee-Seung updates (S first, then C) in place. Entries whose
/// update denominator is zero are left unchanged. When `history` is given it
/// receives the objective before the first update and after every half-update
/// (2 n_iters + 1 values).
void nmf_update(const Matrix& Y, Matrix& C, Matrix& S, std::size_t n_iters,
                std::vector<double>* history = nullptr);

struct NmfResult {
    Matrix C;  ///< N x M, >= 0
    Matrix S;  ///< M x L, >= 0
    double objective = 0.0;
    std::size_t best_restart = 0;
    std::size_t clamped_entries = 0;  ///< negative entries of Y set to zero
};

/// Best of `restarts` factorizations from |Gaussian| initializations scaled to
/// the magnitude of Y. Negative entries of Y are clamped to zero with a
/// warning on stderr.
NmfResult nmf_factorize(const Matrix& Y, int M, std::size_t n_iters, RngStream& rng,
                        std::size_t restarts = 10);

struct Rescaled {
    Matrix C;
    Matrix S;
};

/// Divides every row of C by its sum; S is returned unchanged.
Rescaled rescale_full_additivity(const Matrix& C, const Matrix& S);

}  // namespace bss
