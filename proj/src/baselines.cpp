#include "bss/baselines.hpp"

#include <cmath>
#include <iostream>

#include "bss/error.hpp"
#include "bss/kernels.hpp"

namespace bss {

double nmf_objective(const Matrix& Y, const Matrix& C, const Matrix& S) {
    if (C.rows() != Y.rows() || S.cols() != Y.cols() || C.cols() != S.rows()) {
        throw DimensionError("nmf_objective: shape mismatch");
    }
    const Matrix R = Y - C * S;
    return R.squaredNorm();
}

namespace {

void multiply_divide_rows(Matrix& X, const Matrix& num, const Matrix& den) {
    for (Index r = 0; r < X.rows(); ++r) {
        kernels::multiply_divide(row_span(X, r), row_span(num, r), row_span(den, r));
    }
}

}  // namespace

void nmf_update(const Matrix& Y, Matrix& C, Matrix& S, std::size_t n_iters,
                std::vector<double>* history) {
    if (n_iters == 0) throw InvalidArgument("nmf: iteration count must be positive");
    if (history) history->assign(1, nmf_objective(Y, C, S));
    for (std::size_t it = 0; it < n_iters; ++it) {
        {
            const Matrix num = C.transpose() * Y;
            const Matrix den = (C.transpose() * C) * S;
            multiply_divide_rows(S, num, den);
        }
        if (history) history->push_back(nmf_objective(Y, C, S));
        {
            const Matrix num = Y * S.transpose();
            const Matrix den = C * (S * S.transpose());
            multiply_divide_rows(C, num, den);
        }
        if (history) history->push_back(nmf_objective(Y, C, S));
    }
}

NmfResult nmf_factorize(const Matrix& Y, int M, std::size_t n_iters, RngStream& rng,
                        std::size_t restarts) {
    if (M < 1) throw InvalidArgument("nmf: M must be at least 1");
    if (n_iters == 0) throw InvalidArgument("nmf: iteration count must be positive");
    if (restarts == 0) throw InvalidArgument("nmf: restart count must be positive");
    if (Y.size() == 0 || !all_finite(Y)) throw DataError("nmf: data must be non-empty and finite");

    Matrix Yc = Y;
    std::size_t clamped = 0;
    for (Index k = 0; k < Yc.size(); ++k) {
        if (Yc.data()[k] < 0.0) {
            Yc.data()[k] = 0.0;
            ++clamped;
        }
    }
    if (clamped > 0) {
        std::cerr << "warning: nmf clamped " << clamped << " negative data entries to zero\n";
    }
    const double mean = Yc.sum() / static_cast<double>(Yc.size());
    const double scale = std::sqrt((mean > 0.0 ? mean : 1.0) / static_cast<double>(M));

    NmfResult best;
    best.clamped_entries = clamped;
    for (std::size_t r = 0; r < restarts; ++r) {
        Matrix C(Y.rows(), M);
        Matrix S(M, Y.cols());
        for (Index k = 0; k < C.size(); ++k) C.data()[k] = scale * std::abs(rng.normal());
        for (Index k = 0; k < S.size(); ++k) S.data()[k] = scale * std::abs(rng.normal());
        nmf_update(Yc, C, S, n_iters);
        const double obj = nmf_objective(Yc, C, S);
        if (r == 0 || obj < best.objective) {
            best.C = std::move(C);
            best.S = std::move(S);
            best.objective = obj;
            best.best_restart = r;
        }
    }
    return best;
}

Rescaled rescale_full_additivity(const Matrix& C, const Matrix& S) {
    Rescaled out{C, S};
    for (Index i = 0; i < C.rows(); ++i) {
        double total = 0.0;
        for (Index m = 0; m < C.cols(); ++m) {
            if (C(i, m) < 0.0) throw InvalidArgument("rescale: negative concentration");
            total += C(i, m);
        }
        if (!(total > 0.0)) {
            throw InvalidArgument("rescale: concentration row " + std::to_string(i) +
                                  " sums to zero");
        }
        out.C.row(i) /= total;
    }
    return out;
}

}  // namespace bss
