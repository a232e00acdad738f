#include "bss/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bss/error.hpp"

namespace bss {

namespace {

struct Pool {
    std::vector<const SamplerState*> states;
};

Pool collect(const std::vector<ChainTrace>& traces, std::size_t n_burn_in) {
    if (traces.empty()) throw InvalidArgument("mmse_estimate: no chains");
    Pool pool;
    const ChainTrace& first = traces.front();
    for (const ChainTrace& t : traces) {
        if (t.N != first.N || t.M != first.M || t.L != first.L || t.prior != first.prior) {
            throw DimensionError("mmse_estimate: chains differ in dimensions or prior");
        }
        if (n_burn_in >= t.size()) {
            throw InvalidArgument("mmse_estimate: burn-in of " + std::to_string(n_burn_in) +
                                  " leaves an empty post-burn-in segment");
        }
        for (std::size_t k = n_burn_in; k < t.size(); ++k) pool.states.push_back(&t.states[k]);
    }
    return pool;
}

template <class Get>
MatrixSummary summarize_matrix(const Pool& pool, Index rows, Index cols, Get get) {
    MatrixSummary out;
    out.point = Matrix::Zero(rows, cols);
    out.lower.resize(rows, cols);
    out.upper.resize(rows, cols);
    std::vector<double> values(pool.states.size());
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            double total = 0.0;
            for (std::size_t k = 0; k < pool.states.size(); ++k) {
                values[k] = get(*pool.states[k])(r, c);
                total += values[k];
            }
            out.point(r, c) = total / static_cast<double>(values.size());
            out.lower(r, c) = empirical_quantile(values, 0.025);
            out.upper(r, c) = empirical_quantile(values, 0.975);
        }
    }
    return out;
}

template <class Get>
VectorSummary summarize_vector(const Pool& pool, Index n, Get get) {
    VectorSummary out;
    out.point = Vector::Zero(n);
    out.lower.resize(n);
    out.upper.resize(n);
    std::vector<double> values(pool.states.size());
    for (Index r = 0; r < n; ++r) {
        double total = 0.0;
        for (std::size_t k = 0; k < pool.states.size(); ++k) {
            values[k] = get(*pool.states[k])[r];
            total += values[k];
        }
        out.point[r] = total / static_cast<double>(values.size());
        out.lower[r] = empirical_quantile(values, 0.025);
        out.upper[r] = empirical_quantile(values, 0.975);
    }
    return out;
}

VectorSummary point_vector(const Vector& v) { return {v, v, v}; }

}  // namespace

double empirical_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InvalidArgument("empirical_quantile: no values");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("empirical_quantile: q outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

namespace {

FitReport summarize_pool(const Pool& pool, const ChainTrace& t0) {
    FitReport r;
    r.estimator = "mmse";
    r.prior = t0.prior;
    r.n_samples = pool.states.size();
    r.C = summarize_matrix(pool, t0.N, t0.M, [](const SamplerState& s) -> const Matrix& { return s.C; });
    r.S = summarize_matrix(pool, t0.M, t0.L, [](const SamplerState& s) -> const Matrix& { return s.S; });
    r.sigma2_e = summarize_vector(pool, t0.N, [](const SamplerState& s) -> const Vector& { return s.sigma2_e; });
    const SamplerState& any = *pool.states.front();
    if (any.alpha.size() > 0) {
        r.alpha = summarize_vector(pool, t0.M, [](const SamplerState& s) -> const Vector& { return s.alpha; });
        r.beta = summarize_vector(pool, t0.M, [](const SamplerState& s) -> const Vector& { return s.beta; });
    }
    if (any.sigma2_s.size() > 0) {
        r.sigma2_s = summarize_vector(pool, t0.M, [](const SamplerState& s) -> const Vector& { return s.sigma2_s; });
    }
    std::vector<double> psi(pool.states.size());
    double total = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k) {
        psi[k] = pool.states[k]->psi_e;
        total += psi[k];
    }
    r.psi_e.point = total / static_cast<double>(psi.size());
    r.psi_e.lower = empirical_quantile(psi, 0.025);
    r.psi_e.upper = empirical_quantile(psi, 0.975);
    return r;
}

}  // namespace

FitReport mmse_estimate(const std::vector<ChainTrace>& traces, std::size_t n_burn_in) {
    const Pool pool = collect(traces, n_burn_in);
    return summarize_pool(pool, traces.front());
}

FitReport mmse_estimate(const ChainTrace& trace, std::size_t n_burn_in) {
    if (n_burn_in >= trace.size()) {
        throw InvalidArgument("mmse_estimate: burn-in of " + std::to_string(n_burn_in) +
                              " leaves an empty post-burn-in segment");
    }
    Pool pool;
    for (std::size_t k = n_burn_in; k < trace.size(); ++k) pool.states.push_back(&trace.states[k]);
    return summarize_pool(pool, trace);
}

FitReport map_estimate(const ChainTrace& trace, const Matrix& Y, const FixedHyperParams& fixed) {
    if (trace.size() == 0) throw InvalidArgument("map_estimate: empty trace");
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const SamplerState& s = trace.states[k];
        const double v = trace.prior == PriorKind::Gamma
                             ? log_posterior_completed(Y, s.C, s.S, s.sigma2_e, s.alpha, fixed)
                             : log_posterior_alt(Y, s.C, s.S, s.sigma2_e, trace.prior, fixed);
        if (k == 0 || v > best_value) {
            best = k;
            best_value = v;
        }
    }
    const SamplerState& s = trace.states[best];
    FitReport r;
    r.estimator = "map";
    r.prior = trace.prior;
    r.n_samples = 1;
    r.C = {s.C, s.C, s.C};
    r.S = {s.S, s.S, s.S};
    r.sigma2_e = point_vector(s.sigma2_e);
    r.alpha = point_vector(s.alpha);
    r.beta = point_vector(s.beta);
    r.sigma2_s = point_vector(s.sigma2_s);
    r.psi_e = {s.psi_e, s.psi_e, s.psi_e};
    r.map_index = best;
    r.log_posterior = best_value;
    return r;
}

void permute_sources(ChainTrace& trace, const std::vector<int>& permutation) {
    const Index M = trace.M;
    if (static_cast<Index>(permutation.size()) != M) {
        throw DimensionError("permute_sources: permutation length differs from M");
    }
    std::vector<int> inverse(static_cast<std::size_t>(M), -1);
    for (Index m = 0; m < M; ++m) {
        const int p = permutation[static_cast<std::size_t>(m)];
        if (p < 0 || p >= M || inverse[static_cast<std::size_t>(p)] != -1) {
            throw InvalidArgument("permute_sources: not a permutation");
        }
        inverse[static_cast<std::size_t>(p)] = static_cast<int>(m);
    }
    auto permute_vector = [&](Vector& v) {
        if (v.size() != M) return;
        Vector out(M);
        for (Index m = 0; m < M; ++m) out[m] = v[permutation[static_cast<std::size_t>(m)]];
        v = std::move(out);
    };
    for (SamplerState& s : trace.states) {
        Matrix C(s.C.rows(), M);
        Matrix S(M, s.S.cols());
        for (Index m = 0; m < M; ++m) {
            C.col(m) = s.C.col(permutation[static_cast<std::size_t>(m)]);
            S.row(m) = s.S.row(permutation[static_cast<std::size_t>(m)]);
        }
        s.C = std::move(C);
        s.S = std::move(S);
        for (int& d : s.discard) d = inverse[static_cast<std::size_t>(d)];
        permute_vector(s.alpha);
        permute_vector(s.beta);
        permute_vector(s.sigma2_s);
        permute_vector(s.alpha_step);
    }
    for (StepFlags& f : trace.flags) {
        auto permute_flags = [&](std::vector<int>& v) {
            if (static_cast<Index>(v.size()) != M) return;
            std::vector<int> out(v.size());
            for (Index m = 0; m < M; ++m) {
                out[static_cast<std::size_t>(m)] =
                    v[static_cast<std::size_t>(permutation[static_cast<std::size_t>(m)])];
            }
            v = std::move(out);
        };
        permute_flags(f.alpha);
        permute_flags(f.sources);
    }
}

void align_chains(std::vector<ChainTrace>& traces, std::size_t n_burn_in) {
    if (traces.size() < 2) return;
    const Matrix reference = mmse_estimate(traces.front(), n_burn_in).S.point;
    for (std::size_t k = 1; k < traces.size(); ++k) {
        const Matrix S = mmse_estimate(traces[k], n_burn_in).S.point;
        const AlignmentMap map = align_sources(S, reference, false, reference.rows() > 8);
        permute_sources(traces[k], map.permutation);
    }
}

}  // namespace bss
