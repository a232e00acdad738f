#include "bss/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bss/error.hpp"
#include "bss/kernels.hpp"

namespace bss {

namespace {

constexpr int kMaxExhaustive = 8;

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shapes differ (" + std::to_string(a.rows()) +
                             "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                             "x" + std::to_string(b.cols()) + ")");
    }
}

// |corr| with zero-variance rows scoring 0 instead of failing, so alignment
// still works for degenerate estimates.
double abs_corr_or_zero(std::span<const double> x, std::span<const double> y) {
    try {
        return std::abs(pearson_correlation(x, y));
    } catch (const InvalidArgument&) {
        return 0.0;
    }
}

}  // namespace

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("pearson_correlation: length mismatch");
    if (x.size() < 2) throw InvalidArgument("pearson_correlation: need at least two entries");
    const double n = static_cast<double>(x.size());
    const double mx = kernels::sum(x) / n;
    const double my = kernels::sum(y) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double dx = x[j] - mx;
        const double dy = y[j] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        throw InvalidArgument("pearson_correlation: zero-variance input");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

AlignmentMap align_sources(const Matrix& S_est, const Matrix& S_true, bool fit_scale,
                           bool approximate) {
    require_same_shape(S_est, S_true, "align_sources");
    const int M = static_cast<int>(S_true.rows());
    if (M > kMaxExhaustive && !approximate) {
        throw InvalidArgument("align_sources: exhaustive matching supports M <= 8; "
                              "request approximate matching for M = " + std::to_string(M));
    }
    // score(t, e): |corr| between reference row t and estimated row e
    std::vector<double> score(static_cast<std::size_t>(M * M));
    for (int t = 0; t < M; ++t) {
        for (int e = 0; e < M; ++e) {
            score[static_cast<std::size_t>(t * M + e)] =
                abs_corr_or_zero(row_span(S_true, t), row_span(S_est, e));
        }
    }

    AlignmentMap map;
    map.permutation.resize(static_cast<std::size_t>(M));
    if (M <= kMaxExhaustive) {
        std::vector<int> perm(static_cast<std::size_t>(M));
        std::iota(perm.begin(), perm.end(), 0);
        double best = -1.0;
        do {
            double total = 0.0;
            for (int t = 0; t < M; ++t) total += score[static_cast<std::size_t>(t * M + perm[t])];
            if (total > best + 1e-15) {  // first (lexicographically smallest) maximizer wins
                best = total;
                map.permutation = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        std::vector<bool> used_t(static_cast<std::size_t>(M)), used_e(static_cast<std::size_t>(M));
        for (int round = 0; round < M; ++round) {
            int bt = -1, be = -1;
            double best = -1.0;
            for (int t = 0; t < M; ++t) {
                if (used_t[t]) continue;
                for (int e = 0; e < M; ++e) {
                    if (used_e[e]) continue;
                    const double s = score[static_cast<std::size_t>(t * M + e)];
                    if (s > best) {
                        best = s;
                        bt = t;
                        be = e;
                    }
                }
            }
            used_t[bt] = used_e[be] = true;
            map.permutation[static_cast<std::size_t>(bt)] = be;
        }
    }

    map.scales.assign(static_cast<std::size_t>(M), 1.0);
    if (fit_scale) {
        for (int t = 0; t < M; ++t) {
            const auto est = row_span(S_est, map.permutation[static_cast<std::size_t>(t)]);
            const double den = kernels::squared_norm(est);
            const double num = kernels::dot(row_span(S_true, t), est);
            if (den > 0.0 && num > 0.0) map.scales[static_cast<std::size_t>(t)] = num / den;
        }
    }
    return map;
}

Matrix apply_to_sources(const Matrix& S_est, const AlignmentMap& map) {
    Matrix out(S_est.rows(), S_est.cols());
    for (Index t = 0; t < S_est.rows(); ++t) {
        out.row(t) = map.scales[static_cast<std::size_t>(t)] *
                     S_est.row(map.permutation[static_cast<std::size_t>(t)]);
    }
    return out;
}

Matrix apply_to_concentrations(const Matrix& C_est, const AlignmentMap& map) {
    Matrix out(C_est.rows(), C_est.cols());
    for (Index t = 0; t < C_est.cols(); ++t) {
        out.col(t) = C_est.col(map.permutation[static_cast<std::size_t>(t)]);
    }
    return out;
}

double nmse(const Matrix& est, const Matrix& truth) {
    require_same_shape(est, truth, "nmse");
    double total = 0.0;
    for (Index r = 0; r < truth.rows(); ++r) {
        const double ref = kernels::squared_norm(row_span(truth, r));
        if (!(ref > 0.0)) {
            throw InvalidArgument("nmse: reference row " + std::to_string(r) + " has zero norm");
        }
        total += kernels::squared_distance(row_span(est, r), row_span(truth, r)) / ref;
    }
    return total;
}

double dissimilarity(std::span<const double> s_est, std::span<const double> s_true) {
    const double r = pearson_correlation(s_est, s_true);
    return std::sqrt(std::max(0.0, 1.0 - r * r));
}

double mean_dissimilarity(const Matrix& S_est, const Matrix& S_true) {
    require_same_shape(S_est, S_true, "mean_dissimilarity");
    double total = 0.0;
    for (Index m = 0; m < S_true.rows(); ++m) {
        total += dissimilarity(row_span(S_est, m), row_span(S_true, m));
    }
    return total / static_cast<double>(S_true.rows());
}

const char* to_string(PsrfForm form) {
    return form == PsrfForm::Printed ? "printed" : "canonical";
}

double psrf(const std::vector<std::vector<double>>& chains, PsrfForm form) {
    if (chains.size() < 2) throw InvalidArgument("psrf: at least two chains are required");
    const std::size_t n = chains.front().size();
    if (n < 2) throw InvalidArgument("psrf: chains need at least two samples");
    for (const auto& c : chains) {
        if (c.size() != n) throw InvalidArgument("psrf: chains must have equal lengths");
    }
    const double m = static_cast<double>(chains.size());
    const double nd = static_cast<double>(n);

    std::vector<double> means;
    double within = 0.0;
    for (const auto& c : chains) {
        const double mean = std::accumulate(c.begin(), c.end(), 0.0) / nd;
        double ss = 0.0;
        for (double v : c) ss += (v - mean) * (v - mean);
        means.push_back(mean);
        within += ss / (nd - 1.0);
    }
    within /= m;
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
    double between = 0.0;
    for (double mu : means) between += (mu - grand) * (mu - grand);
    between *= nd / (m - 1.0);

    double ratio;  // B / W
    if (within > 0.0) {
        ratio = between / within;
    } else {
        ratio = between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    const double rho = form == PsrfForm::Printed
                           ? (1.0 - 1.0 / nd) * (1.0 + ratio / (nd - 1.0))
                           : (nd - 1.0) / nd + (m + 1.0) / (m * nd) * ratio;
    return std::sqrt(rho);
}

namespace {

double mean_squared_residual(const Matrix& Y, const Matrix& C, const Matrix& S) {
    const Vector r = residual_squared_norms(Y, C, S);
    return r.sum() / static_cast<double>(Y.rows() * Y.cols());
}

void check_post_burn_in(const ChainTrace& trace, std::size_t n_burn_in) {
    if (n_burn_in >= trace.size()) {
        throw InvalidArgument("burn-in (" + std::to_string(n_burn_in) +
                              ") leaves no samples in a trace of length " +
                              std::to_string(trace.size()));
    }
}

}  // namespace

double reconstruction_error(const ChainTrace& trace, std::size_t p, const Matrix& Y,
                            std::size_t n_burn_in) {
    check_post_burn_in(trace, n_burn_in);
    if (p == 0) throw InvalidArgument("reconstruction_error: p must be at least 1");
    if (p > trace.size() - n_burn_in) {
        throw InvalidArgument("reconstruction_error: p exceeds the post-burn-in length");
    }
    Matrix C = Matrix::Zero(trace.N, trace.M);
    Matrix S = Matrix::Zero(trace.M, trace.L);
    for (std::size_t t = n_burn_in; t < n_burn_in + p; ++t) {
        C += trace.states[t].C;
        S += trace.states[t].S;
    }
    const double inv = 1.0 / static_cast<double>(p);
    return mean_squared_residual(Y, C * inv, S * inv);
}

std::vector<double> reconstruction_error_curve(const ChainTrace& trace, const Matrix& Y,
                                               std::size_t n_burn_in) {
    check_post_burn_in(trace, n_burn_in);
    std::vector<double> curve;
    curve.reserve(trace.size() - n_burn_in);
    Matrix C = Matrix::Zero(trace.N, trace.M);
    Matrix S = Matrix::Zero(trace.M, trace.L);
    for (std::size_t t = n_burn_in; t < trace.size(); ++t) {
        C += trace.states[t].C;
        S += trace.states[t].S;
        const double inv = 1.0 / static_cast<double>(t - n_burn_in + 1);
        curve.push_back(mean_squared_residual(Y, C * inv, S * inv));
    }
    return curve;
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
    if (bins == 0) throw InvalidArgument("histogram: bin count must be positive");
    if (values.empty()) throw InvalidArgument("histogram: no values");
    Histogram h;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    h.lower = *lo;
    h.upper = *hi;
    if (!(h.upper > h.lower)) h.upper = h.lower + 1.0;  // all values equal: one unit-wide range
    h.counts.assign(bins, 0);
    const double width = h.bin_width();
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - h.lower) / width);
        if (b >= bins) b = bins - 1;
        ++h.counts[b];
    }
    return h;
}

}  // namespace bss
