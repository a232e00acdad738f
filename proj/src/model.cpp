#include "bss/model.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "bss/error.hpp"
#include "bss/kernels.hpp"

namespace bss {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSumTolerance = 1e-12;

void check_shapes(const Matrix& Y, const Matrix& C, const Matrix& S, const Vector& sigma2) {
    if (C.rows() != Y.rows() || S.cols() != Y.cols() || C.cols() != S.rows() ||
        sigma2.size() != Y.rows()) {
        throw DimensionError("model: expected Y (N x L), C (N x M), S (M x L), sigma2 (N); got Y " +
                             std::to_string(Y.rows()) + "x" + std::to_string(Y.cols()) + ", C " +
                             std::to_string(C.rows()) + "x" + std::to_string(C.cols()) + ", S " +
                             std::to_string(S.rows()) + "x" + std::to_string(S.cols()) +
                             ", sigma2 " + std::to_string(sigma2.size()));
    }
}

bool positive(const Vector& v) {
    for (Index k = 0; k < v.size(); ++k) {
        if (!(v[k] > 0.0) || !std::isfinite(v[k])) return false;
    }
    return true;
}

bool non_negative(const Matrix& S) {
    for (Index k = 0; k < S.size(); ++k) {
        if (!(S.data()[k] >= 0.0) || !std::isfinite(S.data()[k])) return false;
    }
    return true;
}

bool completed_rows_valid(const Matrix& C) {
    for (Index i = 0; i < C.rows(); ++i) {
        double total = 0.0;
        for (Index m = 0; m < C.cols(); ++m) {
            if (!(C(i, m) >= 0.0)) return false;
            total += C(i, m);
        }
        if (std::abs(total - 1.0) > kSumTolerance) return false;
    }
    return true;
}

// Noise part shared by every prior: likelihood, IG prior on each variance
// and the restricted-Jeffreys hyperprior on psi_e integrated out.
double noise_and_likelihood_term(const Matrix& Y, const Matrix& C, const Matrix& S,
                                 const Vector& sigma2, const FixedHyperParams& fixed) {
    const double n_obs = static_cast<double>(Y.rows());
    const double half_rho = 0.5 * fixed.rho_e;
    double value = log_likelihood(Y, C, S, sigma2);
    double precision_sum = 0.0;
    for (Index i = 0; i < sigma2.size(); ++i) {
        value -= (half_rho + 1.0) * std::log(sigma2[i]);
        precision_sum += 1.0 / sigma2[i];
    }
    value += log_truncated_gamma_integral(n_obs * half_rho, 0.5 * precision_sum, fixed.psi_e_min,
                                          fixed.psi_e_max);
    return value;
}

double gamma_source_term(const Matrix& S, const Vector& alpha, const FixedHyperParams& fixed) {
    const double L = static_cast<double>(S.cols());
    const double shape_offset = fixed.beta_shape_plus_one ? 1.0 : 0.0;
    double value = 0.0;
    for (Index m = 0; m < S.rows(); ++m) {
        const double a = alpha[m];
        double log_sum = 0.0;
        for (Index j = 0; j < S.cols(); ++j) log_sum += std::log(S(m, j));
        const double total = kernels::sum(row_span(S, m));
        const double shape = L * a + fixed.alpha_beta + shape_offset;
        value += (a - 1.0) * log_sum - L * std::lgamma(a) + std::lgamma(shape) -
                 shape * std::log(total + fixed.beta_beta) - fixed.lambda_alpha * a;
    }
    return value;
}

}  // namespace

std::string to_string(PriorKind kind) {
    switch (kind) {
        case PriorKind::Gamma:
            return "gamma";
        case PriorKind::Exponential:
            return "exp";
        case PriorKind::TruncatedGaussian:
            return "tgauss";
    }
    return "unknown";
}

PriorKind parse_prior_kind(const std::string& name) {
    if (name == "gamma") return PriorKind::Gamma;
    if (name == "exp" || name == "exponential") return PriorKind::Exponential;
    if (name == "tgauss" || name == "truncated-gaussian") return PriorKind::TruncatedGaussian;
    throw InvalidArgument("unknown source prior '" + name + "' (expected gamma, exp or tgauss)");
}

void FixedHyperParams::validate() const {
    auto require = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidArgument(std::string("fixed hyperparameter ") + name +
                                  " must be a positive finite number");
        }
    };
    require(rho_e, "rho_e");
    require(lambda_alpha, "lambda_alpha");
    require(alpha_beta, "alpha_beta");
    require(beta_beta, "beta_beta");
    require(rho_s, "rho_s");
    require(psi_s, "psi_s");
    require(psi_e_min, "psi_e_min");
    require(psi_e_max, "psi_e_max");
    if (!(psi_e_min < psi_e_max)) throw InvalidArgument("psi_e_min must be below psi_e_max");
}

double partial_sum(std::span<const double> partial) {
    double total = 0.0;
    for (double a : partial) total += a;
    return total;
}

bool in_simplex(std::span<const double> partial) {
    for (double a : partial) {
        if (!(a >= 0.0)) return false;
    }
    return partial_sum(partial) <= 1.0;
}

std::vector<double> complete_concentration(const ConcentrationState& state) {
    const int M = state.components();
    if (state.discard_index < 0 || state.discard_index >= M) {
        throw InvalidArgument("complete_concentration: discard index " +
                              std::to_string(state.discard_index) + " outside [0, " +
                              std::to_string(M) + ")");
    }
    if (!in_simplex(state.partial)) {
        throw InvalidArgument("complete_concentration: partial vector outside the simplex");
    }
    std::vector<double> full(static_cast<std::size_t>(M));
    std::size_t k = 0;
    for (int m = 0; m < M; ++m) {
        if (m == state.discard_index) continue;
        full[static_cast<std::size_t>(m)] = state.partial[k++];
    }
    full[static_cast<std::size_t>(state.discard_index)] = 1.0 - partial_sum(state.partial);
    return full;
}

ConcentrationState split_concentration(std::span<const double> full, int discard_index) {
    const int M = static_cast<int>(full.size());
    if (discard_index < 0 || discard_index >= M) {
        throw InvalidArgument("split_concentration: discard index out of range");
    }
    ConcentrationState state;
    state.discard_index = discard_index;
    state.partial.reserve(full.size() - 1);
    for (int m = 0; m < M; ++m) {
        if (m != discard_index) state.partial.push_back(full[static_cast<std::size_t>(m)]);
    }
    return state;
}

Vector residual_squared_norms(const Matrix& Y, const Matrix& C, const Matrix& S) {
    const Index N = Y.rows();
    const auto L = static_cast<std::size_t>(Y.cols());
    Vector out(N);
    std::vector<double> prediction(L);
    for (Index i = 0; i < N; ++i) {
        std::fill(prediction.begin(), prediction.end(), 0.0);
        for (Index m = 0; m < S.rows(); ++m) {
            kernels::axpy(C(i, m), row_span(S, m), prediction);
        }
        out[i] = kernels::squared_distance(row_span(Y, i), prediction);
    }
    return out;
}

double log_likelihood(const Matrix& Y, const Matrix& C, const Matrix& S, const Vector& sigma2) {
    check_shapes(Y, C, S, sigma2);
    for (Index i = 0; i < sigma2.size(); ++i) {
        if (!(sigma2[i] > 0.0)) {
            throw InvalidArgument("log_likelihood: noise variance " + std::to_string(i) +
                                  " is not positive");
        }
    }
    const double L = static_cast<double>(Y.cols());
    const Vector residual = residual_squared_norms(Y, C, S);
    double value = 0.0;
    for (Index i = 0; i < Y.rows(); ++i) {
        value += -0.5 * L * std::log(sigma2[i]) - residual[i] / (2.0 * sigma2[i]);
    }
    return value;
}

double log_truncated_gamma_integral(double k, double rate, double lo, double hi) {
    namespace bm = boost::math;
    const double x_lo = lo * rate;
    const double x_hi = hi * rate;
    double mass;
    if (x_lo >= k) {
        mass = bm::gamma_q(k, x_lo) - bm::gamma_q(k, x_hi);
    } else {
        mass = bm::gamma_p(k, x_hi) - bm::gamma_p(k, x_lo);
    }
    double log_mass;
    if (mass > 0.0) {
        log_mass = std::log(mass);
    } else {
        // far upper tail: leading term of the incomplete-gamma asymptotic
        log_mass = (k - 1.0) * std::log(x_lo) - x_lo - std::lgamma(k);
    }
    return std::lgamma(k) - k * std::log(rate) + log_mass;
}

double log_posterior(const Matrix& Y, const Matrix& A, const Matrix& S, const Vector& sigma2,
                     const Vector& alpha, const FixedHyperParams& fixed) {
    const Index M = S.rows();
    if (A.rows() != Y.rows() || A.cols() != M - 1 || alpha.size() != M) {
        throw DimensionError("log_posterior: A must be N x (M-1) and alpha of length M");
    }
    Matrix C(Y.rows(), M);
    for (Index i = 0; i < A.rows(); ++i) {
        const auto partial = row_span(A, i);
        if (!in_simplex(partial)) return kNegInf;
        for (Index m = 0; m + 1 < M; ++m) C(i, m) = A(i, m);
        C(i, M - 1) = 1.0 - partial_sum(partial);
    }
    check_shapes(Y, C, S, sigma2);
    if (!non_negative(S) || !positive(sigma2) || !positive(alpha)) return kNegInf;
    return noise_and_likelihood_term(Y, C, S, sigma2, fixed) + gamma_source_term(S, alpha, fixed);
}

double log_posterior_completed(const Matrix& Y, const Matrix& C, const Matrix& S,
                               const Vector& sigma2, const Vector& alpha,
                               const FixedHyperParams& fixed) {
    check_shapes(Y, C, S, sigma2);
    if (alpha.size() != S.rows()) throw DimensionError("log_posterior: alpha must have length M");
    if (!completed_rows_valid(C) || !non_negative(S) || !positive(sigma2) || !positive(alpha)) {
        return kNegInf;
    }
    return noise_and_likelihood_term(Y, C, S, sigma2, fixed) + gamma_source_term(S, alpha, fixed);
}

double log_posterior_alt(const Matrix& Y, const Matrix& C, const Matrix& S, const Vector& sigma2,
                         PriorKind prior, const FixedHyperParams& fixed) {
    if (prior == PriorKind::Gamma) {
        throw InvalidArgument("log_posterior_alt: use log_posterior for the Gamma prior");
    }
    check_shapes(Y, C, S, sigma2);
    if (!completed_rows_valid(C) || !non_negative(S) || !positive(sigma2)) return kNegInf;
    const double L = static_cast<double>(S.cols());
    double value = noise_and_likelihood_term(Y, C, S, sigma2, fixed);
    for (Index m = 0; m < S.rows(); ++m) {
        const double norm = prior == PriorKind::Exponential ? kernels::sum(row_span(S, m))
                                                            : kernels::squared_norm(row_span(S, m));
        value -= (L + fixed.rho_s) * std::log(fixed.psi_s + norm);
    }
    return value;
}

bool all_finite(const Matrix& m) {
    for (Index k = 0; k < m.size(); ++k) {
        if (!std::isfinite(m.data()[k])) return false;
    }
    return true;
}

}  // namespace bss
