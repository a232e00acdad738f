#include "bss/gibbs.hpp"

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "bss/error.hpp"
#include "bss/kernels.hpp"

namespace bss {

namespace {

constexpr double kDormantThreshold = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool alternate(PriorKind prior) { return prior != PriorKind::Gamma; }

double mean_abs(const Matrix& Y) {
    double total = 0.0;
    for (Index k = 0; k < Y.size(); ++k) total += std::abs(Y.data()[k]);
    const double m = total / static_cast<double>(Y.size());
    return m > 0.0 ? m : 1.0;
}

// Differences s_k - s_d (k != d) for one held-out component, with their Gram
// matrix and their products with s_d. Computed directly rather than from
// S S^T so that nearly equal sources do not cancel.
struct HeldOutBasis {
    Matrix diff;           // (M-1) x L
    Eigen::MatrixXd gram;  // (M-1) x (M-1)
    Vector diff_dot_held;  // (M-1)
};

HeldOutBasis held_out_basis(const Matrix& S, int d) {
    const Index M = S.rows();
    const Index K = M - 1;
    HeldOutBasis b;
    b.diff.resize(K, S.cols());
    Index a = 0;
    for (Index k = 0; k < M; ++k) {
        if (k == d) continue;
        b.diff.row(a) = S.row(k) - S.row(d);
        ++a;
    }
    b.gram.resize(K, K);
    b.diff_dot_held.resize(K);
    for (Index p = 0; p < K; ++p) {
        for (Index q = 0; q <= p; ++q) {
            const double v = kernels::dot(row_span(b.diff, p), row_span(b.diff, q));
            b.gram(p, q) = v;
            b.gram(q, p) = v;
        }
        b.diff_dot_held[p] = kernels::dot(row_span(b.diff, p), row_span(S, d));
    }
    return b;
}

ConcentrationConditional conditional_from_basis(const HeldOutBasis& b, std::span<const double> y,
                                                double sigma2) {
    const Index K = b.gram.rows();
    ConcentrationConditional out;
    out.precision = b.gram / sigma2;
    Vector rhs(K);
    for (Index p = 0; p < K; ++p) {
        rhs[p] = (kernels::dot(row_span(b.diff, p), y) - b.diff_dot_held[p]) / sigma2;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(out.precision);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("concentration conditional: precision is not positive definite");
    }
    out.mean = llt.solve(rhs);
    return out;
}

Matrix rank_projection(const Matrix& Y, Index rank) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(Y), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Index r = std::min<Index>(rank, svd.singularValues().size());
    return svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
           svd.matrixV().leftCols(r).transpose();
}

void check_state_shapes(const SamplerState& state, const Matrix& Y) {
    if (state.C.rows() != Y.rows() || state.S.cols() != Y.cols() ||
        state.C.cols() != state.S.rows() || state.sigma2_e.size() != Y.rows()) {
        throw DimensionError("sampler state does not match the data dimensions");
    }
}

}  // namespace

void SamplerConfig::validate() const {
    if (M < 1) throw InvalidArgument("number of sources M must be at least 1");
    if (n_iterations < 1) throw InvalidArgument("number of iterations must be at least 1");
    if (n_burn_in >= n_iterations) {
        throw InvalidArgument("burn-in (" + std::to_string(n_burn_in) +
                              ") must be smaller than the number of iterations (" +
                              std::to_string(n_iterations) + ")");
    }
    if (strategy_threshold < 2) throw InvalidArgument("simplex strategy threshold must be >= 2");
    if (!(alpha_step_init > 0.0)) throw InvalidArgument("alpha_step_init must be positive");
    if (adapt_interval < 1) throw InvalidArgument("adapt_interval must be at least 1");
    fixed.validate();
}

SimplexStrategy SamplerConfig::simplex_strategy() const {
    return strategy ? *strategy : auto_simplex_strategy(M, strategy_threshold);
}

ConcentrationState SamplerState::concentration(Index i) const {
    return split_concentration(row_span(C, i), discard[static_cast<std::size_t>(i)]);
}

std::vector<Index> extreme_rows(const Matrix& Y, Index M) {
    if (M > Y.rows()) throw InvalidArgument("extreme_rows: more rows requested than available");
    Matrix R = Y;
    std::vector<Index> picked;
    for (Index k = 0; k < M; ++k) {
        Index best = 0;
        double best_norm = -1.0;
        for (Index i = 0; i < R.rows(); ++i) {
            if (std::find(picked.begin(), picked.end(), i) != picked.end()) continue;
            const double n = kernels::squared_norm(row_span(R, i));
            if (n > best_norm) {
                best_norm = n;
                best = i;
            }
        }
        picked.push_back(best);
        const Vector u = R.row(best).transpose() / std::sqrt(std::max(best_norm, DBL_MIN));
        for (Index i = 0; i < R.rows(); ++i) {
            const double proj = kernels::dot(row_span(R, i), as_span(u));
            kernels::axpy(-proj, as_span(u), row_span(R, i));
        }
    }
    return picked;
}

SamplerState init_state(const SamplerConfig& config, const Matrix& Y, RngStream& rng) {
    config.validate();
    if (Y.rows() < 1 || Y.cols() < 1) throw DimensionError("observation matrix is empty");
    if (!all_finite(Y)) throw DataError("observation matrix has non-finite entries");
    const Index N = Y.rows();
    const Index L = Y.cols();
    const Index M = config.M;
    const FixedHyperParams& fx = config.fixed;

    SamplerState st;
    st.C.resize(N, M);
    st.discard.assign(static_cast<std::size_t>(N), M - 1);
    const std::vector<double> ones(static_cast<std::size_t>(M), 1.0);
    for (Index i = 0; i < N; ++i) {
        const std::vector<double> c = sample_dirichlet(ones, rng);
        ConcentrationState cs = split_concentration(c, static_cast<int>(M - 1));
        const std::vector<double> full = complete_concentration(cs);
        for (Index m = 0; m < M; ++m) st.C(i, m) = full[static_cast<std::size_t>(m)];
    }

    st.sigma2_e.resize(N);
    st.S.resize(M, L);
    const double scale = mean_abs(Y);
    if (config.init == InitPolicy::Prior) {
        st.psi_e = std::exp(std::log(fx.psi_e_min) +
                            (std::log(fx.psi_e_max) - std::log(fx.psi_e_min)) * rng.uniform());
        for (Index i = 0; i < N; ++i) {
            st.sigma2_e[i] = sample_inv_gamma(0.5 * fx.rho_e, 0.5 * st.psi_e, rng);
        }
    } else {
        double precision_sum = 0.0;
        for (Index i = 0; i < N; ++i) {
            const double ms = kernels::squared_norm(row_span(Y, i)) / static_cast<double>(L);
            st.sigma2_e[i] = ms > 0.0 ? ms : scale * scale;
            precision_sum += 1.0 / st.sigma2_e[i];
        }
        st.psi_e = std::clamp(static_cast<double>(N) * fx.rho_e / precision_sum, fx.psi_e_min,
                              fx.psi_e_max);
    }

    if (!alternate(config.prior)) {
        st.alpha.resize(M);
        st.beta.resize(M);
        for (Index m = 0; m < M; ++m) {
            if (config.init == InitPolicy::Prior) {
                st.alpha[m] = sample_exponential(fx.lambda_alpha, rng);
                st.beta[m] = sample_gamma(fx.alpha_beta, fx.beta_beta, rng);
            } else {
                st.alpha[m] = 1.0;
                st.beta[m] = 1.0 / scale;
            }
            for (Index j = 0; j < L; ++j) {
                st.S(m, j) = std::max(sample_gamma(st.alpha[m], st.beta[m], rng), DBL_MIN);
            }
        }
        st.alpha_step = Vector::Constant(M, config.alpha_step_init);
    } else {
        st.sigma2_s.resize(M);
        for (Index m = 0; m < M; ++m) {
            if (config.init == InitPolicy::Prior) {
                st.sigma2_s[m] = sample_inv_gamma(fx.rho_s, fx.psi_s, rng);
            } else {
                st.sigma2_s[m] = config.prior == PriorKind::Exponential ? scale : scale * scale;
            }
            for (Index j = 0; j < L; ++j) {
                double s;
                if (config.prior == PriorKind::Exponential) {
                    s = sample_exponential(1.0 / (2.0 * st.sigma2_s[m]), rng);
                } else {
                    s = sample_trunc_normal(0.0, std::sqrt(st.sigma2_s[m]), 0.0, kInf, rng);
                }
                st.S(m, j) = std::max(s, DBL_MIN);
            }
        }
    }
    if (config.init == InitPolicy::Extremes && M <= N) {
        // Rank-M projection first: a source equal to one noisy observation
        // fits it exactly, and the posterior has a spike there (sigma2_i -> 0).
        const Matrix P = rank_projection(Y, M);
        const std::vector<Index> rows = extreme_rows(P, M);
        for (Index m = 0; m < M; ++m) {
            for (Index j = 0; j < L; ++j) {
                st.S(m, j) = std::max(P(rows[static_cast<std::size_t>(m)], j), DBL_MIN);
            }
        }
    }
    return st;
}

ConcentrationConditional concentration_conditional(const Matrix& S, std::span<const double> y,
                                                   double sigma2, int discard) {
    if (discard < 0 || discard >= S.rows()) {
        throw InvalidArgument("concentration_conditional: discard index out of range");
    }
    if (static_cast<Index>(y.size()) != S.cols()) {
        throw DimensionError("concentration_conditional: observation length differs from L");
    }
    if (!(sigma2 > 0.0)) throw InvalidArgument("concentration_conditional: sigma2 must be positive");
    return conditional_from_basis(held_out_basis(S, discard), y, sigma2);
}

SourceConditional source_conditional(const Matrix& Y, const Matrix& C, const Matrix& S,
                                     const Vector& sigma2, Index m) {
    const Index N = Y.rows();
    const Index M = S.rows();
    if (m < 0 || m >= M) throw InvalidArgument("source_conditional: source index out of range");

    Vector w(N);
    double precision = 0.0;
    bool dormant = true;
    for (Index i = 0; i < N; ++i) {
        w[i] = C(i, m) / sigma2[i];
        precision += C(i, m) * w[i];
        if (C(i, m) >= kDormantThreshold) dormant = false;
    }
    if (dormant) {
        throw DormantSourceError(static_cast<std::size_t>(m),
                                 "source " + std::to_string(m) +
                                     " has no concentration above 1e-12 in any observation");
    }

    SourceConditional out;
    out.delta2 = 1.0 / precision;
    out.mu = Vector::Zero(S.cols());
    std::span<double> mu(out.mu.data(), static_cast<std::size_t>(out.mu.size()));
    for (Index i = 0; i < N; ++i) {
        if (w[i] != 0.0) kernels::axpy(w[i], row_span(Y, i), mu);
    }
    for (Index k = 0; k < M; ++k) {
        if (k == m) continue;
        double g = 0.0;
        for (Index i = 0; i < N; ++i) g += w[i] * C(i, k);
        if (g != 0.0) kernels::axpy(-g, row_span(S, k), mu);
    }
    out.mu *= out.delta2;
    return out;
}

void step_concentrations(SamplerState& state, const Matrix& Y, const SamplerConfig& config,
                         RngStream& rng, StepFlags* flags) {
    check_state_shapes(state, Y);
    const Index N = state.N();
    const Index M = state.M();
    if (flags) flags->simplex.assign(static_cast<std::size_t>(N), 1);
    if (M == 1) return;

    const SimplexStrategy strategy = config.simplex_strategy();
    std::vector<std::optional<HeldOutBasis>> bases(static_cast<std::size_t>(M));
    for (Index i = 0; i < N; ++i) {
        const int d = static_cast<int>(rng.below(static_cast<std::uint64_t>(M)));
        auto& basis = bases[static_cast<std::size_t>(d)];
        if (!basis) basis = held_out_basis(state.S, d);

        SimplexDraw draw;
        try {
            const ConcentrationConditional cond =
                conditional_from_basis(*basis, row_span(Y, i), state.sigma2_e[i]);
            const SimplexGaussian target = SimplexGaussian::from_precision(cond.mean, cond.precision);
            const ConcentrationState current = split_concentration(row_span(state.C, i), d);
            const Vector cur = Eigen::Map<const Vector>(current.partial.data(),
                                                        static_cast<Index>(current.partial.size()));
            draw = target.sample(cur, strategy, rng);
        } catch (const DegenerateSourcesError&) {
            throw;
        } catch (const NumericalError& e) {
            throw DegenerateSourcesError(static_cast<std::size_t>(i),
                                         "observation " + std::to_string(i) +
                                             ": degenerate sources (" + e.what() + ")");
        }

        ConcentrationState next;
        next.discard_index = d;
        next.partial.assign(draw.value.data(), draw.value.data() + draw.value.size());
        const std::vector<double> full = complete_concentration(next);
        for (Index m = 0; m < M; ++m) state.C(i, m) = full[static_cast<std::size_t>(m)];
        state.discard[static_cast<std::size_t>(i)] = d;
        if (flags) flags->simplex[static_cast<std::size_t>(i)] = draw.accepted ? 1 : 0;
    }
}

void step_psi_e(SamplerState& state, const SamplerConfig& config, RngStream& rng) {
    const FixedHyperParams& fx = config.fixed;
    double precision_sum = 0.0;
    for (Index i = 0; i < state.sigma2_e.size(); ++i) precision_sum += 1.0 / state.sigma2_e[i];
    const double shape = 0.5 * static_cast<double>(state.sigma2_e.size()) * fx.rho_e;
    state.psi_e =
        sample_truncated_gamma(shape, 0.5 * precision_sum, fx.psi_e_min, fx.psi_e_max, rng);
}

void step_noise_variances(SamplerState& state, const Matrix& Y, const SamplerConfig& config,
                          RngStream& rng) {
    check_state_shapes(state, Y);
    const Vector residual = residual_squared_norms(Y, state.C, state.S);
    const double shape = 0.5 * (config.fixed.rho_e + static_cast<double>(Y.cols()));
    for (Index i = 0; i < Y.rows(); ++i) {
        state.sigma2_e[i] = sample_inv_gamma(shape, 0.5 * (state.psi_e + residual[i]), rng);
    }
}

double log_alpha_target(double alpha, double beta, double sum_log_s, Index L,
                        const FixedHyperParams& fixed) {
    if (!(alpha > 0.0)) return -kInf;
    const double Ld = static_cast<double>(L);
    return Ld * (alpha * std::log(beta) - std::lgamma(alpha)) + (alpha - 1.0) * sum_log_s -
           fixed.lambda_alpha * alpha;
}

void step_alpha(SamplerState& state, const SamplerConfig& config, RngStream& rng,
                StepFlags* flags) {
    const Index M = state.M();
    const Index L = state.L();
    if (flags) flags->alpha.assign(static_cast<std::size_t>(M), 0);
    for (Index m = 0; m < M; ++m) {
        double sum_log_s = 0.0;
        for (Index j = 0; j < L; ++j) sum_log_s += std::log(state.S(m, j));
        const double current = state.alpha[m];
        const double proposal = current * std::exp(state.alpha_step[m] * rng.normal());
        const double log_ratio =
            log_alpha_target(proposal, state.beta[m], sum_log_s, L, config.fixed) -
            log_alpha_target(current, state.beta[m], sum_log_s, L, config.fixed) +
            std::log(proposal) - std::log(current);
        if (proposal > 0.0 && std::isfinite(proposal) &&
            (log_ratio >= 0.0 || std::log(rng.uniform_open()) < log_ratio)) {
            state.alpha[m] = proposal;
            if (flags) flags->alpha[static_cast<std::size_t>(m)] = 1;
        }
    }
}

void step_beta(SamplerState& state, const SamplerConfig& config, RngStream& rng) {
    const FixedHyperParams& fx = config.fixed;
    const double L = static_cast<double>(state.L());
    const double offset = fx.beta_shape_plus_one ? 1.0 : 0.0;
    for (Index m = 0; m < state.M(); ++m) {
        const double total = kernels::sum(row_span(state.S, m));
        state.beta[m] =
            sample_gamma(L * state.alpha[m] + fx.alpha_beta + offset, total + fx.beta_beta, rng);
    }
}

void step_sources(SamplerState& state, const Matrix& Y, const SamplerConfig& config,
                  RngStream& rng, StepFlags* flags) {
    (void)config;
    check_state_shapes(state, Y);
    const Index M = state.M();
    const Index L = state.L();
    if (flags) flags->sources.assign(static_cast<std::size_t>(M), 0);
    for (Index m = 0; m < M; ++m) {
        const SourceConditional cond = source_conditional(Y, state.C, state.S, state.sigma2_e, m);
        int accepted = 0;
        for (Index j = 0; j < L; ++j) {
            const TiltedDraw d = sample_gamma_tilted_gaussian(
                state.alpha[m], state.beta[m], cond.mu[j], cond.delta2, state.S(m, j), rng);
            const TiltedDraw r = refine_gamma_tilted_gaussian(state.alpha[m], state.beta[m],
                                                              cond.mu[j], cond.delta2, d.value, rng);
            state.S(m, j) = r.value;
            accepted += (d.accepted || r.accepted) ? 1 : 0;
        }
        if (flags) flags->sources[static_cast<std::size_t>(m)] = accepted;
    }
}

void step_source_variance_alt(SamplerState& state, const SamplerConfig& config, RngStream& rng) {
    if (!alternate(config.prior)) {
        throw InvalidArgument("source scale step applies to the exponential and "
                              "truncated-Gaussian priors only");
    }
    const FixedHyperParams& fx = config.fixed;
    const double L = static_cast<double>(state.L());
    for (Index m = 0; m < state.M(); ++m) {
        const double norm = config.prior == PriorKind::Exponential
                                ? kernels::sum(row_span(state.S, m))
                                : kernels::squared_norm(row_span(state.S, m));
        state.sigma2_s[m] = sample_inv_gamma(L + fx.rho_s, fx.psi_s + norm, rng);
    }
}

void step_sources_alt(SamplerState& state, const Matrix& Y, const SamplerConfig& config,
                      RngStream& rng) {
    if (!alternate(config.prior)) {
        throw InvalidArgument("alternate source step requires the exponential or "
                              "truncated-Gaussian prior");
    }
    check_state_shapes(state, Y);
    for (Index m = 0; m < state.M(); ++m) {
        const SourceConditional cond = source_conditional(Y, state.C, state.S, state.sigma2_e, m);
        const double s2 = state.sigma2_s[m];
        double variance = cond.delta2;
        double shift = 0.0;
        double factor = 1.0;
        if (config.prior == PriorKind::Exponential) {
            shift = cond.delta2 / (2.0 * s2);
        } else {
            variance = 1.0 / (1.0 / cond.delta2 + 1.0 / s2);
            factor = variance / cond.delta2;
        }
        const double sd = std::sqrt(variance);
        for (Index j = 0; j < state.L(); ++j) {
            double s;
            do {
                s = sample_trunc_normal(factor * cond.mu[j] - shift, sd, 0.0, kInf, rng);
            } while (!(s > 0.0));
            state.S(m, j) = s;
        }
    }
}

StepFlags gibbs_sweep(SamplerState& state, const Matrix& Y, const SamplerConfig& config,
                      RngStream& rng) {
    StepFlags flags;
    step_concentrations(state, Y, config, rng, &flags);
    step_psi_e(state, config, rng);
    step_noise_variances(state, Y, config, rng);
    if (!alternate(config.prior)) {
        step_alpha(state, config, rng, &flags);
        step_beta(state, config, rng);
        step_sources(state, Y, config, rng, &flags);
    } else {
        step_source_variance_alt(state, config, rng);
        step_sources_alt(state, Y, config, rng);
        flags.sources.assign(static_cast<std::size_t>(state.M()),
                             static_cast<int>(state.L()));
    }
    ++state.iteration;
    return flags;
}

void run_chain(const SamplerConfig& config, const Matrix& Y, const ChainVisitor& visit) {
    config.validate();
    if (Y.rows() < 1 || Y.cols() < 1) throw DimensionError("observation matrix is empty");
    RngStream rng(config.seed, config.stream);
    SamplerState state = init_state(config, Y, rng);
    const bool adapt = !alternate(config.prior);
    std::vector<int> window_accepts(static_cast<std::size_t>(config.M), 0);

    for (std::size_t t = 0; t < config.n_iterations; ++t) {
        StepFlags flags;
        try {
            flags = gibbs_sweep(state, Y, config, rng);
        } catch (const Error& e) {
            throw ChainError(config.stream, t + 1, e.what());
        }
        if (adapt && t < config.n_burn_in) {
            for (std::size_t m = 0; m < window_accepts.size(); ++m) {
                window_accepts[m] += flags.alpha[m];
            }
            if ((t + 1) % config.adapt_interval == 0) {
                for (std::size_t m = 0; m < window_accepts.size(); ++m) {
                    const double rate = static_cast<double>(window_accepts[m]) /
                                        static_cast<double>(config.adapt_interval);
                    if (rate < 0.2) state.alpha_step[static_cast<Index>(m)] *= 0.7;
                    if (rate > 0.5) state.alpha_step[static_cast<Index>(m)] *= 1.3;
                    window_accepts[m] = 0;
                }
            }
        }
        visit(state, flags);
    }
}

ChainTrace run_chain(const SamplerConfig& config, const Matrix& Y) {
    ChainTrace trace;
    trace.N = Y.rows();
    trace.M = config.M;
    trace.L = Y.cols();
    trace.prior = config.prior;
    trace.seed = config.seed;
    trace.stream = config.stream;
    trace.n_burn_in = config.n_burn_in;
    trace.states.reserve(config.n_iterations);
    trace.flags.reserve(config.n_iterations);
    run_chain(config, Y, [&](const SamplerState& s, const StepFlags& f) {
        trace.states.push_back(s);
        trace.flags.push_back(f);
    });
    return trace;
}

std::vector<ChainTrace> run_chains(const SamplerConfig& config, const Matrix& Y,
                                   std::size_t n_chains, std::size_t threads) {
    if (n_chains < 1) throw InvalidArgument("number of chains must be at least 1");
    config.validate();
    std::vector<ChainTrace> traces(n_chains);
    std::vector<std::exception_ptr> errors(n_chains);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < n_chains; k = next++) {
            SamplerConfig c = config;
            c.stream = config.stream + k;
            try {
                traces[k] = run_chain(c, Y);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(threads, 1, n_chains);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return traces;
}

}  // namespace bss
