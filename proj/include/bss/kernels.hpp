#pragma once

// Dense vector kernels used by every inner loop over spectral bands.
//
// Each kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is chosen once at startup from the CPU's
// capabilities; setting BSS_FORCE_SCALAR=1 in the environment pins the scalar
// path. Reductions in the vector variants use a different summation order, so
// results agree with the scalar path to rounding, not bit-for-bit.

#include <cstddef>
#include <span>

namespace bss::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    double (*squared_distance)(const double* x, const double* y, std::size_t n);
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // x[j] *= num[j] / den[j]; entries with den[j] == 0 are left unchanged.
    void (*multiply_divide)(double* x, const double* num, const double* den, std::size_t n);
};

bool isa_supported(Isa isa);
const KernelTable& table(Isa isa);
Isa active_isa();
const char* isa_name(Isa isa);

namespace scalar {
const KernelTable& table();
}

inline const KernelTable& active() {
    static const KernelTable& t = table(active_isa());
    return t;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
    return active().dot(x.data(), y.data(), x.size());
}

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

inline double squared_norm(std::span<const double> x) {
    return active().dot(x.data(), x.data(), x.size());
}

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
    return active().squared_distance(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    active().axpy(a, x.data(), y.data(), x.size());
}

inline void multiply_divide(std::span<double> x, std::span<const double> num,
                            std::span<const double> den) {
    active().multiply_divide(x.data(), num.data(), den.data(), x.size());
}

}  // namespace bss::kernels
