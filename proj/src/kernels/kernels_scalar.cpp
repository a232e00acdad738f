#include "bss/kernels.hpp"

namespace bss::kernels::scalar {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += x[j] * y[j];
    return acc;
}

double sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += x[j];
    return acc;
}

double squared_distance(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double d = x[j] - y[j];
        acc += d * d;
    }
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) y[j] += a * x[j];
}

void multiply_divide(double* x, const double* num, const double* den, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        if (den[j] != 0.0) x[j] *= num[j] / den[j];
    }
}

}  // namespace

const KernelTable& table() {
    static const KernelTable t{dot, sum, squared_distance, axpy, multiply_divide};
    return t;
}

}  // namespace bss::kernels::scalar
