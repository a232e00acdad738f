#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>

namespace bss {

// Observations, sources and concentrations are stored row-major: one spectrum
// (or one concentration vector) per row, contiguous across bands.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline std::span<const double> row_span(const Matrix& m, Index r) {
    return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline std::span<double> row_span(Matrix& m, Index r) {
    return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline std::span<const double> as_span(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

bool all_finite(const Matrix& m);

}  // namespace bss
