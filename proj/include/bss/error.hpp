#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bss {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A parameter is outside its documented domain (non-positive rate, bad interval, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input data is unreadable, malformed or violates its contract.
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical failure inside a sampler or estimator.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The concentration conditional of one observation has a singular covariance.
class DegenerateSourcesError : public NumericalError {
public:
    DegenerateSourcesError(std::size_t observation, const std::string& what)
        : NumericalError(what), observation_(observation) {}
    std::size_t observation() const noexcept { return observation_; }

private:
    std::size_t observation_;
};

/// Every concentration of one source has underflowed; the source conditional is undefined.
class DormantSourceError : public NumericalError {
public:
    DormantSourceError(std::size_t source, const std::string& what)
        : NumericalError(what), source_(source) {}
    std::size_t source() const noexcept { return source_; }

private:
    std::size_t source_;
};

/// A step error annotated with the chain and iteration it happened in.
class ChainError : public NumericalError {
public:
    ChainError(std::size_t chain, std::size_t iteration, const std::string& what)
        : NumericalError("chain " + std::to_string(chain) + ", iteration " +
                         std::to_string(iteration) + ": " + what),
          chain_(chain),
          iteration_(iteration) {}
    std::size_t chain() const noexcept { return chain_; }
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t chain_;
    std::size_t iteration_;
};

}  // namespace bss
