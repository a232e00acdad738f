#pragma once

#include <cstdint>
#include <random>

namespace bss {

/// One independent pseudo-random stream, identified by (seed, stream_id).
///
/// A stream is owned by exactly one chain at a time. Identical (seed,
/// stream_id) pairs reproduce identical draw sequences on the same build.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on (0, 1); safe to pass to log().
    double uniform_open();
    double normal();
    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n);

    std::mt19937_64& engine() { return engine_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace bss
