#pragma once

#include <cstdint>
#include <span>

namespace towlab {

/// Reproducible stream of standard normal draws, keyed by
/// (master_seed, path_index). Streams for distinct path indices are
/// independent by construction: each block of draws comes from a
/// Philox-4x32-10 keyed counter, so the stream is a pure function of
/// (master_seed, path_index, position) with no shared state.
class NormalStream {
public:
    NormalStream(std::uint64_t master_seed, std::uint64_t path_index);

    double next();
    void fill(std::span<double> out);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t path_index() const { return path_index_; }

private:
    void refill();

    std::uint64_t master_seed_;
    std::uint64_t path_index_;
    std::uint64_t block_ = 0;
    double buffer_[4];
    int pos_ = 4;
};

} // namespace towlab
