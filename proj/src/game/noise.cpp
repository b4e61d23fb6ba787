#include "towlab/game/noise.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace towlab {
namespace {

// Philox-4x32-10 block cipher (counter-based generator).
struct Block {
    std::uint32_t v[4];
};

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    constexpr std::uint64_t kMul0 = 0xD2511F53ull;
    constexpr std::uint64_t kMul1 = 0xCD9E8D57ull;
    const std::uint64_t p0 = kMul0 * ctr[0];
    const std::uint64_t p1 = kMul1 * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ ctr[1] ^ key[0];
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ ctr[3] ^ key[1];
    const std::uint32_t n3 = lo0;
    ctr[0] = n0;
    ctr[1] = n1;
    ctr[2] = n2;
    ctr[3] = n3;
}

Block philox(std::uint64_t key64, std::uint64_t ctr_lo, std::uint64_t ctr_hi) {
    std::uint32_t ctr[4] = {
        static_cast<std::uint32_t>(ctr_lo), static_cast<std::uint32_t>(ctr_lo >> 32),
        static_cast<std::uint32_t>(ctr_hi), static_cast<std::uint32_t>(ctr_hi >> 32)};
    std::uint32_t key[2] = {static_cast<std::uint32_t>(key64),
                            static_cast<std::uint32_t>(key64 >> 32)};
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        philox_round(ctr, key);
    }
    return Block{{ctr[0], ctr[1], ctr[2], ctr[3]}};
}

inline double to_unit(std::uint32_t x) {
    // (0, 1), never exactly 0 or 1, so logs are safe.
    return (static_cast<double>(x) + 0.5) * 0x1.0p-32;
}

} // namespace

NormalStream::NormalStream(std::uint64_t master_seed, std::uint64_t path_index)
    : master_seed_(master_seed), path_index_(path_index) {}

void NormalStream::refill() {
    const Block b = philox(master_seed_, path_index_, block_++);
    const double u1 = to_unit(b.v[0]);
    const double u2 = to_unit(b.v[1]);
    const double u3 = to_unit(b.v[2]);
    const double u4 = to_unit(b.v[3]);
    const double r1 = std::sqrt(-2.0 * std::log(u1));
    const double r2 = std::sqrt(-2.0 * std::log(u3));
    const double a1 = 2.0 * std::numbers::pi * u2;
    const double a2 = 2.0 * std::numbers::pi * u4;
    buffer_[0] = r1 * std::cos(a1);
    buffer_[1] = r1 * std::sin(a1);
    buffer_[2] = r2 * std::cos(a2);
    buffer_[3] = r2 * std::sin(a2);
    pos_ = 0;
}

double NormalStream::next() {
    if (pos_ >= 4) refill();
    return buffer_[pos_++];
}

void NormalStream::fill(std::span<double> out) {
    for (double& v : out) v = next();
}

} // namespace towlab
