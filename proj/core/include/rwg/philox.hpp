#pragma once

#include <cmath>
#include <cstdint>

namespace rwg {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// A (key, counter) pair maps to four 32-bit words; streams are cheap to
// split and positionable, so every Monte Carlo draw has a fixed address
// (seed, stream, position) independent of threading.
struct Philox4x32 {
    static constexpr std::uint32_t kW32A = 0x9E3779B9u;
    static constexpr std::uint32_t kW32B = 0xBB67AE85u;
    static constexpr std::uint32_t kM4x32A = 0xD2511F53u;
    static constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

    struct Block {
        std::uint32_t v[4];
    };

    static Block generate(std::uint64_t key, std::uint64_t counter_hi,
                          std::uint64_t counter_lo) {
        std::uint32_t c[4] = {
            static_cast<std::uint32_t>(counter_lo),
            static_cast<std::uint32_t>(counter_lo >> 32),
            static_cast<std::uint32_t>(counter_hi),
            static_cast<std::uint32_t>(counter_hi >> 32)};
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM4x32A) * c[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM4x32B) * c[2];
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            c[0] = hi1 ^ c[1] ^ k0;
            c[1] = lo1;
            c[2] = hi0 ^ c[3] ^ k1;
            c[3] = lo0;
            k0 += kW32A;
            k1 += kW32B;
        }
        return Block{{c[0], c[1], c[2], c[3]}};
    }
};

/// One addressable random stream: (seed, stream id) fixes the key, and the
/// draw position fixes the counter. Draws are independent of call order.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream), pos_(0) {}

    std::uint64_t position() const { return pos_; }
    void seek(std::uint64_t pos) { pos_ = pos; }

    /// Uniform double in (0, 1), 53-bit resolution, from block `pos`.
    double uniform_at(std::uint64_t pos) const {
        const auto b = Philox4x32::generate(key(), stream_, pos);
        const std::uint64_t hi =
            (static_cast<std::uint64_t>(b.v[0]) << 32) | b.v[1];
        // (mantissa + 0.5) / 2^53 keeps the value strictly inside (0,1).
        return (static_cast<double>(hi >> 11) + 0.5) * 0x1p-53;
    }

    double uniform() { return uniform_at(pos_++); }

    /// Standard normal pair by Box-Muller from one block.
    void normal_pair_at(std::uint64_t pos, double& n0, double& n1) const {
        const auto b = Philox4x32::generate(key(), stream_, pos);
        const std::uint64_t w0 =
            (static_cast<std::uint64_t>(b.v[0]) << 32) | b.v[1];
        const std::uint64_t w1 =
            (static_cast<std::uint64_t>(b.v[2]) << 32) | b.v[3];
        const double u0 = (static_cast<double>(w0 >> 11) + 0.5) * 0x1p-53;
        const double u1 = (static_cast<double>(w1 >> 11) + 0.5) * 0x1p-53;
        const double r = std::sqrt(-2.0 * std::log(u0));
        n0 = r * std::cos(2.0 * M_PI * u1);
        n1 = r * std::sin(2.0 * M_PI * u1);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double n0, n1;
        normal_pair_at(pos_++, n0, n1);
        spare_ = n1;
        have_spare_ = true;
        return n0;
    }

    /// Exponential with unit rate.
    double exponential() { return -std::log(uniform()); }

private:
    std::uint64_t key() const {
        // Mix seed and a tag so different seeds give unrelated key spaces.
        return seed_ * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull;
    }
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t pos_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace rwg
