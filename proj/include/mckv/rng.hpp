#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mckv::rng {

// Philox4x64-10 counter-based generator. A block is a pure function of
// (counter, key), which is what makes particle simulations reproducible
// independent of thread scheduling: every (particle, step) owns one block.
// Output matches NumPy's Philox bit generator.

struct Block {
    std::uint64_t x[4];
};

namespace detail {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

} // namespace detail

inline Block philox4x64(const std::array<std::uint64_t, 4>& counter,
                        const std::array<std::uint64_t, 2>& key) {
    std::uint64_t x0 = counter[0], x1 = counter[1], x2 = counter[2], x3 = counter[3];
    std::uint64_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        detail::mulhilo(detail::kMul0, x0, hi0, lo0);
        detail::mulhilo(detail::kMul1, x2, hi1, lo1);
        const std::uint64_t y0 = hi1 ^ x1 ^ k0;
        const std::uint64_t y1 = lo1;
        const std::uint64_t y2 = hi0 ^ x3 ^ k1;
        const std::uint64_t y3 = lo0;
        x0 = y0;
        x1 = y1;
        x2 = y2;
        x3 = y3;
        k0 += detail::kWeyl0;
        k1 += detail::kWeyl1;
    }
    return Block{{x0, x1, x2, x3}};
}

/// uniform in [0, 1)
inline double u01(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// uniform in (0, 1]
inline double u01_pos(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

/// Stateless per-(stream, step) draws for one particle. Yields one standard
/// normal plus one auxiliary uniform from a single Philox block.
struct Draw {
    double normal;
    double uniform;
};

inline Draw particle_draw(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t step, std::uint64_t purpose = 0) {
    const Block b = philox4x64({step, stream, purpose, 0}, {seed, 0x6d636b76ULL});
    const double u1 = u01_pos(b.x[0]);
    const double u2 = u01(b.x[1]);
    Draw d;
    d.normal = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    d.uniform = u01(b.x[2]);
    return d;
}

} // namespace mckv::rng
