#include "wr/random.hpp"

namespace wr {

Philox4x32::Block Philox4x32::encrypt(Block c, std::array<std::uint32_t, 2> k) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += w0;
        k[1] += w1;
    }
    return c;
}

Stream::Stream(std::uint64_t seed, std::uint64_t path, std::uint32_t step, std::uint32_t subop)
    : eng_({static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
           {0u, subop, step, static_cast<std::uint32_t>(path) ^ static_cast<std::uint32_t>(path >> 32) * 0x9E3779B9u}) {}

double Stream::uniform() {
    const std::uint64_t hi = eng_() >> 5;  // 27 bits
    const std::uint64_t lo = eng_() >> 6;  // 26 bits
    return (static_cast<double>((hi << 26) | lo) + 0.5) * 0x1.0p-53;
}

double Stream::normal() { return normal_(eng_); }

double Stream::three_point() {
    const double u = uniform();
    if (u < 1.0 / 6.0) return -1.7320508075688772;
    if (u < 1.0 / 3.0) return 1.7320508075688772;
    return 0.0;
}

long Stream::poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<long> dist(mean);
    return dist(eng_);
}

double Stream::gamma(double shape) {
    if (shape <= 0.0) return 0.0;
    std::gamma_distribution<double> dist(shape, 1.0);
    return dist(eng_);
}

}  // namespace wr
