#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace wr {

/// Philox4x32-10 counter-based generator. The key and the upper counter words identify a stream;
/// the lowest counter word walks through it.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::array<std::uint32_t, 2> key, Block counter) : key_(key), ctr_(counter) {}

    static Block encrypt(Block ctr, std::array<std::uint32_t, 2> key);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (pos_ == 4) {
            buf_ = encrypt(ctr_, key_);
            ++ctr_[0];
            pos_ = 0;
        }
        return buf_[pos_++];
    }

private:
    std::array<std::uint32_t, 2> key_;
    Block ctr_;
    Block buf_{};
    int pos_ = 4;
};

/// Random draws for one (seed, path, step, sub-operator) key.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t path, std::uint32_t step, std::uint32_t subop);

    double uniform();  // in (0,1)
    double normal();
    /// Takes +-sqrt(3) with probability 1/6 each and 0 otherwise: matches the first five normal moments.
    double three_point();
    long poisson(double mean);
    double gamma(double shape);  // unit scale

private:
    Philox4x32 eng_;
    std::normal_distribution<double> normal_;
};

class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed) {}
    Stream stream(std::uint64_t path, std::uint32_t step, std::uint32_t subop) const {
        return Stream(seed_, path, step, subop);
    }
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

}  // namespace wr
