#pragma once

// Counter-based random streams.  Every consumer addresses the generator by
// (seed, stream, index, call): no state is shared between samples, so loops
// can be split across threads in any way without changing a single drawn
// value.  The generator is Philox4x32-10.

#include <array>
#include <cmath>
#include <cstdint>

namespace cutvol::rng {

inline constexpr const char* kGeneratorName = "philox4x32-10";

struct Philox4x32 {
    uint32_t key0, key1;

    explicit Philox4x32(uint64_t seed)
        : key0(static_cast<uint32_t>(seed)), key1(static_cast<uint32_t>(seed >> 32)) {}

    static void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
        const uint64_t p = static_cast<uint64_t>(a) * b;
        hi = static_cast<uint32_t>(p >> 32);
        lo = static_cast<uint32_t>(p);
    }

    // One 128-bit block for counter (index, call, stream).
    std::array<uint32_t, 4> block(uint64_t index, uint32_t call, uint32_t stream) const {
        uint32_t c0 = static_cast<uint32_t>(index);
        uint32_t c1 = static_cast<uint32_t>(index >> 32);
        uint32_t c2 = call;
        uint32_t c3 = stream;
        uint32_t k0 = key0, k1 = key1;
        for (int round = 0; round < 10; ++round) {
            uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, c0, hi0, lo0);
            mulhilo(0xCD9E8D57u, c2, hi1, lo1);
            const uint32_t n0 = hi1 ^ c1 ^ k0;
            const uint32_t n1 = lo1;
            const uint32_t n2 = hi0 ^ c3 ^ k1;
            const uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return {c0, c1, c2, c3};
    }
};

// Stream identifiers used across the toolkit.  Keeping them disjoint means a
// fixed seed never reuses random numbers between different estimators.
enum Stream : uint32_t {
    kStreamVolume = 0,
    kStreamSection = 1,
    kStreamTangencyStarts = 2,
    kStreamScanDirections = 3,
    kStreamDomainSamples = 4,
    kStreamTransversalityRays = 5,
    kStreamTest = 100,
};

// Sequential view of the counter space for one (seed, stream, index).
class Sequence {
public:
    Sequence(uint64_t seed, uint32_t stream, uint64_t index)
        : gen_(seed), stream_(stream), index_(index) {}

    // Uniform in [0, 1), 53-bit mantissa.
    double u01() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        const auto b = gen_.block(index_, call_++, stream_);
        const uint64_t x = (static_cast<uint64_t>(b[0]) << 32) | b[1];
        const uint64_t y = (static_cast<uint64_t>(b[2]) << 32) | b[3];
        spare_ = static_cast<double>(y >> 11) * 0x1.0p-53;
        have_ = true;
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe under log().
    double u01_open() { return 1.0 - u01(); }

    // Standard normal via Box-Muller.  Consumes a fixed number of uniforms,
    // so the stream layout does not depend on the values drawn.
    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return spare_normal_;
        }
        const double u = u01_open();
        const double v = u01();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_normal_ = r * std::sin(a);
        have_normal_ = true;
        return r * std::cos(a);
    }

private:
    Philox4x32 gen_;
    uint32_t stream_;
    uint64_t index_;
    uint32_t call_ = 0;
    bool have_ = false;
    double spare_ = 0.0;
    bool have_normal_ = false;
    double spare_normal_ = 0.0;
};

}  // namespace cutvol::rng
