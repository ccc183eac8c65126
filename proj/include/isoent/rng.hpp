// isoent/rng.hpp
// Seeded counter-based random generator used by every stochastic routine, so
// that all sampled tests are bit-reproducible from the seed alone.
//
// Protocol (fixed, do not change without bumping the docs):
//   state_0 = seed;  state_{n+1} = state_n + 0x9E3779B97F4A7C15
//   out_n   = splitmix64 finalizer of state_{n+1}
//   uniform double in [0,1): (out >> 11) * 2^-53
//   standard normals: Box-Muller on consecutive uniform pairs (u clamped away
//   from 0), produced in pairs and consumed in order.

#pragma once

#include "isoent/core.hpp"

#include <cstdint>

namespace isoent {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * pi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * pi * u2);
    }

    cplx next_complex_gaussian() {
        double re = next_gaussian();
        double im = next_gaussian();
        return cplx(re, im);
    }

    // uniform angle in [0, 2*pi)
    double next_angle() { return 2.0 * pi * next_double(); }

private:
    std::uint64_t state_;
    double spare_ = 0;
    bool have_spare_ = false;
};

inline Mat ginibre(int d, Rng& rng) {
    Mat z(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) z(i, j) = rng.next_complex_gaussian();
    return z;
}

// Haar-distributed unitary: Gram-Schmidt of a Ginibre matrix. MGS yields the
// positive-diagonal QR factor, for which Q is exactly Haar.
inline Mat haar_unitary(int d, Rng& rng) { return orthonormalize(ginibre(d, rng)); }

inline Mat haar_unitary(int d, std::uint64_t seed) {
    Rng rng(seed);
    return haar_unitary(d, rng);
}

// Random single-qubit unitary, convenience wrapper.
inline Mat random_local(Rng& rng) { return haar_unitary(2, rng); }

}  // namespace isoent
