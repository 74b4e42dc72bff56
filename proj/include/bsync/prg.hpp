#pragma once

#include <cstdint>

#include "bsync/bits.hpp"

namespace bsync {

// Powering construction for a small-bias sample space: the seed is a pair
// (alpha, beta) of GF(2^m) elements and output bit i is the inner product
// <alpha^(i-1), beta>.  Any XOR over output positions with top index n
// then has bias at most (n-1)/2^m (it misses only when the corresponding
// degree-(n-1) polynomial vanishes at alpha), which also caps the max-norm
// deviation of every k-position pattern, so the stream is epsilon-almost
// kappa-wise independent for every kappa simultaneously.
//
// m is sized so that (n_out-1)/2^m < 2^-eps_log2: the documented seed
// constant is c_g = 3, i.e. d = 2m <= 3*(log2 n_out + eps_log2 +
// log2 kappa) + O(1) with room for the ceilings.
struct GeneratorParams {
    uint64_t n_out = 0;    // number of output bits addressable
    uint64_t kappa = 1;    // independence parameter (slack only; see above)
    unsigned eps_log2 = 0; // bias bound epsilon = 2^-eps_log2

    static GeneratorParams make(uint64_t n_out, uint64_t kappa, unsigned eps_log2);

    unsigned field_deg() const;   // m
    unsigned seed_length() const; // d = 2m
};

// Seed layout: bit j of the seed (0-based) is the x^j coefficient of alpha
// for j < m, and of beta for j in [m, 2m).
int prg_eval_bit(const GeneratorParams& params, const Bits& seed, uint64_t index);  // 1-based
Bits prg_eval_window(const GeneratorParams& params, const Bits& seed, uint64_t start, uint64_t len);

}  // namespace bsync
