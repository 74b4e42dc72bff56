#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsync/bits.hpp"

namespace bsync {

// Up to 128 bits of hash output, low bit = output bit 0.
struct HashVal {
    uint64_t lo = 0, hi = 0;
    bool operator==(const HashVal&) const = default;
    bool operator<(const HashVal& o) const { return hi != o.hi ? hi < o.hi : lo < o.lo; }
};

// A hash function certified collision free for one particular string: the
// q-bit entries of a virtual array indexed by {0,1}^p, materialized only
// through per-index evaluation of the small-bias powering generator.
// Entry u occupies output positions int(u)*q+1 .. int(u)*q+q where int(u)
// reads u big-endian (first bit most significant), so
//   h(u)_r = < g^int(u) * alpha^r , beta >   with g = alpha^q.
//
// The generator field degree is m = p + ceil(log2 q) + 3*ceil(log2 n) + 2,
// giving stream bias below n^-3/4: any two distinct p-windows then collide
// with probability at most 2^-q + n^-3/4 per seed, and q = 4*ceil(log2 n)
// makes the union over all window pairs vanish.  The descriptor stores the
// seed outright, so its size is Theta(p + log n) bits.
struct HashDescriptor {
    uint64_t n = 0;  // length of the certified string
    uint64_t p = 0;  // window length
    unsigned q = 0;  // output bits
    Bits seed;       // 2m bits: alpha coefficients then beta coefficients

    unsigned field_deg() const;                // m
    static unsigned derive_q(uint64_t n);      // 4*ceil(log2 n)

    // `CFH v1 n=<n> p=<p> q=<q> seed=<hex>` (seed packed MSB-first)
    std::string to_text() const;
    static HashDescriptor from_text(const std::string& text);
    bool operator==(const HashDescriptor&) const = default;
};

// Deterministic search: seed pairs are enumerated diagonally from counter
// 0 upward and the first seed that verifies wins.  Throws on exhaustion
// (a parameter bug, never expected).  attempts_out reports how many seeds
// were tried when non-null.
HashDescriptor build_collision_free(const Bits& x, uint64_t p, uint64_t* attempts_out = nullptr);
HashDescriptor build_collision_free_q(const Bits& x, uint64_t p, unsigned q,
                                      uint64_t* attempts_out = nullptr);

// True iff for all window pairs of x: equal hashes <=> equal substrings.
bool verify_collision_free(const HashDescriptor& desc, const Bits& x);

Bits eval_hash(const HashDescriptor& desc, const Bits& u);  // |u| = p, returns q bits
HashVal eval_hash_val(const HashDescriptor& desc, const Bits& u);

// Hashes of every window x[i, i+p), i = 0..|x|-p, via one rolling pass.
std::vector<HashVal> slide_hashes(const HashDescriptor& desc, const Bits& x);

Bits hashval_to_bits(HashVal v, unsigned q);

}  // namespace bsync
