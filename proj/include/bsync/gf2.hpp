#pragma once

#include <cstdint>
#include <vector>

namespace bsync {

struct Clmul128 {
    uint64_t lo, hi;
};

// 64x64 -> 128 bit carry-less multiply (hardware when __PCLMUL__ is set).
Clmul128 clmul64(uint64_t a, uint64_t b);

// GF(2^m) in polynomial basis modulo a fixed sparse irreducible f(x).
//
// f is the first trinomial x^m + x^a + 1 (a ascending), else the first
// pentanomial x^m + x^a + x^b + x^c + 1 (lexicographic in (a,b,c)), that is
// irreducible AND whose root x has multiplicative order > min(2^m-2, 2^21).
// The order floor keeps power sequences distinct (Reed-Solomon locators,
// rolling window powers) at every length this library can produce; for
// m <= 21 it forces a primitive modulus outright.  The search order is part
// of the serialization contract: changing it would silently re-key every
// stored descriptor.
//
// Elements are ceil(m/64) little-endian 64-bit words (bit i = coefficient
// of x^i).  Span operations take raw word pointers for the hot paths; the
// Elem wrappers allocate.
class Gf {
  public:
    static const Gf& get(unsigned m);  // cached for process lifetime; thread-safe

    unsigned deg() const { return m_; }
    unsigned words() const { return nw_; }
    const std::vector<unsigned>& modulus_taps() const { return taps_; }

    using Elem = std::vector<uint64_t>;

    Elem zero() const { return Elem(nw_, 0); }
    Elem one() const;
    Elem x() const;
    Elem from_u64(uint64_t v) const;
    uint64_t to_u64(const Elem& a) const;  // m <= 64 only
    bool is_zero(const uint64_t* a) const;
    bool equal(const uint64_t* a, const uint64_t* b) const;

    void mul(uint64_t* out, const uint64_t* a, const uint64_t* b) const;
    void sqr(uint64_t* out, const uint64_t* a) const;
    void mul_x_inplace(uint64_t* a) const;  // a *= x
    void add_inplace(uint64_t* a, const uint64_t* b) const;
    int inner_bit(const uint64_t* a, const uint64_t* b) const;  // GF(2) inner product
    void inv(uint64_t* out, const uint64_t* a) const;           // requires a != 0
    void pow_u64(uint64_t* out, const uint64_t* base, uint64_t e) const;
    // exponent supplied MSB-first as raw bits (arbitrary length)
    void pow_bits(uint64_t* out, const uint64_t* base, const uint8_t* ebits, size_t nbits) const;

    Elem mul(const Elem& a, const Elem& b) const;
    Elem sqr(const Elem& a) const;
    Elem add(const Elem& a, const Elem& b) const;
    Elem inv(const Elem& a) const;
    Elem pow_u64(const Elem& base, uint64_t e) const;

  private:
    explicit Gf(unsigned m);
    struct Candidate;
    void reduce(uint64_t* wide) const;  // 2*nw_ words; result in first nw_ words

    unsigned m_ = 0, nw_ = 0;
    std::vector<unsigned> taps_;  // f = x^m + sum_t x^t, 0 included, ascending
    unsigned top_bits_ = 0;       // m mod 64 (0 means word-aligned)
};

}  // namespace bsync
