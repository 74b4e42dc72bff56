#include "bsync/gf2.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

#include "bsync/errors.hpp"

#ifdef __PCLMUL__
#include <wmmintrin.h>
#endif

namespace bsync {

#ifdef __PCLMUL__
Clmul128 clmul64(uint64_t a, uint64_t b) {
    __m128i r = _mm_clmulepi64_si128(_mm_cvtsi64_si128(static_cast<long long>(a)),
                                     _mm_cvtsi64_si128(static_cast<long long>(b)), 0x00);
    return {static_cast<uint64_t>(_mm_cvtsi128_si64(r)),
            static_cast<uint64_t>(_mm_cvtsi128_si64(_mm_srli_si128(r, 8)))};
}
#else
Clmul128 clmul64(uint64_t a, uint64_t b) {
    // 4-bit windowed schoolbook
    uint64_t lo[16], hi[16];
    lo[0] = hi[0] = 0;
    lo[1] = b;
    hi[1] = 0;
    for (int i = 2; i < 16; i += 2) {
        lo[i] = lo[i / 2] << 1;
        hi[i] = hi[i / 2] << 1 | lo[i / 2] >> 63;
        lo[i + 1] = lo[i] ^ b;
        hi[i + 1] = hi[i];
    }
    uint64_t rl = 0, rh = 0;
    for (int k = 15; k >= 0; --k) {
        rh = rh << 4 | rl >> 60;
        rl <<= 4;
        unsigned nib = (a >> (4 * k)) & 0xf;
        rl ^= lo[nib];
        rh ^= hi[nib];
    }
    return {rl, rh};
}
#endif

namespace {

// XOR a 64-bit value into a word array at an arbitrary bit offset.  Writes
// past nwords are dropped; callers only rely on that for bits that are
// provably zero (fold targets never exceed the original top degree).
inline void xor_at(uint64_t* w, size_t nwords, size_t bitpos, uint64_t v) {
    size_t wi = bitpos / 64, sh = bitpos % 64;
    if (wi < nwords) w[wi] ^= v << sh;
    if (sh && wi + 1 < nwords) w[wi + 1] ^= v >> (64 - sh);
}

// 8 -> 16 bit zero-interleave table for squaring.
struct SpreadTab {
    uint16_t t[256];
    SpreadTab() {
        for (unsigned v = 0; v < 256; ++v) {
            uint16_t s = 0;
            for (unsigned b = 0; b < 8; ++b)
                if (v >> b & 1) s |= static_cast<uint16_t>(1u << (2 * b));
            t[v] = s;
        }
    }
};
const SpreadTab kSpread;

int poly2_degree(const std::vector<uint64_t>& p) {
    for (size_t i = p.size(); i-- > 0;)
        if (p[i]) return static_cast<int>(i * 64 + 63 - __builtin_clzll(p[i]));
    return -1;
}

void poly2_shift_xor(std::vector<uint64_t>& dst, const std::vector<uint64_t>& src, unsigned sh) {
    size_t wsh = sh / 64, bsh = sh % 64;
    for (size_t i = src.size(); i-- > 0;) {
        uint64_t v = src[i];
        if (!v) continue;
        if (i + wsh < dst.size()) dst[i + wsh] ^= v << bsh;
        if (bsh && i + wsh + 1 < dst.size()) dst[i + wsh + 1] ^= v >> (64 - bsh);
    }
}

// gcd of GF(2)[x] polynomials given as bit vectors (destroys arguments)
std::vector<uint64_t> poly2_gcd(std::vector<uint64_t> a, std::vector<uint64_t> b) {
    int da = poly2_degree(a), db = poly2_degree(b);
    if (da < db) {
        std::swap(a, b);
        std::swap(da, db);
    }
    while (db >= 0) {
        while (da >= db) {
            poly2_shift_xor(a, b, static_cast<unsigned>(da - db));
            da = poly2_degree(a);
            if (da < 0) break;
        }
        std::swap(a, b);
        std::swap(da, db);
    }
    return a;
}

}  // namespace

// A modulus candidate with just enough machinery to test itself.
struct Gf::Candidate {
    unsigned m, nw;
    std::vector<unsigned> taps;

    // reduce a 2*nw-word polynomial modulo x^m + sum x^t, in place
    void reduce(uint64_t* w) const {
        const size_t mw = m / 64, mb = m % 64;
        const size_t total = 2 * static_cast<size_t>(nw);
        bool dirty = true;
        while (dirty) {
            dirty = false;
            for (size_t wi = total; wi-- > mw;) {
                if (wi == mw && mb) {
                    // straddling word: bit mb+c is coefficient of x^(m+c)
                    uint64_t v = w[wi] >> mb;
                    if (!v) continue;
                    w[wi] &= (uint64_t{1} << mb) - 1;
                    for (unsigned t : taps) xor_at(w, total, t, v);
                } else {
                    uint64_t v = w[wi];
                    if (!v) continue;
                    w[wi] = 0;
                    size_t base = wi * 64;
                    for (unsigned t : taps) xor_at(w, total, base - m + t, v);
                }
                dirty = true;
            }
        }
    }

    void mul(uint64_t* out, const uint64_t* a, const uint64_t* b, uint64_t* scratch) const {
        std::memset(scratch, 0, 2 * nw * sizeof(uint64_t));
        for (unsigned i = 0; i < nw; ++i) {
            if (!a[i]) continue;
            for (unsigned j = 0; j < nw; ++j) {
                if (!b[j]) continue;
                Clmul128 p = clmul64(a[i], b[j]);
                scratch[i + j] ^= p.lo;
                scratch[i + j + 1] ^= p.hi;
            }
        }
        reduce(scratch);
        std::memcpy(out, scratch, nw * sizeof(uint64_t));
    }

    void sqr(uint64_t* out, const uint64_t* a, uint64_t* scratch) const {
        std::memset(scratch, 0, 2 * nw * sizeof(uint64_t));
        for (unsigned i = 0; i < nw; ++i) {
            uint64_t v = a[i];
            if (!v) continue;
            for (unsigned by = 0; by < 8; ++by) {
                uint16_t s = kSpread.t[(v >> (8 * by)) & 0xff];
                if (s) scratch[2 * i + by / 4] ^= static_cast<uint64_t>(s) << (16 * (by % 4));
            }
        }
        reduce(scratch);
        std::memcpy(out, scratch, nw * sizeof(uint64_t));
    }

    std::vector<uint64_t> modulus_bits() const {
        std::vector<uint64_t> f(nw + 1, 0);
        f[m / 64] |= uint64_t{1} << (m % 64);
        for (unsigned t : taps) f[t / 64] ^= uint64_t{1} << (t % 64);
        return f;
    }

    // f irreducible  iff  x^(2^m) = x mod f  and  gcd(x^(2^(m/p)) - x, f) = 1
    // for every prime p dividing m.
    bool is_irreducible() const {
        std::vector<unsigned> checkpoints;
        {
            unsigned mm = m;
            for (unsigned p = 2; p * p <= mm; ++p)
                if (mm % p == 0) {
                    checkpoints.push_back(m / p);
                    while (mm % p == 0) mm /= p;
                }
            if (mm > 1) checkpoints.push_back(m / mm);
            std::sort(checkpoints.begin(), checkpoints.end());
        }
        std::vector<uint64_t> scratch(2 * nw);
        std::vector<uint64_t> t(nw, 0), xe(nw, 0);
        xe[0] = 2;
        t = xe;
        size_t cp = 0;
        for (unsigned i = 1; i <= m; ++i) {
            sqr(t.data(), t.data(), scratch.data());
            while (cp < checkpoints.size() && checkpoints[cp] == i) {
                std::vector<uint64_t> diff(nw + 1, 0);
                std::copy(t.begin(), t.end(), diff.begin());
                diff[0] ^= 2;  // t - x
                if (poly2_degree(diff) < 0) return false;  // all roots in a subfield
                if (poly2_degree(poly2_gcd(diff, modulus_bits())) != 0) return false;
                ++cp;
            }
        }
        return t == xe;
    }

    // ord(x) > limit, verified by walking successive multiplications by x
    bool order_exceeds(uint64_t limit) const {
        std::vector<uint64_t> y(nw, 0);
        y[0] = 2;
        std::vector<uint64_t> onev(nw, 0);
        onev[0] = 1;
        const size_t mw = m / 64, mb = m % 64;
        for (uint64_t e = 1; e < limit; ++e) {
            uint64_t carry = 0;
            for (unsigned i = 0; i < nw; ++i) {
                uint64_t nv = y[i] << 1 | carry;
                carry = y[i] >> 63;
                y[i] = nv;
            }
            bool over = mb ? (y[mw] >> mb & 1) != 0 : carry != 0;
            if (over) {
                if (mb) y[mw] &= (uint64_t{1} << mb) - 1;
                for (unsigned t : taps) y[t / 64] ^= uint64_t{1} << (t % 64);
            }
            if (y == onev) return false;
        }
        return true;
    }
};

Gf::Gf(unsigned m) : m_(m), nw_((m + 63) / 64), top_bits_(m % 64) {
    if (m < 2 || m > (1u << 20)) throw InvalidArgument("Gf: degree out of range");
    const uint64_t ord_limit = m >= 22 ? (uint64_t{1} << 21) : (uint64_t{1} << m) - 2;
    Candidate c{m, nw_, {}};
    auto admissible = [&](std::vector<unsigned> taps) {
        c.taps = std::move(taps);
        return c.is_irreducible() && c.order_exceeds(ord_limit);
    };
    for (unsigned a = 1; a < m && taps_.empty(); ++a)
        if (admissible({0, a})) taps_ = {0, a};
    for (unsigned a = 3; a < m && taps_.empty(); ++a)
        for (unsigned b = 2; b < a && taps_.empty(); ++b)
            for (unsigned cc = 1; cc < b && taps_.empty(); ++cc)
                if (admissible({0, cc, b, a})) taps_ = {0, cc, b, a};
    if (taps_.empty()) throw Error("Gf: no sparse modulus found for degree " + std::to_string(m));
}

const Gf& Gf::get(unsigned m) {
    static std::mutex mu;
    static std::map<unsigned, std::unique_ptr<Gf>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, std::unique_ptr<Gf>(new Gf(m))).first;
    return *it->second;
}

Gf::Elem Gf::one() const {
    Elem e(nw_, 0);
    e[0] = 1;
    return e;
}

Gf::Elem Gf::x() const {
    Elem e(nw_, 0);
    e[0] = 2;
    return e;
}

Gf::Elem Gf::from_u64(uint64_t v) const {
    if (m_ < 64 && v >> m_) throw InvalidArgument("Gf::from_u64: value too wide");
    Elem e(nw_, 0);
    e[0] = v;
    return e;
}

uint64_t Gf::to_u64(const Elem& a) const {
    if (m_ > 64) throw InvalidArgument("Gf::to_u64: field too wide");
    return a[0];
}

bool Gf::is_zero(const uint64_t* a) const {
    for (unsigned i = 0; i < nw_; ++i)
        if (a[i]) return false;
    return true;
}

bool Gf::equal(const uint64_t* a, const uint64_t* b) const {
    return std::memcmp(a, b, nw_ * sizeof(uint64_t)) == 0;
}

void Gf::reduce(uint64_t* wide) const {
    Candidate{m_, nw_, taps_}.reduce(wide);
}

void Gf::mul(uint64_t* out, const uint64_t* a, const uint64_t* b) const {
    if (nw_ <= 16) {
        uint64_t scratch[32];
        Candidate{m_, nw_, taps_}.mul(out, a, b, scratch);
    } else {
        std::vector<uint64_t> scratch(2 * nw_);
        Candidate{m_, nw_, taps_}.mul(out, a, b, scratch.data());
    }
}

void Gf::sqr(uint64_t* out, const uint64_t* a) const {
    if (nw_ <= 16) {
        uint64_t scratch[32];
        Candidate{m_, nw_, taps_}.sqr(out, a, scratch);
    } else {
        std::vector<uint64_t> scratch(2 * nw_);
        Candidate{m_, nw_, taps_}.sqr(out, a, scratch.data());
    }
}

void Gf::mul_x_inplace(uint64_t* a) const {
    uint64_t carry = 0;
    for (unsigned i = 0; i < nw_; ++i) {
        uint64_t nv = a[i] << 1 | carry;
        carry = a[i] >> 63;
        a[i] = nv;
    }
    bool over = top_bits_ ? (a[m_ / 64] >> top_bits_ & 1) != 0 : carry != 0;
    if (over) {
        if (top_bits_) a[m_ / 64] &= (uint64_t{1} << top_bits_) - 1;
        for (unsigned t : taps_) a[t / 64] ^= uint64_t{1} << (t % 64);
    }
}

void Gf::add_inplace(uint64_t* a, const uint64_t* b) const {
    for (unsigned i = 0; i < nw_; ++i) a[i] ^= b[i];
}

int Gf::inner_bit(const uint64_t* a, const uint64_t* b) const {
    uint64_t acc = 0;
    for (unsigned i = 0; i < nw_; ++i) acc ^= a[i] & b[i];
    return __builtin_parityll(acc);
}

void Gf::inv(uint64_t* out, const uint64_t* a) const {
    if (is_zero(a)) throw InvalidArgument("Gf::inv of zero");
    size_t wn = nw_ + 1;
    std::vector<uint64_t> r0 = Candidate{m_, nw_, taps_}.modulus_bits();
    std::vector<uint64_t> r1(wn, 0), t0(wn, 0), t1(wn, 0);
    std::copy(a, a + nw_, r1.begin());
    t1[0] = 1;
    int d0 = poly2_degree(r0), d1 = poly2_degree(r1);
    while (d1 > 0) {
        while (d0 >= d1) {
            unsigned sh = static_cast<unsigned>(d0 - d1);
            poly2_shift_xor(r0, r1, sh);
            poly2_shift_xor(t0, t1, sh);
            d0 = poly2_degree(r0);
            if (d0 < 0) break;
        }
        std::swap(r0, r1);
        std::swap(t0, t1);
        std::swap(d0, d1);
    }
    if (d1 != 0) throw Error("Gf::inv: inputs not coprime (modulus bug)");
    std::copy(t1.begin(), t1.begin() + nw_, out);
    if (top_bits_) out[m_ / 64] &= (uint64_t{1} << top_bits_) - 1;
}

void Gf::pow_u64(uint64_t* out, const uint64_t* base, uint64_t e) const {
    Elem acc = one();
    if (e) {
        std::vector<uint64_t> b(base, base + nw_);
        int top = 63 - __builtin_clzll(e);
        acc.assign(b.begin(), b.end());
        for (int i = top - 1; i >= 0; --i) {
            sqr(acc.data(), acc.data());
            if (e >> i & 1) mul(acc.data(), acc.data(), b.data());
        }
    }
    std::copy(acc.begin(), acc.end(), out);
}

void Gf::pow_bits(uint64_t* out, const uint64_t* base, const uint8_t* ebits, size_t nbits) const {
    size_t s = 0;
    while (s < nbits && !ebits[s]) ++s;
    if (s == nbits) {
        Elem o = one();
        std::copy(o.begin(), o.end(), out);
        return;
    }
    std::vector<uint64_t> acc(base, base + nw_);
    std::vector<uint64_t> b(base, base + nw_);
    for (size_t i = s + 1; i < nbits; ++i) {
        sqr(acc.data(), acc.data());
        if (ebits[i]) mul(acc.data(), acc.data(), b.data());
    }
    std::copy(acc.begin(), acc.end(), out);
}

Gf::Elem Gf::mul(const Elem& a, const Elem& b) const {
    Elem out(nw_);
    mul(out.data(), a.data(), b.data());
    return out;
}

Gf::Elem Gf::sqr(const Elem& a) const {
    Elem out(nw_);
    sqr(out.data(), a.data());
    return out;
}

Gf::Elem Gf::add(const Elem& a, const Elem& b) const {
    Elem out = a;
    add_inplace(out.data(), b.data());
    return out;
}

Gf::Elem Gf::inv(const Elem& a) const {
    Elem out(nw_);
    inv(out.data(), a.data());
    return out;
}

Gf::Elem Gf::pow_u64(const Elem& base, uint64_t e) const {
    Elem out(nw_);
    pow_u64(out.data(), base.data(), e);
    return out;
}

}  // namespace bsync
