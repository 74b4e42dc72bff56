#include "bsync/cfhash.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "bsync/errors.hpp"
#include "bsync/gf2.hpp"
#include "bsync/serial.hpp"

namespace bsync {

namespace {

unsigned ceil_log2(uint64_t v) {
    unsigned e = 0;
    while ((uint64_t{1} << e) < v) ++e;
    return e;
}

unsigned hash_field_deg(uint64_t n, uint64_t p, unsigned q) {
    // stream bias (2^p*q - 1)/2^m must stay below n^-3/4
    return static_cast<unsigned>(p) + ceil_log2(std::max<uint64_t>(q, 1)) +
           3 * ceil_log2(std::max<uint64_t>(n, 2)) + 2;
}

void check_params(uint64_t n, uint64_t p, unsigned q) {
    if (n == 0) throw InvalidArgument("hash: n must be positive");
    if (p == 0 || p > n) throw InvalidArgument("hash: window length out of range");
    if (p > 4096) throw InvalidArgument("hash: window length above supported limit");
    if (q == 0 || q > 128) throw InvalidArgument("hash: output width out of range (1..128)");
}

struct Ctx {
    const Gf& f;
    Gf::Elem alpha, beta;
};

Ctx make_ctx(const HashDescriptor& d) {
    check_params(d.n, d.p, d.q);
    unsigned m = hash_field_deg(d.n, d.p, d.q);
    const Gf& f = Gf::get(m);
    if (d.seed.size() != 2 * static_cast<size_t>(m))
        throw InvalidArgument("hash: seed length does not match parameters");
    Ctx c{f, f.zero(), f.zero()};
    for (unsigned j = 0; j < m; ++j) {
        if (d.seed[j]) c.alpha[j / 64] |= uint64_t{1} << (j % 64);
        if (d.seed[m + j]) c.beta[j / 64] |= uint64_t{1} << (j % 64);
    }
    return c;
}

void set_hv_bit(HashVal& v, unsigned r) {
    if (r < 64)
        v.lo |= uint64_t{1} << r;
    else
        v.hi |= uint64_t{1} << (r - 64);
}

HashVal window_hash(const Ctx& c, const uint64_t* w, unsigned q) {
    // bit r = <w * alpha^r, beta>
    HashVal out;
    Gf::Elem v(w, w + c.f.words());
    for (unsigned r = 0; r < q; ++r) {
        if (r) c.f.mul(v.data(), v.data(), c.alpha.data());
        if (c.f.inner_bit(v.data(), c.beta.data())) set_hv_bit(out, r);
    }
    return out;
}

Bits seed_from_codes(unsigned m, uint64_t ca, uint64_t cb) {
    Bits seed(2 * static_cast<size_t>(m));
    for (unsigned j = 0; j < 64 && j < m; ++j) {
        seed.set(j, static_cast<int>(ca >> j & 1));
        seed.set(m + j, static_cast<int>(cb >> j & 1));
    }
    return seed;
}

uint64_t isqrt_u64(uint64_t v) {
    auto r = static_cast<uint64_t>(std::sqrt(static_cast<double>(v)));
    while (r > 0 && r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

uint64_t parse_field(const std::string& tok, const char* key) {
    std::string prefix = std::string(key) + "=";
    if (tok.rfind(prefix, 0) != 0)
        throw FormatError("hash descriptor: expected " + prefix + "... got '" + tok + "'");
    std::string num = tok.substr(prefix.size());
    if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos)
        throw FormatError("hash descriptor: bad number in '" + tok + "'");
    try {
        return std::stoull(num);
    } catch (const std::exception&) {
        throw FormatError("hash descriptor: number out of range in '" + tok + "'");
    }
}

}  // namespace

unsigned HashDescriptor::field_deg() const {
    check_params(n, p, q);
    return hash_field_deg(n, p, q);
}

unsigned HashDescriptor::derive_q(uint64_t n) {
    return 4 * std::max(1u, ceil_log2(std::max<uint64_t>(n, 2)));
}

std::string HashDescriptor::to_text() const {
    check_params(n, p, q);
    std::ostringstream ss;
    ss << "CFH v1 n=" << n << " p=" << p << " q=" << q << " seed=" << to_hex(seed.to_bytes());
    return ss.str();
}

HashDescriptor HashDescriptor::from_text(const std::string& text) {
    std::istringstream ss(text);
    std::string tag, ver, fn, fp, fq, fs, extra;
    if (!(ss >> tag >> ver >> fn >> fp >> fq >> fs))
        throw FormatError("hash descriptor: truncated");
    if (ss >> extra) throw FormatError("hash descriptor: trailing garbage");
    if (tag != "CFH" || ver != "v1") throw FormatError("hash descriptor: bad header");
    HashDescriptor d;
    d.n = parse_field(fn, "n");
    d.p = parse_field(fp, "p");
    uint64_t q = parse_field(fq, "q");
    if (q == 0 || q > 128) throw FormatError("hash descriptor: q out of range");
    d.q = static_cast<unsigned>(q);
    check_params(d.n, d.p, d.q);
    if (fs.rfind("seed=", 0) != 0) throw FormatError("hash descriptor: expected seed=...");
    std::vector<uint8_t> bytes = from_hex(fs.substr(5));
    size_t nbits = 2 * static_cast<size_t>(hash_field_deg(d.n, d.p, d.q));
    if (bytes.size() != (nbits + 7) / 8)
        throw FormatError("hash descriptor: seed length does not match parameters");
    Bits all = Bits::from_bytes(bytes);
    for (size_t i = nbits; i < all.size(); ++i)
        if (all[i]) throw FormatError("hash descriptor: nonzero padding in seed");
    d.seed = all.slice(0, nbits);
    return d;
}

Bits eval_hash(const HashDescriptor& desc, const Bits& u) {
    return hashval_to_bits(eval_hash_val(desc, u), desc.q);
}

HashVal eval_hash_val(const HashDescriptor& desc, const Bits& u) {
    Ctx c = make_ctx(desc);
    if (u.size() != desc.p) throw InvalidArgument("hash: input is not window sized");
    // w = g^int(u) with g = alpha^q; int(u) is big-endian so u's bits are the
    // exponent MSB-first
    Gf::Elem g = c.f.pow_u64(c.alpha, desc.q);
    Gf::Elem w = c.f.zero();
    c.f.pow_bits(w.data(), g.data(), u.data(), u.size());
    return window_hash(c, w.data(), desc.q);
}

std::vector<HashVal> slide_hashes(const HashDescriptor& desc, const Bits& x) {
    Ctx c = make_ctx(desc);
    const Gf& f = c.f;
    const unsigned m = f.deg(), q = desc.q;
    const size_t p = desc.p;
    if (x.size() < p) return {};
    const size_t count = x.size() - p + 1;

    Gf::Elem g = f.pow_u64(c.alpha, q);
    std::vector<HashVal> out;
    out.reserve(count);
    if (f.is_zero(g.data())) {
        // degenerate alpha = 0: no rolling inverse, evaluate each window cold
        Gf::Elem w = f.zero();
        for (size_t i = 0; i < count; ++i) {
            f.pow_bits(w.data(), g.data(), x.data() + i, p);
            out.push_back(window_hash(c, w.data(), q));
        }
        return out;
    }

    Gf::Elem g2p = g;
    for (size_t i = 0; i < p; ++i) g2p = f.sqr(g2p);
    Gf::Elem g2p_inv = f.inv(g2p);

    // transpose trick: <w * alpha^r, beta> = <w, c_r> with
    // c_r bit i = <x^i * alpha^r, beta>
    std::vector<Gf::Elem> cr(q, f.zero());
    Gf::Elem ar = f.one();
    for (unsigned r = 0; r < q; ++r) {
        if (r) ar = f.mul(ar, c.alpha);
        Gf::Elem e = ar;
        for (unsigned i = 0; i < m; ++i) {
            if (f.inner_bit(e.data(), c.beta.data())) cr[r][i / 64] |= uint64_t{1} << (i % 64);
            f.mul_x_inplace(e.data());
        }
    }

    // byte tables: one 256-entry XOR table per byte of w
    const unsigned nbytes = (m + 7) / 8;
    std::vector<std::array<HashVal, 256>> tab(nbytes);
    for (unsigned bp = 0; bp < nbytes; ++bp) {
        HashVal col[8] = {};
        for (unsigned b = 0; b < 8; ++b) {
            unsigned bit = bp * 8 + b;
            if (bit >= m) continue;
            for (unsigned r = 0; r < q; ++r)
                if (cr[r][bit / 64] >> (bit % 64) & 1) set_hv_bit(col[b], r);
        }
        tab[bp][0] = HashVal{};
        for (unsigned v = 1; v < 256; ++v) {
            unsigned low = static_cast<unsigned>(__builtin_ctz(v));
            HashVal h = tab[bp][v & (v - 1)];
            h.lo ^= col[low].lo;
            h.hi ^= col[low].hi;
            tab[bp][v] = h;
        }
    }

    Gf::Elem w = f.zero();
    f.pow_bits(w.data(), g.data(), x.data(), p);
    for (size_t i = 0;; ++i) {
        HashVal hv;
        for (unsigned bp = 0; bp < nbytes; ++bp) {
            auto byte = static_cast<uint8_t>(w[bp / 8] >> (8 * (bp % 8)));
            hv.lo ^= tab[bp][byte].lo;
            hv.hi ^= tab[bp][byte].hi;
        }
        out.push_back(hv);
        if (i + 1 == count) break;
        // int(u') = 2*int(u) - msb*2^p + incoming bit
        f.sqr(w.data(), w.data());
        if (x[i]) f.mul(w.data(), w.data(), g2p_inv.data());
        if (x[i + p]) f.mul(w.data(), w.data(), g.data());
    }
    return out;
}

bool verify_collision_free(const HashDescriptor& desc, const Bits& x) {
    std::vector<HashVal> hs = slide_hashes(desc, x);
    if (hs.size() <= 1) return true;
    std::vector<uint32_t> idx(hs.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
        if (!(hs[a] == hs[b])) return hs[a] < hs[b];
        return a < b;
    });
    const size_t p = desc.p;
    for (size_t i = 1; i < idx.size(); ++i) {
        if (!(hs[idx[i]] == hs[idx[i - 1]])) continue;
        if (std::memcmp(x.data() + idx[i], x.data() + idx[i - 1], p) != 0) return false;
    }
    return true;
}

HashDescriptor build_collision_free_q(const Bits& x, uint64_t p, unsigned q,
                                      uint64_t* attempts_out) {
    check_params(x.size(), p, q);
    const unsigned m = hash_field_deg(x.size(), p, q);
    uint64_t attempts = 0;
    constexpr uint64_t kMaxAttempts = 4096;
    for (uint64_t s = 0; s < (uint64_t{1} << 24); ++s) {
        // diagonal pairing: counter s -> (a, b); alpha skips the codes for
        // 0 and 1, beta skips 0
        uint64_t d = (isqrt_u64(8 * s + 1) - 1) / 2;
        uint64_t a = s - d * (d + 1) / 2;
        uint64_t b = d - a;
        uint64_t ca = 2 + a, cb = 1 + b;
        if (m < 64 && ((ca >> m) != 0 || (cb >> m) != 0)) continue;
        HashDescriptor desc{x.size(), p, q, seed_from_codes(m, ca, cb)};
        ++attempts;
        if (verify_collision_free(desc, x)) {
            if (attempts_out) *attempts_out = attempts;
            return desc;
        }
        if (attempts >= kMaxAttempts) break;
    }
    throw Error("collision-free hash: seed search exhausted; parameters are inconsistent");
}

HashDescriptor build_collision_free(const Bits& x, uint64_t p, uint64_t* attempts_out) {
    return build_collision_free_q(x, p, HashDescriptor::derive_q(x.size()), attempts_out);
}

Bits hashval_to_bits(HashVal v, unsigned q) {
    if (q > 128) throw InvalidArgument("hash: output width out of range");
    Bits out(q);
    for (unsigned r = 0; r < q; ++r) {
        uint64_t word = r < 64 ? v.lo : v.hi;
        out.set(r, static_cast<int>(word >> (r % 64) & 1));
    }
    return out;
}

}  // namespace bsync
