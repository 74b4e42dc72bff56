#include "bsync/docx_levels.hpp"

#include <algorithm>
#include <cstring>

#include "bsync/errors.hpp"
#include "bsync/matching.hpp"
#include "bsync/rs.hpp"
#include "bsync/serial.hpp"

namespace bsync {

namespace {

unsigned ceil_log2(uint64_t v) {
    unsigned e = 0;
    while ((uint64_t{1} << e) < v) ++e;
    return e;
}

uint64_t pow2_at_least(uint64_t v) {
    uint64_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

Bits pack_symbols(const std::vector<uint64_t>& syms, unsigned width) {
    Bits out;
    for (uint64_t s : syms)
        for (unsigned b = width; b-- > 0;) out.push_back(static_cast<int>(s >> b & 1));
    return out;
}

std::vector<uint64_t> unpack_symbols(const Bits& bits, unsigned width, size_t count) {
    if (width == 0 || width > 64 || bits.size() != width * count)
        throw FormatError("sketch: symbol section has wrong length");
    std::vector<uint64_t> out(count, 0);
    for (size_t i = 0; i < count; ++i)
        for (unsigned b = 0; b < width; ++b) out[i] = out[i] << 1 | bits[i * width + b];
    return out;
}

uint64_t block_hash(const HashDescriptor& h, const Bits& s, uint64_t start0) {
    return eval_hash_val(h, s.slice(start0, h.p)).lo;
}

}  // namespace

uint64_t LevelSchedule::level_distance(unsigned level) const {
    return kLevelDistFactor * level * r;
}

uint64_t LevelSchedule::final_distance() const {
    uint64_t rf = k + (t + bL() - 1) / bL();
    return kFinalDistFactor * L * std::max<uint64_t>(rf, 1);
}

bool LevelSchedule::level_capped(unsigned level) const {
    return level_distance(level) - 1 >= l[level - 1];
}

bool LevelSchedule::final_capped() const { return final_distance() - 1 >= l.back(); }

unsigned LevelSchedule::level_symbol_bits(unsigned level) const {
    return std::max(q, ceil_log2(l[level - 1] + level_distance(level)));
}

LevelSchedule make_levels_schedule(uint64_t n, uint64_t k, uint64_t t) {
    if (n == 0) throw InvalidArgument("schedule: empty input");
    if (n > kLevelsMaxLength)
        throw InvalidArgument("schedule: length above the supported limit for this variant");
    LevelSchedule s;
    s.n_true = n;
    s.k = k;
    s.t = t;
    const unsigned ln = std::max(1u, ceil_log2(n));
    const uint64_t bL = pow2_at_least(2 * ln);
    s.r = std::max<uint64_t>(1, k + (t + ln - 1) / ln);
    s.pass_through = kPassKDivisor * k * ln > n || kPassTDivisor * t > n || bL > n;
    if (s.pass_through) {
        s.n_padded = n;
        return s;
    }
    uint64_t limit = std::min(n / (kLevelBlockDivisor * s.r), kLevelTopBlockCap);
    uint64_t b1 = bL;
    while (b1 * 2 <= limit) b1 *= 2;
    s.n_padded = (n / b1 + 1) * b1;
    s.q = 4 * ln;
    for (uint64_t bi = b1;; bi /= 2) {
        s.b.push_back(bi);
        s.l.push_back(s.n_padded / bi);
        if (bi == bL) break;
    }
    s.L = static_cast<unsigned>(s.b.size());
    return s;
}

LevelsSketch alice_sketch_levels(const Bits& x, uint64_t k, uint64_t t) {
    LevelsSketch sk;
    sk.sched = make_levels_schedule(x.size(), k, t);
    const LevelSchedule& s = sk.sched;
    if (s.pass_through) {
        sk.pass_payload = x;
        return sk;
    }
    Bits xp = x;
    xp.push_back(1);
    while (xp.size() < s.n_padded) xp.push_back(0);

    for (unsigned i = 1; i <= s.L; ++i) {
        sk.h.push_back(build_collision_free_q(xp, s.b[i - 1], s.q));
        const HashDescriptor& h = sk.h.back();
        std::vector<uint64_t> v(s.l[i - 1]);
        for (uint64_t b = 0; b < s.l[i - 1]; ++b) v[b] = block_hash(h, xp, b * s.b[i - 1]);
        if (i == 1) sk.v1 = v;
        if (s.level_capped(i)) {
            sk.z.push_back(std::move(v));
        } else {
            SymbolVector data{s.level_symbol_bits(i), std::move(v)};
            sk.z.push_back(rs_parity(data, static_cast<unsigned>(s.level_distance(i))).symbols);
        }
    }

    std::vector<uint64_t> blocks(s.l.back());
    for (uint64_t b = 0; b < blocks.size(); ++b) blocks[b] = xp.window64(b * s.bL(), s.bL());
    if (s.final_capped()) {
        sk.z_final = std::move(blocks);
    } else {
        SymbolVector data{static_cast<unsigned>(s.bL()), std::move(blocks)};
        sk.z_final = rs_parity(data, static_cast<unsigned>(s.final_distance())).symbols;
    }
    return sk;
}

Bits bob_recover_levels_instrumented(const Bits& y, const LevelsSketch& sk, const Bits* truth,
                                     LevelsRecoveryStats* stats) {
    const LevelSchedule& s = sk.sched;
    if (s.pass_through) {
        if (sk.pass_payload.size() != s.n_true)
            throw RecoveryError("sketch: pass-through payload length mismatch");
        return sk.pass_payload;
    }
    if (sk.h.size() != s.L || sk.z.size() != s.L || sk.v1.size() != s.l[0])
        throw InvalidArgument("sketch: sections do not match the schedule");

    // the pad (1 then zeros) is known a priori; blocks lying entirely in it
    // count as filled so they never cost erasures
    Bits xt(s.n_padded, 0);
    xt.set(s.n_true, 1);
    std::vector<char> filled(s.l[0], 0);
    for (uint64_t b = 0; b < s.l[0]; ++b)
        if (b * s.b[0] >= s.n_true) filled[b] = 1;
    std::vector<uint64_t> v_cur;

    for (unsigned i = 1; i <= s.L; ++i) {
        const uint64_t bi = s.b[i - 1], li = s.l[i - 1];
        const HashDescriptor& h = sk.h[i - 1];
        LevelsRecoveryStats::Level lv;
        lv.level = i;
        lv.blocks = li;
        lv.distance = s.level_distance(i);
        lv.capped = s.level_capped(i);

        if (i > 1) {
            // each block of the previous level splits into two; finer pad
            // blocks may become fully known even when their parent straddled
            std::vector<char> split(li, 0);
            for (uint64_t b = 0; b < li; ++b)
                split[b] = filled[b / 2] || b * bi >= s.n_true;
            filled = std::move(split);
        }

        std::vector<uint64_t> own(li, 0);
        std::vector<size_t> stars;
        for (uint64_t b = 0; b < li; ++b) {
            if (filled[b])
                own[b] = block_hash(h, xt, b * bi);
            else
                stars.push_back(b);
        }
        lv.starred_at_decode = stars.size();

        if (i == 1) {
            v_cur = sk.v1;
        } else if (lv.capped) {
            if (sk.z[i - 1].size() != li)
                throw InvalidArgument("sketch: capped level section has wrong length");
            v_cur = sk.z[i - 1];
        } else {
            unsigned ms = s.level_symbol_bits(i);
            SymbolVector received{ms, own};
            SymbolVector parity{ms, sk.z[i - 1]};
            v_cur = rs_correct(received, parity, static_cast<unsigned>(lv.distance), stars).symbols;
        }

        std::vector<uint64_t> S;
        HashValueTable vt;
        for (uint64_t b = 0; b < li; ++b) {
            if (filled[b] && own[b] == v_cur[b]) continue;
            if (filled[b]) {
                ++lv.mismatched;
                filled[b] = 0;  // drop content that no longer checks out
            }
            S.push_back(1 + b * bi);
            vt[1 + b * bi] = HashVal{v_cur[b], 0};
        }
        lv.S_size = S.size();

        if (!S.empty()) {
            Matching m = degree3_two_thirds(S, vt, y, h);
            lv.matched = m.pairs.size();
            for (auto [ipos, j] : m.pairs) {
                for (uint64_t o = 0; o < bi; ++o) xt.set(ipos - 1 + o, y[j - 1 + o]);
                filled[(ipos - 1) / bi] = 1;
            }
        }
        if (truth && stats) {
            // padded truth for block comparison
            Bits tp = *truth;
            tp.push_back(1);
            while (tp.size() < s.n_padded) tp.push_back(0);
            for (uint64_t b = 0; b < li; ++b)
                if (filled[b] &&
                    std::memcmp(xt.data() + b * bi, tp.data() + b * bi, bi) != 0)
                    ++lv.wrong_filled;
        }
        if (stats) stats->levels.push_back(lv);
    }

    // final content decode over the smallest blocks
    const uint64_t bl = s.bL(), ll = s.l.back();
    std::vector<uint64_t> blocks(ll, 0);
    std::vector<size_t> stars;
    for (uint64_t b = 0; b < ll; ++b) {
        if (filled[b])
            blocks[b] = xt.window64(b * bl, bl);
        else
            stars.push_back(b);
    }
    if (stats) {
        stats->final_starred = stars.size();
        stats->final_capped = s.final_capped();
    }
    std::vector<uint64_t> final_blocks;
    if (s.final_capped()) {
        if (sk.z_final.size() != ll)
            throw InvalidArgument("sketch: capped final section has wrong length");
        final_blocks = sk.z_final;
    } else {
        SymbolVector received{static_cast<unsigned>(bl), blocks};
        SymbolVector parity{static_cast<unsigned>(bl), sk.z_final};
        final_blocks =
            rs_correct(received, parity, static_cast<unsigned>(s.final_distance()), stars).symbols;
    }
    if (truth && stats) {
        Bits tp = *truth;
        tp.push_back(1);
        while (tp.size() < s.n_padded) tp.push_back(0);
        for (uint64_t b = 0; b < ll; ++b)
            if (filled[b] && blocks[b] != tp.window64(b * bl, bl)) ++stats->final_errors;
    }
    for (uint64_t b = 0; b < ll; ++b)
        for (uint64_t o = 0; o < bl; ++o)
            xt.set(b * bl + o, static_cast<int>(final_blocks[b] >> (bl - 1 - o) & 1));

    // the pad must read 1 then zeros; anything else means the budget was
    // exceeded in a way the codes could not see
    if (xt[s.n_true] != 1) throw RecoveryError("recovered padding is malformed");
    for (size_t i = s.n_true + 1; i < s.n_padded; ++i)
        if (xt[i]) throw RecoveryError("recovered padding is malformed");
    return xt.slice(0, s.n_true);
}

Bits bob_recover_levels(const Bits& y, const LevelsSketch& sk) {
    return bob_recover_levels_instrumented(y, sk, nullptr, nullptr);
}

size_t LevelsSketch::bit_size() const {
    const LevelSchedule& s = sched;
    size_t bits = 3 * 64 + 8;  // n, k, t, variant tag
    if (s.pass_through) return bits + pass_payload.size();
    for (unsigned i = 1; i <= s.L; ++i) {
        bits += h[i - 1].seed.size() + 64;  // seed plus descriptor framing
        unsigned w = s.level_capped(i) ? s.q : s.level_symbol_bits(i);
        bits += z[i - 1].size() * w + 64;
    }
    bits += v1.size() * s.q + 64;
    bits += z_final.size() * s.bL() + 64;
    return bits;
}

std::vector<uint8_t> LevelsSketch::serialize() const {
    ByteWriter w;
    w.magic("BSX1");
    w.u8(sched.pass_through ? 1 : 0);
    w.u64(sched.n_true);
    w.u64(sched.k);
    w.u64(sched.t);
    if (sched.pass_through) {
        w.bits(pass_payload);
        return w.take();
    }
    w.u64(sched.n_padded);
    w.u32(sched.L);
    w.u32(sched.q);
    for (const HashDescriptor& d : h) {
        std::string text = d.to_text();
        w.section(std::vector<uint8_t>(text.begin(), text.end()));
    }
    w.bits(pack_symbols(v1, sched.q));
    for (unsigned i = 1; i <= sched.L; ++i) {
        unsigned width = sched.level_capped(i) ? sched.q : sched.level_symbol_bits(i);
        w.u64(z[i - 1].size());
        w.bits(pack_symbols(z[i - 1], width));
    }
    w.u64(z_final.size());
    w.bits(pack_symbols(z_final, static_cast<unsigned>(sched.bL())));
    return w.take();
}

LevelsSketch LevelsSketch::deserialize(const std::vector<uint8_t>& buf) {
    ByteReader r(buf);
    r.expect_magic("BSX1");
    uint8_t variant = r.u8();
    uint64_t n = r.u64(), k = r.u64(), t = r.u64();
    LevelsSketch sk;
    sk.sched = make_levels_schedule(n, k, t);
    if (variant == 1) {
        if (!sk.sched.pass_through) throw FormatError("sketch: unexpected pass-through variant");
        sk.pass_payload = r.bits();
        if (sk.pass_payload.size() != n) throw FormatError("sketch: payload length mismatch");
        if (!r.done()) throw FormatError("sketch: trailing bytes");
        return sk;
    }
    if (variant != 0) throw FormatError("sketch: unknown variant");
    if (sk.sched.pass_through) throw FormatError("sketch: schedule demands pass-through");
    const LevelSchedule& s = sk.sched;
    if (r.u64() != s.n_padded || r.u32() != s.L || r.u32() != s.q)
        throw FormatError("sketch: header disagrees with the derived schedule");
    for (unsigned i = 1; i <= s.L; ++i) {
        std::vector<uint8_t> sec = r.section();
        HashDescriptor d = HashDescriptor::from_text(std::string(sec.begin(), sec.end()));
        if (d.n != s.n_padded || d.p != s.b[i - 1] || d.q != s.q)
            throw FormatError("sketch: hash descriptor disagrees with the schedule");
        sk.h.push_back(std::move(d));
    }
    sk.v1 = unpack_symbols(r.bits(), s.q, s.l[0]);
    for (unsigned i = 1; i <= s.L; ++i) {
        uint64_t count = r.u64();
        bool capped = s.level_capped(i);
        uint64_t expect = capped ? s.l[i - 1] : s.level_distance(i) - 1;
        if (count != expect) throw FormatError("sketch: level section has wrong symbol count");
        unsigned width = capped ? s.q : s.level_symbol_bits(i);
        sk.z.push_back(unpack_symbols(r.bits(), width, count));
    }
    uint64_t fcount = r.u64();
    uint64_t fexpect = s.final_capped() ? s.l.back() : s.final_distance() - 1;
    if (fcount != fexpect) throw FormatError("sketch: final section has wrong symbol count");
    sk.z_final = unpack_symbols(r.bits(), static_cast<unsigned>(s.bL()), fcount);
    if (!r.done()) throw FormatError("sketch: trailing bytes");
    return sk;
}

}  // namespace bsync
