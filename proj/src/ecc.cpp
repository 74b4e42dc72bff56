#include "bsync/ecc.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "bsync/docx_bdist.hpp"
#include "bsync/docx_levels.hpp"
#include "bsync/errors.hpp"
#include "bsync/prg.hpp"
#include "bsync/rs.hpp"
#include "bsync/serial.hpp"

namespace bsync {

namespace {

uint64_t ceil_log2(uint64_t v) {
    uint64_t r = 0;
    while ((uint64_t{1} << r) < v) ++r;
    return r;
}

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

uint64_t digits(uint64_t v) { return std::to_string(v).size(); }

uint64_t splitmix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// deterministic seed material for one generator, stretched from a counter
Bits stretch_seed(const GeneratorParams& g, uint64_t base) {
    Bits s;
    unsigned d = g.seed_length();
    uint64_t word = 0;
    for (unsigned i = 0; i < d; ++i) {
        if (i % 64 == 0) word = splitmix(base * 0x100000001b3ull + i / 64 + 1);
        s.push_back(static_cast<int>((word >> (i % 64)) & 1));
    }
    return s;
}

// serialized size of the halving-levels sketch; counts and widths are all
// schedule functions, so this is message independent
uint64_t levels_wire_bytes(const LevelSchedule& s) {
    uint64_t bytes = 4 + 1 + 3 * 8;
    if (s.pass_through) return bytes + 8 + ceil_div(s.n_true, 8);
    bytes += 8 + 4 + 4;
    for (unsigned i = 1; i <= s.L; ++i) {
        HashDescriptor probe{s.n_padded, s.b[i - 1], s.q, Bits{}};
        uint64_t seed_bytes = ceil_div(2 * uint64_t{probe.field_deg()}, 8);
        uint64_t text = 9 + digits(s.n_padded) + 3 + digits(s.b[i - 1]) + 3 + digits(s.q) + 6 +
                        2 * seed_bytes;
        bytes += 4 + text;
    }
    bytes += 8 + ceil_div(s.l.front() * s.q, 8);
    for (unsigned i = 1; i <= s.L; ++i) {
        uint64_t cnt = s.level_capped(i) ? s.l[i - 1] : s.level_distance(i) - 1;
        uint64_t w = s.level_capped(i) ? s.q : s.level_symbol_bits(i);
        bytes += 8 + 8 + ceil_div(cnt * w, 8);
    }
    uint64_t cntf = s.final_capped() ? s.l.back() : s.final_distance() - 1;
    bytes += 8 + 8 + ceil_div(cntf * s.bL(), 8);
    return bytes;
}

uint64_t bdist_wire_bytes(const StageParams& p) {
    uint64_t bytes = 4 + 1 + 3 * 8;
    bytes += 4 + 8 + 2 * p.D * ceil_div(uint64_t{p.record_bits()} + 1, 64) * 8;
    for (size_t lv = 0; lv < p.levels(); ++lv)
        bytes += 8 + 8 + ceil_div((p.level_distance(lv) - 1) * p.B, 8);
    bytes += 8 + 8 + ceil_div((p.final_distance() - 1) * p.bL(), 8);
    return bytes;
}

GeneratorParams distinct_gen(const CodecParams& p) {
    return GeneratorParams::make(p.n, 2 * p.B, static_cast<unsigned>(3 * p.ln + 2));
}

GeneratorParams buffer_gen(const CodecParams& p) {
    return GeneratorParams::make(p.n, p.l_buf, static_cast<unsigned>(2 * p.ln + 2));
}

constexpr uint64_t kSeedSearchCap = 4096;
constexpr uint64_t kChunkErrorFactor = 8;  // chunk-level capacity multiplier

void append_value(Bits& out, uint64_t v, uint64_t w) {
    for (uint64_t o = 0; o < w; ++o) out.push_back(static_cast<int>((v >> (w - 1 - o)) & 1));
}

}  // namespace

Bits CodecParams::buffer_pattern() const {
    Bits b(static_cast<size_t>(l_buf), 0);
    b.set(static_cast<size_t>(l_buf) - 1, 1);
    return b;
}

CodecParams make_codec_params(uint64_t n, uint64_t k, uint64_t t, SketchBackend backend) {
    if (backend != SketchBackend::Levels && backend != SketchBackend::Bdist)
        throw InvalidArgument("codec: unknown sketch backend");
    if (n < kCodecMinLength) throw InvalidArgument("codec: message too short for the armor");
    uint64_t cap = backend == SketchBackend::Levels ? kLevelsMaxLength : kBdistMaxLength;
    if (n > cap)
        throw InvalidArgument("codec: length above the supported limit for this backend");

    CodecParams p;
    p.n = n;
    p.k = k;
    p.t = t;
    p.backend = backend;
    p.ln = ceil_log2(std::max<uint64_t>(n, 2));
    p.l_buf = 2 * p.ln;
    p.idx_w = p.ln - 2;
    p.payload_w = p.ln;
    p.chunk_bits = p.idx_w + p.payload_w;  // = l_buf - 2 < l_buf - 1
    p.B = 3 * p.ln;
    p.k_in = 3 * k + 2;
    p.t_in = 2 * t + 24 * k * p.ln;  // zero ops leak nothing at the junctions

    std::optional<uint64_t> inner;
    try {
        if (backend == SketchBackend::Levels)
            inner = levels_wire_bytes(make_levels_schedule(n, p.k_in, p.t_in));
        else
            inner = bdist_wire_bytes(make_stage_params(n, p.k_in, p.t_in));
    } catch (const InvalidArgument&) {
        // inflated budgets exceed what the backend supports at this length;
        // the armor then carries the masked message itself
    }
    uint64_t pass_bytes = ceil_div(n, 8);
    p.pass_through = !inner || *inner >= pass_bytes;
    p.payload_bytes = p.pass_through ? pass_bytes : *inner;
    p.sk_bits = (1 + 8 + 4 + p.payload_bytes) * 8;

    p.data_chunks = ceil_div(p.sk_bits, p.payload_w);
    p.chunk_rs_d = 2 * kChunkErrorFactor * (k + ceil_div(t, p.ln)) + 1;
    p.total_chunks = p.data_chunks + p.chunk_rs_d - 1;
    uint64_t index_cap = uint64_t{1} << p.idx_w;
    uint64_t field_cap = (uint64_t{1} << p.payload_w) - 1;
    if (p.total_chunks > std::min(index_cap, field_cap))
        throw InvalidArgument("codec: correction budget too large for this length");
    return p;
}

Bits codec_mask(const CodecParams& p, uint64_t seed) {
    GeneratorParams g1 = distinct_gen(p), g2 = buffer_gen(p);
    Bits s1 = stretch_seed(g1, 2 * seed), s2 = stretch_seed(g2, 2 * seed + 1);
    Bits a = prg_eval_window(g1, s1, 1, p.n);
    Bits b = prg_eval_window(g2, s2, 1, p.n);
    for (size_t i = 0; i < a.size(); ++i) a.set(i, a[i] ^ b[i]);
    return a;
}

uint64_t find_good_seed(const Bits& msg, const CodecParams& p) {
    if (msg.size() != p.n) throw InvalidArgument("codec: message length disagrees with n");
    Bits pattern = p.buffer_pattern();
    for (uint64_t seed = 0; seed < kSeedSearchCap; ++seed) {
        Bits cand = codec_mask(p, seed);
        for (size_t i = 0; i < cand.size(); ++i) cand.set(i, cand[i] ^ msg[i]);
        if (cand.find(pattern) == Bits::npos && is_b_distinct(cand, p.B)) return seed;
    }
    throw Error("codec: seed search exhausted");
}

MaskedMessage mask_message(const Bits& msg, const CodecParams& p) {
    MaskedMessage m;
    m.seed = find_good_seed(msg, p);
    m.msg_p = codec_mask(p, m.seed);
    for (size_t i = 0; i < m.msg_p.size(); ++i) m.msg_p.set(i, m.msg_p[i] ^ msg[i]);
    return m;
}

Bits sketch_bits(const Bits& msg_p, uint64_t seed, const CodecParams& p) {
    std::vector<uint8_t> payload;
    if (p.pass_through) {
        payload = msg_p.to_bytes();
    } else if (p.backend == SketchBackend::Levels) {
        payload = alice_sketch_levels(msg_p, p.k_in, p.t_in).serialize();
    } else {
        payload = alice_sketch_bdist(msg_p, p.k_in, p.t_in).serialize();
    }
    if (payload.size() != p.payload_bytes)
        throw Error("codec: sketch size drifted from the derived layout");
    ByteWriter w;
    w.u8(p.pass_through ? 0 : 1);
    w.u64(seed);
    w.u32(static_cast<uint32_t>(payload.size()));
    w.bytes(payload);
    Bits out = Bits::from_bytes(w.data());
    if (out.size() != p.sk_bits) throw Error("codec: sketch framing length mismatch");
    return out;
}

ScanResult scan_buffers(const Bits& c, const CodecParams& p) {
    ScanResult res;
    size_t m = c.size();
    std::vector<char> covered(m, 0);
    uint64_t zeros = 0;
    for (size_t i = 0; i < m; ++i) {
        if (c[i] == 0) {
            ++zeros;
            continue;
        }
        if (zeros >= p.l_buf - 1) {
            BufferHit hit;
            hit.end_pos = i;
            size_t take = std::min<size_t>(p.chunk_bits, m - i - 1);
            hit.chunk = c.slice(i + 1, take);
            for (size_t j = i - (p.l_buf - 1); j <= i + take; ++j) covered[j] = 1;
            res.hits.push_back(std::move(hit));
        }
        zeros = 0;
    }
    for (size_t i = 0; i < m; ++i)
        if (!covered[i]) res.message_part.push_back(c[i]);
    return res;
}

Bits armor_encode(const Bits& sk, const CodecParams& p) {
    if (sk.size() != p.sk_bits) throw InvalidArgument("codec: framed sketch length mismatch");
    Bits padded = sk;
    while (padded.size() < p.data_chunks * p.payload_w) padded.push_back(0);
    SymbolVector data{static_cast<unsigned>(p.payload_w), {}};
    for (uint64_t j = 0; j < p.data_chunks; ++j)
        data.symbols.push_back(padded.window64(j * p.payload_w, p.payload_w));
    SymbolVector parity = rs_parity(data, static_cast<unsigned>(p.chunk_rs_d));

    Bits out;
    Bits pattern = p.buffer_pattern();
    for (uint64_t j = 0; j < p.total_chunks; ++j) {
        uint64_t sym = j < p.data_chunks ? data.symbols[j] : parity.symbols[j - p.data_chunks];
        out.append(pattern);
        append_value(out, j, p.idx_w);
        append_value(out, sym, p.payload_w);
    }
    return out;
}

Bits armor_decode(const std::vector<BufferHit>& hits, const CodecParams& p, const Bits* true_sk,
                  ArmorStats* stats) {
    std::vector<std::optional<uint64_t>> slot(p.total_chunks);
    std::vector<char> contested(p.total_chunks, 0);
    ArmorStats local;
    local.buffers_found = hits.size();
    for (const BufferHit& h : hits) {
        if (h.chunk.size() < p.chunk_bits) {
            ++local.short_chunks;
            continue;
        }
        uint64_t idx = h.chunk.window64(0, p.idx_w);
        if (idx >= p.total_chunks) {
            ++local.spurious_index;
            continue;
        }
        uint64_t sym = h.chunk.window64(p.idx_w, p.payload_w);
        if (!slot[idx]) {
            slot[idx] = sym;
        } else if (*slot[idx] != sym) {
            contested[idx] = 1;
        }
    }

    SymbolVector received{static_cast<unsigned>(p.payload_w), {}};
    SymbolVector parity{static_cast<unsigned>(p.payload_w), {}};
    std::vector<size_t> erasures;
    for (uint64_t j = 0; j < p.total_chunks; ++j) {
        bool missing = !slot[j] || contested[j];
        uint64_t v = missing ? 0 : *slot[j];
        if (missing) erasures.push_back(j);
        if (contested[j]) ++local.chunk_conflicts;
        if (j < p.data_chunks)
            received.symbols.push_back(v);
        else
            parity.symbols.push_back(v);
    }
    local.chunk_erasures = erasures.size();

    if (true_sk) {
        Bits padded = *true_sk;
        while (padded.size() < p.data_chunks * p.payload_w) padded.push_back(0);
        SymbolVector td{static_cast<unsigned>(p.payload_w), {}};
        for (uint64_t j = 0; j < p.data_chunks; ++j)
            td.symbols.push_back(padded.window64(j * p.payload_w, p.payload_w));
        SymbolVector tp = rs_parity(td, static_cast<unsigned>(p.chunk_rs_d));
        for (uint64_t j = 0; j < p.total_chunks; ++j) {
            if (!slot[j] || contested[j]) continue;
            uint64_t truth = j < p.data_chunks ? td.symbols[j] : tp.symbols[j - p.data_chunks];
            if (*slot[j] != truth) ++local.chunk_errors;
        }
    }
    if (stats) *stats = local;

    SymbolVector fixed =
        rs_correct(received, parity, static_cast<unsigned>(p.chunk_rs_d), erasures);
    Bits out;
    for (uint64_t j = 0; j < p.data_chunks; ++j)
        append_value(out, fixed.symbols[j], p.payload_w);
    return out.slice(0, p.sk_bits);
}

Bits encode_ecc_with(const Bits& msg, const CodecParams& p) {
    MaskedMessage m = mask_message(msg, p);
    Bits sk = sketch_bits(m.msg_p, m.seed, p);
    return concat(m.msg_p, armor_encode(sk, p));
}

Bits encode_ecc(const Bits& msg, uint64_t k, uint64_t t, SketchBackend backend) {
    return encode_ecc_with(msg, make_codec_params(msg.size(), k, t, backend));
}

Bits decode_ecc_with(const Bits& c, const CodecParams& p, const Bits* true_sk,
                     ArmorStats* stats) {
    ScanResult scan = scan_buffers(c, p);
    Bits sk = armor_decode(scan.hits, p, true_sk, stats);

    std::vector<uint8_t> bytes = sk.to_bytes();
    ByteReader r(bytes);
    uint8_t mode = r.u8();
    if (mode != (p.pass_through ? 0 : 1))
        throw RecoveryError("codec: recovered sketch shape disagrees with the derived layout");
    uint64_t seed = r.u64();
    if (r.u32() != p.payload_bytes)
        throw RecoveryError("codec: recovered sketch shape disagrees with the derived layout");
    std::vector<uint8_t> payload(bytes.begin() + 13, bytes.begin() + 13 + long(p.payload_bytes));

    Bits msg_p;
    try {
        if (p.pass_through) {
            msg_p = Bits::from_bytes(payload).slice(0, p.n);
        } else if (p.backend == SketchBackend::Levels) {
            msg_p = bob_recover_levels(scan.message_part, LevelsSketch::deserialize(payload));
        } else {
            msg_p = bob_recover_bdist(scan.message_part, BdistSketch::deserialize(payload));
        }
    } catch (const FormatError& e) {
        throw RecoveryError(std::string("codec: recovered sketch is malformed: ") + e.what());
    }

    Bits mask = codec_mask(p, seed);
    for (size_t i = 0; i < msg_p.size(); ++i) msg_p.set(i, msg_p[i] ^ mask[i]);
    return msg_p;
}

Bits decode_ecc_instrumented(const Bits& c, uint64_t n, uint64_t k, uint64_t t,
                             SketchBackend backend, const Bits* true_sk, ArmorStats* stats) {
    return decode_ecc_with(c, make_codec_params(n, k, t, backend), true_sk, stats);
}

Bits decode_ecc(const Bits& c, uint64_t n, uint64_t k, uint64_t t, SketchBackend backend) {
    return decode_ecc_instrumented(c, n, k, t, backend, nullptr, nullptr);
}

std::vector<uint8_t> serialize_codeword(const Bits& c, uint64_t n, uint64_t k, uint64_t t,
                                        SketchBackend backend) {
    ByteWriter w;
    w.magic("BSC1");
    w.u64(n);
    w.u64(k);
    w.u64(t);
    w.u8(static_cast<uint8_t>(backend));
    w.bits(c);
    return w.take();
}

ParsedCodeword parse_codeword(const std::vector<uint8_t>& buf) {
    ByteReader r(buf);
    r.expect_magic("BSC1");
    ParsedCodeword out;
    out.n = r.u64();
    out.k = r.u64();
    out.t = r.u64();
    uint8_t backend = r.u8();
    if (backend != 1 && backend != 2) throw FormatError("codeword: unknown sketch backend");
    out.backend = static_cast<SketchBackend>(backend);
    out.bits = r.bits();
    if (!r.done()) throw FormatError("codeword: trailing bytes");
    return out;
}

}  // namespace bsync
