#include "bsync/docx_bdist.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "bsync/errors.hpp"
#include "bsync/partition.hpp"
#include "bsync/rs.hpp"
#include "bsync/serial.hpp"

namespace bsync {

namespace {

unsigned ceil_log2(uint64_t v) {
    unsigned r = 0;
    while ((1ull << r) < v) ++r;
    return r;
}

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

Bits pack_symbols(const std::vector<uint64_t>& syms, unsigned width) {
    Bits out;
    for (uint64_t s : syms)
        for (unsigned i = 0; i < width; ++i) out.push_back(static_cast<int>(s >> (width - 1 - i) & 1));
    return out;
}

std::vector<uint64_t> unpack_symbols(const Bits& bits, unsigned width, size_t count) {
    if (bits.size() != width * count) throw FormatError("sketch: symbol payload length mismatch");
    std::vector<uint64_t> out(count, 0);
    for (size_t j = 0; j < count; ++j)
        for (unsigned i = 0; i < width; ++i) out[j] = out[j] << 1 | bits[j * width + i];
    return out;
}

void put_field(SetElem& e, unsigned off, unsigned w, uint64_t v) {
    unsigned word = off / 64, sh = off % 64;
    e[word] |= v << sh;
    if (sh + w > 64) e[word + 1] |= v >> (64 - sh);
}

uint64_t get_field(const SetElem& e, unsigned off, unsigned w) {
    unsigned word = off / 64, sh = off % 64;
    uint64_t v = e[word] >> sh;
    if (sh + w > 64) v |= e[word + 1] << (64 - sh);
    return w == 64 ? v : v & ((1ull << w) - 1);
}

// Partition that accepts any symbol string.  Runs of equal symbols become
// single forced blocks, and a stretch whose inner levels still turn
// repetitive falls back to even threshold-sized cuts.  On a string with
// pairwise distinct symbols neither trigger fires, so both sides cut
// identical boundaries wherever their contents agree.
std::vector<uint64_t> partition_tolerant(uint64_t T, const SymbolString& s) {
    size_t n = s.symbols.size();
    std::vector<uint64_t> out{1};
    size_t i = 0;
    while (i < n) {
        if (i + 1 < n && s.symbols[i + 1] == s.symbols[i]) {
            size_t j = i;
            while (j + 1 < n && s.symbols[j + 1] == s.symbols[i]) ++j;
            out.push_back(j + 2);
            i = j + 1;
            continue;
        }
        size_t e = i;
        while (e + 1 < n && s.symbols[e + 1] != s.symbols[e]) ++e;
        SymbolString seg{s.sigma_bits,
                         std::vector<uint64_t>(s.symbols.begin() + long(i), s.symbols.begin() + long(e + 1))};
        try {
            PartitionBoundaries pb = partition(T, seg, nullptr);
            for (size_t j = 1; j < pb.indices.size(); ++j) out.push_back(i + pb.indices[j]);
        } catch (const InvalidArgument&) {
            uint64_t len = e + 1 - i;
            for (uint64_t c = T; c < len; c += T) out.push_back(i + 1 + c);
            out.push_back(i + 1 + len);
        }
        i = e + 1;
    }
    return out;
}

// Double partition of the window string: coarse threshold on the windows,
// fine threshold on the per-block start labels, boundaries combined.
std::vector<uint64_t> double_partition(const SymbolString& bar, const StageParams& p) {
    std::vector<uint64_t> pb1 = partition_tolerant(p.T, bar);
    SymbolString labels{bar.sigma_bits, {}};
    for (size_t j = 0; j + 1 < pb1.size(); ++j) labels.symbols.push_back(bar.symbols[pb1[j] - 1]);
    std::vector<uint64_t> pb2 = partition_tolerant(p.Tp, labels);
    std::vector<uint64_t> combined;
    for (uint64_t idx : pb2) combined.push_back(pb1[idx - 1]);
    return combined;
}

SymbolString window_string(const Bits& s, uint64_t B) {
    SymbolString bar{static_cast<unsigned>(B), {}};
    for (size_t i = 0; i + B <= s.size(); ++i) bar.symbols.push_back(s.window64(i, B));
    return bar;
}

uint64_t rs_span_limit(uint64_t m) {
    return m > 21 ? (1ull << 21) : (1ull << m) - 1;
}

}  // namespace

uint64_t StageParams::record_bits() const { return ceil_log2(n) + 2 * B; }

uint64_t StageParams::level_distance(size_t lv) const {
    return 20 * std::max<uint64_t>(k + ceil_div(t, b[lv]), 1);
}

uint64_t StageParams::final_distance() const {
    return 20 * std::max<uint64_t>(k + ceil_div(t, bL()), 1);
}

StageParams make_stage_params(uint64_t n, uint64_t k, uint64_t t) {
    if (n < 2) throw InvalidArgument("parameters: string too short");
    if (n > kBdistMaxLength)
        throw InvalidArgument("parameters: length above the supported limit for this variant");
    StageParams p;
    p.n = n;
    p.k = k;
    p.t = t;
    uint64_t ln = ceil_log2(n);
    p.B = p.T = 3 * ln;
    if (p.B > n) throw InvalidArgument("parameters: string shorter than the distinctness window");
    p.Tp = ceil_log2(p.T);
    uint64_t llg = ceil_log2(ln);
    uint64_t lllg = std::max<uint64_t>(ceil_log2(std::max<uint64_t>(llg, 1)), 1);
    p.Tpp = p.T * p.Tp * llg * llg * lllg;
    p.D = std::max<uint64_t>(8 * (k * lllg + ceil_div(t, p.T * p.Tp)), 1);
    uint64_t bl = 1;
    while (bl < 2 * ln) bl <<= 1;
    uint64_t top = bl;
    while (top < p.Tpp) top <<= 1;
    for (uint64_t w = top; w >= bl; w >>= 1) p.b.push_back(w);
    for (size_t lv = 0; lv < p.b.size(); ++lv)
        if (p.blocks_at(p.b[lv]) + p.level_distance(lv) - 1 > rs_span_limit(p.B))
            throw InvalidArgument("parameters: correction budget too large for this length");
    if (p.blocks_at(bl) + p.final_distance() - 1 > rs_span_limit(bl))
        throw InvalidArgument("parameters: correction budget too large for this length");
    return p;
}

bool is_b_distinct(const Bits& x, uint64_t B) {
    if (B == 0) throw InvalidArgument("window length must be positive");
    if (B > x.size()) throw InvalidArgument("window longer than the string");
    size_t count = x.size() - B + 1;
    if (B <= 64) {
        std::vector<uint64_t> w(count);
        for (size_t i = 0; i < count; ++i) w[i] = x.window64(i, B);
        std::sort(w.begin(), w.end());
        return std::adjacent_find(w.begin(), w.end()) == w.end();
    }
    // wide windows: order index lists by 64-bit chunks, no fingerprinting
    std::vector<uint32_t> idx(count);
    for (size_t i = 0; i < count; ++i) idx[i] = static_cast<uint32_t>(i);
    auto cmp3 = [&](uint32_t a, uint32_t b) {
        for (uint64_t off = 0; off < B; off += 64) {
            uint64_t w = std::min<uint64_t>(64, B - off);
            uint64_t va = x.window64(a + off, w), vb = x.window64(b + off, w);
            if (va != vb) return va < vb ? -1 : 1;
        }
        return 0;
    };
    std::sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) { return cmp3(a, b) < 0; });
    for (size_t i = 1; i < count; ++i)
        if (cmp3(idx[i - 1], idx[i]) == 0) return false;
    return true;
}

SetElem PrefixRecord::pack(const StageParams& p) const {
    unsigned m = static_cast<unsigned>(p.record_bits());
    SetElem e((m + 63) / 64, 0);
    unsigned bw = static_cast<unsigned>(p.B);
    put_field(e, 0, bw, prefix_next);
    put_field(e, bw, bw, prefix);
    put_field(e, 2 * bw, ceil_log2(p.n), len);
    return e;
}

PrefixRecord PrefixRecord::unpack(const StageParams& p, const SetElem& e) {
    unsigned bw = static_cast<unsigned>(p.B);
    PrefixRecord r;
    r.prefix_next = get_field(e, 0, bw);
    r.prefix = get_field(e, bw, bw);
    r.len = get_field(e, 2 * bw, ceil_log2(p.n));
    return r;
}

std::vector<PrefixRecord> block_records(const Bits& s, const StageParams& p) {
    if (s.size() < p.B) return {};
    SymbolString bar = window_string(s, p.B);
    std::vector<uint64_t> comb = double_partition(bar, p);
    std::vector<PrefixRecord> out;
    for (size_t b = 1; b + 1 < comb.size(); ++b)
        out.push_back({comb[b] - comb[b - 1], bar.symbols[comb[b - 1] - 1], bar.symbols[comb[b] - 1]});
    return out;
}

BlockChain chain_block_starts(const std::vector<PrefixRecord>& V, uint64_t n, uint64_t B) {
    BlockChain c;
    if (V.empty()) {
        c.starts = {1};
        return c;
    }
    std::unordered_map<uint64_t, size_t> by_prefix;
    std::unordered_set<uint64_t> nexts;
    for (size_t i = 0; i < V.size(); ++i) {
        if (!by_prefix.emplace(V[i].prefix, i).second)
            throw RecoveryError("block chain: duplicate window prefix");
        if (V[i].len == 0) throw RecoveryError("block chain: zero length block");
        nexts.insert(V[i].prefix_next);
    }
    size_t start = V.size();
    for (size_t i = 0; i < V.size(); ++i) {
        if (nexts.count(V[i].prefix)) continue;
        if (start != V.size()) throw RecoveryError("block chain: ambiguous starting block");
        start = i;
    }
    if (start == V.size()) throw RecoveryError("block chain: no starting block");
    std::vector<char> used(V.size(), 0);
    size_t cur = start;
    uint64_t pos = 1;
    for (size_t step = 0; step < V.size(); ++step) {
        used[cur] = 1;
        c.starts.push_back(pos);
        c.prefixes.push_back(V[cur].prefix);
        pos += V[cur].len;
        if (step + 1 == V.size()) {
            c.starts.push_back(pos);
            c.prefixes.push_back(V[cur].prefix_next);
            break;
        }
        auto it = by_prefix.find(V[cur].prefix_next);
        if (it == by_prefix.end()) throw RecoveryError("block chain: broken link");
        if (used[it->second]) throw RecoveryError("block chain: loop");
        cur = it->second;
    }
    if (c.starts.back() + B - 1 > n) throw RecoveryError("block chain: overflows the string");
    return c;
}

SetSketch coarse_sketch(const Bits& x, const StageParams& p) {
    if (x.size() != p.n) throw InvalidArgument("sketch: string length disagrees with the parameters");
    std::vector<PrefixRecord> V = block_records(x, p);
    std::vector<SetElem> elems;
    for (const PrefixRecord& r : V) elems.push_back(r.pack(p));
    std::set<SetElem> uniq(elems.begin(), elems.end());
    if (uniq.size() != elems.size())
        throw InvalidArgument("sketch: block records repeat; the input windows are not distinct");
    return set_recon_sketch(elems, static_cast<unsigned>(p.record_bits()), p.D);
}

CoarseResult coarse_recover(const Bits& y, const SetSketch& zv, const StageParams& p,
                            const Bits* truth, CoarseStats* stats) {
    if (zv.m != p.record_bits() || zv.D != p.D)
        throw InvalidArgument("sketch: reconciliation shape disagrees with the parameters");
    // y's own block map
    std::vector<uint64_t> ycomb;
    SymbolString ybar{static_cast<unsigned>(p.B), {}};
    if (y.size() >= p.B) {
        ybar = window_string(y, p.B);
        ycomb = double_partition(ybar, p);
    }
    std::vector<PrefixRecord> Vp;
    for (size_t b = 1; b + 1 < ycomb.size(); ++b)
        Vp.push_back({ycomb[b] - ycomb[b - 1], ybar.symbols[ycomb[b - 1] - 1], ybar.symbols[ycomb[b] - 1]});
    std::set<SetElem> vp_set;
    for (const PrefixRecord& r : Vp) vp_set.insert(r.pack(p));
    std::vector<SetElem> vp_elems(vp_set.begin(), vp_set.end());

    std::vector<SetElem> v_elems = set_recon_recover(zv, vp_elems);
    std::vector<PrefixRecord> V;
    for (const SetElem& e : v_elems) V.push_back(PrefixRecord::unpack(p, e));
    if (stats) {
        stats->records_mine = vp_elems.size();
        stats->records_theirs = v_elems.size();
        std::set<SetElem> v_set(v_elems.begin(), v_elems.end());
        uint64_t diff = 0;
        for (const SetElem& e : v_set) diff += !vp_set.count(e);
        for (const SetElem& e : vp_set) diff += !v_set.count(e);
        stats->set_diff = diff;
    }

    BlockChain chain = chain_block_starts(V, p.n, p.B);
    CoarseResult res{Bits(p.n, 0), Bits(p.n, 0)};
    size_t nblocks = chain.starts.size();
    for (size_t b = 0; b < chain.prefixes.size(); ++b) {
        size_t s0 = chain.starts[b] - 1;
        for (uint64_t o = 0; o < p.B; ++o) {
            res.xt.set(s0 + o, static_cast<int>(chain.prefixes[b] >> (p.B - 1 - o) & 1));
            res.known.set(s0 + o, 1);
        }
    }

    // unique same-length same-prefix blocks of y fill whole blocks
    std::map<std::pair<uint64_t, uint64_t>, std::pair<uint64_t, size_t>> ymap;  // -> count, start
    for (size_t j = 0; j + 1 < ycomb.size(); ++j) {
        uint64_t ystart = ycomb[j];
        uint64_t ylen = (j + 2 == ycomb.size() ? y.size() + 1 : ycomb[j + 1]) - ystart;
        auto [it, fresh] = ymap.try_emplace({ylen, ybar.symbols[ystart - 1]}, 0, ystart - 1);
        ++it->second.first;
        (void)fresh;
    }
    uint64_t matched = 0;
    for (size_t b = 0; b < chain.prefixes.size(); ++b) {
        uint64_t len = (b + 1 < nblocks ? chain.starts[b + 1] : p.n + 1) - chain.starts[b];
        auto it = ymap.find({len, chain.prefixes[b]});
        if (it == ymap.end() || it->second.first != 1) continue;
        size_t s0 = chain.starts[b] - 1, y0 = it->second.second;
        for (uint64_t o = 0; o < len; ++o) {
            res.xt.set(s0 + o, y[y0 + o]);
            res.known.set(s0 + o, 1);
        }
        ++matched;
    }

    if (stats) {
        stats->matched_blocks = matched;
        stats->total_blocks = p.blocks_at(p.Tpp);
        stats->bad_blocks = 0;
        for (uint64_t j = 0; j < stats->total_blocks; ++j) {
            uint64_t lo = j * p.Tpp, hi = std::min(p.n, lo + p.Tpp);
            bool bad = false;
            for (uint64_t i = lo; i < hi && !bad; ++i)
                bad = !res.known[i] || (truth && res.xt[i] != (*truth)[i]);
            stats->bad_blocks += bad;
        }
    }
    return res;
}

RefineParities refine_parities(const Bits& x, const StageParams& p) {
    if (x.size() != p.n) throw InvalidArgument("sketch: string length disagrees with the parameters");
    RefineParities out;
    for (size_t lv = 0; lv < p.levels(); ++lv) {
        uint64_t bw = p.b[lv], l = p.blocks_at(bw);
        std::vector<uint64_t> syms(l);
        for (uint64_t j = 0; j < l; ++j) {
            uint64_t blen = std::min(bw, p.n - j * bw);
            syms[j] = x.window64(j * bw, std::min(p.B, blen));
        }
        SymbolVector data{static_cast<unsigned>(p.B), std::move(syms)};
        out.z.push_back(rs_parity(data, static_cast<unsigned>(p.level_distance(lv))).symbols);
    }
    uint64_t bl = p.bL(), l = p.blocks_at(bl);
    std::vector<uint64_t> blocks(l);
    for (uint64_t j = 0; j < l; ++j) blocks[j] = x.window64(j * bl, std::min(bl, p.n - j * bl));
    SymbolVector data{static_cast<unsigned>(bl), std::move(blocks)};
    out.z_final = rs_parity(data, static_cast<unsigned>(p.final_distance())).symbols;
    return out;
}

Bits refine_recover(CoarseResult state, const Bits& y, const RefineParities& zs,
                    const StageParams& p, const Bits* truth, RefineStats* stats) {
    if (zs.z.size() != p.levels()) throw InvalidArgument("sketch: level count disagrees");
    Bits& xt = state.xt;
    Bits& known = state.known;
    size_t m = y.size();

    auto block_state = [&](uint64_t start, uint64_t blen, bool& any_unknown, bool& differs) {
        any_unknown = false;
        differs = false;
        for (uint64_t o = 0; o < blen; ++o) {
            if (!known[start + o]) any_unknown = true;
            if (truth && xt[start + o] != (*truth)[start + o]) differs = true;
        }
    };

    for (size_t lv = 0; lv < p.levels(); ++lv) {
        uint64_t bw = p.b[lv], l = p.blocks_at(bw);
        uint64_t hw_full = std::min(p.B, bw);
        std::vector<uint64_t> syms(l, 0);
        std::vector<size_t> erasures;
        uint64_t unfilled = 0, wrong = 0;
        for (uint64_t j = 0; j < l; ++j) {
            uint64_t start = j * bw, blen = std::min(bw, p.n - start);
            uint64_t hw = std::min(p.B, blen);
            bool hash_known = true;
            for (uint64_t o = 0; o < hw && hash_known; ++o) hash_known = known[start + o];
            if (hash_known)
                syms[j] = xt.window64(start, hw);
            else
                erasures.push_back(j);
            if (stats) {
                bool any_unknown, differs;
                block_state(start, blen, any_unknown, differs);
                unfilled += any_unknown;
                wrong += !any_unknown && differs;
            }
        }
        if (stats) {
            stats->unfilled.push_back(unfilled);
            stats->wrong.push_back(wrong);
        }
        SymbolVector received{static_cast<unsigned>(p.B), std::move(syms)};
        SymbolVector parity{static_cast<unsigned>(p.B), zs.z[lv]};
        std::vector<uint64_t> v =
            rs_correct(received, parity, static_cast<unsigned>(p.level_distance(lv)), erasures).symbols;

        // greedy matching: for each block in order, the leftmost unused y
        // window with the right prefix
        std::unordered_map<uint64_t, std::vector<uint32_t>> starts_of;
        if (m >= hw_full)
            for (uint64_t p0 = 0; p0 + hw_full <= m; ++p0)
                starts_of[y.window64(p0, hw_full)].push_back(static_cast<uint32_t>(p0));
        std::vector<char> used(m, 0);
        auto window_free = [&](uint64_t p0, uint64_t blen) {
            if (p0 + blen > m) return false;
            for (uint64_t o = 0; o < blen; ++o)
                if (used[p0 + o]) return false;
            return true;
        };
        for (uint64_t j = 0; j < l; ++j) {
            uint64_t start = j * bw, blen = std::min(bw, p.n - start);
            uint64_t hw = std::min(p.B, blen);
            uint64_t found = m;
            if (hw == hw_full) {
                auto it = starts_of.find(v[j]);
                if (it != starts_of.end())
                    for (uint32_t p0 : it->second)
                        if (window_free(p0, blen)) {
                            found = p0;
                            break;
                        }
            } else {
                for (uint64_t p0 = 0; p0 + hw <= m; ++p0)
                    if (y.window64(p0, hw) == v[j] && window_free(p0, blen)) {
                        found = p0;
                        break;
                    }
            }
            if (found == m) continue;
            for (uint64_t o = 0; o < blen; ++o) {
                xt.set(start + o, y[found + o]);
                known.set(start + o, 1);
                used[found + o] = 1;
            }
        }
    }

    uint64_t bl = p.bL(), l = p.blocks_at(bl);
    std::vector<uint64_t> blocks(l, 0);
    std::vector<size_t> erasures;
    for (uint64_t j = 0; j < l; ++j) {
        uint64_t start = j * bl, blen = std::min(bl, p.n - start);
        bool any_unknown, differs;
        block_state(start, blen, any_unknown, differs);
        if (any_unknown)
            erasures.push_back(j);
        else
            blocks[j] = xt.window64(start, blen);
        if (stats) {
            stats->final_unfilled += any_unknown;
            stats->final_wrong += !any_unknown && differs;
        }
    }
    SymbolVector received{static_cast<unsigned>(bl), std::move(blocks)};
    SymbolVector parity{static_cast<unsigned>(bl), zs.z_final};
    std::vector<uint64_t> fixed =
        rs_correct(received, parity, static_cast<unsigned>(p.final_distance()), erasures).symbols;
    for (uint64_t j = 0; j < l; ++j) {
        uint64_t start = j * bl, blen = std::min(bl, p.n - start);
        for (uint64_t o = 0; o < blen; ++o)
            xt.set(start + o, static_cast<int>(fixed[j] >> (blen - 1 - o) & 1));
    }
    return xt;
}

BdistSketch alice_sketch_bdist(const Bits& x, uint64_t k, uint64_t t) {
    StageParams p = make_stage_params(x.size(), k, t);
    if (!is_b_distinct(x, p.B))
        throw InvalidArgument("sketch: the input repeats a window of the distinctness length");
    BdistSketch sk;
    sk.params = p;
    sk.anchors = coarse_sketch(x, p);
    sk.refine = refine_parities(x, p);
    return sk;
}

Bits bob_recover_bdist(const Bits& y, const BdistSketch& sk) {
    return bob_recover_bdist_instrumented(y, sk, nullptr, nullptr, nullptr);
}

Bits bob_recover_bdist_instrumented(const Bits& y, const BdistSketch& sk, const Bits* truth,
                                    CoarseStats* cstats, RefineStats* rstats) {
    CoarseResult state = coarse_recover(y, sk.anchors, sk.params, truth, cstats);
    return refine_recover(std::move(state), y, sk.refine, sk.params, truth, rstats);
}

size_t BdistSketch::bit_size() const {
    size_t bits = 3 * 64 + 8;  // n, k, t, variant tag
    bits += anchors.payload_bits() + 64;
    for (const std::vector<uint64_t>& zl : refine.z) bits += zl.size() * params.B + 64;
    bits += refine.z_final.size() * params.bL() + 64;
    return bits;
}

std::vector<uint8_t> BdistSketch::serialize() const {
    ByteWriter w;
    w.magic("BSX1");
    w.u8(2);
    w.u64(params.n);
    w.u64(params.k);
    w.u64(params.t);
    anchors.write(w);
    for (size_t lv = 0; lv < refine.z.size(); ++lv) {
        w.u64(refine.z[lv].size());
        w.bits(pack_symbols(refine.z[lv], static_cast<unsigned>(params.B)));
    }
    w.u64(refine.z_final.size());
    w.bits(pack_symbols(refine.z_final, static_cast<unsigned>(params.bL())));
    return w.take();
}

BdistSketch BdistSketch::deserialize(const std::vector<uint8_t>& buf) {
    ByteReader r(buf);
    r.expect_magic("BSX1");
    if (r.u8() != 2) throw FormatError("sketch: unknown variant");
    uint64_t n = r.u64(), k = r.u64(), t = r.u64();
    BdistSketch sk;
    sk.params = make_stage_params(n, k, t);
    sk.anchors = SetSketch::read(r);
    if (sk.anchors.m != sk.params.record_bits() || sk.anchors.D != sk.params.D)
        throw FormatError("sketch: reconciliation shape disagrees with the derived parameters");
    for (size_t lv = 0; lv < sk.params.levels(); ++lv) {
        uint64_t count = r.u64();
        if (count != sk.params.level_distance(lv) - 1)
            throw FormatError("sketch: level parity count disagrees with the schedule");
        sk.refine.z.push_back(unpack_symbols(r.bits(), static_cast<unsigned>(sk.params.B), count));
    }
    uint64_t fcount = r.u64();
    if (fcount != sk.params.final_distance() - 1)
        throw FormatError("sketch: final parity count disagrees with the schedule");
    sk.refine.z_final =
        unpack_symbols(r.bits(), static_cast<unsigned>(sk.params.bL()), fcount);
    if (!r.done()) throw FormatError("sketch: trailing bytes");
    return sk;
}

}  // namespace bsync
