#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bsync/docx_bdist.hpp"

#include <algorithm>
#include <random>

#include "bsync/block_edit.hpp"
#include "bsync/errors.hpp"

using namespace bsync;

namespace {

Bits random_bits(size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    Bits x;
    for (size_t i = 0; i < n; ++i) x.push_back(static_cast<int>(rng() & 1));
    return x;
}

// random strings at these lengths are window-distinct almost surely; retry
// the rare collision
Bits random_distinct_bits(size_t n, uint64_t B, uint64_t seed) {
    for (uint64_t s = seed;; ++s) {
        Bits x = random_bits(n, s * 77 + 1);
        if (is_b_distinct(x, B)) return x;
    }
}

bool windows_distinct_brute(const Bits& x, uint64_t B) {
    for (size_t i = 0; i + B <= x.size(); ++i)
        for (size_t j = i + 1; j + B <= x.size(); ++j) {
            bool same = true;
            for (size_t o = 0; o < B && same; ++o) same = x[i + o] == x[j + o];
            if (same) return false;
        }
    return true;
}

}  // namespace

TEST_CASE("parameter shapes are stable over the calibration grid") {
    struct Row {
        uint64_t n, B, Tp, Tpp, D, levels, b0, bL, mV;
    };
    for (Row r : {Row{16, 12, 4, 192, 24, 6, 256, 8, 28},
                  Row{8192, 39, 6, 7488, 40, 9, 8192, 32, 91},
                  Row{16384, 42, 6, 8064, 40, 9, 8192, 32, 98},
                  Row{65536, 48, 6, 9216, 40, 10, 16384, 32, 112}}) {
        StageParams p = make_stage_params(r.n, 2, 16);
        CHECK(p.B == r.B);
        CHECK(p.T == r.B);
        CHECK(p.Tp == r.Tp);
        CHECK(p.Tpp == r.Tpp);
        CHECK(p.D == r.D);
        CHECK(p.levels() == r.levels);
        CHECK(p.b.front() == r.b0);
        CHECK(p.bL() == r.bL);
        CHECK(p.record_bits() == r.mV);
    }
}

TEST_CASE("parameter invariants hold across the range") {
    for (uint64_t n : {16ull, 100ull, 4096ull, 65536ull, 1048576ull}) {
        for (uint64_t k : {0ull, 1ull, 4ull}) {
            StageParams p = make_stage_params(n, k, 8 * k);
            CHECK(p.Tpp >= p.B);
            CHECK(p.D >= 1);
            CHECK(p.b.front() >= p.Tpp);
            if (p.levels() > 1) CHECK(p.b[1] < p.Tpp);
            for (size_t lv = 1; lv < p.levels(); ++lv) CHECK(p.b[lv] == p.b[lv - 1] / 2);
            uint64_t ln = 0;
            while ((1ull << ln) < n) ++ln;
            uint64_t bl = 1;
            while (bl < 2 * ln) bl <<= 1;
            CHECK(p.bL() == bl);
            CHECK(p.level_distance(0) >= 20);
            CHECK(p.final_distance() >= 20);
        }
    }
    CHECK_THROWS_WITH_AS(make_stage_params(8, 1, 0), doctest::Contains("shorter"),
                         InvalidArgument);
    CHECK_THROWS_WITH_AS(make_stage_params(kBdistMaxLength + 1, 1, 0),
                         doctest::Contains("supported limit"), InvalidArgument);
    CHECK_THROWS_WITH_AS(make_stage_params(16, 1000, 0), doctest::Contains("budget"),
                         InvalidArgument);
}

TEST_CASE("window distinctness is decided exactly") {
    CHECK_FALSE(is_b_distinct(Bits(64, 0), 8));
    CHECK(is_b_distinct(random_bits(32, 5), 32));
    CHECK_THROWS_WITH_AS(is_b_distinct(random_bits(8, 1), 0), doctest::Contains("positive"),
                         InvalidArgument);
    CHECK_THROWS_WITH_AS(is_b_distinct(random_bits(8, 1), 9), doctest::Contains("longer"),
                         InvalidArgument);

    // against the quadratic scan, both verdicts exercised
    int distinct_seen = 0, repeat_seen = 0;
    for (uint64_t seed = 1; seed <= 40; ++seed) {
        Bits x = random_bits(64, seed);
        for (uint64_t B : {6ull, 8ull, 12ull}) {
            bool got = is_b_distinct(x, B);
            CHECK(got == windows_distinct_brute(x, B));
            (got ? distinct_seen : repeat_seen)++;
        }
    }
    CHECK(distinct_seen > 0);
    CHECK(repeat_seen > 0);

    // windows wider than a machine word
    Bits wide = random_bits(300, 99);
    CHECK(is_b_distinct(wide, 70) == windows_distinct_brute(wide, 70));
    Bits copied = wide;
    for (size_t o = 0; o < 70; ++o) copied.set(200 + o, copied[40 + o]);
    CHECK_FALSE(is_b_distinct(copied, 70));
    CHECK(is_b_distinct(copied, 70) == windows_distinct_brute(copied, 70));
}

TEST_CASE("block records chain back into the block map") {
    uint64_t n = 8192;
    StageParams p = make_stage_params(n, 2, 16);
    Bits x = random_distinct_bits(n, p.B, 11);
    std::vector<PrefixRecord> V = block_records(x, p);
    REQUIRE(V.size() >= 2);

    std::vector<uint64_t> starts{1};
    for (const PrefixRecord& r : V) starts.push_back(starts.back() + r.len);

    std::vector<PrefixRecord> shuffled = V;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(3));
    BlockChain c = chain_block_starts(shuffled, n, p.B);
    CHECK(c.starts == starts);
    REQUIRE(c.prefixes.size() == starts.size());
    for (size_t b = 0; b < V.size(); ++b) CHECK(c.prefixes[b] == V[b].prefix);
    CHECK(c.prefixes.back() == V.back().prefix_next);

    // records survive packing
    for (const PrefixRecord& r : V) CHECK(PrefixRecord::unpack(p, r.pack(p)) == r);

    BlockChain trivial = chain_block_starts({}, n, p.B);
    CHECK(trivial.starts == std::vector<uint64_t>{1});
    CHECK(trivial.prefixes.empty());
}

TEST_CASE("degenerate record sets are rejected loudly") {
    uint64_t n = 100, B = 12;
    CHECK_THROWS_WITH_AS(chain_block_starts({{5, 1, 2}, {5, 1, 3}}, n, B),
                         doctest::Contains("duplicate"), RecoveryError);
    CHECK_THROWS_WITH_AS(chain_block_starts({{5, 1, 2}, {5, 3, 4}}, n, B),
                         doctest::Contains("ambiguous"), RecoveryError);
    CHECK_THROWS_WITH_AS(chain_block_starts({{5, 1, 2}, {5, 2, 1}}, n, B),
                         doctest::Contains("no starting"), RecoveryError);
    CHECK_THROWS_WITH_AS(
        chain_block_starts({{5, 1, 7}, {5, 2, 3}, {5, 3, 2}}, n, B),
        doctest::Contains("broken"), RecoveryError);
    CHECK_THROWS_WITH_AS(
        chain_block_starts(
            {{5, 4, 2}, {5, 2, 3}, {5, 3, 2}, {5, 7, 8}, {5, 8, 7}}, n, B),
        doctest::Contains("loop"), RecoveryError);
    CHECK_THROWS_WITH_AS(chain_block_starts({{0, 1, 2}}, n, B),
                         doctest::Contains("zero length"), RecoveryError);
    CHECK_THROWS_WITH_AS(chain_block_starts({{99, 1, 2}}, n, B),
                         doctest::Contains("overflows"), RecoveryError);
}

TEST_CASE("block records tolerate repetitive receiver input") {
    uint64_t n = 4096;
    StageParams p = make_stage_params(n, 2, 16);
    Bits y = random_bits(n, 17);
    for (size_t i = 500; i < 900; ++i) y.set(i, 0);        // long constant run
    for (size_t i = 2000; i < 2400; ++i) y.set(i, i & 1);  // long periodic run
    std::vector<PrefixRecord> Vp = block_records(y, p);
    CHECK(!Vp.empty());
    uint64_t covered = 1;
    for (const PrefixRecord& r : Vp) {
        CHECK(r.len >= 1);
        covered += r.len;
    }
    CHECK(covered <= n);
}

TEST_CASE("identity input fills every block at the coarse stage") {
    uint64_t n = 8192;
    StageParams p = make_stage_params(n, 2, 16);
    Bits x = random_distinct_bits(n, p.B, 21);
    BdistSketch sk = alice_sketch_bdist(x, 2, 16);
    CoarseStats cs;
    RefineStats rs;
    Bits out = bob_recover_bdist_instrumented(x, sk, &x, &cs, &rs);
    CHECK(out == x);
    CHECK(cs.set_diff == 0);
    CHECK(cs.bad_blocks == 0);
    CHECK(cs.matched_blocks == cs.records_mine + 1);
    for (size_t lv = 0; lv < p.levels(); ++lv) {
        CHECK(rs.unfilled[lv] == 0);
        CHECK(rs.wrong[lv] == 0);
    }
    CHECK(rs.final_unfilled == 0);
    CHECK(rs.final_wrong == 0);
}

TEST_CASE("the coarse stage stays inside the reconciliation budget") {
    uint64_t n = 16384;
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 15; ++trial) {
        uint64_t k = 1 + rng() % 4, t = rng() % 129;
        StageParams p = make_stage_params(n, k, t);
        Bits x = random_distinct_bits(n, p.B, 1000 + trial);
        Bits y = apply_trace(x, sample_trace(5000 + trial, n, k, t));
        SetSketch zv = coarse_sketch(x, p);
        CoarseStats cs;
        coarse_recover(y, zv, p, &x, &cs);
        CHECK(cs.set_diff <= p.D);
        CHECK(double(cs.bad_blocks) <= 4.0 * (double(k) + double(t) / double(p.Tpp)));
    }
}

TEST_CASE("round trip under block edits") {
    struct Cell {
        uint64_t n, k, t;
        int trials;
    };
    for (Cell c : {Cell{8192, 4, 64, 8}, Cell{16384, 2, 32, 4}, Cell{16384, 8, 200, 3}}) {
        StageParams p = make_stage_params(c.n, c.k, c.t);
        for (int trial = 0; trial < c.trials; ++trial) {
            Bits x = random_distinct_bits(c.n, p.B, c.n * 31 + trial);
            Bits y = apply_trace(x, sample_trace(c.n * 13 + trial, c.n, c.k, c.t));
            BdistSketch sk = alice_sketch_bdist(x, c.k, c.t);
            Bits out = bob_recover_bdist(y, sk);
            CHECK(out == x);
        }
    }
}

TEST_CASE("tiny strings round trip") {
    uint64_t n = 16;
    StageParams p = make_stage_params(n, 1, 2);
    Bits x = random_distinct_bits(n, p.B, 5);
    BdistSketch sk = alice_sketch_bdist(x, 1, 2);
    CHECK(bob_recover_bdist(x, sk) == x);
    Bits y = apply_op(x, BlockEditOp::remove(7, 2));
    CHECK(bob_recover_bdist(y, sk) == x);
}

TEST_CASE("a long string round trips once") {
    uint64_t n = 65536;
    StageParams p = make_stage_params(n, 4, 64);
    Bits x = random_distinct_bits(n, p.B, 3);
    Bits y = apply_trace(x, sample_trace(77, n, 4, 64));
    BdistSketch sk = alice_sketch_bdist(x, 4, 64);
    CHECK(bob_recover_bdist(y, sk) == x);
}

TEST_CASE("per-level repair stays inside the accounting bounds") {
    uint64_t n = 8192;
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 8; ++trial) {
        uint64_t k = 1 + rng() % 4, t = rng() % 129;
        StageParams p = make_stage_params(n, k, t);
        Bits x = random_distinct_bits(n, p.B, 2000 + trial);
        Bits y = apply_trace(x, sample_trace(7000 + trial, n, k, t));
        BdistSketch sk = alice_sketch_bdist(x, k, t);
        CoarseStats cs;
        RefineStats rs;
        Bits out = bob_recover_bdist_instrumented(y, sk, &x, &cs, &rs);
        CHECK(out == x);
        REQUIRE(rs.unfilled.size() == p.levels());
        for (size_t lv = 0; lv < p.levels(); ++lv) {
            uint64_t budget = k + (t + p.b[lv] - 1) / p.b[lv];
            CHECK(rs.unfilled[lv] + 2 * rs.wrong[lv] <= 12 * budget);
            CHECK(rs.unfilled[lv] + 2 * rs.wrong[lv] < p.level_distance(lv));
        }
        CHECK(rs.final_unfilled + 2 * rs.final_wrong < p.final_distance());
    }
}

TEST_CASE("moving a long prefix to the end costs one transposition") {
    uint64_t n = 16384;
    StageParams p = make_stage_params(n, 1, 0);
    Bits x = random_distinct_bits(n, p.B, 31);
    Bits y = apply_op(x, BlockEditOp::transpose(1, 2 * n / 5, n));
    BdistSketch sk = alice_sketch_bdist(x, 1, 0);
    CHECK(bob_recover_bdist(y, sk) == x);
}

TEST_CASE("sketch size tracks the target shape") {
    for (uint64_t n : {4096ull, 16384ull, 65536ull}) {
        StageParams p = make_stage_params(n, 4, 64);
        Bits x = random_distinct_bits(n, p.B, n);
        BdistSketch sk = alice_sketch_bdist(x, 4, 64);
        uint64_t ln = 0;
        while ((1ull << ln) < n) ++ln;
        uint64_t llg = 0;
        while ((1ull << llg) < ln) ++llg;
        uint64_t lllg = 0;
        while ((1ull << lllg) < llg) ++lllg;
        double target = 4.0 * double(ln) * double(std::max<uint64_t>(lllg, 1)) + 64.0;
        CHECK(double(sk.bit_size()) <= 400.0 * target);
    }
}

TEST_CASE("recovery fails loudly on unrelated input") {
    uint64_t n = 4096;
    StageParams p = make_stage_params(n, 2, 16);
    Bits x = random_distinct_bits(n, p.B, 71);
    BdistSketch sk = alice_sketch_bdist(x, 2, 16);
    CHECK_THROWS_AS(bob_recover_bdist(random_distinct_bits(n, p.B, 72), sk), RecoveryError);
    CHECK_THROWS_AS(bob_recover_bdist(Bits(16, 0), sk), RecoveryError);
}

TEST_CASE("sketching is deterministic") {
    uint64_t n = 8192;
    Bits x = random_distinct_bits(n, make_stage_params(n, 2, 16).B, 81);
    CHECK(alice_sketch_bdist(x, 2, 16).serialize() == alice_sketch_bdist(x, 2, 16).serialize());
}

TEST_CASE("the two stages compose exactly like the bundled entry point") {
    uint64_t n = 8192;
    StageParams p = make_stage_params(n, 2, 16);
    Bits x = random_distinct_bits(n, p.B, 91);
    Bits y = apply_trace(x, sample_trace(92, n, 2, 16));
    BdistSketch sk = alice_sketch_bdist(x, 2, 16);
    CHECK(sk.anchors == coarse_sketch(x, p));
    CHECK(sk.refine == refine_parities(x, p));
    CoarseResult state = coarse_recover(y, sk.anchors, p);
    Bits manual = refine_recover(std::move(state), y, sk.refine, p);
    CHECK(manual == bob_recover_bdist(y, sk));
    CHECK(manual == x);
}

TEST_CASE("serialization round trips and rejects damage") {
    uint64_t n = 8192;
    Bits x = random_distinct_bits(n, make_stage_params(n, 2, 16).B, 61);
    BdistSketch sk = alice_sketch_bdist(x, 2, 16);
    std::vector<uint8_t> wire = sk.serialize();
    BdistSketch back = BdistSketch::deserialize(wire);
    CHECK(back == sk);
    CHECK(back.serialize() == wire);

    Bits y = apply_trace(x, sample_trace(62, n, 2, 16));
    CHECK(bob_recover_bdist(y, back) == x);

    std::vector<uint8_t> cut(wire.begin(), wire.begin() + long(wire.size() / 2));
    CHECK_THROWS_AS(BdistSketch::deserialize(cut), FormatError);

    std::vector<uint8_t> bad_magic = wire;
    bad_magic[0] ^= 0xff;
    CHECK_THROWS_AS(BdistSketch::deserialize(bad_magic), FormatError);

    std::vector<uint8_t> bad_variant = wire;
    bad_variant[4] = 9;
    CHECK_THROWS_WITH_AS(BdistSketch::deserialize(bad_variant), doctest::Contains("variant"),
                         FormatError);

    // a different k implies different parity counts
    std::vector<uint8_t> bad_k = wire;
    bad_k[13] = 3;
    CHECK_THROWS_AS(BdistSketch::deserialize(bad_k), FormatError);

    std::vector<uint8_t> extra = wire;
    extra.push_back(0);
    CHECK_THROWS_WITH_AS(BdistSketch::deserialize(extra), doctest::Contains("trailing"),
                         FormatError);
}

TEST_CASE("recovery is deterministic") {
    uint64_t n = 8192;
    StageParams p = make_stage_params(n, 2, 16);
    Bits x = random_distinct_bits(n, p.B, 51);
    Bits y = apply_trace(x, sample_trace(52, n, 2, 16));
    BdistSketch sk = alice_sketch_bdist(x, 2, 16);
    Bits a = bob_recover_bdist(y, sk);
    Bits b = bob_recover_bdist(y, sk);
    CHECK(a == b);
    CHECK(a == x);
}
