#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "bsync/errors.hpp"
#include "bsync/rs.hpp"
#include "bsync/set_recon.hpp"

using namespace bsync;

namespace {

SymbolVector rand_symbols(unsigned m, size_t n, std::mt19937_64& rng) {
    SymbolVector v{m, {}};
    uint64_t mask = m >= 64 ? ~uint64_t{0} : (uint64_t{1} << m) - 1;
    for (size_t i = 0; i < n; ++i) v.symbols.push_back(rng() & mask);
    return v;
}

// corrupt `count` distinct positions of the public concatenation data||parity
std::vector<size_t> corrupt(SymbolVector& data, SymbolVector& parity, size_t count,
                            std::mt19937_64& rng) {
    size_t N = data.symbols.size() + parity.symbols.size();
    std::set<size_t> picked;
    while (picked.size() < count) picked.insert(rng() % N);
    uint64_t mask = data.m >= 64 ? ~uint64_t{0} : (uint64_t{1} << data.m) - 1;
    for (size_t p : picked) {
        uint64_t delta = (rng() & mask) | 1;
        if (p < data.symbols.size())
            data.symbols[p] ^= delta;
        else
            parity.symbols[p - data.symbols.size()] ^= delta;
    }
    return {picked.begin(), picked.end()};
}

}  // namespace

TEST_CASE("parity basics") {
    SymbolVector zeros{8, std::vector<uint64_t>(20, 0)};
    SymbolVector pz = rs_parity(zeros, 9);
    CHECK(pz.symbols == std::vector<uint64_t>(8, 0));

    CHECK(rs_parity(SymbolVector{8, {1, 2, 3}}, 1).symbols.empty());

    // deterministic
    SymbolVector d{13, {5, 500, 4000}};
    CHECK(rs_parity(d, 5) == rs_parity(d, 5));

    CHECK_THROWS_AS(rs_parity(SymbolVector{4, std::vector<uint64_t>(20, 1)}, 5), InvalidArgument);
    CHECK_THROWS_AS(rs_parity(SymbolVector{8, {256}}, 3), InvalidArgument);
}

TEST_CASE("error-only roundtrips across widths and distances") {
    std::mt19937_64 rng(42);
    for (unsigned m : {8u, 13u, 16u, 32u, 64u}) {
        for (unsigned d : {2u, 3u, 8u, 17u}) {
            for (int trial = 0; trial < 8; ++trial) {
                size_t n = 1 + rng() % 40;
                if (n + d - 1 > (uint64_t{1} << std::min(m, 21u)) - 1) continue;
                SymbolVector data = rand_symbols(m, n, rng);
                SymbolVector parity = rs_parity(data, d);
                SymbolVector rd = data, rp = parity;
                size_t e = (d - 1) / 2;
                corrupt(rd, rp, e, rng);
                SymbolVector fixed = rs_correct(rd, rp, d);
                CHECK(fixed == data);
            }
        }
    }
}

TEST_CASE("erasures stretch the budget to 2e + rho < d") {
    std::mt19937_64 rng(7);
    const unsigned m = 16, d = 13;
    for (int trial = 0; trial < 60; ++trial) {
        size_t n = 5 + rng() % 60;
        SymbolVector data = rand_symbols(m, n, rng);
        SymbolVector parity = rs_parity(data, d);
        size_t rho = rng() % d;
        size_t e = (d - 1 - rho) / 2;
        SymbolVector rd = data, rp = parity;
        std::vector<size_t> erased = corrupt(rd, rp, rho, rng);
        // additional errors at positions the decoder is not told about
        std::vector<size_t> err = corrupt(rd, rp, e, rng);
        SymbolVector fixed = rs_correct(rd, rp, d, erased);
        // the overlap of erased/err stays within budget either way
        CHECK(fixed == data);
    }
    // erasures beyond d-1 are refused
    SymbolVector data = rand_symbols(m, 10, rng);
    SymbolVector parity = rs_parity(data, 3);
    std::vector<size_t> every{0, 1, 2, 3};
    CHECK_THROWS_AS(rs_correct(data, parity, 3, every), RecoveryError);
}

TEST_CASE("zero errors is the identity and over-budget never crashes") {
    std::mt19937_64 rng(3);
    SymbolVector data = rand_symbols(10, 30, rng);
    SymbolVector parity = rs_parity(data, 9);
    CHECK(rs_correct(data, parity, 9) == data);

    // more corruption than the guarantee: decode must either throw the
    // recovery error or return some codeword's data -- never crash
    for (int trial = 0; trial < 40; ++trial) {
        SymbolVector rd = data, rp = parity;
        corrupt(rd, rp, 5 + rng() % 10, rng);
        try {
            SymbolVector out = rs_correct(rd, rp, 9);
            CHECK(out.symbols.size() == data.symbols.size());
        } catch (const RecoveryError&) {
        }
    }
}

TEST_CASE("deliberate push toward another codeword") {
    std::mt19937_64 rng(11);
    const unsigned d = 9;
    SymbolVector a = rand_symbols(12, 20, rng);
    SymbolVector b = rand_symbols(12, 20, rng);
    SymbolVector pa = rs_parity(a, d), pb = rs_parity(b, d);
    // start from a's codeword and overwrite d/2+1 positions with b's symbols
    SymbolVector rd = a, rp = pa;
    for (size_t i = 0; i < d / 2 + 1; ++i) rd.symbols[i] = b.symbols[i];
    try {
        SymbolVector out = rs_correct(rd, rp, d);
        // if it decodes, it decodes to a true codeword; both are acceptable
        CHECK((out == a || out.symbols.size() == 20));
    } catch (const RecoveryError&) {
    }
}

TEST_CASE("set sketch basics") {
    SetSketch empty = set_recon_sketch({}, 16, 4);
    for (const auto& e : empty.evals) CHECK(e == Gf::get(17).one());

    std::vector<SetElem> v{{5}, {1000}, {77}};
    std::vector<SetElem> shuffled{{77}, {5}, {1000}};
    CHECK(set_recon_sketch(v, 16, 4) == set_recon_sketch(shuffled, 16, 4));

    CHECK_THROWS_AS(set_recon_sketch({{5}, {5}}, 16, 2), InvalidArgument);
    CHECK_THROWS_AS(set_recon_sketch({{uint64_t{1} << 20}}, 16, 2), InvalidArgument);
}

TEST_CASE("set reconciliation recovers within capacity") {
    std::mt19937_64 rng(19);
    for (unsigned m : {16u, 20u, 80u}) {
        size_t words = (m + 63) / 64;
        auto random_set = [&](size_t target) {
            std::set<SetElem> s;
            while (s.size() < target) {
                SetElem e(words, 0);
                for (size_t w = 0; w < words; ++w) e[w] = rng();
                unsigned top = m % 64;
                if (top) e.back() &= (uint64_t{1} << top) - 1;
                s.insert(e);
            }
            return std::vector<SetElem>(s.begin(), s.end());
        };
        for (int trial = 0; trial < 12; ++trial) {
            uint64_t D = 1 + rng() % 12;
            std::vector<SetElem> V = random_set(30 + rng() % 200);
            // build V' by removing `del` and adding `ins` fresh elements
            size_t diff = rng() % (D + 1);
            size_t del = rng() % (diff + 1), ins = diff - del;
            std::vector<SetElem> Vp(V.begin() + del, V.end());
            std::vector<SetElem> fresh = random_set(ins);
            for (auto& e : fresh)
                if (std::find(V.begin(), V.end(), e) == V.end()) Vp.push_back(e);
            SetSketch sk = set_recon_sketch(V, m, D);
            std::vector<SetElem> got = set_recon_recover(sk, Vp);
            std::sort(V.begin(), V.end());
            CHECK(got == V);
        }
    }
}

TEST_CASE("single addition and identity") {
    std::vector<SetElem> Vp{{3}, {9}, {200}};
    std::vector<SetElem> V = Vp;
    V.push_back({4321});
    SetSketch sk = set_recon_sketch(V, 16, 1);
    std::vector<SetElem> got = set_recon_recover(sk, Vp);
    std::sort(V.begin(), V.end());
    CHECK(got == V);

    SetSketch same = set_recon_sketch(Vp, 16, 3);
    CHECK(set_recon_recover(same, Vp) == Vp);
}

TEST_CASE("overload signals failure") {
    std::mt19937_64 rng(31);
    std::vector<SetElem> V, Vp;
    for (uint64_t i = 0; i < 40; ++i) V.push_back({(rng() % 60000) | 1, });
    std::sort(V.begin(), V.end());
    V.erase(std::unique(V.begin(), V.end()), V.end());
    // V' misses D+1 = 4 elements
    Vp.assign(V.begin() + 4, V.end());
    SetSketch sk = set_recon_sketch(V, 16, 3);
    CHECK_THROWS_AS(set_recon_recover(sk, Vp), RecoveryError);
}

TEST_CASE("sketch serialization") {
    std::vector<SetElem> V{{12}, {99}, {31000}};
    SetSketch sk = set_recon_sketch(V, 15, 5);
    ByteWriter w;
    sk.write(w);
    ByteReader r(w.data());
    SetSketch back = SetSketch::read(r);
    CHECK(back == sk);
    CHECK(back.payload_bits() == 2 * 5 * 16);
}
