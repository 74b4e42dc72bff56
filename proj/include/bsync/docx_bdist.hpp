#pragma once

#include <cstdint>
#include <vector>

#include "bsync/bits.hpp"
#include "bsync/set_recon.hpp"

namespace bsync {

// Two-stage sketch for strings whose length-B windows are pairwise
// distinct.  Stage one reconciles a content-defined block map (variable
// blocks cut by the locality-sensitive partition, each block summarized as
// length + window prefix) through set reconciliation; stage two runs
// halving levels whose per-block hash is simply the first B bits, so no
// hash seeds travel at all.

inline constexpr uint64_t kBdistMaxLength = 1ull << 21;

struct StageParams {
    uint64_t n = 0, k = 0, t = 0;
    uint64_t B = 0;    // distinctness window, 3*ceil(log2 n)
    uint64_t T = 0;    // coarse partition threshold (= B)
    uint64_t Tp = 0;   // label re-partition threshold
    uint64_t Tpp = 0;  // even re-blocking width after stage one
    uint64_t D = 0;    // set reconciliation capacity
    std::vector<uint64_t> b;  // halving level widths, b.front() >= Tpp, b.back() = bL

    uint64_t bL() const { return b.back(); }
    uint64_t levels() const { return b.size(); }
    uint64_t record_bits() const;              // packed block record width
    uint64_t blocks_at(uint64_t width) const { return (n + width - 1) / width; }
    uint64_t level_distance(size_t lv) const;  // RS distance for v at level lv
    uint64_t final_distance() const;           // RS distance for the content blocks

    bool operator==(const StageParams&) const = default;
};

StageParams make_stage_params(uint64_t n, uint64_t k, uint64_t t);

// True iff every length-B window of x is pairwise distinct from the others.
bool is_b_distinct(const Bits& x, uint64_t B);

// One link of the block map: a block's bit length and window prefix plus
// the next block's window prefix, so the map can be rechained from a set.
struct PrefixRecord {
    uint64_t len = 0;
    uint64_t prefix = 0;       // first B bits at the block start
    uint64_t prefix_next = 0;  // first B bits at the next block's start

    SetElem pack(const StageParams& p) const;
    static PrefixRecord unpack(const StageParams& p, const SetElem& e);
    bool operator==(const PrefixRecord&) const = default;
};

// The block map of s under the double partition (coarse threshold T on the
// window string, then Tp on the block labels).  Empty when |s| < B.
std::vector<PrefixRecord> block_records(const Bits& s, const StageParams& p);

// Rebuild the block layout from an unordered record set: 1-based block
// starts plus each block's window prefix, in string order.  prefixes is
// empty when V is (there is a single block and nothing is known about it).
// Throws RecoveryError when the records do not chain into a unique order.
struct BlockChain {
    std::vector<uint64_t> starts;
    std::vector<uint64_t> prefixes;
};
BlockChain chain_block_starts(const std::vector<PrefixRecord>& V, uint64_t n, uint64_t B);

// Stage one, sender side: the set reconciliation sketch of the block map.
SetSketch coarse_sketch(const Bits& x, const StageParams& p);

struct CoarseResult {
    Bits xt;     // candidate bits (zero where unknown)
    Bits known;  // 1 where xt is trusted
};

struct CoarseStats {
    uint64_t set_diff = 0;        // reconciled symmetric difference
    uint64_t records_mine = 0;    // |V'| after dedup
    uint64_t records_theirs = 0;  // |V|
    uint64_t matched_blocks = 0;  // blocks copied whole from y
    uint64_t total_blocks = 0;    // ceil(n / Tpp)
    uint64_t bad_blocks = 0;      // Tpp blocks with unknown or wrong bits
};

// Stage one, receiver side: reconcile the block map, rechain it, write the
// known prefixes, and copy every block with a unique same-length
// same-prefix counterpart in y.  bad_blocks counts wrong bits only when
// truth is supplied.
CoarseResult coarse_recover(const Bits& y, const SetSketch& zv, const StageParams& p,
                            const Bits* truth = nullptr, CoarseStats* stats = nullptr);

// Stage two, sender side: per-level prefix-hash parities plus the final
// content parity.
struct RefineParities {
    std::vector<std::vector<uint64_t>> z;  // per level, B-bit symbols
    std::vector<uint64_t> z_final;         // bL-bit content symbols

    bool operator==(const RefineParities&) const = default;
};
RefineParities refine_parities(const Bits& x, const StageParams& p);

struct RefineStats {
    // state entering each level: blocks with unknown bits, and fully known
    // blocks that disagree with the truth (only when truth is supplied)
    std::vector<uint64_t> unfilled, wrong;
    uint64_t final_unfilled = 0, final_wrong = 0;
};

// Stage two, receiver side: per level, erasure-decode the prefix hashes,
// then greedily re-match every block against the leftmost unused y window
// with that prefix; finally decode the content blocks.
Bits refine_recover(CoarseResult state, const Bits& y, const RefineParities& zs,
                    const StageParams& p, const Bits* truth = nullptr,
                    RefineStats* stats = nullptr);

struct BdistSketch {
    StageParams params;
    SetSketch anchors;
    RefineParities refine;

    size_t bit_size() const;
    std::vector<uint8_t> serialize() const;
    static BdistSketch deserialize(const std::vector<uint8_t>& buf);
    bool operator==(const BdistSketch&) const = default;
};

BdistSketch alice_sketch_bdist(const Bits& x, uint64_t k, uint64_t t);
Bits bob_recover_bdist(const Bits& y, const BdistSketch& sk);
Bits bob_recover_bdist_instrumented(const Bits& y, const BdistSketch& sk, const Bits* truth,
                                    CoarseStats* cstats, RefineStats* rstats);

}  // namespace bsync
