#pragma once

#include <cstdint>
#include <vector>

#include "bsync/bits.hpp"
#include "bsync/cfhash.hpp"

namespace bsync {

// Schedule constants, calibrated so that mid-size inputs keep several
// uncapped levels and the sketch tracks the (k log n + t) * log^2 shape.
// Redundancy distances are deliberately generous relative to error counts
// observed under budget; capped levels fall back to sending values whole.
inline constexpr uint64_t kLevelBlockDivisor = 2;   // b1 <= n / (divisor * r)
inline constexpr uint64_t kLevelTopBlockCap = 1024; // hash window cost ceiling
inline constexpr uint64_t kLevelDistFactor = 6;     // level i distance = factor * i * r
inline constexpr uint64_t kFinalDistFactor = 6;     // final distance = factor * L * (k + ceil(t/bL))
inline constexpr uint64_t kPassKDivisor = 64;       // pass-through when 64 * k * log2 n > n
inline constexpr uint64_t kPassTDivisor = 8;        // pass-through when 8 * t > n

// Halving block schedule: level 1 splits the padded input into blocks of
// b1 bits, each later level halves them, stopping at the smallest power of
// two >= 2*ceil(log2 n).  r = k + ceil(t / ceil(log2 n)) drives every
// redundancy distance.
struct LevelSchedule {
    uint64_t n_true = 0, n_padded = 0;
    uint64_t k = 0, t = 0;
    bool pass_through = false;
    unsigned L = 0;
    std::vector<uint64_t> b, l;  // per level, index 0 = level 1; l[i] = n_padded / b[i]
    unsigned q = 0;              // hash output bits, 4 * ceil(log2 n_true) <= 64
    uint64_t r = 0;

    uint64_t bL() const { return b.back(); }
    uint64_t level_distance(unsigned level) const;  // 1-based
    uint64_t final_distance() const;
    // capped: the parity would be at least as long as the data, so the
    // values are sent verbatim instead
    bool level_capped(unsigned level) const;
    bool final_capped() const;
    unsigned level_symbol_bits(unsigned level) const;  // RS symbol width for z[level]

    bool operator==(const LevelSchedule&) const = default;
};

// Supported input length for this variant (hash values must fit one word).
inline constexpr uint64_t kLevelsMaxLength = uint64_t{1} << 16;

LevelSchedule make_levels_schedule(uint64_t n, uint64_t k, uint64_t t);

struct LevelsSketch {
    LevelSchedule sched;
    std::vector<HashDescriptor> h;         // one per level
    std::vector<uint64_t> v1;              // level-1 hash values, sent whole
    std::vector<std::vector<uint64_t>> z;  // per level: parity symbols, or the
                                           // whole value vector when capped
    std::vector<uint64_t> z_final;         // block-content parity or raw blocks
    Bits pass_payload;                     // pass-through only: the input itself

    size_t bit_size() const;  // logical payload bits (what the protocol pays)
    std::vector<uint8_t> serialize() const;
    static LevelsSketch deserialize(const std::vector<uint8_t>& buf);
};

LevelsSketch alice_sketch_levels(const Bits& x, uint64_t k, uint64_t t);

// Exact recovery of x from y and the sketch, for any y within the (k,t)
// block-edit budget.  Throws RecoveryError instead of ever returning a
// silently wrong string when the budget was exceeded.
Bits bob_recover_levels(const Bits& y, const LevelsSketch& sk);

// Per-level observability for calibration and the bound tests.
struct LevelsRecoveryStats {
    struct Level {
        unsigned level = 0;
        uint64_t blocks = 0, distance = 0;
        bool capped = false;
        uint64_t starred_at_decode = 0;  // erasures fed into the value decode
        uint64_t mismatched = 0;         // own hash != decoded value
        uint64_t S_size = 0, matched = 0;
        uint64_t wrong_filled = 0;  // truth-side: filled blocks with wrong bits
    };
    std::vector<Level> levels;
    uint64_t final_starred = 0, final_errors = 0;
    bool final_capped = false;
};

Bits bob_recover_levels_instrumented(const Bits& y, const LevelsSketch& sk, const Bits* truth,
                                     LevelsRecoveryStats* stats);

}  // namespace bsync
