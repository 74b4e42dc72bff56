#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsync/bits.hpp"

namespace bsync {

// One adversarial operation.  Positions are 1-based to match the protocol
// interfaces; see apply_op for the exact semantics of each kind.
struct BlockEditOp {
    enum class Kind { Insert, Delete, Transpose };
    Kind kind;

    // Insert: payload lands so its first bit has index pos; pos ∈ [1, n+1].
    // Delete: removes x[pos, pos+len).
    // Transpose: removes u = x[i, i+l) and re-inserts it immediately after
    // the symbol that was x[j] in the string as it stood before this op
    // (at the front for j = 0); j ∈ {0..i-1} ∪ {i+l..n}.
    uint64_t pos = 0;   // Insert/Delete position, Transpose i
    uint64_t len = 0;   // Delete/Transpose block length
    uint64_t dest = 0;  // Transpose j
    Bits payload;       // Insert only

    static BlockEditOp insert(uint64_t pos, Bits payload);
    static BlockEditOp remove(uint64_t pos, uint64_t len);
    static BlockEditOp transpose(uint64_t i, uint64_t l, uint64_t j);

    // 0 for transpositions: moved bits are neither inserted nor deleted.
    uint64_t t_cost() const;
};

struct BlockEditTrace {
    uint64_t k_budget = 0;
    uint64_t t_budget = 0;
    std::vector<BlockEditOp> ops;

    uint64_t t_used() const;
    void validate_budgets() const;  // |ops| <= k, t_used <= t
};

Bits apply_op(const Bits& x, const BlockEditOp& op);
Bits apply_trace(const Bits& x, const BlockEditTrace& trace);

// Deterministic in rng_seed; ops are uniform over the feasible kinds with
// geometric lengths capped by the remaining budget, so traces mix many
// small errors with occasional large blocks.
BlockEditTrace sample_trace(uint64_t rng_seed, size_t n, uint64_t k, uint64_t t);

size_t lcs(const Bits& x, const Bits& y);
// |x| + |y| - 2·lcs(x, y): minimum insertions+deletions between x and y.
size_t edit_distance(const Bits& x, const Bits& y);

// Exact reachable set under ≤ k ops with ≤ t inserted+deleted bits.
// Exponential; guarded to |x| <= 12, k <= 2, t <= 4.
std::vector<Bits> enumerate_ball(const Bits& x, uint64_t k, uint64_t t);

// Line-oriented text format:
//   TRACE v1 k=<k> t=<t>
//   I <pos> <bits>
//   D <pos> <len>
//   T <i> <l> <j>
std::string format_trace(const BlockEditTrace& trace);
BlockEditTrace parse_trace(const std::string& text);

}  // namespace bsync
