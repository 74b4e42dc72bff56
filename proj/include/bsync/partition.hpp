#pragma once

#include <cstdint>
#include <vector>

namespace bsync {

// A string over an alphabet of at most 2^sigma_bits symbols.  Partitioning
// treats symbols as opaque integers; comparisons and the bit tricks of
// alphabet reduction work on the integer encodings directly.
struct SymbolString {
    unsigned sigma_bits = 0;  // 1..64
    std::vector<uint64_t> symbols;

    size_t size() const { return symbols.size(); }
    void validate() const;           // symbols < 2^sigma_bits
    bool adjacent_distinct() const;  // no two equal neighbours

    bool operator==(const SymbolString&) const = default;
};

// Strictly increasing cut positions 1 = i_0 < i_1 < ... < i_m = n+1;
// block j (1-based) is [indices[j-1], indices[j]).
struct PartitionBoundaries {
    uint64_t T = 0;
    std::vector<uint64_t> indices;

    size_t blocks() const { return indices.empty() ? 0 : indices.size() - 1; }
    // 0-based block index containing 1-based position p
    size_t block_of(uint64_t p) const;

    std::vector<uint8_t> serialize() const;  // varint deltas, monotone
    static PartitionBoundaries deserialize(const std::vector<uint8_t>& buf);

    bool operator==(const PartitionBoundaries&) const = default;
};

// Maps each symbol to (l, bit l of it) where l is the least significant bit
// in which it differs from its left neighbour, encoded as 2l + b.  A virtual
// symbol 0 (or 1, if the string starts with 0) sits before the first one.
// Requires an adjacent-distinct input; the output is adjacent-distinct
// wherever the input was and has alphabet size 2*sigma_bits.
SymbolString alphabet_reduce(const SymbolString& a);

// Two-pass landmark selection on an adjacent-distinct string: local maxima
// at 1-based i in [3, n-1], then local minima in the same range not adjacent
// to a first-pass landmark.  Consecutive landmarks are always >= 2 apart.
std::vector<uint64_t> landmarks(const SymbolString& a);

// Locally consistent partition with threshold T.  Builds a parsing forest
// level by level: nodes spanning >= T leaves are finished; stretches of
// unfinished nodes are re-blocked via two alphabet reductions plus
// landmarks; once no two unfinished nodes touch, each unfinished node is
// merged into its left finished neighbour (right if none) and the finished
// spans become the output blocks.  Halts within ceil(log2 T) levels.
// levels_out, if given, receives the number of split rounds performed.
PartitionBoundaries partition(uint64_t T, const SymbolString& x,
                              unsigned* levels_out = nullptr);

// Locality radius for differential tests: a single-symbol substitution can
// only move boundaries within this many blocks of the edit.
uint64_t block_window(uint64_t T);

}  // namespace bsync
