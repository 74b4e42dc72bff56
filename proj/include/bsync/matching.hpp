#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "bsync/bits.hpp"
#include "bsync/cfhash.hpp"

namespace bsync {

// A matching pairs block-aligned x positions with arbitrary y positions
// whose windows carry the same hash value.  Positions are 1-based; every
// i is 1 + p*l and the i are distinct.  degree_bound is the promised
// maximum number of pairs covering any single y bit, not the achieved one.
struct Matching {
    std::vector<std::pair<uint64_t, uint64_t>> pairs;  // (i in x, j in y)
    uint64_t p = 0;
    unsigned degree_bound = 1;
};

using HashValueTable = std::unordered_map<uint64_t, HashVal>;

// Single left-to-right greedy pass: blocks in increasing i, smallest y
// position whose window hash equals v[i] and whose interval is disjoint
// from everything already taken.  Non-overlapping, maximal, and at least
// a third of the optimum.
Matching greedy_one_third(const std::vector<uint64_t>& S, const HashValueTable& v, const Bits& y,
                          const HashDescriptor& h);

// Three greedy rounds, each over the still-unmatched blocks against all of
// y with a fresh interval set: overlap degree at most 3, size at least
// 19/27 of the optimal non-overlapping matching.
Matching degree3_two_thirds(const std::vector<uint64_t>& S, const HashValueTable& v, const Bits& y,
                            const HashDescriptor& h);

// Exhaustive maximum non-overlapping matching for test oracles only.
// Throws when |S| > 12 or there are more than 24 candidate pairs.
Matching brute_force_opt(const std::vector<uint64_t>& S, const HashValueTable& v, const Bits& y,
                         const HashDescriptor& h);

// Pairs whose substrings actually differ (x side available, test use).
uint64_t count_wrong_matches(const Matching& w, const Bits& x, const Bits& y);

}  // namespace bsync
