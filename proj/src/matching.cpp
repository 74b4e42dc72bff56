#include "bsync/matching.hpp"

#include <algorithm>
#include <cstring>
#include <set>

#include "bsync/errors.hpp"

namespace bsync {

namespace {

struct HvHasher {
    size_t operator()(const HashVal& v) const {
        return static_cast<size_t>(v.lo * 0x9e3779b97f4a7c15ull ^ v.hi);
    }
};

// y start positions (1-based, ascending) per hash value that some block wants
using CandidateMap = std::unordered_map<HashVal, std::vector<uint64_t>, HvHasher>;

std::vector<uint64_t> checked_blocks(const std::vector<uint64_t>& S, const HashValueTable& v,
                                     uint64_t p) {
    if (p == 0) throw InvalidArgument("matching: hash descriptor has zero window length");
    std::vector<uint64_t> blocks = S;
    std::sort(blocks.begin(), blocks.end());
    for (size_t a = 0; a < blocks.size(); ++a) {
        uint64_t i = blocks[a];
        if (i == 0 || (i - 1) % p != 0)
            throw InvalidArgument("matching: block index " + std::to_string(i) +
                                  " is not block aligned");
        if (a && blocks[a - 1] == i)
            throw InvalidArgument("matching: duplicate block index " + std::to_string(i));
        if (!v.count(i))
            throw InvalidArgument("matching: no hash value for block " + std::to_string(i));
    }
    return blocks;
}

CandidateMap build_candidates(const std::vector<uint64_t>& blocks, const HashValueTable& v,
                              const Bits& y, const HashDescriptor& h) {
    CandidateMap cand;
    for (uint64_t i : blocks) cand.emplace(v.at(i), std::vector<uint64_t>{});
    if (y.size() >= h.p) {
        std::vector<HashVal> hs = slide_hashes(h, y);
        for (size_t j0 = 0; j0 < hs.size(); ++j0) {
            auto it = cand.find(hs[j0]);
            if (it != cand.end()) it->second.push_back(j0 + 1);
        }
    }
    return cand;
}

// disjointness against the taken intervals, all of length p
bool admissible(const std::set<uint64_t>& used, uint64_t j, uint64_t p) {
    auto it = used.lower_bound(j);
    if (it != used.end() && *it < j + p) return false;
    if (it != used.begin() && j < *std::prev(it) + p) return false;
    return true;
}

// one greedy pass; appends to out and reports which blocks it consumed
std::vector<uint64_t> greedy_round(const std::vector<uint64_t>& blocks, const HashValueTable& v,
                                   const CandidateMap& cand, uint64_t p,
                                   std::vector<std::pair<uint64_t, uint64_t>>& out) {
    std::set<uint64_t> used;
    std::vector<uint64_t> matched;
    for (uint64_t i : blocks) {
        const std::vector<uint64_t>& js = cand.at(v.at(i));
        for (uint64_t j : js) {
            if (!admissible(used, j, p)) continue;
            used.insert(j);
            out.emplace_back(i, j);
            matched.push_back(i);
            break;
        }
    }
    return matched;
}

}  // namespace

Matching greedy_one_third(const std::vector<uint64_t>& S, const HashValueTable& v, const Bits& y,
                          const HashDescriptor& h) {
    Matching m{{}, h.p, 1};
    std::vector<uint64_t> blocks = checked_blocks(S, v, h.p);
    CandidateMap cand = build_candidates(blocks, v, y, h);
    greedy_round(blocks, v, cand, h.p, m.pairs);
    return m;
}

Matching degree3_two_thirds(const std::vector<uint64_t>& S, const HashValueTable& v, const Bits& y,
                            const HashDescriptor& h) {
    Matching m{{}, h.p, 3};
    std::vector<uint64_t> blocks = checked_blocks(S, v, h.p);
    CandidateMap cand = build_candidates(blocks, v, y, h);
    for (int round = 0; round < 3 && !blocks.empty(); ++round) {
        std::vector<uint64_t> matched = greedy_round(blocks, v, cand, h.p, m.pairs);
        std::vector<uint64_t> rest;
        std::set_difference(blocks.begin(), blocks.end(), matched.begin(), matched.end(),
                            std::back_inserter(rest));
        blocks = std::move(rest);
    }
    return m;
}

Matching brute_force_opt(const std::vector<uint64_t>& S, const HashValueTable& v, const Bits& y,
                         const HashDescriptor& h) {
    std::vector<uint64_t> blocks = checked_blocks(S, v, h.p);
    if (blocks.size() > 12) throw InvalidArgument("matching oracle: instance too large (blocks)");
    CandidateMap cand = build_candidates(blocks, v, y, h);
    std::vector<std::pair<uint64_t, uint64_t>> all;
    for (uint64_t i : blocks)
        for (uint64_t j : cand.at(v.at(i))) all.emplace_back(i, j);
    if (all.size() > 24) throw InvalidArgument("matching oracle: instance too large (pairs)");

    const uint64_t p = h.p;
    std::vector<std::pair<uint64_t, uint64_t>> best, cur;
    std::set<uint64_t> used_i, used_j;
    auto rec = [&](auto&& self, size_t at) -> void {
        if (cur.size() + (all.size() - at) <= best.size()) return;  // bound
        if (at == all.size()) {
            if (cur.size() > best.size()) best = cur;
            return;
        }
        auto [i, j] = all[at];
        if (!used_i.count(i) && admissible(used_j, j, p)) {
            used_i.insert(i);
            used_j.insert(j);
            cur.push_back(all[at]);
            self(self, at + 1);
            cur.pop_back();
            used_j.erase(j);
            used_i.erase(i);
        }
        self(self, at + 1);
    };
    rec(rec, 0);
    std::sort(best.begin(), best.end());
    return Matching{std::move(best), p, 1};
}

uint64_t count_wrong_matches(const Matching& w, const Bits& x, const Bits& y) {
    uint64_t wrong = 0;
    for (auto [i, j] : w.pairs) {
        if (i == 0 || j == 0 || i - 1 + w.p > x.size() || j - 1 + w.p > y.size())
            throw InvalidArgument("matching: pair out of range");
        if (std::memcmp(x.data() + (i - 1), y.data() + (j - 1), w.p) != 0) ++wrong;
    }
    return wrong;
}

}  // namespace bsync
