#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "bsync/bits.hpp"

namespace bsync {

// Exhaustive document exchange for tiny scales: color every short string so
// that any two strings which can be corrupted into a common result disagree,
// then a color id alone identifies the original among the candidates for a
// received string.  Exponential in n; serves as a ground-truth cross-check
// for the sketch protocols, never as a production path.
struct ColoringTable {
    uint64_t n_max = 0;
    uint64_t k = 0;
    uint64_t t = 0;

    // every string with length < n_max + t, keyed by its 0/1 text
    std::map<std::string, uint32_t> color_of;
    uint32_t num_colors = 0;
    uint64_t max_degree = 0;

    // image text -> ids of the strings whose corruption ball contains it
    std::unordered_map<std::string, std::vector<uint32_t>> producers;
    std::vector<std::string> vertex_text;
    std::vector<uint32_t> vertex_color;

    // bits a color id needs; the whole sketch in this scheme
    uint32_t sketch_bits() const;
};

// Greedy coloring in enumeration order (shorter first, then numeric),
// smallest free color.  Guarded to n_max <= 10, k <= 1, t <= 2.
ColoringTable coloring_build(uint64_t n_max, uint64_t k, uint64_t t);

uint32_t coloring_sketch(const Bits& x, const ColoringTable& table);

// The unique colored string that could have produced y within one budget.
// Ambiguity means the coloring itself is broken and throws loudly.
Bits coloring_recover(const Bits& y, uint32_t color, const ColoringTable& table);

}  // namespace bsync
