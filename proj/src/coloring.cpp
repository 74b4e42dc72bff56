#include "bsync/coloring.hpp"

#include <algorithm>

#include "bsync/block_edit.hpp"
#include "bsync/errors.hpp"

namespace bsync {

namespace {

uint64_t ceil_log2(uint64_t v) {
    uint64_t r = 0;
    while ((uint64_t{1} << r) < v) ++r;
    return r;
}

// the corruption ball plus the string itself: every image a budgeted
// adversary can leave behind
std::vector<Bits> images_of(const Bits& x, uint64_t k, uint64_t t) {
    std::vector<Bits> ball = enumerate_ball(x, k, t);
    bool has_self = false;
    for (const Bits& w : ball)
        if (w == x) has_self = true;
    if (!has_self) ball.push_back(x);
    return ball;
}

}  // namespace

uint32_t ColoringTable::sketch_bits() const {
    return static_cast<uint32_t>(ceil_log2(std::max<uint64_t>(num_colors, 1)));
}

ColoringTable coloring_build(uint64_t n_max, uint64_t k, uint64_t t) {
    if (n_max < 1 || n_max > 10 || k > 1 || t > 2)
        throw InvalidArgument("coloring: exhaustive table needs n_max in [1, 10], k <= 1, t <= 2");

    ColoringTable tab;
    tab.n_max = n_max;
    tab.k = k;
    tab.t = t;

    for (uint64_t len = 0; len < n_max + t; ++len) {
        for (uint64_t v = 0; v < (uint64_t{1} << len); ++v) {
            Bits x;
            for (uint64_t i = 0; i < len; ++i)
                x.push_back(static_cast<int>((v >> (len - 1 - i)) & 1));
            tab.vertex_text.push_back(x.to_string());
        }
    }

    // invert every corruption ball: producers[w] = who can leave w behind
    for (uint32_t id = 0; id < tab.vertex_text.size(); ++id) {
        Bits x = Bits::from_string(tab.vertex_text[id]);
        for (const Bits& w : images_of(x, k, t)) tab.producers[w.to_string()].push_back(id);
    }
    for (auto& entry : tab.producers) {
        std::sort(entry.second.begin(), entry.second.end());
        entry.second.erase(std::unique(entry.second.begin(), entry.second.end()),
                           entry.second.end());
    }

    // greedy in enumeration order: strings sharing any image must disagree,
    // so take the smallest color absent from all earlier co-producers
    std::vector<uint32_t> seen_at(tab.vertex_text.size(), UINT32_MAX);
    tab.vertex_color.assign(tab.vertex_text.size(), 0);
    for (uint32_t id = 0; id < tab.vertex_text.size(); ++id) {
        Bits x = Bits::from_string(tab.vertex_text[id]);
        std::vector<uint32_t> neighbor_colors;
        uint64_t degree = 0;
        for (const Bits& w : images_of(x, k, t)) {
            auto it = tab.producers.find(w.to_string());
            if (it == tab.producers.end()) continue;
            for (uint32_t u : it->second) {
                if (u == id || seen_at[u] == id) continue;
                seen_at[u] = id;
                ++degree;
                if (u < id) neighbor_colors.push_back(tab.vertex_color[u]);
            }
        }
        tab.max_degree = std::max(tab.max_degree, degree);
        std::sort(neighbor_colors.begin(), neighbor_colors.end());
        uint32_t c = 0;
        for (uint32_t used : neighbor_colors) {
            if (used == c) ++c;
            else if (used > c) break;
        }
        tab.vertex_color[id] = c;
        tab.num_colors = std::max(tab.num_colors, c + 1);
    }

    for (uint32_t id = 0; id < tab.vertex_text.size(); ++id)
        tab.color_of[tab.vertex_text[id]] = tab.vertex_color[id];
    return tab;
}

uint32_t coloring_sketch(const Bits& x, const ColoringTable& table) {
    auto it = table.color_of.find(x.to_string());
    if (it == table.color_of.end())
        throw InvalidArgument("coloring: string outside the table domain");
    return it->second;
}

Bits coloring_recover(const Bits& y, uint32_t color, const ColoringTable& table) {
    std::vector<uint32_t> candidates;
    auto hit = table.producers.find(y.to_string());
    if (hit != table.producers.end())
        for (uint32_t id : hit->second)
            if (table.vertex_color[id] == color) candidates.push_back(id);

    if (candidates.empty()) throw RecoveryError("coloring: no candidate carries this color");
    if (candidates.size() > 1)
        throw RecoveryError("coloring: color is ambiguous for this string, table is broken");
    return Bits::from_string(table.vertex_text[candidates[0]]);
}

}  // namespace bsync
