#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bsync/coloring.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "bsync/block_edit.hpp"
#include "bsync/docx_levels.hpp"
#include "bsync/errors.hpp"

using namespace bsync;

namespace {

Bits bits_of(uint64_t v, uint64_t len) {
    Bits x;
    for (uint64_t i = 0; i < len; ++i) x.push_back(static_cast<int>((v >> (len - 1 - i)) & 1));
    return x;
}

// the ball as a set of strings, including the untouched string itself
std::set<std::string> image_set(const Bits& x, uint64_t k, uint64_t t) {
    std::set<std::string> s;
    s.insert(x.to_string());
    for (const Bits& w : enumerate_ball(x, k, t)) s.insert(w.to_string());
    return s;
}

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
    for (const std::string& w : a)
        if (b.count(w)) return true;
    return false;
}

}  // namespace

TEST_CASE("parameter guards reject anything beyond tiny scale") {
    CHECK_THROWS_WITH_AS(coloring_build(0, 1, 1), doctest::Contains("exhaustive table"),
                         InvalidArgument);
    CHECK_THROWS_WITH_AS(coloring_build(11, 1, 1), doctest::Contains("exhaustive table"),
                         InvalidArgument);
    CHECK_THROWS_WITH_AS(coloring_build(8, 2, 1), doctest::Contains("exhaustive table"),
                         InvalidArgument);
    CHECK_THROWS_WITH_AS(coloring_build(8, 1, 3), doctest::Contains("exhaustive table"),
                         InvalidArgument);
}

TEST_CASE("frozen table shapes at the calibration cells") {
    ColoringTable t1 = coloring_build(4, 1, 1);
    CHECK(t1.vertex_text.size() == 31);
    CHECK(t1.num_colors == 15);
    CHECK(t1.max_degree == 23);
    CHECK(t1.sketch_bits() == 4);

    ColoringTable t2 = coloring_build(6, 1, 2);
    CHECK(t2.vertex_text.size() == 255);
    CHECK(t2.num_colors == 70);
    CHECK(t2.max_degree == 182);
    CHECK(t2.sketch_bits() == 7);

    ColoringTable t3 = coloring_build(8, 1, 2);
    CHECK(t3.vertex_text.size() == 1023);
    CHECK(t3.num_colors == 166);
    CHECK(t3.max_degree == 552);
    CHECK(t3.sketch_bits() == 8);

    // transpositions alone still force conflicts, but far fewer
    ColoringTable t4 = coloring_build(8, 1, 0);
    CHECK(t4.num_colors == 33);
    CHECK(t4.sketch_bits() == 6);
}

TEST_CASE("no budget means one color and identity recovery") {
    for (auto [k, t] : {std::pair<uint64_t, uint64_t>{0, 0}, {0, 2}}) {
        ColoringTable tab = coloring_build(4, k, t);
        CHECK(tab.num_colors == 1);
        CHECK(tab.max_degree == 0);
        CHECK(tab.sketch_bits() == 0);
        for (const auto& entry : tab.color_of) CHECK(entry.second == 0);

        Bits x = bits_of(0b101, 3);  // the domain stops below n_max + t
        CHECK(coloring_recover(x, coloring_sketch(x, tab), tab) == x);
    }
}

TEST_CASE("colorings are proper edge by edge") {
    uint64_t k = 1, t = 1;
    ColoringTable tab = coloring_build(4, k, t);

    std::vector<Bits> verts;
    std::vector<std::set<std::string>> balls;
    for (const std::string& s : tab.vertex_text) {
        verts.push_back(Bits::from_string(s));
        balls.push_back(image_set(verts.back(), k, t));
    }

    uint64_t brute_max_degree = 0;
    for (size_t i = 0; i < verts.size(); ++i) {
        uint64_t deg = 0;
        for (size_t j = 0; j < verts.size(); ++j) {
            if (i == j) continue;
            bool reach = balls[i].count(verts[j].to_string()) != 0;
            bool confusable = intersects(balls[i], balls[j]);
            CHECK((!reach || confusable));  // direct edges are a subset
            if (confusable) {
                ++deg;
                CHECK(tab.vertex_color[i] != tab.vertex_color[j]);
            }
        }
        brute_max_degree = std::max(brute_max_degree, deg);
    }
    CHECK(brute_max_degree == tab.max_degree);
}

TEST_CASE("greedy color count never exceeds degree plus one") {
    for (auto [n, k, t] : {std::tuple<uint64_t, uint64_t, uint64_t>{4, 1, 1}, {6, 1, 2}, {8, 1, 2}}) {
        ColoringTable tab = coloring_build(n, k, t);
        CHECK(tab.num_colors <= tab.max_degree + 1);
    }
}

TEST_CASE("every corrupted string recovers exactly at tiny scale") {
    ColoringTable tab = coloring_build(8, 1, 2);
    size_t total = 0;
    for (uint64_t v = 0; v < 256; ++v) {
        Bits x = bits_of(v, 8);
        uint32_t color = coloring_sketch(x, tab);
        for (const Bits& y : enumerate_ball(x, 1, 2)) {
            ++total;
            CHECK(coloring_recover(y, color, tab) == x);
        }
    }
    CHECK(total == 16422);  // every budgeted image of every length-8 string
}

TEST_CASE("recovery holds on every domain length, not just the top one") {
    uint64_t k = 1, t = 2;
    ColoringTable tab = coloring_build(6, k, t);
    for (const std::string& s : tab.vertex_text) {
        Bits x = Bits::from_string(s);
        uint32_t color = coloring_sketch(x, tab);
        CHECK(coloring_recover(x, color, tab) == x);
        for (const Bits& y : enumerate_ball(x, k, t)) CHECK(coloring_recover(y, color, tab) == x);
    }
}

TEST_CASE("lookups outside the table fail loudly") {
    ColoringTable tab = coloring_build(4, 1, 1);
    CHECK_THROWS_WITH_AS(coloring_sketch(bits_of(0, 5), tab), doctest::Contains("domain"),
                         InvalidArgument);

    // a color no producer of y carries
    Bits y = bits_of(0b101, 3);
    uint32_t bad = tab.num_colors + 7;
    CHECK_THROWS_WITH_AS(coloring_recover(y, bad, tab), doctest::Contains("no candidate"),
                         RecoveryError);
}

TEST_CASE("the color id undercuts the sketch protocol at the same cell") {
    ColoringTable tab = coloring_build(8, 1, 2);
    uint64_t protocol_bits = 8 * alice_sketch_levels(bits_of(0, 8), 1, 2).serialize().size();
    CHECK(protocol_bits == 304);
    CHECK(tab.sketch_bits() == 8);
    CHECK(tab.sketch_bits() <= protocol_bits);
}

TEST_CASE("table construction is deterministic") {
    ColoringTable a = coloring_build(6, 1, 2);
    ColoringTable b = coloring_build(6, 1, 2);
    CHECK(a.vertex_color == b.vertex_color);
    CHECK(a.num_colors == b.num_colors);
    CHECK(a.color_of == b.color_of);
}
