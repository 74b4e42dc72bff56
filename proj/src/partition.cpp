#include "bsync/partition.hpp"

#include <algorithm>
#include <bit>

#include "bsync/errors.hpp"

namespace bsync {

namespace {

unsigned ceil_log2(uint64_t v) {
    unsigned e = 0;
    while ((uint64_t{1} << e) < v) ++e;
    return e;
}

void put_varint(std::vector<uint8_t>& out, uint64_t v) {
    while (v >= 0x80) {
        out.push_back(uint8_t(v) | 0x80);
        v >>= 7;
    }
    out.push_back(uint8_t(v));
}

uint64_t get_varint(const std::vector<uint8_t>& in, size_t& pos) {
    uint64_t v = 0;
    for (unsigned sh = 0;; sh += 7) {
        if (pos >= in.size() || sh > 63) throw FormatError("boundary list truncated");
        uint8_t b = in[pos++];
        v |= uint64_t(b & 0x7f) << sh;
        if (!(b & 0x80)) return v;
    }
}

}  // namespace

void SymbolString::validate() const {
    if (sigma_bits == 0 || sigma_bits > 64)
        throw InvalidArgument("symbol string: alphabet width out of range");
    if (sigma_bits < 64)
        for (uint64_t s : symbols)
            if (s >> sigma_bits) throw InvalidArgument("symbol string: symbol outside alphabet");
}

bool SymbolString::adjacent_distinct() const {
    for (size_t i = 1; i < symbols.size(); ++i)
        if (symbols[i] == symbols[i - 1]) return false;
    return true;
}

size_t PartitionBoundaries::block_of(uint64_t p) const {
    auto it = std::upper_bound(indices.begin(), indices.end(), p);
    if (it == indices.begin() || it == indices.end())
        throw InvalidArgument("partition: position outside the string");
    return size_t(it - indices.begin()) - 1;
}

std::vector<uint8_t> PartitionBoundaries::serialize() const {
    std::vector<uint8_t> out;
    put_varint(out, T);
    put_varint(out, indices.size());
    uint64_t prev = 0;
    for (uint64_t i : indices) {
        put_varint(out, i - prev);  // strictly monotone: every delta >= 1
        prev = i;
    }
    return out;
}

PartitionBoundaries PartitionBoundaries::deserialize(const std::vector<uint8_t>& buf) {
    size_t pos = 0;
    PartitionBoundaries pb;
    pb.T = get_varint(buf, pos);
    uint64_t count = get_varint(buf, pos);
    if (count < 2) throw FormatError("boundary list needs both ends");
    uint64_t prev = 0;
    for (uint64_t j = 0; j < count; ++j) {
        uint64_t d = get_varint(buf, pos);
        if (d == 0) throw FormatError("boundary list not strictly increasing");
        prev += d;
        pb.indices.push_back(prev);
    }
    if (pb.indices.front() != 1) throw FormatError("boundary list must start at 1");
    if (pos != buf.size()) throw FormatError("boundary list has trailing bytes");
    return pb;
}

SymbolString alphabet_reduce(const SymbolString& a) {
    a.validate();
    if (a.symbols.empty()) throw InvalidArgument("alphabet reduction: empty string");
    if (!a.adjacent_distinct()) throw InvalidArgument("alphabet reduction: repetitive input");
    SymbolString out;
    out.sigma_bits = ceil_log2(2 * uint64_t{a.sigma_bits});
    out.symbols.reserve(a.size());
    uint64_t prev = a.symbols[0] == 0 ? 1 : 0;  // virtual symbol before the string
    for (uint64_t s : a.symbols) {
        unsigned l = unsigned(std::countr_zero(s ^ prev));
        out.symbols.push_back(2 * uint64_t{l} + (s >> l & 1));
        prev = s;
    }
    return out;
}

std::vector<uint64_t> landmarks(const SymbolString& a) {
    if (!a.adjacent_distinct()) throw InvalidArgument("landmarks: repetitive input");
    const auto& s = a.symbols;
    const size_t n = s.size();
    std::vector<uint64_t> marks;
    std::vector<char> is_max(n + 1, 0);
    for (size_t i = 3; i + 1 <= n && i <= n - 1; ++i)
        if (s[i - 2] < s[i - 1] && s[i - 1] > s[i]) {
            is_max[i] = 1;
            marks.push_back(i);
        }
    for (size_t i = 3; i + 1 <= n && i <= n - 1; ++i)
        if (s[i - 2] > s[i - 1] && s[i - 1] < s[i] && !is_max[i - 1] && !is_max[i + 1])
            marks.push_back(i);
    std::sort(marks.begin(), marks.end());
    for (size_t j = 1; j < marks.size(); ++j)
        if (marks[j] - marks[j - 1] < 2)
            throw Error("landmarks: adjacent marks cannot happen");
    return marks;
}

PartitionBoundaries partition(uint64_t T, const SymbolString& x, unsigned* levels_out) {
    x.validate();
    if (x.symbols.empty()) throw InvalidArgument("partition: empty string");
    if (T == 0) throw InvalidArgument("partition: threshold must be positive");
    if (!x.adjacent_distinct()) throw InvalidArgument("partition: input not 1-distinct");
    const uint64_t n = x.size();

    // per level: node start boundaries (1-based) plus the sentinel n+1;
    // a node's label is always the input symbol at its start
    std::vector<uint64_t> bound;
    bound.reserve(n + 1);
    for (uint64_t i = 1; i <= n + 1; ++i) bound.push_back(i);

    const unsigned max_levels = ceil_log2(std::max<uint64_t>(T, 1)) + 2;
    for (unsigned level = 0;; ++level) {
        if (level > max_levels) throw Error("partition: level budget exhausted");
        const size_t m = bound.size() - 1;  // node count
        std::vector<char> finish(m, 0);
        for (size_t j = 0; j < m; ++j) finish[j] = bound[j + 1] - bound[j] >= T;

        bool adjacent_open = false;
        for (size_t j = 0; j + 1 < m; ++j)
            if (!finish[j] && !finish[j + 1]) {
                adjacent_open = true;
                break;
            }

        if (!adjacent_open) {
            // merge every open node into its left finished neighbour
            // (right for the first node), i.e. drop one of its boundaries
            std::vector<uint64_t> out;
            out.push_back(bound.front());
            for (size_t j = 0; j < m; ++j) {
                bool drop_right_of_j =
                    (j + 1 < m && !finish[j + 1]) || (j == 0 && !finish[0] && m > 1);
                if (!drop_right_of_j) out.push_back(bound[j + 1]);
            }
            if (out.back() != n + 1) out.push_back(n + 1);
            if (levels_out) *levels_out = level;
            PartitionBoundaries pb;
            pb.T = T;
            pb.indices = std::move(out);
            return pb;
        }

        // split every maximal stretch of open nodes by reducing the alphabet
        // twice and cutting at landmarks; finished nodes pass through
        std::vector<uint64_t> next;
        next.push_back(1);
        size_t j = 0;
        while (j < m) {
            if (finish[j]) {
                next.push_back(bound[j + 1]);
                ++j;
                continue;
            }
            size_t e = j;
            while (e + 1 < m && !finish[e + 1]) ++e;
            SymbolString run{x.sigma_bits, {}};
            run.symbols.reserve(e - j + 1);
            for (size_t u = j; u <= e; ++u) run.symbols.push_back(x.symbols[bound[u] - 1]);
            std::vector<uint64_t> lm = landmarks(alphabet_reduce(alphabet_reduce(run)));
            for (uint64_t cut : lm) next.push_back(bound[j + cut - 1]);
            next.push_back(bound[e + 1]);
            j = e + 1;
        }
        bound = std::move(next);
    }
}

uint64_t block_window(uint64_t T) { return 100 * uint64_t{ceil_log2(std::max<uint64_t>(T, 1))}; }

}  // namespace bsync
