#include "bsync/bits.hpp"

#include <algorithm>
#include <cstring>

namespace bsync {

Bits Bits::from_string(std::string_view s) {
    Bits out;
    out.b_.reserve(s.size());
    for (char c : s) {
        if (c == '0' || c == '1') {
            out.b_.push_back(static_cast<uint8_t>(c - '0'));
        } else if (c == ' ' || c == '_') {
            continue;  // grouping characters are ignored
        } else {
            throw InvalidArgument(std::string("bit string: unexpected character '") + c + "'");
        }
    }
    return out;
}

Bits Bits::from_bytes(const std::vector<uint8_t>& bytes) {
    Bits out;
    out.b_.reserve(bytes.size() * 8);
    for (uint8_t by : bytes)
        for (int i = 7; i >= 0; --i) out.b_.push_back((by >> i) & 1);
    return out;
}

Bits Bits::random(size_t n, Rng& rng) {
    Bits out(n);
    uint64_t w = 0;
    for (size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) w = rng();
        out.b_[i] = static_cast<uint8_t>((w >> (i % 64)) & 1);
    }
    return out;
}

Bits Bits::slice(size_t pos, size_t len) const {
    if (pos + len > b_.size()) throw InvalidArgument("Bits::slice out of range");
    Bits out;
    out.b_.assign(b_.begin() + static_cast<ptrdiff_t>(pos),
                  b_.begin() + static_cast<ptrdiff_t>(pos + len));
    return out;
}

uint64_t Bits::window64(size_t pos, size_t w) const {
    if (w > 64 || pos + w > b_.size()) throw InvalidArgument("Bits::window64 out of range");
    uint64_t v = 0;
    for (size_t i = 0; i < w; ++i) v = (v << 1) | b_[pos + i];
    return v;
}

size_t Bits::find(const Bits& pat, size_t from) const {
    if (pat.empty()) return from <= size() ? from : npos;
    if (pat.size() > size()) return npos;
    for (size_t i = from; i + pat.size() <= size(); ++i) {
        if (std::memcmp(b_.data() + i, pat.b_.data(), pat.size()) == 0) return i;
    }
    return npos;
}

std::string Bits::to_string() const {
    std::string s(b_.size(), '0');
    for (size_t i = 0; i < b_.size(); ++i) s[i] = static_cast<char>('0' + b_[i]);
    return s;
}

std::vector<uint8_t> Bits::to_bytes() const {
    std::vector<uint8_t> out((b_.size() + 7) / 8, 0);
    for (size_t i = 0; i < b_.size(); ++i)
        if (b_[i]) out[i / 8] |= static_cast<uint8_t>(0x80u >> (i % 8));
    return out;
}

Bits concat(const Bits& a, const Bits& b) {
    Bits out = a;
    out.append(b);
    return out;
}

}  // namespace bsync
