#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "bsync/errors.hpp"

namespace bsync {

using Rng = std::mt19937_64;

// A binary string.  One byte per bit: lengths here are desk scale (a few
// Mbit at most) so the 8x memory cost buys trivially correct indexing.
// Indexing on this type is 0-based; the protocol layers above convert from
// their 1-based interfaces.
class Bits {
  public:
    Bits() = default;
    explicit Bits(size_t n, int fill = 0) : b_(n, static_cast<uint8_t>(fill)) {}

    static Bits from_string(std::string_view s);
    // Unpacks bytes MSB-first, 8 bits per byte.
    static Bits from_bytes(const std::vector<uint8_t>& bytes);
    static Bits random(size_t n, Rng& rng);

    size_t size() const { return b_.size(); }
    bool empty() const { return b_.empty(); }
    int operator[](size_t i) const { return b_[i]; }
    void set(size_t i, int v) { b_[i] = static_cast<uint8_t>(v & 1); }
    void push_back(int v) { b_.push_back(static_cast<uint8_t>(v & 1)); }

    Bits slice(size_t pos, size_t len) const;  // 0-based [pos, pos+len)
    void append(const Bits& other) { b_.insert(b_.end(), other.b_.begin(), other.b_.end()); }

    // Value of the w-bit window starting at 0-based pos, first bit most
    // significant.  w <= 64.
    uint64_t window64(size_t pos, size_t w) const;

    // First 0-based position where pat occurs as a substring, or npos.
    size_t find(const Bits& pat, size_t from = 0) const;
    static constexpr size_t npos = static_cast<size_t>(-1);

    std::string to_string() const;
    // Packs MSB-first; the final partial byte (if any) is zero-padded.
    std::vector<uint8_t> to_bytes() const;

    bool operator==(const Bits&) const = default;

    const uint8_t* data() const { return b_.data(); }

  private:
    std::vector<uint8_t> b_;
};

Bits concat(const Bits& a, const Bits& b);

}  // namespace bsync
