#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsync/bits.hpp"
#include "bsync/errors.hpp"

namespace bsync {

// Little-endian byte buffer writer for the on-disk containers.
class ByteWriter {
  public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u32(uint32_t v);
    void u64(uint64_t v);
    void bytes(const std::vector<uint8_t>& v) { buf_.insert(buf_.end(), v.begin(), v.end()); }
    void magic(const char tag[4]);
    // Bit string: u64 bit length, then the bits packed MSB-first and
    // zero-padded to a byte boundary.
    void bits(const Bits& b);
    // Section: u32 byte length followed by the payload.
    void section(const std::vector<uint8_t>& payload);

    const std::vector<uint8_t>& data() const { return buf_; }
    std::vector<uint8_t> take() { return std::move(buf_); }

  private:
    std::vector<uint8_t> buf_;
};

class ByteReader {
  public:
    explicit ByteReader(const std::vector<uint8_t>& buf) : buf_(buf) {}

    uint8_t u8();
    uint32_t u32();
    uint64_t u64();
    void expect_magic(const char tag[4]);
    Bits bits();
    std::vector<uint8_t> section();

    bool done() const { return pos_ == buf_.size(); }
    size_t remaining() const { return buf_.size() - pos_; }

  private:
    void need(size_t n) const;
    const std::vector<uint8_t>& buf_;
    size_t pos_ = 0;
};

std::vector<uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<uint8_t>& data);

std::string to_hex(const std::vector<uint8_t>& v);
std::vector<uint8_t> from_hex(const std::string& s);

}  // namespace bsync
