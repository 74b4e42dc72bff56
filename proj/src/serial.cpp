#include "bsync/serial.hpp"

#include <cstring>
#include <fstream>

namespace bsync {

void ByteWriter::u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::magic(const char tag[4]) {
    buf_.insert(buf_.end(), tag, tag + 4);
}

void ByteWriter::bits(const Bits& b) {
    u64(b.size());
    bytes(b.to_bytes());
}

void ByteWriter::section(const std::vector<uint8_t>& payload) {
    if (payload.size() > UINT32_MAX) throw InvalidArgument("section too large");
    u32(static_cast<uint32_t>(payload.size()));
    bytes(payload);
}

void ByteReader::need(size_t n) const {
    if (pos_ + n > buf_.size()) throw FormatError("container truncated");
}

uint8_t ByteReader::u8() {
    need(1);
    return buf_[pos_++];
}

uint32_t ByteReader::u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
}

uint64_t ByteReader::u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
}

void ByteReader::expect_magic(const char tag[4]) {
    need(4);
    if (std::memcmp(buf_.data() + pos_, tag, 4) != 0)
        throw FormatError(std::string("bad magic, expected ") + std::string(tag, 4));
    pos_ += 4;
}

Bits ByteReader::bits() {
    uint64_t nbits = u64();
    size_t nbytes = static_cast<size_t>((nbits + 7) / 8);
    need(nbytes);
    std::vector<uint8_t> packed(buf_.begin() + static_cast<ptrdiff_t>(pos_),
                                buf_.begin() + static_cast<ptrdiff_t>(pos_ + nbytes));
    pos_ += nbytes;
    Bits all = Bits::from_bytes(packed);
    return all.slice(0, static_cast<size_t>(nbits));
}

std::vector<uint8_t> ByteReader::section() {
    uint32_t len = u32();
    need(len);
    std::vector<uint8_t> out(buf_.begin() + static_cast<ptrdiff_t>(pos_),
                             buf_.begin() + static_cast<ptrdiff_t>(pos_ + len));
    pos_ += len;
    return out;
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for reading: " + path);
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error("read failed: " + path);
    return data;
}

void write_file_bytes(const std::string& path, const std::vector<uint8_t>& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("write failed: " + path);
}

std::string to_hex(const std::vector<uint8_t>& v) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(v.size() * 2);
    for (uint8_t b : v) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

static int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw FormatError(std::string("bad hex character '") + c + "'");
}

std::vector<uint8_t> from_hex(const std::string& s) {
    if (s.size() % 2) throw FormatError("odd-length hex string");
    std::vector<uint8_t> out(s.size() / 2);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<uint8_t>(hex_val(s[2 * i]) << 4 | hex_val(s[2 * i + 1]));
    return out;
}

}  // namespace bsync
