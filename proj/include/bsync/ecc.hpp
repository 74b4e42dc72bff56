#pragma once

#include <cstdint>
#include <vector>

#include "bsync/bits.hpp"

namespace bsync {

// Which document-exchange sketch the codeword carries for the masked
// message: the halving-levels sketch or the window-distinct two-stage one.
enum class SketchBackend : uint8_t { Levels = 1, Bdist = 2 };

// The armor needs room for roughly (n/log n + parity) indexed chunks, so
// very short messages cannot host it.
inline constexpr uint64_t kCodecMinLength = 256;

// Everything below is a pure function of (n, k, t, backend), so the
// decoder re-derives the exact same layout without seeing the message.
struct CodecParams {
    uint64_t n = 0, k = 0, t = 0;
    SketchBackend backend = SketchBackend::Levels;

    uint64_t ln = 0;     // ceil(log2 n)
    uint64_t l_buf = 0;  // buffer length 2*ln; buffer = 0^(l_buf-1) 1
    uint64_t idx_w = 0;  // chunk index header width, ln - 2
    uint64_t payload_w = 0;  // chunk payload width, ln
    uint64_t chunk_bits = 0;  // idx_w + payload_w, kept below l_buf - 1
    uint64_t B = 0;           // distinctness window of the masked message

    uint64_t k_in = 0, t_in = 0;  // inflated budgets for the inner sketch
    bool pass_through = false;    // armor carries the masked message itself
    uint64_t payload_bytes = 0;   // inner sketch bytes, or ceil(n/8)
    uint64_t sk_bits = 0;         // framed sketch bits fed to the armor

    uint64_t data_chunks = 0, chunk_rs_d = 0, total_chunks = 0;

    uint64_t redundancy_bits() const { return total_chunks * (l_buf + chunk_bits); }
    Bits buffer_pattern() const;

    bool operator==(const CodecParams&) const = default;
};

CodecParams make_codec_params(uint64_t n, uint64_t k, uint64_t t, SketchBackend backend);

// The n-bit masking stream for one seed: the XOR of two powering-generator
// streams, one biased low enough to kill buffer occurrences, the other to
// make every distinctness window pair collide with vanishing probability.
Bits codec_mask(const CodecParams& p, uint64_t seed);

// First counter whose mask turns msg into a buffer-free window-distinct
// string.  Deterministic; throws after a generous attempt cap (the success
// probability per attempt is overwhelming, so a hit means broken inputs).
uint64_t find_good_seed(const Bits& msg, const CodecParams& p);

struct MaskedMessage {
    Bits msg_p;
    uint64_t seed = 0;
};
MaskedMessage mask_message(const Bits& msg, const CodecParams& p);

// The framed sketch the armor protects: mode byte, seed, payload length,
// then the inner sketch bytes (or the masked message itself when
// pass-through).  Byte-aligned; length is always p.sk_bits.
Bits sketch_bits(const Bits& msg_p, uint64_t seed, const CodecParams& p);

// One recognized buffer: the 0-based position of its closing 1 plus the
// chunk_bits bits that follow in the raw string (short at the string end).
struct BufferHit {
    uint64_t end_pos = 0;
    Bits chunk;
};
struct ScanResult {
    std::vector<BufferHit> hits;
    Bits message_part;  // everything not covered by a buffer or its chunk
};
ScanResult scan_buffers(const Bits& c, const CodecParams& p);

// Indexed-chunk armor: the framed sketch is cut into payload_w-bit symbols,
// extended with chunk-level Reed-Solomon parity, and every symbol is sent
// as buffer + index header + payload.  Indices let the decoder place
// surviving chunks after transpositions; missing or contested indices
// become erasures.
Bits armor_encode(const Bits& sk, const CodecParams& p);

struct ArmorStats {
    uint64_t buffers_found = 0, short_chunks = 0, spurious_index = 0;
    uint64_t chunk_erasures = 0, chunk_conflicts = 0;
    uint64_t chunk_errors = 0;  // filled-but-wrong slots; needs truth
};
Bits armor_decode(const std::vector<BufferHit>& hits, const CodecParams& p,
                  const Bits* true_sk = nullptr, ArmorStats* stats = nullptr);

// msg -> masked message followed by the armored sketch.
Bits encode_ecc(const Bits& msg, uint64_t k, uint64_t t, SketchBackend backend);

// Exact inverse for any corruption within the (k, t) block-edit budget.
// Throws RecoveryError instead of returning a silently wrong message.
Bits decode_ecc(const Bits& c, uint64_t n, uint64_t k, uint64_t t, SketchBackend backend);

Bits decode_ecc_instrumented(const Bits& c, uint64_t n, uint64_t k, uint64_t t,
                             SketchBackend backend, const Bits* true_sk = nullptr,
                             ArmorStats* stats = nullptr);

// Same pipelines against a caller-supplied layout; both ends must use the
// byte-identical CodecParams (normally from make_codec_params — hand-built
// layouts are for harnesses that pin a mode).
Bits encode_ecc_with(const Bits& msg, const CodecParams& p);
Bits decode_ecc_with(const Bits& c, const CodecParams& p, const Bits* true_sk = nullptr,
                     ArmorStats* stats = nullptr);

// Codeword file container: magic, the four layout parameters, then the
// (possibly corrupted, possibly length-changed) bitstream.
std::vector<uint8_t> serialize_codeword(const Bits& c, uint64_t n, uint64_t k, uint64_t t,
                                        SketchBackend backend);
struct ParsedCodeword {
    uint64_t n = 0, k = 0, t = 0;
    SketchBackend backend = SketchBackend::Levels;
    Bits bits;
};
ParsedCodeword parse_codeword(const std::vector<uint8_t>& buf);

}  // namespace bsync
