#pragma once

#include <cstdint>
#include <vector>

#include "bsync/gf2.hpp"
#include "bsync/serial.hpp"

namespace bsync {

// An m-bit set element, little-endian words (ceil(m/64) of them).
using SetElem = std::vector<uint64_t>;

// Characteristic-polynomial set reconciliation sketch: the evaluations of
// chi_V(z) = prod_{v in V} (z - v) over GF(2^(m+1)) at the 2D fixed points
// with integer codes 2^m + i, i = 0..2D-1 — points no m-bit element can
// equal, so chi never vanishes there.  Holding 2D evaluations lets the
// receiver recover V from any V' with |V delta V'| <= D, without knowing
// |V| itself.
struct SetSketch {
    unsigned m = 0;   // element width in bits
    uint64_t D = 0;   // symmetric-difference capacity
    std::vector<Gf::Elem> evals;  // size 2D, elements of GF(2^(m+1))

    uint64_t payload_bits() const { return 2 * D * (m + 1); }
    void write(ByteWriter& w) const;
    static SetSketch read(ByteReader& r);
    bool operator==(const SetSketch&) const = default;
};

SetSketch set_recon_sketch(const std::vector<SetElem>& V, unsigned m, uint64_t D);

// Recover Alice's set V from her sketch and our own set V'.  Interpolates
// the ratio chi_V/chi_V' through the 2D points, walks the extended-Euclid
// convergents for a degree-(<=D, <=D) rational fit, and accepts the first
// candidate whose numerator and denominator split into distinct valid
// element roots (denominator roots inside V') and whose implied set
// reproduces every sketch evaluation.  Throws RecoveryError otherwise.
std::vector<SetElem> set_recon_recover(const SetSketch& sketch, const std::vector<SetElem>& Vp);

}  // namespace bsync
