#pragma once

#include <cstdint>
#include <vector>

#include "bsync/bits.hpp"

namespace bsync {

// A vector of m-bit symbols carried as machine words; m <= 64.
struct SymbolVector {
    unsigned m = 0;
    std::vector<uint64_t> symbols;

    void validate() const;  // each symbol < 2^m
    bool operator==(const SymbolVector&) const = default;
};

// Systematic Reed-Solomon parity of d-1 symbols over GF(2^m): the codeword
// polynomial is data(z)*z^(d-1) + (data(z)*z^(d-1) mod g(z)) with
// g(z) = prod_{i=1..d-1} (z - x^i), so data symbols appear verbatim and the
// decoder corrects nu errors plus rho erasures whenever 2*nu + rho < d.
//
// data.size() + d - 1 must not exceed 2^m - 1, nor 2^21 when m > 21 (the
// modulus search only certifies the root order of x that far).
SymbolVector rs_parity(const SymbolVector& data, unsigned d);

// Correct `received` (data-part) in place using the parity symbols.
// Erasure positions index the concatenation data || parity, 0-based.
// Throws RecoveryError when no codeword lies within the guarantee.
SymbolVector rs_correct(const SymbolVector& received, const SymbolVector& parity, unsigned d,
                        const std::vector<size_t>& erasures = {});

}  // namespace bsync
