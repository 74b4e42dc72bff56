#include "bsync/prg.hpp"

#include <algorithm>

#include "bsync/errors.hpp"
#include "bsync/gf2.hpp"

namespace bsync {

namespace {

unsigned ceil_log2(uint64_t v) {
    unsigned r = 0;
    while ((uint64_t{1} << r) < v) ++r;
    return r;
}

Gf::Elem elem_from_seed(const Gf& f, const Bits& seed, size_t off, unsigned m) {
    Gf::Elem e = f.zero();
    for (unsigned j = 0; j < m; ++j)
        if (seed[off + j]) e[j / 64] |= uint64_t{1} << (j % 64);
    return e;
}

}  // namespace

GeneratorParams GeneratorParams::make(uint64_t n_out, uint64_t kappa, unsigned eps_log2) {
    if (n_out == 0 || kappa == 0) throw InvalidArgument("generator: n_out and kappa must be positive");
    if (eps_log2 > 512) throw InvalidArgument("generator: bias exponent out of range");
    return GeneratorParams{n_out, kappa, eps_log2};
}

unsigned GeneratorParams::field_deg() const {
    unsigned m = ceil_log2(std::max<uint64_t>(n_out, 2)) + eps_log2 + ceil_log2(std::max<uint64_t>(kappa, 1));
    return std::max(m, 4u);
}

unsigned GeneratorParams::seed_length() const { return 2 * field_deg(); }

int prg_eval_bit(const GeneratorParams& params, const Bits& seed, uint64_t index) {
    if (index < 1 || index > params.n_out)
        throw InvalidArgument("generator: index " + std::to_string(index) + " outside [1, " +
                              std::to_string(params.n_out) + "]");
    const unsigned m = params.field_deg();
    if (seed.size() != params.seed_length())
        throw InvalidArgument("generator: seed must be " + std::to_string(params.seed_length()) +
                              " bits, got " + std::to_string(seed.size()));
    const Gf& f = Gf::get(m);
    Gf::Elem alpha = elem_from_seed(f, seed, 0, m);
    Gf::Elem beta = elem_from_seed(f, seed, m, m);
    Gf::Elem p = f.pow_u64(alpha, index - 1);
    return f.inner_bit(p.data(), beta.data());
}

Bits prg_eval_window(const GeneratorParams& params, const Bits& seed, uint64_t start, uint64_t len) {
    if (len == 0) return Bits();
    if (start < 1 || start > params.n_out || len > params.n_out - start + 1)
        throw InvalidArgument("generator: window [" + std::to_string(start) + ", +" +
                              std::to_string(len) + ") outside [1, " + std::to_string(params.n_out) + "]");
    const unsigned m = params.field_deg();
    if (seed.size() != params.seed_length())
        throw InvalidArgument("generator: seed must be " + std::to_string(params.seed_length()) +
                              " bits, got " + std::to_string(seed.size()));
    const Gf& f = Gf::get(m);
    Gf::Elem alpha = elem_from_seed(f, seed, 0, m);
    Gf::Elem beta = elem_from_seed(f, seed, m, m);
    Gf::Elem w = f.pow_u64(alpha, start - 1);
    Bits out;
    for (uint64_t i = 0; i < len; ++i) {
        out.push_back(f.inner_bit(w.data(), beta.data()));
        if (i + 1 < len) w = f.mul(w, alpha);
    }
    return out;
}

}  // namespace bsync
