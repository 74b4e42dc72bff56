#include "bsync/rs.hpp"

#include <algorithm>

#include "bsync/errors.hpp"
#include "bsync/gf2.hpp"
#include "bsync/gfpoly.hpp"

namespace bsync {

namespace {

// codeword polynomial layout: coefficients 0..d-2 hold parity, d-1 onward
// hold data, so the public erasure index (data || parity) maps as below
size_t coeff_index(size_t public_pos, size_t n_data, unsigned d) {
    return public_pos < n_data ? d - 1 + public_pos : public_pos - n_data;
}

void check_lengths(const SymbolVector& data, unsigned d) {
    if (d < 1) throw InvalidArgument("rs: design distance must be >= 1");
    if (data.m < 2 || data.m > 64) throw InvalidArgument("rs: symbol width outside [2, 64]");
    uint64_t total = data.symbols.size() + d - 1;
    uint64_t cap = data.m >= 64 ? ~uint64_t{0} : (uint64_t{1} << data.m) - 1;
    if (data.m > 21) cap = std::min(cap, uint64_t{1} << 21);
    if (total > cap)
        throw InvalidArgument("rs: length " + std::to_string(total) + " exceeds field capacity " +
                              std::to_string(cap) + " at m=" + std::to_string(data.m));
}

GfPoly generator_poly(const Gf& f, unsigned d) {
    GfPoly g = GfPoly::one(f);
    Gf::Elem pw = f.one();
    for (unsigned i = 1; i < d; ++i) {
        f.mul_x_inplace(pw.data());  // pw = x^i
        g = g.mul(GfPoly(f, {pw, f.one()}));
    }
    return g;
}

std::vector<uint64_t> codeword(const SymbolVector& data, const SymbolVector& parity, unsigned d) {
    std::vector<uint64_t> cw(data.symbols.size() + d - 1);
    for (size_t i = 0; i + 1 < d; ++i) cw[i] = parity.symbols[i];
    for (size_t i = 0; i < data.symbols.size(); ++i) cw[d - 1 + i] = data.symbols[i];
    return cw;
}

// S_j = r(x^j) for j = 1..d-1, packed as the polynomial S(z) = sum S_j z^(j-1)
GfPoly syndromes(const Gf& f, const std::vector<uint64_t>& cw, unsigned d) {
    std::vector<Gf::Elem> s(d - 1, f.zero());
    Gf::Elem point = f.one(), acc = f.zero();
    for (unsigned j = 1; j < d; ++j) {
        f.mul_x_inplace(point.data());
        uint64_t a = 0;
        for (size_t i = cw.size(); i-- > 0;) {
            f.mul(&a, &a, point.data());
            a ^= cw[i];
        }
        acc[0] = a;
        s[j - 1] = acc;
    }
    return GfPoly(f, std::move(s));
}

}  // namespace

void SymbolVector::validate() const {
    if (m < 1 || m > 64) throw InvalidArgument("symbol vector: width outside [1, 64]");
    if (m == 64) return;
    for (uint64_t s : symbols)
        if (s >> m) throw InvalidArgument("symbol vector: symbol wider than " + std::to_string(m));
}

SymbolVector rs_parity(const SymbolVector& data, unsigned d) {
    data.validate();
    check_lengths(data, d);
    SymbolVector parity{data.m, {}};
    if (d == 1) return parity;
    const Gf& f = Gf::get(data.m);
    GfPoly g = generator_poly(f, d);
    // remainder of data(z) * z^(d-1) modulo g
    std::vector<Gf::Elem> shifted(data.symbols.size() + d - 1, f.zero());
    for (size_t i = 0; i < data.symbols.size(); ++i) shifted[d - 1 + i][0] = data.symbols[i];
    GfPoly rem = GfPoly(f, std::move(shifted)).mod(g);
    parity.symbols.assign(d - 1, 0);
    for (unsigned i = 0; i + 1 < d; ++i) parity.symbols[i] = rem.coeff(i)[0];
    return parity;
}

SymbolVector rs_correct(const SymbolVector& received, const SymbolVector& parity, unsigned d,
                        const std::vector<size_t>& erasures) {
    received.validate();
    parity.validate();
    check_lengths(received, d);
    if (parity.m != received.m) throw InvalidArgument("rs: data/parity width mismatch");
    if (parity.symbols.size() + 1 != d) throw InvalidArgument("rs: parity length must be d-1");
    if (d == 1) return received;

    const size_t n_data = received.symbols.size();
    const size_t N = n_data + d - 1;
    std::vector<size_t> eras = erasures;
    std::sort(eras.begin(), eras.end());
    eras.erase(std::unique(eras.begin(), eras.end()), eras.end());
    for (size_t e : eras)
        if (e >= N) throw InvalidArgument("rs: erasure position " + std::to_string(e) + " out of range");
    const size_t rho = eras.size();
    if (rho > d - 1) throw RecoveryError("rs: " + std::to_string(rho) + " erasures exceed capacity d-1");

    const Gf& f = Gf::get(received.m);
    std::vector<uint64_t> cw = codeword(received, parity, d);
    GfPoly S = syndromes(f, cw, d);
    if (S.is_zero() && rho == 0) return received;
    if (S.is_zero()) return received;  // erasure fill-in already consistent

    // erasure locator Gamma(z) = prod (1 - X_e z)
    GfPoly gamma = GfPoly::one(f);
    for (size_t e : eras) {
        Gf::Elem X = f.pow_u64(f.x(), coeff_index(e, n_data, d));
        gamma = gamma.mul(GfPoly(f, {f.one(), X}));
    }

    // modified syndromes, then Euclid convergents for the error locator:
    // stop at the first remainder with 2*deg < d-1+rho
    GfPoly T = S.mul(gamma).divmod(GfPoly::monomial(f, d - 1, f.one())).second;
    GfPoly lambda = GfPoly::one(f);
    GfPoly omega(f);
    if (!T.is_zero()) {
        GfPoly r_prev = GfPoly::monomial(f, d - 1, f.one());
        GfPoly r_cur = T;
        GfPoly u_prev(f), u_cur = GfPoly::one(f);
        while (!r_cur.is_zero() && 2 * static_cast<size_t>(r_cur.deg()) >= d - 1 + rho) {
            auto [q, rem] = r_prev.divmod(r_cur);
            GfPoly u_next = u_prev.add(q.mul(u_cur));
            r_prev = std::move(r_cur);
            r_cur = std::move(rem);
            u_prev = std::move(u_cur);
            u_cur = std::move(u_next);
        }
        Gf::Elem at0 = u_cur.coeff(0);
        if (f.is_zero(at0.data())) throw RecoveryError("rs: uncorrectable (locator has zero constant)");
        Gf::Elem norm = f.inv(at0);
        lambda = u_cur.mul_scalar(norm);
        omega = r_cur.mul_scalar(norm);
    }
    size_t nu = static_cast<size_t>(std::max(lambda.deg(), 0));
    if (2 * nu + rho > d - 1) throw RecoveryError("rs: uncorrectable (locator degree too high)");

    GfPoly psi = gamma.mul(lambda);
    if (omega.deg() >= psi.deg() && !omega.is_zero())
        throw RecoveryError("rs: uncorrectable (evaluator degree too high)");

    // Chien scan over all positions; every root of psi must land on one
    size_t psi_deg = static_cast<size_t>(std::max(psi.deg(), 0));
    std::vector<size_t> locs;
    GfPoly psi_d = psi.derivative();
    Gf::Elem inv_x = f.inv(f.x());
    Gf::Elem cur = f.one();
    std::vector<uint64_t> fix(N, 0);
    for (size_t i = 0; i < N; ++i) {
        if (f.is_zero(psi.eval(cur).data())) {
            Gf::Elem dv = psi_d.eval(cur);
            if (f.is_zero(dv.data())) throw RecoveryError("rs: uncorrectable (repeated locator root)");
            Gf::Elem mag = f.mul(omega.eval(cur), f.inv(dv));
            fix[i] = mag[0];
            locs.push_back(i);
        }
        cur = f.mul(cur, inv_x);
    }
    if (locs.size() != psi_deg) throw RecoveryError("rs: uncorrectable (locator roots off-support)");

    for (size_t i : locs) cw[i] ^= fix[i];
    if (!syndromes(f, cw, d).is_zero()) throw RecoveryError("rs: uncorrectable (syndrome recheck failed)");

    SymbolVector out{received.m, {}};
    out.symbols.assign(cw.begin() + (d - 1), cw.end());
    return out;
}

}  // namespace bsync
